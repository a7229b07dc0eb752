//! Digital maps, homotopies and the classifiers built on the map-graph
//! engine.

mod cert;
mod classify;
pub mod engine;

pub use classify::{
    classify_homotopy_type_2d, find_isomorphism, homotopic, homotopy_equivalent, is_contractible,
    is_reducible, is_rigid, reduce_to_core, Core, CoreStatus, HomotopyType, Reduction,
};
pub(crate) use classify::contractibility_from_core;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{DigitalImage, Point};
use crate::space::{is_continuous_table, FiniteGraph};

/// Search limits shared by every engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of maps visited by one map-graph search.
    pub max_maps: usize,
    /// Maximum number of nodes expanded by one constraint search.
    pub max_nodes: usize,
}

impl Budget {
    pub const DEFAULT_MAPS: usize = 5_000_000;
    pub const DEFAULT_NODES: usize = 10_000_000;

    pub fn with_maps(mut self, max_maps: usize) -> Self {
        self.max_maps = max_maps;
        self
    }

    pub fn with_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_maps: Self::DEFAULT_MAPS,
            max_nodes: Self::DEFAULT_NODES,
        }
    }
}

/// Record of a search that ran to completion.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchLog {
    pub visited: usize,
    pub detail: String,
}

impl SearchLog {
    pub fn new(visited: usize, detail: impl Into<String>) -> Self {
        SearchLog {
            visited,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for SearchLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (visited {})", self.detail, self.visited)
    }
}

/// A search stopped by its budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exhaustion {
    pub what: String,
    pub visited: usize,
    pub limit: usize,
}

impl fmt::Display for Exhaustion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "budget exhausted while {} ({} of {})",
            self.what, self.visited, self.limit
        )
    }
}

/// A definite answer with its evidence, or an explicit unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriState<Y, N = SearchLog> {
    Yes(Y),
    No(N),
    Unknown(Exhaustion),
}

impl<Y, N> TriState<Y, N> {
    pub fn is_yes(&self) -> bool {
        matches!(self, TriState::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, TriState::No(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, TriState::Unknown(_))
    }

    /// `Some(true)` for yes, `Some(false)` for no.
    pub fn verdict(&self) -> Option<bool> {
        match self {
            TriState::Yes(_) => Some(true),
            TriState::No(_) => Some(false),
            TriState::Unknown(_) => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TriState::Yes(_) => "yes",
            TriState::No(_) => "no",
            TriState::Unknown(_) => "unknown",
        }
    }

    pub fn yes(self) -> Option<Y> {
        match self {
            TriState::Yes(y) => Some(y),
            _ => None,
        }
    }

    pub fn no(self) -> Option<N> {
        match self {
            TriState::No(n) => Some(n),
            _ => None,
        }
    }
}

fn same_image(a: &Arc<DigitalImage>, b: &Arc<DigitalImage>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A map between digital images, stored as a table of target indices in
/// canonical source order.
#[derive(Clone, PartialEq, Eq)]
pub struct DigitalMap {
    source: Arc<DigitalImage>,
    target: Arc<DigitalImage>,
    table: Vec<usize>,
}

impl fmt::Debug for DigitalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DigitalMap").field("table", &self.table).finish()
    }
}

impl DigitalMap {
    pub fn new(
        source: Arc<DigitalImage>,
        target: Arc<DigitalImage>,
        table: Vec<usize>,
    ) -> Result<Self> {
        if table.len() != source.len() {
            return Err(Error::Input(format!(
                "map table has {} entries for {} source points",
                table.len(),
                source.len()
            )));
        }
        if let Some(&v) = table.iter().find(|&&v| v >= target.len()) {
            return Err(Error::Input(format!(
                "map value {v} out of range for {} target points",
                target.len()
            )));
        }
        Ok(DigitalMap {
            source,
            target,
            table,
        })
    }

    /// Builds a map from a point function; every value must be a target point.
    pub fn from_fn(
        source: Arc<DigitalImage>,
        target: Arc<DigitalImage>,
        f: impl Fn(&Point) -> Point,
    ) -> Result<Self> {
        let table = source
            .points()
            .iter()
            .map(|p| {
                let q = f(p);
                target
                    .index_of(&q)
                    .ok_or_else(|| Error::Input(format!("{q} is not a target point")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, table)
    }

    pub fn identity(x: Arc<DigitalImage>) -> Self {
        let table = (0..x.len()).collect();
        DigitalMap {
            source: x.clone(),
            target: x,
            table,
        }
    }

    pub fn constant(source: Arc<DigitalImage>, target: Arc<DigitalImage>, value: usize) -> Self {
        assert!(value < target.len());
        let table = vec![value; source.len()];
        DigitalMap {
            source,
            target,
            table,
        }
    }

    /// Inclusion of a subimage.
    pub fn inclusion(sub: Arc<DigitalImage>, sup: Arc<DigitalImage>) -> Result<Self> {
        Self::from_fn(sub, sup, |p| p.clone())
    }

    pub fn source(&self) -> &Arc<DigitalImage> {
        &self.source
    }

    pub fn target(&self) -> &Arc<DigitalImage> {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn apply_point(&self, p: &Point) -> Option<&Point> {
        self.source.index_of(p).map(|i| self.target.point(self.table[i]))
    }

    pub fn is_continuous(&self) -> bool {
        is_continuous_table(&*self.source, &*self.target, &self.table)
    }

    pub fn is_identity(&self) -> bool {
        same_image(&self.source, &self.target) && self.table.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.len()];
        for &v in &self.table {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &DigitalMap) -> Result<DigitalMap> {
        if !same_image(&self.target, &then.source) {
            return Err(Error::Input("composition of maps with mismatched images".into()));
        }
        Ok(DigitalMap {
            source: self.source.clone(),
            target: then.target.clone(),
            table: self.table.iter().map(|&v| then.table[v]).collect(),
        })
    }

    /// Pointwise equal-or-adjacent.
    pub fn close_to(&self, other: &DigitalMap) -> bool {
        self.table
            .iter()
            .zip(&other.table)
            .all(|(&a, &b)| self.target.adjacent_or_equal(a, b))
    }
}

/// Whether adjacent source points land on equal or adjacent target points.
pub fn is_continuous(f: &DigitalMap) -> bool {
    f.is_continuous()
}

/// A digital homotopy: a sequence of continuous maps with consecutive
/// stages pointwise equal or adjacent.
#[derive(Clone, PartialEq, Eq)]
pub struct Homotopy {
    source: Arc<DigitalImage>,
    target: Arc<DigitalImage>,
    stages: Vec<Vec<usize>>,
}

impl fmt::Debug for Homotopy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Homotopy").field("stages", &self.stages).finish()
    }
}

impl Homotopy {
    pub fn new(
        source: Arc<DigitalImage>,
        target: Arc<DigitalImage>,
        stages: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Input("a homotopy needs at least one stage".into()));
        }
        for s in &stages {
            DigitalMap::new(source.clone(), target.clone(), s.clone())?;
        }
        Ok(Homotopy {
            source,
            target,
            stages,
        })
    }

    /// The one-stage homotopy from `f` to itself.
    pub fn constant(f: &DigitalMap) -> Self {
        Homotopy {
            source: f.source.clone(),
            target: f.target.clone(),
            stages: vec![f.table.clone()],
        }
    }

    pub fn source(&self) -> &Arc<DigitalImage> {
        &self.source
    }

    pub fn target(&self) -> &Arc<DigitalImage> {
        &self.target
    }

    pub fn stages(&self) -> &[Vec<usize>] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Number of steps, one less than the number of stages.
    pub fn steps(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stage(&self, i: usize) -> DigitalMap {
        DigitalMap {
            source: self.source.clone(),
            target: self.target.clone(),
            table: self.stages[i].clone(),
        }
    }

    pub fn start(&self) -> DigitalMap {
        self.stage(0)
    }

    pub fn end(&self) -> DigitalMap {
        self.stage(self.stages.len() - 1)
    }

    /// Re-checks every stage and every step.
    pub fn verify(&self) -> bool {
        let n = self.source.len();
        let t = self.target.len();
        self.stages.iter().all(|s| {
            s.len() == n
                && s.iter().all(|&v| v < t)
                && is_continuous_table(&*self.source, &*self.target, s)
        }) && self.stages.windows(2).all(|w| {
            w[0].iter()
                .zip(&w[1])
                .all(|(&a, &b)| self.target.adjacent_or_equal(a, b))
        })
    }

    /// Checks the homotopy and its endpoints.
    pub fn verify_between(&self, from: &DigitalMap, to: &DigitalMap) -> bool {
        self.verify()
            && same_image(&self.source, &from.source)
            && same_image(&self.target, &from.target)
            && self.stages[0] == from.table
            && self.stages[self.stages.len() - 1] == to.table
    }

    pub fn reversed(&self) -> Homotopy {
        let mut h = self.clone();
        h.stages.reverse();
        h
    }

    /// Runs `self` then `next`; the end of `self` must be the start of `next`.
    pub fn concat(&self, next: &Homotopy) -> Result<Homotopy> {
        if !same_image(&self.source, &next.source)
            || !same_image(&self.target, &next.target)
            || self.stages.last() != next.stages.first()
        {
            return Err(Error::Input("homotopies do not meet".into()));
        }
        let mut h = self.clone();
        h.stages.extend(next.stages[1..].iter().cloned());
        Ok(h)
    }

    /// `g ∘ H`.
    pub fn post_compose(&self, g: &DigitalMap) -> Result<Homotopy> {
        if !same_image(&self.target, &g.source) {
            return Err(Error::Input("post-composition with mismatched images".into()));
        }
        Ok(Homotopy {
            source: self.source.clone(),
            target: g.target.clone(),
            stages: self
                .stages
                .iter()
                .map(|s| s.iter().map(|&v| g.table[v]).collect())
                .collect(),
        })
    }

    /// `H ∘ f`.
    pub fn pre_compose(&self, f: &DigitalMap) -> Result<Homotopy> {
        if !same_image(&f.target, &self.source) {
            return Err(Error::Input("pre-composition with mismatched images".into()));
        }
        Ok(Homotopy {
            source: f.source.clone(),
            target: self.target.clone(),
            stages: self
                .stages
                .iter()
                .map(|s| f.table.iter().map(|&v| s[v]).collect())
                .collect(),
        })
    }
}

/// Witness that `forward: X -> Y` and `backward: Y -> X` are mutually
/// inverse up to homotopy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceCertificate {
    pub forward: DigitalMap,
    pub backward: DigitalMap,
    /// `backward ∘ forward ⇒ id_X`.
    pub h1: Homotopy,
    /// `forward ∘ backward ⇒ id_Y`.
    pub h2: Homotopy,
}

impl EquivalenceCertificate {
    pub fn identity(x: Arc<DigitalImage>) -> Self {
        let id = DigitalMap::identity(x);
        EquivalenceCertificate {
            h1: Homotopy::constant(&id),
            h2: Homotopy::constant(&id),
            forward: id.clone(),
            backward: id,
        }
    }

    /// Certificate for an isomorphism with its inverse.
    pub fn from_isomorphism(forward: DigitalMap, backward: DigitalMap) -> Result<Self> {
        let gf = forward.then(&backward)?;
        let fg = backward.then(&forward)?;
        if !gf.is_identity() || !fg.is_identity() {
            return Err(Error::Input("maps are not mutually inverse".into()));
        }
        Ok(EquivalenceCertificate {
            h1: Homotopy::constant(&gf),
            h2: Homotopy::constant(&fg),
            forward,
            backward,
        })
    }

    pub fn source(&self) -> &Arc<DigitalImage> {
        self.forward.source()
    }

    pub fn target(&self) -> &Arc<DigitalImage> {
        self.forward.target()
    }

    /// Recomputes both composites by table lookup and checks both homotopies.
    pub fn verify(&self) -> bool {
        let (Ok(gf), Ok(fg)) = (
            self.forward.then(&self.backward),
            self.backward.then(&self.forward),
        ) else {
            return false;
        };
        self.forward.is_continuous()
            && self.backward.is_continuous()
            && self
                .h1
                .verify_between(&gf, &DigitalMap::identity(self.source().clone()))
            && self
                .h2
                .verify_between(&fg, &DigitalMap::identity(self.target().clone()))
    }

    pub fn inverse(&self) -> Self {
        EquivalenceCertificate {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
            h1: self.h2.clone(),
            h2: self.h1.clone(),
        }
    }

    /// `X ≃ Y` followed by `Y ≃ Z` gives `X ≃ Z`.
    pub fn compose(&self, next: &EquivalenceCertificate) -> Result<Self> {
        let (f1, g1) = (&self.forward, &self.backward);
        let (f2, g2) = (&next.forward, &next.backward);
        let forward = f1.then(f2)?;
        let backward = g2.then(g1)?;
        let h1 = next
            .h1
            .pre_compose(f1)?
            .post_compose(g1)?
            .concat(&self.h1)?;
        let h2 = self
            .h2
            .pre_compose(g2)?
            .post_compose(f2)?
            .concat(&next.h2)?;
        Ok(EquivalenceCertificate {
            forward,
            backward,
            h1,
            h2,
        })
    }
}

pub use cert::{parse_homotopy, serialize_homotopy};
