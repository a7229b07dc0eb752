use std::ops::ControlFlow;
use std::sync::Arc;

use super::engine::{Exploration, MapSpace};
use super::{Budget, DigitalMap, EquivalenceCertificate, Exhaustion, Homotopy, SearchLog, TriState};
use crate::error::{Error, Result};
use crate::lattice::{detect_simple_closed_curve, generate_curve, AdjacencyKind, DigitalImage};
use crate::space::FiniteGraph;

/// A certified homotopy equivalence between an image and a strictly smaller
/// subimage of it.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub image: Arc<DigitalImage>,
    /// From the identity to an idempotent map whose image is `image`.
    pub homotopy: Homotopy,
    pub certificate: EquivalenceCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreStatus {
    /// No map reachable from the identity of the core is non-surjective.
    Irreducible(SearchLog),
    Unknown(Exhaustion),
}

/// The end of a chain of certified reductions.
#[derive(Debug, Clone)]
pub struct Core {
    pub image: Arc<DigitalImage>,
    /// Equivalence from the input to `image`.
    pub certificate: EquivalenceCertificate,
    pub status: CoreStatus,
    pub reductions: usize,
}

#[derive(Debug, Clone)]
pub enum HomotopyType {
    Point {
        contraction: Homotopy,
    },
    Cycle {
        m: usize,
        /// Equivalence from the input to the generated `C_m`.
        certificate: EquivalenceCertificate,
    },
    OtherOrUnknown {
        core_points: Option<usize>,
        evidence: String,
    },
}

fn require_connected(x: &DigitalImage) -> Result<()> {
    if x.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

/// A point `x` whose open neighborhood lies in the closed neighborhood of an
/// adjacent `y`; returns `(x, y)`.
fn find_fold(x: &DigitalImage) -> Option<(usize, usize)> {
    (0..x.len()).find_map(|a| {
        x.neighbors(a)
            .iter()
            .copied()
            .find(|&b| x.neighbors(a).iter().all(|&c| x.adjacent_or_equal(b, c)))
            .map(|b| (a, b))
    })
}

/// Turns a chain `id ⇒ f` with `f` non-surjective into a reduction onto the
/// image of the first idempotent power of `f`.
fn reduction_from_chain(x: &Arc<DigitalImage>, chain: Vec<Vec<usize>>) -> Result<Reduction> {
    let h = Homotopy::new(x.clone(), x.clone(), chain)?;
    let f = h.end().table().to_vec();
    let mut power = f.clone();
    let mut full = h.clone();
    loop {
        let squared: Vec<usize> = power.iter().map(|&v| power[v]).collect();
        if squared == power {
            break;
        }
        let next = DigitalMap::new(x.clone(), x.clone(), power.clone())?;
        full = full.concat(&h.post_compose(&next)?)?;
        power = power.iter().map(|&v| f[v]).collect();
    }
    debug_assert_eq!(full.end().table(), power.as_slice());

    let mut kept: Vec<usize> = power.clone();
    kept.sort_unstable();
    kept.dedup();
    let y = Arc::new(x.subimage(&kept));
    let r_table = power
        .iter()
        .map(|&v| kept.binary_search(&v).unwrap())
        .collect();
    let r = DigitalMap::new(x.clone(), y.clone(), r_table)?;
    let i = DigitalMap::inclusion(y.clone(), x.clone())?;
    let certificate = EquivalenceCertificate {
        h1: full.reversed(),
        h2: Homotopy::constant(&i.then(&r)?),
        forward: r,
        backward: i,
    };
    if !certificate.verify() {
        return Err(Error::Synthesis("reduction certificate failed verification".into()));
    }
    Ok(Reduction {
        image: y,
        homotopy: full,
        certificate,
    })
}

enum Step {
    Reduced(Reduction),
    Irreducible(SearchLog),
    Unknown(Exhaustion),
}

fn reduce_once(x: &Arc<DigitalImage>, budget: &Budget) -> Result<Step> {
    let n = x.len();
    if n == 1 {
        return Ok(Step::Irreducible(SearchLog::new(1, "one-point image")));
    }
    if let Some((a, b)) = find_fold(x) {
        let id: Vec<usize> = (0..n).collect();
        let mut r = id.clone();
        r[a] = b;
        return reduction_from_chain(x, vec![id, r]).map(Step::Reduced);
    }
    let space = MapSpace::new(&**x, &**x);
    let id: Vec<usize> = (0..n).collect();
    let mut hit = vec![0u32; n];
    let mut stamp = 0u32;
    let res = space.explore(&id, budget.max_maps, &mut |g| {
        stamp += 1;
        let mut distinct = 0;
        for &v in g {
            if hit[v] != stamp {
                hit[v] = stamp;
                distinct += 1;
            }
        }
        distinct < n
    });
    Ok(match res {
        Exploration::Found(chain) => Step::Reduced(reduction_from_chain(x, chain)?),
        Exploration::Exhausted { visited } => Step::Irreducible(SearchLog::new(
            visited,
            format!("all maps reachable from the identity of a {n}-point image are surjective"),
        )),
        Exploration::Budget { visited } => Step::Unknown(Exhaustion {
            what: format!("searching for a non-surjective map homotopic to the identity ({n} points)"),
            visited,
            limit: budget.max_maps,
        }),
    })
}

/// Whether `X` is homotopy equivalent to an image with fewer points, decided
/// by searching the identity component for a non-surjective map.
pub fn is_reducible(x: &DigitalImage, budget: &Budget) -> Result<TriState<Reduction>> {
    require_connected(x)?;
    let x = Arc::new(x.clone());
    Ok(match reduce_once(&x, budget)? {
        Step::Reduced(r) => TriState::Yes(r),
        Step::Irreducible(log) => TriState::No(log),
        Step::Unknown(e) => TriState::Unknown(e),
    })
}

/// Reduces until irreducible, composing the certificates.
pub fn reduce_to_core(x: &DigitalImage, budget: &Budget) -> Result<Core> {
    require_connected(x)?;
    let start = Arc::new(x.clone());
    let mut certificate = EquivalenceCertificate::identity(start.clone());
    let mut current = start;
    let mut reductions = 0;
    loop {
        match reduce_once(&current, budget)? {
            Step::Reduced(r) => {
                certificate = certificate.compose(&r.certificate)?;
                current = r.image;
                reductions += 1;
            }
            Step::Irreducible(log) => {
                return Ok(Core {
                    image: current,
                    certificate,
                    status: CoreStatus::Irreducible(log),
                    reductions,
                })
            }
            Step::Unknown(e) => {
                return Ok(Core {
                    image: current,
                    certificate,
                    status: CoreStatus::Unknown(e),
                    reductions,
                })
            }
        }
    }
}

/// Contractibility with a homotopy from the identity to a constant map as
/// the certificate. A "no" comes from an irreducible core with more than
/// one point.
pub fn is_contractible(x: &DigitalImage, budget: &Budget) -> Result<TriState<Homotopy>> {
    let core = reduce_to_core(x, budget)?;
    Ok(contractibility_from_core(&core))
}

pub(crate) fn contractibility_from_core(core: &Core) -> TriState<Homotopy> {
    match &core.status {
        CoreStatus::Irreducible(_) if core.image.len() == 1 => {
            TriState::Yes(core.certificate.h1.reversed())
        }
        CoreStatus::Irreducible(log) => TriState::No(SearchLog::new(
            log.visited,
            format!(
                "irreducible core with {} points; {}",
                core.image.len(),
                log.detail
            ),
        )),
        CoreStatus::Unknown(e) => TriState::Unknown(e.clone()),
    }
}

/// Rigid iff the identity has no other map pointwise close to it; a "no"
/// carries the one-step homotopy.
pub fn is_rigid(x: &DigitalImage, _budget: &Budget) -> Result<TriState<SearchLog, Homotopy>> {
    require_connected(x)?;
    let n = x.len();
    let space = MapSpace::new(x, x);
    let id: Vec<usize> = (0..n).collect();
    let mut other = None;
    let mut seen = 0;
    let _ = space.for_each_neighbor(&id, &mut |g| {
        seen += 1;
        if g != id.as_slice() {
            other = Some(g.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    let arc = Arc::new(x.clone());
    Ok(match other {
        Some(g) => TriState::No(Homotopy::new(arc.clone(), arc, vec![id, g])?),
        None => TriState::Yes(SearchLog::new(
            seen,
            "the identity has no neighbor in the map graph",
        )),
    })
}

/// Breadth-first search from `f` for `g`.
pub fn homotopic(f: &DigitalMap, g: &DigitalMap, budget: &Budget) -> Result<TriState<Homotopy>> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(Error::Input("maps have different source or target".into()));
    }
    if !f.is_continuous() || !g.is_continuous() {
        return Err(Error::Input("homotopy is only defined between continuous maps".into()));
    }
    let space = MapSpace::new(&**f.source(), &**f.target());
    let goal = g.table();
    let res = space.explore(f.table(), budget.max_maps, &mut |h| h == goal);
    Ok(match res {
        Exploration::Found(chain) => {
            TriState::Yes(Homotopy::new(f.source().clone(), f.target().clone(), chain)?)
        }
        Exploration::Exhausted { visited } => TriState::No(SearchLog::new(
            visited,
            "the component of the first map does not contain the second",
        )),
        Exploration::Budget { visited } => TriState::Unknown(Exhaustion {
            what: "searching the map graph".into(),
            visited,
            limit: budget.max_maps,
        }),
    })
}

/// A graph isomorphism `X -> Y` with its inverse, packaged as a certificate.
pub fn find_isomorphism(x: &DigitalImage, y: &DigitalImage) -> Option<EquivalenceCertificate> {
    let n = x.len();
    if n != y.len() {
        return None;
    }
    let deg = |g: &DigitalImage| {
        let mut d: Vec<usize> = (0..g.len()).map(|i| g.degree(i)).collect();
        d.sort_unstable();
        d
    };
    if deg(x) != deg(y) {
        return None;
    }
    // Assign in breadth-first order of each component of X.
    let mut order = Vec::with_capacity(n);
    for comp in x.components() {
        let d = x.distances_from(comp[0]);
        let mut c = comp.clone();
        c.sort_by_key(|&v| (d[v], v));
        order.extend(c);
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        pos: usize,
        order: &[usize],
        x: &DigitalImage,
        y: &DigitalImage,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let v = order[pos];
        for c in 0..y.len() {
            if used[c] || y.degree(c) != x.degree(v) {
                continue;
            }
            let ok = order[..pos]
                .iter()
                .all(|&u| x.adjacent(u, v) == y.adjacent(map[u], c));
            if ok {
                map[v] = c;
                used[c] = true;
                if rec(pos + 1, order, x, y, map, used) {
                    return true;
                }
                used[c] = false;
            }
        }
        false
    }
    if !rec(0, &order, x, y, &mut map, &mut used) {
        return None;
    }
    let mut inv = vec![0; n];
    for (i, &v) in map.iter().enumerate() {
        inv[v] = i;
    }
    let xa = Arc::new(x.clone());
    let ya = Arc::new(y.clone());
    let f = DigitalMap::new(xa.clone(), ya.clone(), map).ok()?;
    let g = DigitalMap::new(ya, xa, inv).ok()?;
    EquivalenceCertificate::from_isomorphism(f, g).ok()
}

/// Homotopy equivalence through irreducible cores: both inputs are reduced
/// with certificates, and two irreducible images are equivalent exactly when
/// they are isomorphic.
pub fn homotopy_equivalent(
    x: &DigitalImage,
    y: &DigitalImage,
    budget: &Budget,
) -> Result<TriState<EquivalenceCertificate>> {
    let cx = reduce_to_core(x, budget)?;
    let cy = reduce_to_core(y, budget)?;
    for c in [&cx, &cy] {
        if let CoreStatus::Unknown(e) = &c.status {
            return Ok(TriState::Unknown(e.clone()));
        }
    }
    let (a, b) = (cx.image.len(), cy.image.len());
    if a != b {
        return Ok(TriState::No(SearchLog::new(
            0,
            format!("irreducible cores have {a} and {b} points"),
        )));
    }
    match find_isomorphism(&cx.image, &cy.image) {
        Some(iso) => {
            // Re-anchor the isomorphism on the shared core images.
            let f = DigitalMap::new(cx.image.clone(), cy.image.clone(), iso.forward.table().to_vec())?;
            let g = DigitalMap::new(cy.image.clone(), cx.image.clone(), iso.backward.table().to_vec())?;
            let iso = EquivalenceCertificate::from_isomorphism(f, g)?;
            let cert = cx
                .certificate
                .compose(&iso)?
                .compose(&cy.certificate.inverse())?;
            Ok(TriState::Yes(cert))
        }
        None => Ok(TriState::No(SearchLog::new(
            0,
            format!("irreducible cores with {a} points are not isomorphic"),
        ))),
    }
}

/// Point type, cycle type `C_m`, or other.
pub fn classify_homotopy_type_2d(x: &DigitalImage, budget: &Budget) -> Result<HomotopyType> {
    let kind = x.kind();
    if kind != AdjacencyKind::four() && kind != AdjacencyKind::eight() {
        return Err(Error::Input(format!(
            "expected a 4- or 8-adjacency image in Z^2, got {kind}-adjacency"
        )));
    }
    let core = reduce_to_core(x, budget)?;
    match &core.status {
        CoreStatus::Unknown(e) => {
            return Ok(HomotopyType::OtherOrUnknown {
                core_points: None,
                evidence: format!("{e}; partial core has {} points", core.image.len()),
            })
        }
        CoreStatus::Irreducible(_) if core.image.len() == 1 => {
            return Ok(HomotopyType::Point {
                contraction: core.certificate.h1.reversed(),
            })
        }
        CoreStatus::Irreducible(_) => {}
    }
    let m = core.image.len();
    if detect_simple_closed_curve(&core.image).is_some() {
        if let Ok(curve) = generate_curve(m, kind) {
            let target = Arc::new(curve.image().clone());
            if let Some(iso) = find_isomorphism(&core.image, &target) {
                let f = DigitalMap::new(core.image.clone(), target.clone(), iso.forward.table().to_vec())?;
                let g = DigitalMap::new(target, core.image.clone(), iso.backward.table().to_vec())?;
                let iso = EquivalenceCertificate::from_isomorphism(f, g)?;
                return Ok(HomotopyType::Cycle {
                    m,
                    certificate: core.certificate.compose(&iso)?,
                });
            }
        }
    }
    Ok(HomotopyType::OtherOrUnknown {
        core_points: Some(m),
        evidence: format!(
            "irreducible core with {m} points is not a simple closed curve"
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::generate_cycle;

    fn img<const N: usize>(kind: AdjacencyKind, pts: &[[i64; N]]) -> DigitalImage {
        DigitalImage::from_coords(kind, pts.iter().copied()).unwrap()
    }

    fn c6() -> DigitalImage {
        generate_cycle(6, AdjacencyKind::eight()).unwrap()
    }

    #[test]
    fn contractibility_examples() {
        let b = Budget::default();
        let i5 = img(AdjacencyKind::two(), &[[0], [1], [2], [3], [4]]);
        let h = is_contractible(&i5, &b).unwrap().yes().unwrap();
        assert!(h.verify());
        assert!(h.start().is_identity());
        let sq = img(AdjacencyKind::eight(), &[[0, 0], [0, 1], [1, 0], [1, 1]]);
        assert!(is_contractible(&sq, &b).unwrap().is_yes());
        assert!(is_contractible(&c6(), &b).unwrap().is_no());
        // The 4-adjacency unit square has no folds but still contracts.
        let sq4 = img(AdjacencyKind::four(), &[[0, 0], [0, 1], [1, 0], [1, 1]]);
        assert!(find_fold(&sq4).is_none());
        let h = is_contractible(&sq4, &b).unwrap().yes().unwrap();
        assert!(h.verify());
        let end = h.end();
        assert!(end.table().iter().all(|&v| v == end.table()[0]));
    }

    #[test]
    fn disconnected_is_an_error() {
        let x = img(AdjacencyKind::two(), &[[0], [2]]);
        assert_eq!(is_contractible(&x, &Budget::default()).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn reducibility_examples() {
        let b = Budget::default();
        let pt = img(AdjacencyKind::eight(), &[[0, 0]]);
        assert!(is_reducible(&pt, &b).unwrap().is_no());
        assert!(is_reducible(&c6(), &b).unwrap().is_no());
        let five = img(AdjacencyKind::eight(), &[[0, 0], [1, 0], [2, 0], [2, 1], [1, 2]]);
        let r = is_reducible(&five, &b).unwrap().yes().unwrap();
        assert!(r.certificate.verify());
        assert!(r.image.len() < 5);
    }

    #[test]
    fn rigidity_examples() {
        let b = Budget::default();
        assert!(is_rigid(&img(AdjacencyKind::two(), &[[0]]), &b).unwrap().is_yes());
        let h = is_rigid(&img(AdjacencyKind::two(), &[[0], [1]]), &b)
            .unwrap()
            .no()
            .unwrap();
        assert!(h.verify());
        let h = is_rigid(&c6(), &b).unwrap().no().unwrap();
        assert!(h.verify());
    }

    #[test]
    fn homotopic_examples() {
        let b = Budget::default();
        let i2 = Arc::new(img(AdjacencyKind::two(), &[[0], [1]]));
        let id = DigitalMap::identity(i2.clone());
        let k = DigitalMap::constant(i2.clone(), i2, 0);
        let h = homotopic(&id, &k, &b).unwrap().yes().unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(homotopic(&id, &id, &b).unwrap().yes().unwrap().len(), 1);
        let c = Arc::new(c6());
        let id = DigitalMap::identity(c.clone());
        let k = DigitalMap::constant(c.clone(), c, 0);
        assert!(homotopic(&id, &k, &b).unwrap().is_no());
    }

    #[test]
    fn equivalence_examples() {
        let b = Budget::default();
        let x = c6();
        let t = x.translated(&[10, 10]);
        let cert = homotopy_equivalent(&x, &t, &b).unwrap().yes().unwrap();
        assert!(cert.verify());
        let i4 = img(AdjacencyKind::two(), &[[0], [1], [2], [3]]);
        let pt = img(AdjacencyKind::two(), &[[7]]);
        assert!(homotopy_equivalent(&i4, &pt, &b).unwrap().yes().unwrap().verify());
        let pt2 = img(AdjacencyKind::eight(), &[[0, 0]]);
        assert!(homotopy_equivalent(&x, &pt2, &b).unwrap().is_no());
    }

    #[test]
    fn classify_examples() {
        let b = Budget::default();
        let sq4 = img(AdjacencyKind::four(), &[[0, 0], [0, 1], [1, 0], [1, 1]]);
        assert!(matches!(
            classify_homotopy_type_2d(&sq4, &b).unwrap(),
            HomotopyType::Point { .. }
        ));
        let c8 = generate_cycle(8, AdjacencyKind::four()).unwrap();
        assert!(matches!(
            classify_homotopy_type_2d(&c8, &b).unwrap(),
            HomotopyType::Cycle { m: 8, .. }
        ));
        let pend = img(
            AdjacencyKind::eight(),
            &[[0, 0], [1, 1], [2, 1], [3, 0], [2, -1], [1, -1], [-1, 0]],
        );
        match classify_homotopy_type_2d(&pend, &b).unwrap() {
            HomotopyType::Cycle { m, certificate } => {
                assert_eq!(m, 6);
                assert!(certificate.verify());
            }
            other => panic!("{other:?}"),
        }
    }
}
