use std::collections::BTreeSet;

use super::{AdjacencyKind, DigitalImage, Point};
use crate::error::{Error, Result};
use crate::space::FiniteGraph;

/// Default cap on search nodes for [`search_cycles`].
pub const DEFAULT_CYCLE_SEARCH_CAP: usize = 200_000_000;

/// A digital simple closed curve together with a cyclic ordering of its
/// points: `ordering[t]` is the image index of the `t`-th point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveWitness {
    image: DigitalImage,
    ordering: Vec<usize>,
}

impl CurveWitness {
    /// Validates the three simple-closed-curve conditions for `ordering`.
    pub fn new(image: DigitalImage, ordering: Vec<usize>) -> Result<Self> {
        let m = image.len();
        if m < 4 {
            return Err(Error::Input(format!(
                "a simple closed curve needs at least 4 points, got {m}"
            )));
        }
        if ordering.len() != m {
            return Err(Error::Input("ordering must list every point once".into()));
        }
        let mut seen = vec![false; m];
        for &i in &ordering {
            if i >= m || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Input("ordering is not a bijection".into()));
            }
        }
        for t in 0..m {
            let here = ordering[t];
            let prev = ordering[(t + m - 1) % m];
            let next = ordering[(t + 1) % m];
            let mut expected = vec![prev, next];
            expected.sort_unstable();
            if image.neighbors(here) != expected.as_slice() {
                return Err(Error::Input(format!(
                    "point {} does not have exactly its two cyclic neighbors",
                    image.point(here)
                )));
            }
        }
        Ok(CurveWitness { image, ordering })
    }

    pub fn image(&self) -> &DigitalImage {
        &self.image
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    pub fn len(&self) -> usize {
        self.ordering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordering.is_empty()
    }

    /// Cyclic position of each image index (inverse of `ordering`).
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.len()];
        for (t, &i) in self.ordering.iter().enumerate() {
            pos[i] = t;
        }
        pos
    }

    /// The ordering as points.
    pub fn ordered_points(&self) -> Vec<Point> {
        self.ordering
            .iter()
            .map(|&i| self.image.point(i).clone())
            .collect()
    }
}

/// Detects whether `x` is a simple closed curve: at least four points, every
/// point of degree two, and a single cycle. The ordering starts at the least
/// point and steps first to its lexicographically larger neighbor.
pub fn detect_simple_closed_curve(x: &DigitalImage) -> Option<CurveWitness> {
    let m = x.len();
    if m < 4 || (0..m).any(|i| x.degree(i) != 2) {
        return None;
    }
    let mut ordering = Vec::with_capacity(m);
    let mut prev = 0;
    let mut here = x.neighbors(0)[1];
    ordering.push(0);
    while here != 0 {
        if ordering.len() >= m {
            return None;
        }
        ordering.push(here);
        let nb = x.neighbors(here);
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = here;
        here = next;
    }
    if ordering.len() != m {
        return None;
    }
    CurveWitness::new(x.clone(), ordering).ok()
}

fn curve_points(m: usize, kind: AdjacencyKind) -> Result<Vec<[i64; 2]>> {
    if m < 4 {
        return Err(Error::Input(format!(
            "simple closed curves need at least 4 points, got {m}"
        )));
    }
    let none = Err(Error::NoSuchCurve {
        m,
        adjacency: kind.count(),
    });
    if kind == AdjacencyKind::four() {
        if m == 4 {
            return Ok(vec![[0, 0], [0, 1], [1, 1], [1, 0]]);
        }
        if m % 2 == 1 || m < 8 {
            return none;
        }
        // Boundary of a 3-row rectangle with `cols` columns.
        let cols = (m / 2 - 1) as i64;
        let mut pts = vec![[0, 0], [0, 1], [0, 2]];
        pts.extend((1..cols).map(|x| [x, 2]));
        pts.push([cols - 1, 1]);
        pts.push([cols - 1, 0]);
        pts.extend((1..cols - 1).rev().map(|x| [x, 0]));
        Ok(pts)
    } else if kind == AdjacencyKind::eight() {
        match m {
            4 => Ok(vec![[0, 0], [1, 1], [2, 0], [1, -1]]),
            5 => none,
            _ if m.is_multiple_of(2) => {
                // Staircase hexagon stretched along y = 1 and y = -1.
                let w = ((m - 2) / 2) as i64;
                let mut pts = vec![[0, 0]];
                pts.extend((1..=w).map(|x| [x, 1]));
                pts.push([w + 1, 0]);
                pts.extend((1..=w).rev().map(|x| [x, -1]));
                Ok(pts)
            }
            _ => {
                let w = ((m - 3) / 2) as i64;
                let mut pts = vec![[0, 0]];
                pts.extend((1..=w).map(|x| [x, 1]));
                pts.push([w + 1, 0]);
                pts.push([w + 1, -1]);
                pts.extend((2..=w).rev().map(|x| [x, -2]));
                pts.push([1, -1]);
                Ok(pts)
            }
        }
    } else {
        Err(Error::Unsupported(format!(
            "curve generation is implemented for 4- and 8-adjacency, not {kind}"
        )))
    }
}

/// A concrete simple closed curve with `m` points, with its generation order
/// as the witness ordering.
pub fn generate_curve(m: usize, kind: AdjacencyKind) -> Result<CurveWitness> {
    let pts: Vec<Point> = curve_points(m, kind)?.into_iter().map(Point::from).collect();
    let image = DigitalImage::new(kind, pts.iter().cloned())?;
    let ordering = pts.iter().map(|p| image.index_of(p).unwrap()).collect();
    CurveWitness::new(image, ordering)
        .map_err(|e| Error::Synthesis(format!("generated curve failed validation: {e}")))
}

/// A concrete simple closed curve with `m` points, or
/// [`Error::NoSuchCurve`] when none exists for the adjacency.
pub fn generate_cycle(m: usize, kind: AdjacencyKind) -> Result<DigitalImage> {
    generate_curve(m, kind).map(|c| c.image)
}

/// All simple closed curves with `m` points that fit in a `window^d` box,
/// up to translation, normalized so the least point is the origin.
pub fn search_cycles(m: usize, kind: AdjacencyKind, window: usize) -> Result<Vec<DigitalImage>> {
    search_cycles_with_cap(m, kind, window, DEFAULT_CYCLE_SEARCH_CAP)
}

pub fn search_cycles_with_cap(
    m: usize,
    kind: AdjacencyKind,
    window: usize,
    cap: usize,
) -> Result<Vec<DigitalImage>> {
    if m < 4 {
        return Err(Error::Input(format!("m must be at least 4, got {m}")));
    }
    let d = kind.dim();
    let mut search = CycleSearch {
        m,
        kind,
        window: window as i64,
        offsets: kind.offsets(),
        path: vec![vec![0; d]],
        lo: vec![0; d],
        hi: vec![0; d],
        found: BTreeSet::new(),
        nodes: 0,
        cap,
    };
    search.extend()?;
    search
        .found
        .into_iter()
        .map(|pts| DigitalImage::new(kind, pts.into_iter().map(Point)))
        .collect()
}

struct CycleSearch {
    m: usize,
    kind: AdjacencyKind,
    window: i64,
    offsets: Vec<Vec<i64>>,
    path: Vec<Vec<i64>>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    found: BTreeSet<Vec<Vec<i64>>>,
    nodes: usize,
    cap: usize,
}

impl CycleSearch {
    fn extend(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::ResourceLimit {
                what: "searching simple closed curves",
                limit: self.cap,
                reached: self.nodes,
            });
        }
        let k = self.path.len();
        let last = self.path[k - 1].clone();
        let origin = vec![0i64; last.len()];
        for oi in 0..self.offsets.len() {
            let q: Vec<i64> = last.iter().zip(&self.offsets[oi]).map(|(a, b)| a + b).collect();
            // The origin is the least point of the curve.
            if q <= origin {
                continue;
            }
            if self.path.contains(&q) {
                continue;
            }
            let closes = self.kind.test(&q, &origin);
            let is_last = k + 1 == self.m;
            if k >= 2 && closes != is_last {
                continue;
            }
            // No chords to earlier points other than the predecessor.
            if k >= 2 && self.path[1..k - 1].iter().any(|p| self.kind.test(p, &q))
            {
                continue;
            }
            let (old_lo, old_hi) = (self.lo.clone(), self.hi.clone());
            let mut fits = true;
            for a in 0..q.len() {
                self.lo[a] = self.lo[a].min(q[a]);
                self.hi[a] = self.hi[a].max(q[a]);
                if self.hi[a] - self.lo[a] >= self.window {
                    fits = false;
                }
            }
            if fits {
                self.path.push(q);
                if is_last {
                    // Each curve is traversed in both directions; keep one.
                    if self.path[1] < self.path[self.m - 1] {
                        let mut pts = self.path.clone();
                        pts.sort();
                        self.found.insert(pts);
                    }
                } else {
                    self.extend()?;
                }
                self.path.pop();
            }
            self.lo = old_lo;
            self.hi = old_hi;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon8() -> DigitalImage {
        DigitalImage::from_coords(
            AdjacencyKind::eight(),
            [[0, 0], [1, 1], [2, 1], [3, 0], [2, -1], [1, -1]],
        )
        .unwrap()
    }

    fn ring4() -> DigitalImage {
        DigitalImage::from_coords(
            AdjacencyKind::four(),
            [[0, 0], [0, 1], [0, 2], [1, 2], [2, 2], [2, 1], [2, 0], [1, 0]],
        )
        .unwrap()
    }

    #[test]
    fn detects_printed_curves() {
        assert_eq!(detect_simple_closed_curve(&hexagon8()).unwrap().len(), 6);
        assert_eq!(detect_simple_closed_curve(&ring4()).unwrap().len(), 8);
        let path = DigitalImage::from_coords(AdjacencyKind::two(), [[0], [1], [2]]).unwrap();
        assert!(detect_simple_closed_curve(&path).is_none());
    }

    #[test]
    fn generator_matches_printed_coordinates() {
        assert_eq!(generate_cycle(6, AdjacencyKind::eight()).unwrap(), hexagon8());
        assert_eq!(generate_cycle(8, AdjacencyKind::four()).unwrap(), ring4());
        let c6 = generate_curve(6, AdjacencyKind::eight()).unwrap();
        let expected: Vec<Point> = [[0, 0], [1, 1], [2, 1], [3, 0], [2, -1], [1, -1]]
            .into_iter()
            .map(Point::from)
            .collect();
        assert_eq!(c6.ordered_points(), expected);
    }

    #[test]
    fn generator_rejects_empty_families() {
        for kind in [AdjacencyKind::four(), AdjacencyKind::eight()] {
            assert!(matches!(
                generate_cycle(5, kind),
                Err(Error::NoSuchCurve { m: 5, .. })
            ));
        }
        for m in [6, 7, 9, 11] {
            assert!(matches!(
                generate_cycle(m, AdjacencyKind::four()),
                Err(Error::NoSuchCurve { .. })
            ));
        }
        assert!(generate_cycle(3, AdjacencyKind::eight()).is_err());
    }

    #[test]
    fn generated_curves_are_detected() {
        for m in 4..=30 {
            for kind in [AdjacencyKind::four(), AdjacencyKind::eight()] {
                if let Ok(img) = generate_cycle(m, kind) {
                    let w = detect_simple_closed_curve(&img)
                        .unwrap_or_else(|| panic!("m={m} kind={kind}"));
                    assert_eq!(w.len(), m);
                }
            }
        }
    }

    #[test]
    fn search_finds_hexagon() {
        let found = search_cycles(6, AdjacencyKind::eight(), 6).unwrap();
        assert!(found.contains(&hexagon8().normalized()));
        assert!(search_cycles(5, AdjacencyKind::four(), 5).unwrap().is_empty());
        for img in &found {
            assert_eq!(detect_simple_closed_curve(img).unwrap().len(), 6);
        }
    }

    #[test]
    fn search_respects_cap() {
        assert!(matches!(
            search_cycles_with_cap(8, AdjacencyKind::eight(), 8, 10),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn witness_rejects_chords() {
        let square = DigitalImage::from_coords(
            AdjacencyKind::eight(),
            [[0, 0], [0, 1], [1, 1], [1, 0]],
        )
        .unwrap();
        assert!(CurveWitness::new(square.clone(), vec![0, 1, 3, 2]).is_err());
        assert!(detect_simple_closed_curve(&square).is_none());
    }
}
