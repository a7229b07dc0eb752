use std::fmt;

use super::{check_planner, MotionPlanner, PlannerReport, VerifyLevel};
use crate::error::{Error, Result};
use crate::higher::order_respecting;
use crate::lattice::{CurveWitness, DigitalImage};
use crate::morph::{is_contractible, Budget, EquivalenceCertificate, Homotopy, TriState};

/// Section constructions for simple closed curves, tried in a fixed order
/// until one verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleStrategy {
    /// One part, shortest cyclic route, ties clockwise.
    Geodesic,
    /// `U_1 x U_1` for an arc `U_1` between two near-antipodal cut points,
    /// and everything else as the second part.
    ArcSquare,
    /// Order-respecting tuples and the rest.
    OrderPartition,
    /// Parts by the cyclic offset of last against first coordinate, with
    /// counter-clockwise and clockwise unit-speed walks.
    OffsetBand,
    /// One part from a contracting homotopy.
    Contraction,
}

impl fmt::Display for CycleStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CycleStrategy::Geodesic => "geodesic",
            CycleStrategy::ArcSquare => "arc-square",
            CycleStrategy::OrderPartition => "order-partition",
            CycleStrategy::OffsetBand => "offset-band",
            CycleStrategy::Contraction => "contraction",
        };
        f.write_str(s)
    }
}

/// A verified planner together with the strategies that failed first.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub planner: MotionPlanner,
    pub strategy: CycleStrategy,
    pub report: PlannerReport,
    /// Failed attempts with the first violation found.
    pub rejected: Vec<(CycleStrategy, String)>,
}

/// Step `s` positions along the cyclic order (positive is counter-clockwise).
fn walk(c: &CurveWitness, pos: &[usize], from: usize, steps: usize, ccw: bool) -> Vec<usize> {
    let m = c.len();
    let p0 = pos[from];
    (0..=steps)
        .map(|t| {
            let q = if ccw {
                (p0 + t) % m
            } else {
                (p0 + m * (t / m + 1) - t % m) % m
            };
            c.ordering()[q]
        })
        .collect()
}

fn offset(pos: &[usize], a: usize, b: usize, m: usize) -> usize {
    (pos[b] + m - pos[a]) % m
}

/// Two parts by offset band. With `k = floor((m-1)/2)`, tuples whose last
/// coordinate sits `d <= k` steps counter-clockwise of the first walk
/// counter-clockwise; the rest walk clockwise. Middle anchors are met by
/// `n - 2` full sweeps before the final stretch.
pub fn offset_band(c: &CurveWitness, arity: usize) -> Result<MotionPlanner> {
    let m = c.len();
    if arity < 2 || m < 5 {
        return Err(Error::Input("offset band needs arity >= 2 and m >= 5".into()));
    }
    let k = (m - 1) / 2;
    let pos = c.positions();
    let sweeps = (arity - 2) * m;
    let length = if arity == 2 {
        m
    } else {
        sweeps + k.max(m - 1 - k)
    };
    MotionPlanner::build(m, arity, 2, length, |t| {
        let (a, b) = (t[0], t[arity - 1]);
        let d = offset(&pos, a, b, m);
        if d <= k {
            (0, walk(c, &pos, a, sweeps + d, true))
        } else {
            (1, walk(c, &pos, a, sweeps + m - d, false))
        }
    })
}

/// The arc-square cover with cut start `cut` and the given tie direction
/// for the second part.
fn arc_square(c: &CurveWitness, cut: usize, ties_cw: bool) -> Result<MotionPlanner> {
    let m = c.len();
    let pos = c.positions();
    let half = m / 2;
    // Arc of positions cut, cut+1, ..., cut+half.
    let rel = |v: usize| (pos[v] + m - cut) % m;
    MotionPlanner::build(m, 2, 2, m, |t| {
        let (a, b) = (t[0], t[1]);
        let (ra, rb) = (rel(a), rel(b));
        if ra <= half && rb <= half {
            if ra <= rb {
                (0, walk(c, &pos, a, rb - ra, true))
            } else {
                (0, walk(c, &pos, a, ra - rb, false))
            }
        } else {
            let d = offset(&pos, a, b, m);
            let ccw = d < m - d || (d == m - d && !ties_cw);
            if ccw {
                (1, walk(c, &pos, a, d, true))
            } else {
                (1, walk(c, &pos, a, m - d, false))
            }
        }
    })
}

fn geodesic(c: &CurveWitness) -> Result<MotionPlanner> {
    let m = c.len();
    let pos = c.positions();
    MotionPlanner::build(m, 2, 1, m, |t| {
        let d = offset(&pos, t[0], t[1], m);
        if d < m - d {
            (0, walk(c, &pos, t[0], d, true))
        } else {
            (0, walk(c, &pos, t[0], m - d, false))
        }
    })
}

/// Order-respecting tuples route counter-clockwise through their entries;
/// the others route clockwise through them in tuple order.
pub(crate) fn order_partition(c: &CurveWitness, arity: usize) -> Result<MotionPlanner> {
    let m = c.len();
    let pos = c.positions();
    let length = (arity - 1) * (m - 1);
    MotionPlanner::build(m, arity, 2, length, |t| {
        let ccw = order_respecting(t, c);
        let mut path = vec![t[0]];
        for w in t.windows(2) {
            let d = offset(&pos, w[0], w[1], m);
            let leg = if ccw {
                walk(c, &pos, w[0], d, true)
            } else {
                walk(c, &pos, w[0], (m - d) % m, false)
            };
            path.extend_from_slice(&leg[1..]);
        }
        (usize::from(!ccw), path)
    })
}

/// One part from a homotopy `id ⇒ const`: the path for `(x_1, ..., x_n)`
/// runs each trajectory to the constant and back out to the next entry.
pub fn contraction_planner(
    x: &DigitalImage,
    contraction: &Homotopy,
    arity: usize,
) -> Result<MotionPlanner> {
    let stages = contraction.stages();
    let k = stages.len() - 1;
    let end = &stages[k];
    if contraction.source().as_ref() != x
        || !contraction.start().is_identity()
        || end.iter().any(|&v| v != end[0])
    {
        return Err(Error::Input(
            "expected a homotopy from the identity of X to a constant".into(),
        ));
    }
    let traj = |v: usize| stages.iter().map(move |s| s[v]);
    MotionPlanner::build(x.len(), arity, 1, 2 * k * (arity - 1).max(1), |t| {
        let mut path: Vec<usize> = traj(t[0]).collect();
        for (i, &v) in t.iter().enumerate().skip(1) {
            let back: Vec<usize> = traj(v).collect();
            path.extend(back.iter().rev().skip(1));
            if i + 1 < t.len() {
                path.extend(back.iter().skip(1));
            }
        }
        if arity == 1 {
            path.extend(traj(t[0]).collect::<Vec<_>>().iter().rev().skip(1));
        }
        (0, path)
    })
}

/// Moves a pair planner on `Y` to `X` through `X ≃ Y`: back along the
/// homotopy from the identity to `g∘f`, across through `g`, and forward
/// again.
pub fn transport_planner(
    certificate: &EquivalenceCertificate,
    plan_y: &MotionPlanner,
) -> Result<MotionPlanner> {
    if plan_y.arity() != 2 {
        return Err(Error::Unsupported("transport is implemented for pairs".into()));
    }
    if plan_y.part_sizes().iter().sum::<usize>() != plan_y.tuple_count() {
        return Err(Error::Input("cannot transport a planner with uncovered pairs".into()));
    }
    let f = &certificate.forward;
    let g = &certificate.backward;
    let stages = certificate.h1.stages();
    let k = stages.len() - 1;
    let x = certificate.source();
    MotionPlanner::build(x.len(), 2, plan_y.parts(), 2 * k + plan_y.length(), |t| {
        let (a, b) = (t[0], t[1]);
        let (fa, fb) = (f.apply(a), f.apply(b));
        let mid = plan_y
            .path_of(&[fa, fb])
            .expect("coverage checked above");
        let mut path: Vec<usize> = stages.iter().rev().map(|s| s[a]).collect();
        path.extend(mid.steps().iter().skip(1).map(|&v| g.apply(v)));
        path.extend(stages.iter().skip(1).map(|s| s[b]));
        (plan_y.part_of(&[fa, fb]).unwrap(), path)
    })
}

fn first_violation(report: &PlannerReport) -> String {
    report
        .violations
        .first()
        .map_or_else(|| "no violation".into(), |v| v.to_string())
}

/// A verified planner for a simple closed curve (pairs).
pub fn synthesize_cycle_planner(c: &CurveWitness) -> Result<Synthesis> {
    synthesize_cycle_planner_with(c, 2, &Budget::default(), VerifyLevel::Full)
}

/// A verified planner on `C^arity`. Curves with at most four points are
/// contractible and get one part; longer curves get two.
pub fn synthesize_cycle_planner_with(
    c: &CurveWitness,
    arity: usize,
    budget: &Budget,
    level: VerifyLevel,
) -> Result<Synthesis> {
    if arity < 2 {
        return Err(Error::Input("arity must be at least 2".into()));
    }
    let x = c.image();
    let m = c.len();
    let mut rejected = Vec::new();
    let attempt = |strategy: CycleStrategy,
                       plan: MotionPlanner,
                       rejected: &mut Vec<(CycleStrategy, String)>|
     -> Result<Option<Synthesis>> {
        let report = check_planner(x, &plan, level, 1)?;
        if report.ok {
            return Ok(Some(Synthesis {
                planner: plan,
                strategy,
                report,
                rejected: rejected.clone(),
            }));
        }
        rejected.push((strategy, first_violation(&report)));
        Ok(None)
    };

    if m <= 4 {
        if arity == 2 {
            if let Some(s) = attempt(CycleStrategy::Geodesic, geodesic(c)?, &mut rejected)? {
                return Ok(s);
            }
        }
        let h = match is_contractible(x, budget)? {
            TriState::Yes(h) => h,
            other => {
                return Err(Error::Synthesis(format!(
                    "no contraction of a {m}-point curve: {}",
                    other.label()
                )))
            }
        };
        let plan = contraction_planner(x, &h, arity)?;
        if let Some(s) = attempt(CycleStrategy::Contraction, plan, &mut rejected)? {
            return Ok(s);
        }
    } else {
        if arity == 2 {
            let mut last = None;
            for cut in 0..m {
                for ties_cw in [true, false] {
                    let plan = arc_square(c, cut, ties_cw)?;
                    let report = check_planner(x, &plan, level, 1)?;
                    if report.ok {
                                    return Ok(Synthesis {
                            planner: plan,
                            strategy: CycleStrategy::ArcSquare,
                            report,
                            rejected,
                        });
                    }
                    last = Some(first_violation(&report));
                }
            }
            rejected.push((
                CycleStrategy::ArcSquare,
                format!(
                    "{} cut and tie choices failed, last: {}",
                    2 * m,
                    last.unwrap_or_default()
                ),
            ));
        } else if let Some(s) =
            attempt(CycleStrategy::OrderPartition, order_partition(c, arity)?, &mut rejected)?
        {
            return Ok(s);
        }
        if let Some(s) = attempt(CycleStrategy::OffsetBand, offset_band(c, arity)?, &mut rejected)? {
            return Ok(s);
        }
    }
    let detail: Vec<String> = rejected.iter().map(|(s, v)| format!("{s}: {v}")).collect();
    Err(Error::Synthesis(format!(
        "no strategy verified on a {m}-point curve ({})",
        detail.join("; ")
    )))
}
