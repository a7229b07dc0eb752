use std::fmt;
use std::sync::Arc;

use super::csp::{deepen, minimal_length, Search};
use super::{contraction_planner, synthesize_cycle_planner, transport_planner, verify_planner, MotionPlanner};
use crate::error::{Error, Result};
use crate::lattice::{detect_simple_closed_curve, DigitalImage};
use crate::morph::{contractibility_from_core, reduce_to_core, Budget, CoreStatus, EquivalenceCertificate, SearchLog, TriState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rule,
    Certificate,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rule => "rule",
            Method::Certificate => "certificate",
            Method::Oracle => "oracle",
        })
    }
}

/// A TC or TC_n verdict with its evidence.
#[derive(Debug, Clone)]
pub struct TcResult {
    /// `None` when undecided.
    pub value: Option<usize>,
    pub method: Method,
    pub arity: usize,
    /// A verified cover with sections realizing `value`.
    pub witness: Option<MotionPlanner>,
    /// The image the witness lives on when it is not the input itself.
    pub witness_image: Option<Arc<DigitalImage>>,
    /// Equivalence from the input to `witness_image`.
    pub equivalence: Option<EquivalenceCertificate>,
    /// Non-contractibility, which excludes a single part.
    pub lower_bound: Option<SearchLog>,
    /// Set when the value comes from a rule the search could not confirm.
    pub consult_oracle: bool,
    pub evidence: Vec<String>,
}

impl TcResult {
    pub(crate) fn new(arity: usize, method: Method) -> Self {
        TcResult {
            value: None,
            method,
            arity,
            witness: None,
            witness_image: None,
            equivalence: None,
            lower_bound: None,
            consult_oracle: false,
            evidence: Vec::new(),
        }
    }

    pub fn is_definite(&self) -> bool {
        self.value.is_some()
    }
}

fn require_connected(x: &DigitalImage) -> Result<()> {
    if x.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

/// TC by the classification rules, each backed by a verified planner.
pub fn tc_classify(x: &DigitalImage, budget: &Budget) -> Result<TcResult> {
    require_connected(x)?;
    let mut out = TcResult::new(2, Method::Rule);
    let core = reduce_to_core(x, budget)?;
    let contractible = contractibility_from_core(&core);

    if x.dim() == 1 {
        out.value = Some(1);
        out.evidence.push("connected images in Z have TC 1".into());
        if let TriState::Yes(h) = &contractible {
            let plan = contraction_planner(x, h, 2)?;
            if verify_planner(x, &plan)?.ok {
                out.witness = Some(plan);
            }
        }
        return Ok(out);
    }

    match contractible {
        TriState::Yes(h) => {
            let plan = contraction_planner(x, &h, 2)?;
            let report = verify_planner(x, &plan)?;
            if !report.ok {
                return Err(Error::Synthesis(format!(
                    "contraction planner failed verification: {}",
                    report.violations[0]
                )));
            }
            out.value = Some(1);
            out.method = Method::Certificate;
            out.evidence
                .push(format!("contractible in {} steps", h.steps()));
            out.witness = Some(plan);
        }
        TriState::No(log) => {
            out.lower_bound = Some(log);
            match detect_simple_closed_curve(&core.image) {
                Some(curve) => {
                    let synth = synthesize_cycle_planner(&curve)?;
                    let plan = if core.reductions == 0 {
                        synth.planner
                    } else {
                        transport_planner(&core.certificate, &synth.planner)?
                    };
                    let report = verify_planner(x, &plan)?;
                    if !report.ok {
                        return Err(Error::Synthesis(format!(
                            "transported planner failed verification: {}",
                            report.violations[0]
                        )));
                    }
                    out.value = Some(2);
                    out.method = Method::Certificate;
                    out.evidence.push(format!(
                        "equivalent to a {}-point simple closed curve; {} planner",
                        curve.len(),
                        synth.strategy
                    ));
                    out.witness = Some(plan);
                    out.witness_image = Some(core.image.clone());
                    out.equivalence = Some(core.certificate.clone());
                }
                None => {
                    out.value = Some(1);
                    out.consult_oracle = true;
                    out.evidence.push(format!(
                        "classification rule gives 1, but the irreducible core has {} points and is not a simple closed curve",
                        core.image.len()
                    ));
                }
            }
        }
        TriState::Unknown(e) => {
            if let CoreStatus::Unknown(_) = core.status {
                out.evidence.push(format!("{e}"));
            }
            out.consult_oracle = true;
        }
    }
    Ok(out)
}

/// TC by direct search: a single global section by iterative deepening up
/// to `l_max`, otherwise non-contractibility plus a two-part cover.
pub fn tc_oracle(x: &DigitalImage, l_max: Option<usize>, budget: &Budget) -> Result<TcResult> {
    require_connected(x)?;
    let mut out = TcResult::new(2, Method::Oracle);
    let l_max = l_max.unwrap_or(4 * x.len());
    let l_min = minimal_length(x, 2).max(1);
    let nodes = budget.max_nodes as u64;
    let contractible = crate::morph::is_contractible(x, budget)?;

    if !contractible.is_no() {
        let (res, at) = deepen(x, 2, 1, l_min..=l_max, nodes);
        match res {
            Search::Solved(plan) => {
                out.value = Some(1);
                out.evidence
                    .push(format!("global section at length {}", at.unwrap_or(0)));
                out.witness = Some(plan);
                return Ok(out);
            }
            Search::Unsat { nodes } => out.evidence.push(format!(
                "no global section up to length {l_max} ({nodes} nodes)"
            )),
            Search::Budget { nodes, what } => out.evidence.push(format!(
                "global section search stopped by {what} at length {} ({nodes} nodes)",
                at.unwrap_or(0)
            )),
        }
    }
    match contractible {
        TriState::No(log) => {
            out.evidence.push(format!("not contractible: {}", log.detail));
            out.lower_bound = Some(log);
        }
        _ => return Ok(out),
    }
    let (res, at) = deepen(x, 2, 2, l_min..=l_max, nodes);
    match res {
        Search::Solved(plan) => {
            out.value = Some(2);
            out.evidence
                .push(format!("two-part cover at length {}", at.unwrap_or(0)));
            out.witness = Some(plan);
        }
        Search::Unsat { nodes } => out.evidence.push(format!(
            "no two-part cover up to length {l_max} ({nodes} nodes)"
        )),
        Search::Budget { nodes, what } => out.evidence.push(format!(
            "two-part search stopped by {what} ({nodes} nodes)"
        )),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{generate_cycle, AdjacencyKind};

    fn img<const N: usize>(kind: AdjacencyKind, pts: &[[i64; N]]) -> DigitalImage {
        DigitalImage::from_coords(kind, pts.iter().copied()).unwrap()
    }

    #[test]
    fn classify_examples() {
        let b = Budget::default();
        let i3 = img(AdjacencyKind::two(), &[[0], [1], [2]]);
        assert_eq!(tc_classify(&i3, &b).unwrap().value, Some(1));
        let c6 = generate_cycle(6, AdjacencyKind::eight()).unwrap();
        let r = tc_classify(&c6, &b).unwrap();
        assert_eq!(r.value, Some(2));
        assert_eq!(r.method, Method::Certificate);
        assert!(r.lower_bound.is_some());
        let five = img(AdjacencyKind::eight(), &[[0, 0], [1, 0], [2, 0], [1, 1], [0, 2]]);
        assert_eq!(tc_classify(&five, &b).unwrap().value, Some(1));
        let far = img(AdjacencyKind::two(), &[[0], [2]]);
        assert!(matches!(tc_classify(&far, &b), Err(Error::Disconnected)));
    }

    #[test]
    fn oracle_examples() {
        let b = Budget::default();
        let i2 = img(AdjacencyKind::two(), &[[0], [1]]);
        assert_eq!(tc_oracle(&i2, None, &b).unwrap().value, Some(1));
        let sq = img(AdjacencyKind::four(), &[[0, 0], [0, 1], [1, 0], [1, 1]]);
        assert_eq!(tc_oracle(&sq, None, &b).unwrap().value, Some(1));
        let c6 = generate_cycle(6, AdjacencyKind::eight()).unwrap();
        let r = tc_oracle(&c6, None, &b).unwrap();
        assert_eq!(r.value, Some(2), "{:?}", r.evidence);
        assert!(verify_planner(&c6, r.witness.as_ref().unwrap()).unwrap().ok);
    }
}
