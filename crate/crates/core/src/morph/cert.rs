use std::sync::Arc;

use super::Homotopy;
use crate::error::{Error, Result};
use crate::lattice::DigitalImage;

/// One stage per line, target indices in canonical source order.
pub fn serialize_homotopy(h: &Homotopy) -> String {
    let mut out = String::new();
    for stage in h.stages() {
        let line: Vec<String> = stage.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Reads the format written by [`serialize_homotopy`]. Blank lines and `#`
/// comments are skipped. The result is not verified.
pub fn parse_homotopy(
    source: Arc<DigitalImage>,
    target: Arc<DigitalImage>,
    text: &str,
) -> Result<Homotopy> {
    let mut stages = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let stage = body
            .split_whitespace()
            .map(|w| {
                w.parse::<usize>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad stage value `{w}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if stage.len() != source.len() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("stage has {} values, expected {}", stage.len(), source.len()),
            });
        }
        if let Some(v) = stage.iter().find(|&&v| v >= target.len()) {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("value {v} out of range"),
            });
        }
        stages.push(stage);
    }
    Homotopy::new(source, target, stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::AdjacencyKind;

    #[test]
    fn round_trip() {
        let x = Arc::new(DigitalImage::from_coords(AdjacencyKind::two(), [[0], [1]]).unwrap());
        let h = Homotopy::new(x.clone(), x.clone(), vec![vec![0, 1], vec![0, 0]]).unwrap();
        let text = serialize_homotopy(&h);
        assert_eq!(text, "0 1\n0 0\n");
        assert_eq!(parse_homotopy(x.clone(), x.clone(), &text).unwrap(), h);
        assert!(parse_homotopy(x.clone(), x, "0 1\n0 5\n").is_err());
    }
}
