use std::collections::HashMap;

use super::{AdjacencyKind, DigitalImage, Point};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses the line-oriented image format:
///
/// ```text
/// # comment
/// dim 2
/// k 2
/// p 0 0
/// p 1 1
/// ```
pub fn parse_image(text: &str) -> Result<DigitalImage> {
    let mut dim: Option<usize> = None;
    let mut kind: Option<AdjacencyKind> = None;
    let mut points: Vec<Point> = Vec::new();
    let mut seen: HashMap<Point, usize> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut words = body.split_whitespace();
        let key = words.next().unwrap();
        let values: Vec<&str> = words.collect();
        match key {
            "dim" => {
                if dim.is_some() {
                    return Err(parse_err(line, "repeated `dim` header"));
                }
                let [v] = values.as_slice() else {
                    return Err(parse_err(line, "`dim` takes one value"));
                };
                let d: usize = v
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad dimension `{v}`")))?;
                if d == 0 {
                    return Err(parse_err(line, "dimension must be positive"));
                }
                dim = Some(d);
            }
            "k" => {
                let Some(d) = dim else {
                    return Err(parse_err(line, "`k` before `dim`"));
                };
                if kind.is_some() {
                    return Err(parse_err(line, "repeated `k` header"));
                }
                let [v] = values.as_slice() else {
                    return Err(parse_err(line, "`k` takes one value"));
                };
                let k: usize = v
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad k `{v}`")))?;
                kind = Some(
                    AdjacencyKind::new(d, k).map_err(|e| parse_err(line, e.to_string()))?,
                );
            }
            "p" => {
                let Some(kd) = kind else {
                    return Err(parse_err(line, "point before `dim`/`k` headers"));
                };
                if values.len() != kd.dim() {
                    return Err(parse_err(
                        line,
                        Error::DimensionMismatch {
                            expected: kd.dim(),
                            found: values.len(),
                        }
                        .to_string(),
                    ));
                }
                let coords = values
                    .iter()
                    .map(|v| {
                        v.parse::<i64>()
                            .map_err(|_| parse_err(line, format!("bad coordinate `{v}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let p = Point(coords);
                if let Some(first) = seen.insert(p.clone(), line) {
                    return Err(parse_err(
                        line,
                        format!("{} (first listed on line {first})", Error::DuplicatePoint(p.to_string())),
                    ));
                }
                points.push(p);
            }
            other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
        }
    }
    let last = text.lines().count().max(1);
    let kind = kind.ok_or_else(|| parse_err(last, "missing `dim`/`k` headers"))?;
    if points.is_empty() {
        return Err(parse_err(last, Error::EmptyImage.to_string()));
    }
    DigitalImage::new(kind, points)
}

/// Serializes in canonical (lexicographic) point order.
pub fn serialize_image(x: &DigitalImage) -> String {
    let mut out = format!("dim {}\nk {}\n", x.dim(), x.kind().k());
    for p in x.points() {
        out.push('p');
        for c in p.coords() {
            out.push(' ');
            out.push_str(&c.to_string());
        }
        out.push('\n');
    }
    out
}
