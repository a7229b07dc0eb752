use super::MotionPlanner;
use crate::error::{Error, Result};
use crate::lattice::{DigitalImage, Point};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn push_point(out: &mut String, p: &Point) {
    for c in p.coords() {
        out.push(' ');
        out.push_str(&c.to_string());
    }
}

/// Writes a planner as text:
///
/// ```text
/// parts 2
/// length 6
/// n 2
/// s 0 0 0 1 1 : 0 0 1 1 1 1 ...
/// ```
///
/// Each section line gives the part, the tuple coordinates, optionally
/// `@` and anchor coordinates when they differ from the tuple, then `:` and
/// the path coordinates. Uncovered tuples are omitted.
pub fn serialize_planner(x: &DigitalImage, plan: &MotionPlanner) -> String {
    let mut out = format!(
        "parts {}\nlength {}\nn {}\n",
        plan.parts(),
        plan.length(),
        plan.arity()
    );
    for idx in 0..plan.tuple_count() {
        let t = plan.decode(idx);
        let (Some(part), Some(path)) = (plan.part_of(&t), plan.path_of(&t)) else {
            continue;
        };
        out.push_str(&format!("s {part}"));
        for &v in &t {
            push_point(&mut out, x.point(v));
        }
        let anchors = plan.anchors_of(&t);
        if anchors != t {
            out.push_str(" @");
            for &v in &anchors {
                push_point(&mut out, x.point(v));
            }
        }
        out.push_str(" :");
        for &v in path.steps() {
            push_point(&mut out, x.point(v));
        }
        out.push('\n');
    }
    out
}

fn read_points(x: &DigitalImage, line: usize, words: &[&str]) -> Result<Vec<usize>> {
    let d = x.dim();
    if !words.len().is_multiple_of(d) {
        return Err(parse_err(
            line,
            format!("{} coordinates do not split into {d}-dimensional points", words.len()),
        ));
    }
    words
        .chunks(d)
        .map(|chunk| {
            let coords = chunk
                .iter()
                .map(|w| {
                    w.parse::<i64>()
                        .map_err(|_| parse_err(line, format!("bad coordinate `{w}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let p = Point(coords);
            x.index_of(&p)
                .ok_or_else(|| parse_err(line, format!("point {p} is not in the image")))
        })
        .collect()
}

/// Reads the format written by [`serialize_planner`] against the image the
/// planner lives on.
pub fn parse_planner(x: &DigitalImage, text: &str) -> Result<MotionPlanner> {
    let mut parts: Option<usize> = None;
    let mut length: Option<usize> = None;
    let mut arity: Option<usize> = None;
    let mut plan: Option<MotionPlanner> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        let header = |slot: &mut Option<usize>, name: &str| -> Result<()> {
            if plan.is_some() {
                return Err(parse_err(line, format!("`{name}` after the first section")));
            }
            let [_, v] = words.as_slice() else {
                return Err(parse_err(line, format!("`{name}` takes one value")));
            };
            *slot = Some(
                v.parse()
                    .map_err(|_| parse_err(line, format!("bad {name} `{v}`")))?,
            );
            Ok(())
        };
        match words[0] {
            "parts" => header(&mut parts, "parts")?,
            "length" => header(&mut length, "length")?,
            "n" => header(&mut arity, "n")?,
            "s" => {
                if plan.is_none() {
                    let (Some(k), Some(l)) = (parts, length) else {
                        return Err(parse_err(line, "section before `parts`/`length` headers"));
                    };
                    plan = Some(
                        MotionPlanner::empty(x.len(), arity.unwrap_or(2), k, l)
                            .map_err(|e| parse_err(line, e.to_string()))?,
                    );
                }
                let p = plan.as_mut().unwrap();
                let part: usize = words
                    .get(1)
                    .ok_or_else(|| parse_err(line, "missing part index"))?
                    .parse()
                    .map_err(|_| parse_err(line, "bad part index"))?;
                let rest = &words[2..];
                let colon = rest
                    .iter()
                    .position(|w| *w == ":")
                    .ok_or_else(|| parse_err(line, "missing `:` before the path"))?;
                let (head, path) = (&rest[..colon], &rest[colon + 1..]);
                let (tuple, anchors) = match head.iter().position(|w| *w == "@") {
                    Some(at) => (&head[..at], Some(&head[at + 1..])),
                    None => (head, None),
                };
                let tuple = read_points(x, line, tuple)?;
                if tuple.len() != p.arity() {
                    return Err(parse_err(
                        line,
                        format!("expected {} points in the tuple, got {}", p.arity(), tuple.len()),
                    ));
                }
                if p.part_of(&tuple).is_some() {
                    return Err(parse_err(line, "tuple listed twice"));
                }
                let path = read_points(x, line, path)?;
                p.assign(&tuple, part, &path)
                    .map_err(|e| parse_err(line, e.to_string()))?;
                if let Some(a) = anchors {
                    let a = read_points(x, line, a)?;
                    p.set_anchors(&tuple, &a)
                        .map_err(|e| parse_err(line, e.to_string()))?;
                }
            }
            other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
        }
    }
    match plan {
        Some(p) => Ok(p),
        None => {
            let (Some(k), Some(l)) = (parts, length) else {
                return Err(parse_err(text.lines().count().max(1), "missing `parts`/`length` headers"));
            };
            MotionPlanner::empty(x.len(), arity.unwrap_or(2), k, l)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{generate_curve, AdjacencyKind};
    use crate::planner::{synthesize_cycle_planner, verify_planner};

    #[test]
    fn round_trip() {
        let c = generate_curve(6, AdjacencyKind::eight()).unwrap();
        let s = synthesize_cycle_planner(&c).unwrap();
        let text = serialize_planner(c.image(), &s.planner);
        let back = parse_planner(c.image(), &text).unwrap();
        assert_eq!(back, s.planner);
        assert!(verify_planner(c.image(), &back).unwrap().ok);
    }

    #[test]
    fn anchors_survive() {
        let c = generate_curve(6, AdjacencyKind::eight()).unwrap();
        let mut plan = synthesize_cycle_planner(&c).unwrap().planner;
        plan.set_anchors(&[0, 1], &[0, 0]).unwrap();
        let text = serialize_planner(c.image(), &plan);
        assert!(text.contains('@'));
        assert_eq!(parse_planner(c.image(), &text).unwrap(), plan);
    }

    #[test]
    fn errors_name_lines() {
        let c = generate_curve(6, AdjacencyKind::eight()).unwrap();
        let err = parse_planner(c.image(), "parts 1\nlength 1\ns 0 0 0 9 9 : 0 0 9 9\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_planner(c.image(), "s 0 0 0 0 0 : 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
