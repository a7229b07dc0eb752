use super::{AdjacencyKind, DigitalImage, Point};
use crate::error::{Error, Result};

/// Largest number of window cells the subset enumeration accepts.
pub const MAX_WINDOW_CELLS: usize = 20;

/// Every connected image with at most `max_points` points whose bounding box
/// fits in a `window^d` box, one per translation class. Each image touches
/// the origin on every axis. Ordered by size, then by point list.
pub fn connected_images(
    kind: AdjacencyKind,
    window: usize,
    max_points: usize,
) -> Result<Vec<DigitalImage>> {
    let d = kind.dim();
    let cells_count = window
        .checked_pow(d as u32)
        .filter(|c| *c <= MAX_WINDOW_CELLS)
        .ok_or(Error::ResourceLimit {
            what: "enumerating corpus windows",
            limit: MAX_WINDOW_CELLS,
            reached: window.saturating_pow(d as u32),
        })?;
    if window == 0 {
        return Ok(Vec::new());
    }
    let cells: Vec<Point> = (0..cells_count)
        .map(|mut c| {
            let mut v = vec![0i64; d];
            for slot in v.iter_mut().rev() {
                *slot = (c % window) as i64;
                c /= window;
            }
            Point(v)
        })
        .collect();

    let mut out = Vec::new();
    for mask in 1u32..(1u32 << cells_count) {
        if mask.count_ones() as usize > max_points {
            continue;
        }
        let pts: Vec<Point> = (0..cells_count)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| cells[i].clone())
            .collect();
        if (0..d).any(|a| pts.iter().all(|p| p.0[a] != 0)) {
            continue;
        }
        let img = DigitalImage::new(kind, pts)?;
        if img.is_connected() {
            out.push(img);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.points().cmp(b.points())));
    Ok(out)
}

/// The connected images of `Z` with at most `max_points` points, up to
/// translation: the digital intervals `[0, n-1]`.
pub fn interval_images(max_points: usize) -> Vec<DigitalImage> {
    (1..=max_points as i64)
        .map(|n| DigitalImage::from_coords(AdjacencyKind::two(), (0..n).map(|c| [c])).unwrap())
        .collect()
}

/// A file-name-safe canonical name for an image, stable across runs.
pub fn canonical_name(x: &DigitalImage) -> String {
    let x = x.normalized();
    let body: Vec<String> = x
        .points()
        .iter()
        .map(|p| {
            p.coords()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(".")
        })
        .collect();
    format!("k{}_n{}_{}", x.kind().count(), x.len(), body.join("_"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_window_counts() {
        // Translation classes of connected subsets of a 2x2 box.
        let four = connected_images(AdjacencyKind::four(), 2, 4).unwrap();
        assert_eq!(four.len(), 1 + 2 + 4 + 1);
        let eight = connected_images(AdjacencyKind::eight(), 2, 4).unwrap();
        assert_eq!(eight.len(), 1 + 4 + 4 + 1);
        let square =
            DigitalImage::from_coords(AdjacencyKind::four(), [[0, 0], [0, 1], [1, 0], [1, 1]])
                .unwrap();
        assert!(four.contains(&square));
    }

    #[test]
    fn no_translates_repeat() {
        let all = connected_images(AdjacencyKind::eight(), 3, 9).unwrap();
        let mut names: Vec<String> = all.iter().map(canonical_name).collect();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
    }

    #[test]
    fn intervals() {
        let v = interval_images(4);
        assert_eq!(v.len(), 4);
        assert!(v.iter().all(|x| x.is_connected()));
    }

    #[test]
    fn window_cap() {
        assert!(connected_images(AdjacencyKind::four(), 5, 3).is_err());
    }
}
