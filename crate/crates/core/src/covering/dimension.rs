use std::collections::HashSet;

use crate::error::{Error, Result};

/// Largest number of points the shattering search accepts after dropping
/// constant and duplicate columns. The search over `k`-subsets stops as soon
/// as `2^k` exceeds the number of distinct rows.
pub const VC_POINT_LIMIT: usize = 63;

/// Exact VC dimension of a binary class given as rows of values on a
/// finite domain (one column per point).
pub fn vc_dimension(rows: &[Vec<bool>]) -> Result<usize> {
    let Some(width) = rows.first().map(Vec::len) else {
        return Ok(0);
    };
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Invalid("rows have different widths".into()));
    }
    // A shattered set never contains a constant column or two equal columns.
    let mut columns: Vec<Vec<bool>> = Vec::new();
    for j in 0..width {
        let col: Vec<bool> = rows.iter().map(|r| r[j]).collect();
        let constant = col.iter().all(|&b| b == col[0]);
        if !constant && !columns.contains(&col) {
            columns.push(col);
        }
    }
    if columns.len() > VC_POINT_LIMIT {
        return Err(Error::TooLarge {
            what: "informative points",
            size: columns.len(),
            limit: VC_POINT_LIMIT,
        });
    }
    let masks: HashSet<u64> = (0..rows.len())
        .map(|i| {
            columns
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, col)| acc | (u64::from(col[i]) << j))
        })
        .collect();
    let masks: Vec<u64> = masks.into_iter().collect();
    let c = columns.len();
    let mut dim = 0;
    let mut seen = HashSet::new();
    for k in 1..=c {
        if (1u128 << k) > masks.len() as u128 {
            break;
        }
        let mut found = false;
        // Gosper's hack over k-subsets of the c columns.
        let mut subset: u64 = (1 << k) - 1;
        while subset < (1u64 << c) {
            seen.clear();
            seen.extend(masks.iter().map(|m| m & subset));
            if seen.len() == 1 << k {
                found = true;
                break;
            }
            let low = subset & subset.wrapping_neg();
            let ripple = subset + low;
            subset = (((ripple ^ subset) >> 2) / low) | ripple;
        }
        if !found {
            break;
        }
        dim = k;
    }
    Ok(dim)
}

/// Whether the class realizes every pattern on the given columns.
pub fn shatters(rows: &[Vec<bool>], points: &[usize]) -> bool {
    let patterns: HashSet<Vec<bool>> = rows
        .iter()
        .map(|r| points.iter().map(|&p| r[p]).collect())
        .collect();
    patterns.len() == 1usize << points.len()
}

/// Rows of the loss class `(x, y) ↦ 1{h(x) ≠ y}` over `X × labels`,
/// ordered by point then label.
pub fn loss_class_rows<T: PartialEq>(rows: &[Vec<T>], labels: &[T]) -> Vec<Vec<bool>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .flat_map(|v| labels.iter().map(move |y| v != y))
                .collect()
        })
        .collect()
}

/// Graph dimension: the VC dimension of the loss class.
pub fn graph_dimension<T: PartialEq>(rows: &[Vec<T>], labels: &[T]) -> Result<usize> {
    vc_dimension(&loss_class_rows(rows, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_have_dimension_one() {
        let rows: Vec<Vec<bool>> = (0..=16).map(|c| (0..16).map(|x| x >= c).collect()).collect();
        assert_eq!(vc_dimension(&rows).unwrap(), 1);
    }

    #[test]
    fn all_subsets_shatter() {
        let rows: Vec<Vec<bool>> = (0..32u32).map(|m| (0..5).map(|j| m >> j & 1 == 1).collect()).collect();
        assert_eq!(vc_dimension(&rows).unwrap(), 5);
        assert!(shatters(&rows, &[0, 2, 4]));
    }

    #[test]
    fn two_constants() {
        let rows = vec![vec![false; 6], vec![true; 6]];
        assert_eq!(vc_dimension(&rows).unwrap(), 1);
        assert_eq!(vc_dimension(&rows[..1]).unwrap(), 0);
    }

    #[test]
    fn singleton_graph_dimension() {
        assert_eq!(graph_dimension(&[vec![1u8, 2, 3]], &[1, 2, 3]).unwrap(), 0);
    }

    #[test]
    fn multiclass_constants_on_four_points() {
        let rows: Vec<Vec<u8>> = (1..=3).map(|v| vec![v; 4]).collect();
        // Loss patterns at (x, 1), (x, 2): (0,1), (1,0), (1,1) and no (0,0).
        assert_eq!(graph_dimension(&rows, &[1, 2, 3]).unwrap(), 1);
    }
}
