use super::view::FiniteMetricView;
use crate::error::{Error, Result};

/// Slack used when comparing a distance with a scale.
pub const SCALE_TOL: f64 = 1e-12;

/// Whether distance `d` is within scale `eps`.
#[inline]
pub fn within(d: f64, eps: f64) -> bool {
    d <= eps + SCALE_TOL
}

/// Items the exact searches accept after merging duplicates.
pub const EXACT_LIMIT: usize = 128;

/// Whether every item lies within `eps` of some chosen index.
pub fn is_cover(view: &FiniteMetricView, eps: f64, centers: &[usize]) -> bool {
    (0..view.len()).all(|i| centers.iter().any(|&c| within(view.distance(i, c), eps)))
}

/// Whether the chosen items are pairwise farther apart than `eps`.
pub fn is_packing(view: &FiniteMetricView, eps: f64, chosen: &[usize]) -> bool {
    chosen.iter().enumerate().all(|(a, &i)| {
        chosen[a + 1..].iter().all(|&j| !within(view.distance(i, j), eps))
    })
}

/// Greedy set cover: repeatedly takes the item covering the most uncovered
/// items, lowest index first on ties.
pub fn greedy_cover(view: &FiniteMetricView, eps: f64) -> Vec<usize> {
    let n = view.len();
    let mut covered = vec![false; n];
    let mut left = n;
    let mut centers = Vec::new();
    while left > 0 {
        let (best, gain) = (0..n)
            .map(|c| {
                let gain = (0..n).filter(|&i| !covered[i] && within(view.distance(c, i), eps)).count();
                (c, gain)
            })
            .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        debug_assert!(gain > 0);
        for (i, slot) in covered.iter_mut().enumerate() {
            if !*slot && within(view.distance(best, i), eps) {
                *slot = true;
                left -= 1;
            }
        }
        centers.push(best);
    }
    centers
}

/// Maximal `eps`-packing built in index order.
pub fn maximal_packing(view: &FiniteMetricView, eps: f64) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..view.len() {
        if chosen.iter().all(|&c| !within(view.distance(c, i), eps)) {
            chosen.push(i);
        }
    }
    chosen
}

fn bitsets(view: &FiniteMetricView, reps: &[usize], eps: f64, close: bool) -> Vec<u128> {
    reps.iter()
        .map(|&i| {
            reps.iter().enumerate().fold(0u128, |acc, (b, &j)| {
                if within(view.distance(i, j), eps) == close {
                    acc | (1u128 << b)
                } else {
                    acc
                }
            })
        })
        .collect()
}

fn representatives(view: &FiniteMetricView) -> Result<Vec<usize>> {
    let reps = view.distinct_representatives();
    if reps.len() > EXACT_LIMIT {
        return Err(Error::TooLarge {
            what: "distinct items",
            size: reps.len(),
            limit: EXACT_LIMIT,
        });
    }
    Ok(reps)
}

/// Exact `N(eps)`: the smallest set of items whose `eps`-balls cover the
/// view.
///
/// Items at distance zero are merged first; the search is a branch and bound
/// over at most [`EXACT_LIMIT`] distinct items.
pub fn exact_cover_number(view: &FiniteMetricView, eps: f64) -> Result<usize> {
    if view.is_empty() {
        return Ok(0);
    }
    let reps = representatives(view)?;
    let balls = bitsets(view, &reps, eps, true);
    let all = if reps.len() == 128 { u128::MAX } else { (1u128 << reps.len()) - 1 };
    let sub = view.restrict(&reps);
    let mut best = greedy_cover(&sub, eps).len();
    cover_search(&balls, all, 0, &mut best);
    Ok(best)
}

fn cover_search(balls: &[u128], uncovered: u128, chosen: usize, best: &mut usize) {
    if uncovered == 0 {
        *best = (*best).min(chosen);
        return;
    }
    let max_gain = balls.iter().map(|b| (b & uncovered).count_ones()).max().unwrap_or(0);
    if max_gain == 0 {
        return;
    }
    let need = uncovered.count_ones().div_ceil(max_gain) as usize;
    if chosen + need >= *best {
        return;
    }
    // Branch on the uncovered item with the fewest covering candidates.
    let mut pivot = 0;
    let mut fewest = u32::MAX;
    let mut rest = uncovered;
    while rest != 0 {
        let e = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let k = balls[e].count_ones();
        if k < fewest {
            fewest = k;
            pivot = e;
        }
    }
    let mut candidates: Vec<usize> = Vec::with_capacity(fewest as usize);
    let mut cand = balls[pivot];
    while cand != 0 {
        candidates.push(cand.trailing_zeros() as usize);
        cand &= cand - 1;
    }
    candidates.sort_by_key(|&c| std::cmp::Reverse((balls[c] & uncovered).count_ones()));
    for c in candidates {
        cover_search(balls, uncovered & !balls[c], chosen + 1, best);
    }
}

/// Exact `M(eps)`: the largest set of items pairwise farther apart than
/// `eps` (a maximum clique of the "farther than" graph).
pub fn exact_packing_number(view: &FiniteMetricView, eps: f64) -> Result<usize> {
    if view.is_empty() {
        return Ok(0);
    }
    let reps = representatives(view)?;
    let far = bitsets(view, &reps, eps, false);
    let all = if reps.len() == 128 { u128::MAX } else { (1u128 << reps.len()) - 1 };
    let mut best = maximal_packing(&view.restrict(&reps), eps).len();
    clique_search(&far, all, 0, &mut best);
    Ok(best)
}

fn clique_search(far: &[u128], candidates: u128, size: usize, best: &mut usize) {
    if candidates == 0 {
        *best = (*best).max(size);
        return;
    }
    let mut cand = candidates;
    while cand != 0 {
        if size + cand.count_ones() as usize <= *best {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        clique_search(far, cand & far[v], size + 1, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> FiniteMetricView {
        let rows = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        FiniteMetricView::hamming(&rows).unwrap()
    }

    #[test]
    fn two_point_patterns() {
        let v = square();
        assert_eq!(exact_cover_number(&v, 0.5).unwrap(), 2);
        let g = greedy_cover(&v, 0.5);
        assert!(g.len() >= 2 && is_cover(&v, 0.5, &g));
        let m1 = maximal_packing(&v, 1.0).len();
        let m05 = maximal_packing(&v, 0.5).len();
        assert!(m1 <= 2 && 2 <= m05);
        assert_eq!(exact_packing_number(&v, 0.5).unwrap(), 2);
        assert_eq!(exact_packing_number(&v, 0.0).unwrap(), 4);
    }

    #[test]
    fn far_apart_items() {
        let rows = vec![vec![0, 0], vec![1, 1], vec![2, 2]];
        let v = FiniteMetricView::hamming(&rows).unwrap();
        assert_eq!(greedy_cover(&v, 0.5).len(), 3);
        assert_eq!(exact_cover_number(&v, 0.5).unwrap(), 3);
        assert_eq!(greedy_cover(&v, 1.0).len(), 1);
        assert_eq!(maximal_packing(&v, 1.0).len(), 1);
    }

    #[test]
    fn zero_scale_counts_distinct_rows() {
        let rows = vec![vec![0, 1, 1], vec![0, 1, 1], vec![1, 1, 1], vec![0, 0, 0]];
        let v = FiniteMetricView::hamming(&rows).unwrap();
        assert_eq!(exact_cover_number(&v, 0.0).unwrap(), 3);
        assert_eq!(exact_packing_number(&v, 0.0).unwrap(), 3);
    }

    #[test]
    fn singleton_and_empty() {
        let v = FiniteMetricView::hamming(&[vec![1u8]]).unwrap();
        assert_eq!(maximal_packing(&v, 0.1).len(), 1);
        assert_eq!(exact_cover_number(&v, 0.1).unwrap(), 1);
        let e = FiniteMetricView::hamming::<u8>(&[]).unwrap();
        assert_eq!(exact_cover_number(&e, 0.1).unwrap(), 0);
    }
}
