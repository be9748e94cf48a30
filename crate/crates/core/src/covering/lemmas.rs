//! Randomized exact checks of the covering-number inequalities.
//!
//! Each check draws small random instances, evaluates both sides with the
//! exact oracles and counts violations.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cover::{exact_cover_number, exact_packing_number, maximal_packing};
use super::dimension::{loss_class_rows, vc_dimension};
use super::rademacher::rademacher_exact;
use super::view::FiniteMetricView;
use super::bounds::haussler_cover_bound;
use crate::classes::grid_thresholds;
use crate::domain::Label;
use crate::error::Result;
use crate::game::SimRng;
use crate::measure::BaseMeasure;
use crate::stats::mean_se;

/// Largest class drawn by the checks.
pub const MAX_CLASS: usize = 12;
/// Largest sample drawn by the checks.
pub const MAX_SAMPLE: usize = 10;

/// Outcome of one randomized check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub name: String,
    pub statement: String,
    pub instances: usize,
    pub comparisons: usize,
    pub violations: usize,
    pub first_violation: Option<String>,
}

impl LemmaReport {
    fn new(name: &str, statement: &str) -> Self {
        LemmaReport {
            name: name.into(),
            statement: statement.into(),
            instances: 0,
            comparisons: 0,
            violations: 0,
            first_violation: None,
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.comparisons += 1;
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.instances > 0
    }
}

/// A random binary class: between 2 and [`MAX_CLASS`] rows over between 1
/// and [`MAX_SAMPLE`] sample points.
fn random_binary_class(rng: &mut SimRng) -> Vec<Vec<bool>> {
    let k = rng.gen_range(2..=MAX_CLASS);
    let n = rng.gen_range(1..=MAX_SAMPLE);
    (0..k).map(|_| (0..n).map(|_| rng.gen()).collect()).collect()
}

/// Every count vector over `k` slots with total `total`.
fn compositions(k: usize, total: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            go(k, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, total, &mut Vec::with_capacity(k), &mut out);
    out
}

fn normalized(counts: &[usize]) -> Vec<f64> {
    let total: usize = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

pub const DUALITY_EPS: [f64; 5] = [0.05, 0.15, 0.25, 0.35, 0.5];

/// `M(2ε) ≤ N(ε) ≤ M(ε)` with exact packing and covering numbers, and
/// `N(ε)` at most the size of any maximal `ε`-packing.
pub fn covering_packing_duality(instances: usize, rng: &mut SimRng) -> Result<LemmaReport> {
    let mut r = LemmaReport::new("covering_packing_duality", "M(2e) <= N(e) <= M(e) on empirical Hamming views");
    for _ in 0..instances {
        let rows = random_binary_class(rng);
        let view = FiniteMetricView::hamming(&rows)?;
        for eps in DUALITY_EPS {
            let n = exact_cover_number(&view, eps)?;
            let m2 = exact_packing_number(&view, 2.0 * eps)?;
            let m1 = exact_packing_number(&view, eps)?;
            let greedy_pack = maximal_packing(&view, eps).len();
            r.check(m2 <= n && n <= m1 && n <= greedy_pack, || {
                format!("eps {eps}: M(2e) = {m2}, N(e) = {n}, M(e) = {m1}, maximal packing {greedy_pack}, rows {rows:?}")
            });
        }
        r.instances += 1;
    }
    Ok(r)
}

pub const SYMMETRIC_EPS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.6];

/// `N(ε, HΔH) ≤ N(ε/2, H)^2` on empirical measures.
pub fn symmetric_differences(instances: usize, rng: &mut SimRng) -> Result<LemmaReport> {
    let mut r = LemmaReport::new(
        "symmetric_difference_cover",
        "N(e, H xor H) <= N(e/2, H)^2 on empirical measures",
    );
    for _ in 0..instances {
        let rows = random_binary_class(rng);
        let mut diffs: Vec<Vec<bool>> = Vec::new();
        for a in &rows {
            for b in &rows {
                let d: Vec<bool> = a.iter().zip(b).map(|(x, y)| x != y).collect();
                if !diffs.contains(&d) {
                    diffs.push(d);
                }
            }
        }
        let h = FiniteMetricView::hamming(&rows)?;
        let hh = FiniteMetricView::hamming(&diffs)?;
        for eps in SYMMETRIC_EPS {
            let lhs = exact_cover_number(&hh, eps)?;
            let half = exact_cover_number(&h, eps / 2.0)?;
            r.check(lhs <= half * half, || {
                format!("eps {eps}: N(HxH) = {lhs}, N(e/2, H) = {half}, rows {rows:?}")
            });
        }
        r.instances += 1;
    }
    Ok(r)
}

pub const DISCRETIZATION_EPS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 1.0];

/// Empirical Rademacher complexity against
/// `min_ε ε + sup_f sqrt(Ê f²) sqrt(2 ln N(ε, F, ρ) / n)` with `ρ` the
/// root-mean-square metric.
pub fn discretization_bound(instances: usize, rng: &mut SimRng) -> Result<LemmaReport> {
    let mut r = LemmaReport::new(
        "discretization_bound",
        "R(F) <= min_e { e + sup_f sqrt(E f^2) sqrt(2 ln N(e, F, rms) / n) }",
    );
    for _ in 0..instances {
        let rows = random_binary_class(rng);
        let n = rows[0].len() as f64;
        let rad = rademacher_exact(&rows)?;
        let norm = rows
            .iter()
            .map(|f| (f.iter().filter(|&&b| b).count() as f64 / n).sqrt())
            .fold(0.0, f64::max);
        let rms = FiniteMetricView::rms(&rows)?;
        let mut bound = f64::INFINITY;
        for eps in DISCRETIZATION_EPS {
            let cover = exact_cover_number(&rms, eps)? as f64;
            bound = bound.min(eps + norm * (2.0 * cover.ln() / n).sqrt());
        }
        r.check(rad <= bound + 1e-12, || format!("R = {rad} > bound {bound}, rows {rows:?}"));
        r.instances += 1;
    }
    Ok(r)
}

pub const ENTROPY_EPS: [f64; 5] = [0.1, 0.3, 0.6, 0.7, 0.9];

/// `N(ε, H, d_μ) ≤ E[N(ε/2, H, d_μ̂m)]` for random binary tables on the
/// `side × side` grid under the uniform measure, with the expectation
/// estimated from `trials` samples of size `m` and a three standard error
/// allowance.
pub fn empirical_cover_entropy(
    instances: usize,
    side: u32,
    m: usize,
    trials: usize,
    rng: &mut SimRng,
) -> Result<LemmaReport> {
    let mut r = LemmaReport::new(
        "empirical_cover_entropy",
        "N(e, H, d_mu) <= E[N(e/2, H, d_mu_m)] at the largest sample size, within 3 SE",
    );
    let cells = (side * side) as usize;
    let max_class = MAX_CLASS.min(1 << cells.min(20));
    let uniform = vec![1.0 / cells as f64; cells];
    for _ in 0..instances {
        let k = rng.gen_range(2..=max_class);
        let mut rows: Vec<Vec<bool>> = Vec::with_capacity(k);
        while rows.len() < k {
            let row: Vec<bool> = (0..cells).map(|_| rng.gen()).collect();
            if !rows.contains(&row) {
                rows.push(row);
            }
        }
        let exact = FiniteMetricView::weighted(&rows, &uniform)?;
        let mut draws: Vec<Vec<f64>> = vec![Vec::with_capacity(trials); ENTROPY_EPS.len()];
        for _ in 0..trials {
            let mut counts = vec![0usize; cells];
            for _ in 0..m {
                counts[rng.gen_range(0..cells)] += 1;
            }
            let view = FiniteMetricView::weighted(&rows, &normalized(&counts))?;
            for (k, eps) in ENTROPY_EPS.iter().enumerate() {
                draws[k].push(exact_cover_number(&view, eps / 2.0)? as f64);
            }
        }
        for (k, &eps) in ENTROPY_EPS.iter().enumerate() {
            let lhs = exact_cover_number(&exact, eps)?;
            let s = mean_se(&draws[k]);
            r.check(lhs as f64 <= s.mean + 3.0 * s.se, || {
                format!("eps {eps}: N(d_mu) = {lhs} > mean {} + 3 SE {}", s.mean, s.se)
            });
        }
        r.instances += 1;
    }
    Ok(r)
}

pub const HAUSSLER_EPS: [f64; 5] = [0.05, 0.1, 0.2, 0.3, 0.5];

/// `N(ε, H, d_μ) ≤ (41/ε)^VC(H)` for random threshold subclasses of the
/// 64-point grid under random measures, plus the full threshold class under
/// the uniform measure.
pub fn haussler_thresholds(instances: usize, rng: &mut SimRng) -> Result<LemmaReport> {
    let mut r = LemmaReport::new("haussler_packing_bound", "N(e, H, d_mu) <= (41/e)^VC(H) for grid thresholds");
    let side = 8;
    let all = grid_thresholds(side);
    let points = BaseMeasure::UniformGrid { side }.grid_points().expect("grid");
    let all_rows: Vec<Vec<bool>> = all
        .iter()
        .map(|h| points.iter().map(|x| h.eval(x) == Label::Bit(true)).collect())
        .collect();
    let cells = points.len();
    let check_instance = |r: &mut LemmaReport, idx: &[usize], weights: &[f64]| -> Result<()> {
        let rows: Vec<Vec<bool>> = idx.iter().map(|&i| all_rows[i].clone()).collect();
        let vc = vc_dimension(&rows)?;
        let view = FiniteMetricView::weighted(&rows, weights)?;
        for eps in HAUSSLER_EPS {
            let n = exact_cover_number(&view, eps)?;
            let bound = haussler_cover_bound(eps, vc);
            r.check(n as f64 <= bound, || format!("eps {eps}: N = {n} > (41/e)^{vc} = {bound}"));
        }
        r.instances += 1;
        Ok(())
    };
    let full: Vec<usize> = (0..all.len()).collect();
    check_instance(&mut r, &full, &vec![1.0 / cells as f64; cells])?;
    for _ in 1..instances.max(1) {
        let k = rng.gen_range(2..=MAX_CLASS);
        let idx: Vec<usize> = full.choose_multiple(rng, k).copied().collect();
        let mut weights: Vec<f64> = (0..cells)
            .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() })
            .collect();
        if weights.iter().all(|&w| w == 0.0) {
            weights[0] = 1.0;
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        check_instance(&mut r, &idx, &weights)?;
    }
    Ok(r)
}

pub const LOSS_CLASS_EPS: [f64; 5] = [0.1, 0.3, 0.45, 0.6, 0.8];

/// `sup_n sup_x N(ε, H, d_μ̂n) ≤ sup_μ̃ N(2ε/|Y|, ℓ∘H, d_μ̃)` on small
/// multiclass instances.
///
/// The left side ranges over every multiset of at most four domain points;
/// the right side over the product of each such empirical measure with the
/// uniform label distribution and over every empirical measure on at most
/// three labeled pairs. The product measures are also compared pointwise.
pub fn loss_class_inequality(instances: usize, rng: &mut SimRng) -> Result<LemmaReport> {
    let mut r = LemmaReport::new(
        "loss_class_cover",
        "sup N(e, H, d_mu_n) <= sup N(2e/|Y|, loss class, d_mu~)",
    );
    for _ in 0..instances {
        let points = rng.gen_range(3..=4usize);
        let k = rng.gen_range(2..=3usize);
        let labels: Vec<u32> = (0..k as u32).collect();
        let max_class = MAX_CLASS.min(k.pow(points as u32));
        let size = rng.gen_range(2..=max_class);
        let mut rows: Vec<Vec<u32>> = Vec::with_capacity(size);
        while rows.len() < size {
            let row: Vec<u32> = (0..points).map(|_| rng.gen_range(0..k as u32)).collect();
            if !rows.contains(&row) {
                rows.push(row);
            }
        }
        let loss = loss_class_rows(&rows, &labels);
        let mut empirical_measures: Vec<Vec<f64>> = Vec::new();
        for s in 1..=4 {
            empirical_measures.extend(compositions(points, s).iter().map(|c| normalized(c)));
        }
        let mut joint_measures: Vec<Vec<f64>> = Vec::new();
        for s in 1..=3 {
            joint_measures.extend(compositions(points * k, s).iter().map(|c| normalized(c)));
        }
        for eps in LOSS_CLASS_EPS {
            let scaled = 2.0 * eps / k as f64;
            let mut lhs = 0;
            let mut rhs = 0;
            for w in &empirical_measures {
                let n = exact_cover_number(&FiniteMetricView::weighted(&rows, w)?, eps)?;
                let product: Vec<f64> = w.iter().flat_map(|p| std::iter::repeat_n(p / k as f64, k)).collect();
                let n_loss = exact_cover_number(&FiniteMetricView::weighted(&loss, &product)?, scaled)?;
                r.check(n <= n_loss, || {
                    format!("eps {eps}: product measure gives {n_loss} < {n}, rows {rows:?}, measure {w:?}")
                });
                lhs = lhs.max(n);
                rhs = rhs.max(n_loss);
            }
            for w in &joint_measures {
                rhs = rhs.max(exact_cover_number(&FiniteMetricView::weighted(&loss, w)?, scaled)?);
            }
            r.check(lhs <= rhs, || format!("eps {eps}: sup left {lhs} > sup right {rhs}, rows {rows:?}"));
        }
        r.instances += 1;
    }
    Ok(r)
}

/// Sizes for [`run_entropy_suite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySuiteConfig {
    pub instances: usize,
    pub entropy_side: u32,
    pub entropy_sample: usize,
    pub entropy_trials: usize,
}

impl Default for EntropySuiteConfig {
    fn default() -> Self {
        EntropySuiteConfig {
            instances: 100,
            entropy_side: 2,
            entropy_sample: 4000,
            entropy_trials: 16,
        }
    }
}

/// Runs every check in a fixed order from one random stream.
pub fn run_entropy_suite(config: &EntropySuiteConfig, rng: &mut SimRng) -> Result<Vec<LemmaReport>> {
    let n = config.instances;
    Ok(vec![
        covering_packing_duality(n, rng)?,
        symmetric_differences(n, rng)?,
        discretization_bound(n, rng)?,
        empirical_cover_entropy(n, config.entropy_side, config.entropy_sample, config.entropy_trials, rng)?,
        haussler_thresholds(n, rng)?,
        loss_class_inequality(n, rng)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(4, 2).len(), 10);
        assert_eq!(compositions(3, 1).len(), 3);
        assert!(compositions(3, 4).iter().all(|c| c.iter().sum::<usize>() == 4));
    }

    #[test]
    fn small_suite_passes() {
        let mut rng = SimRng::seed_from_u64(0);
        let cfg = EntropySuiteConfig {
            instances: 5,
            entropy_trials: 4,
            entropy_sample: 500,
            ..Default::default()
        };
        for report in run_entropy_suite(&cfg, &mut rng).unwrap() {
            assert!(report.passed(), "{report:?}");
        }
    }
}
