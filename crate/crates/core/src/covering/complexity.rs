use serde::{Deserialize, Serialize};

use super::cover::{exact_cover_number, greedy_cover};
use super::view::{label_rows, FiniteMetricView};
use crate::classes::Hypothesis;
use crate::domain::Instance;
use crate::error::{Error, Result};
use crate::game::SimRng;
use crate::measure::{make_smooth_process, BaseMeasure, ProcessFamily};
use crate::stats::mean_se;

/// Distinct items up to which empirical covers are counted exactly.
pub const EXACT_ORACLE_LIMIT: usize = 20;

/// How a covering number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMethod {
    Exact,
    Greedy,
    Mixed,
}

impl CoverMethod {
    fn merge(self, other: CoverMethod) -> CoverMethod {
        if self == other {
            self
        } else {
            CoverMethod::Mixed
        }
    }
}

/// Exact covering number for small views, greedy upper bound otherwise.
pub fn cover_number(view: &FiniteMetricView, eps: f64) -> Result<(usize, CoverMethod)> {
    if view.distinct_representatives().len() <= EXACT_ORACLE_LIMIT {
        Ok((exact_cover_number(view, eps)?, CoverMethod::Exact))
    } else {
        Ok((greedy_cover(view, eps).len(), CoverMethod::Greedy))
    }
}

/// The truncated grid over which the supremum is taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityGrid {
    pub sigma: f64,
    pub eps: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub families: Vec<ProcessFamily>,
    pub trials: usize,
}

/// Mean empirical covering number for one `(n, family, ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityCell {
    pub n: usize,
    pub family: String,
    pub eps: f64,
    pub mean: f64,
    pub se: f64,
    pub trials: usize,
    pub method: CoverMethod,
}

/// The estimate at one scale: the largest cell mean over the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub eps: f64,
    pub value: f64,
    pub cells: Vec<ComplexityCell>,
    /// Which sample sizes and processes the supremum was restricted to.
    pub truncation: String,
}

/// Estimates `C_{ε,σ}` at every scale of the grid.
///
/// For each sample size and process family, draws `trials` paths from the
/// σ-smooth process, builds the class view on each path with `builder` and
/// averages its covering number. The supremum over sample sizes and
/// processes is truncated to the grid, so the result is a lower estimate of
/// the true quantity.
pub fn estimate_complexity_c<F>(
    builder: F,
    mu: BaseMeasure,
    grid: &ComplexityGrid,
    rng: &mut SimRng,
) -> Result<Vec<ComplexityEstimate>>
where
    F: Fn(&[Instance]) -> Result<FiniteMetricView>,
{
    if grid.trials == 0 || grid.n_grid.is_empty() || grid.families.is_empty() || grid.eps.is_empty() {
        return Err(Error::Config("complexity grid needs trials, sizes, families and scales".into()));
    }
    let truncation = format!(
        "sup over n in {:?} and processes {:?} at sigma = {}, {} trials each",
        grid.n_grid,
        grid.families.iter().map(ProcessFamily::name).collect::<Vec<_>>(),
        grid.sigma,
        grid.trials
    );
    let mut samples: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut methods: Vec<Vec<CoverMethod>> = Vec::new();
    let mut labels: Vec<(usize, String)> = Vec::new();
    for &n in &grid.n_grid {
        for family in &grid.families {
            let process = make_smooth_process(family, grid.sigma, mu, n)?;
            let mut per_eps = vec![Vec::with_capacity(grid.trials); grid.eps.len()];
            let mut method = vec![None::<CoverMethod>; grid.eps.len()];
            for _ in 0..grid.trials {
                let path = process.sample_path(rng);
                let view = builder(&path)?;
                for (k, &eps) in grid.eps.iter().enumerate() {
                    let (count, m) = cover_number(&view, eps)?;
                    per_eps[k].push(count as f64);
                    method[k] = Some(method[k].map_or(m, |prev| prev.merge(m)));
                }
            }
            samples.push(per_eps);
            methods.push(method.into_iter().map(|m| m.expect("trials > 0")).collect());
            labels.push((n, family.name()));
        }
    }
    Ok(grid
        .eps
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let cells: Vec<ComplexityCell> = labels
                .iter()
                .enumerate()
                .map(|(c, (n, family))| {
                    let s = mean_se(&samples[c][k]);
                    ComplexityCell {
                        n: *n,
                        family: family.clone(),
                        eps,
                        mean: s.mean,
                        se: s.se,
                        trials: grid.trials,
                        method: methods[c][k],
                    }
                })
                .collect();
            let value = cells.iter().map(|c| c.mean).fold(f64::NEG_INFINITY, f64::max);
            ComplexityEstimate {
                eps,
                value,
                cells,
                truncation: truncation.clone(),
            }
        })
        .collect())
}

/// A builder evaluating a fixed finite class on each sample.
///
/// Members that behave identically on the sample are merged first; covering
/// numbers do not change, since merged members sit at distance zero.
pub fn finite_class_builder(class: Vec<Hypothesis>) -> impl Fn(&[Instance]) -> Result<FiniteMetricView> {
    move |sample: &[Instance]| {
        if sample.is_empty() {
            return Err(Error::Invalid("empirical distance needs a nonempty sample".into()));
        }
        let mut rows = label_rows(&class, sample);
        rows.sort_unstable();
        rows.dedup();
        FiniteMetricView::hamming(&rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{constants, IndicatorHypothesis, NonDyadicRational};
    use rand::SeedableRng;

    fn grid(eps: Vec<f64>) -> ComplexityGrid {
        ComplexityGrid {
            sigma: 0.5,
            eps,
            n_grid: vec![1, 10, 50],
            families: vec![ProcessFamily::Base, ProcessFamily::SlidingWindow { width: 0.5 }],
            trials: 5,
        }
    }

    #[test]
    fn rational_indicators_have_unit_complexity() {
        let rationals: Vec<NonDyadicRational> =
            [(1, 3), (2, 3), (1, 5), (4, 7)].iter().map(|&(a, b)| NonDyadicRational::new(a, b).unwrap()).collect();
        let class: Vec<Hypothesis> = (0..16u32)
            .map(|m| {
                Hypothesis::Indicator(IndicatorHypothesis::rationals(
                    rationals.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, r)| *r),
                ))
            })
            .collect();
        let mut rng = SimRng::seed_from_u64(0);
        let est = estimate_complexity_c(finite_class_builder(class), BaseMeasure::UniformUnit, &grid(vec![0.1, 0.5]), &mut rng)
            .unwrap();
        for e in est {
            assert_eq!(e.value, 1.0);
            assert!(e.truncation.contains("sliding_window"));
        }
    }

    #[test]
    fn constants_need_one_ball_each() {
        let mut rng = SimRng::seed_from_u64(1);
        let est = estimate_complexity_c(finite_class_builder(constants(7)), BaseMeasure::UniformUnit, &grid(vec![0.9]), &mut rng)
            .unwrap();
        assert_eq!(est[0].value, 7.0);
        assert!(est[0].cells.iter().all(|c| c.method == CoverMethod::Exact));
    }
}
