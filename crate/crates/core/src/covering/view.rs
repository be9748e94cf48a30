use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classes::Hypothesis;
use crate::domain::{Instance, Label};
use crate::error::{Error, Result};
use crate::game::SimRng;
use crate::measure::BaseMeasure;

const METRIC_TOL: f64 = 1e-12;

/// A finite set of items with a precomputed pairwise distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricView {
    len: usize,
    distance: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    items: Option<Vec<Hypothesis>>,
}

impl FiniteMetricView {
    /// Checks a row-major `len × len` matrix for the pseudometric axioms.
    pub fn from_matrix(len: usize, distance: Vec<f64>) -> Result<Self> {
        if distance.len() != len * len {
            return Err(Error::Invalid(format!(
                "distance matrix has {} entries for {len} items",
                distance.len()
            )));
        }
        let d = |i: usize, j: usize| distance[i * len + j];
        for i in 0..len {
            if d(i, i) != 0.0 {
                return Err(Error::Invalid(format!("nonzero self-distance at item {i}")));
            }
            for j in 0..len {
                let v = d(i, j);
                if !(0.0..=1.0 + METRIC_TOL).contains(&v) || (v - d(j, i)).abs() > METRIC_TOL {
                    return Err(Error::Invalid(format!("bad distance {v} between {i} and {j}")));
                }
            }
        }
        for i in 0..len {
            for j in 0..len {
                for k in 0..len {
                    if d(i, k) > d(i, j) + d(j, k) + METRIC_TOL {
                        return Err(Error::Invalid(format!(
                            "triangle inequality fails for items {i}, {j}, {k}"
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetricView {
            len,
            distance,
            items: None,
        })
    }

    fn from_fn(len: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut distance = vec![0.0; len * len];
        for i in 0..len {
            for j in (i + 1)..len {
                let v = f(i, j);
                distance[i * len + j] = v;
                distance[j * len + i] = v;
            }
        }
        FiniteMetricView {
            len,
            distance,
            items: None,
        }
    }

    /// Weighted disagreement `Σ_k w_k 1{rows[i][k] ≠ rows[j][k]}`.
    ///
    /// The weights must be nonnegative and sum to one.
    pub fn weighted<T: PartialEq>(rows: &[Vec<T>], weights: &[f64]) -> Result<Self> {
        check_rows(rows, weights.len())?;
        if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid("weights must be a probability vector".into()));
        }
        Ok(FiniteMetricView::from_fn(rows.len(), |i, j| {
            rows[i]
                .iter()
                .zip(&rows[j])
                .zip(weights)
                .filter(|((a, b), _)| a != b)
                .map(|(_, w)| w)
                .sum::<f64>()
                .min(1.0)
        }))
    }

    /// Fraction of coordinates on which two rows differ.
    pub fn hamming<T: PartialEq>(rows: &[Vec<T>]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        check_rows(rows, width)?;
        if width == 0 && rows.len() > 1 {
            return Err(Error::Invalid("rows have no coordinates".into()));
        }
        Ok(FiniteMetricView::from_fn(rows.len(), |i, j| {
            let diff = rows[i].iter().zip(&rows[j]).filter(|(a, b)| a != b).count();
            diff as f64 / width as f64
        }))
    }

    /// Root-mean-square difference of `{0,1}` rows, `sqrt` of the Hamming
    /// fraction.
    pub fn rms(rows: &[Vec<bool>]) -> Result<Self> {
        let mut v = FiniteMetricView::hamming(rows)?;
        for d in &mut v.distance {
            *d = d.sqrt();
        }
        Ok(v)
    }

    /// `d_n` between hypotheses on a sample.
    pub fn empirical(hypotheses: &[Hypothesis], sample: &[Instance]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::Invalid("empirical distance needs a nonempty sample".into()));
        }
        let rows = label_rows(hypotheses, sample);
        let mut v = FiniteMetricView::hamming(&rows)?;
        v.items = Some(hypotheses.to_vec());
        Ok(v)
    }

    /// `d_μ` between hypotheses: exact on the grid, Monte Carlo with
    /// `n_samples` draws on the unit interval.
    pub fn measure(hypotheses: &[Hypothesis], mu: &BaseMeasure, n_samples: usize, rng: &mut SimRng) -> Result<Self> {
        let points = match mu.grid_points() {
            Some(points) => points,
            None => (0..n_samples.max(1)).map(|_| mu.sample(rng)).collect(),
        };
        FiniteMetricView::empirical(hypotheses, &points)
    }

    /// `d_μ` on the grid under cell weights `weights` (one per cell).
    pub fn grid_measure(hypotheses: &[Hypothesis], side: u32, weights: &[f64]) -> Result<Self> {
        let points = BaseMeasure::UniformGrid { side }.grid_points().expect("grid");
        let rows = label_rows(hypotheses, &points);
        let mut v = FiniteMetricView::weighted(&rows, weights)?;
        v.items = Some(hypotheses.to_vec());
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distance[i * self.len + j]
    }

    pub fn items(&self) -> Option<&[Hypothesis]> {
        self.items.as_deref()
    }

    pub fn max_distance(&self) -> f64 {
        self.distance.iter().copied().fold(0.0, f64::max)
    }

    /// The sub-view on `indices`.
    pub fn restrict(&self, indices: &[usize]) -> FiniteMetricView {
        let mut v = FiniteMetricView::from_fn(indices.len(), |a, b| self.distance(indices[a], indices[b]));
        v.items = self
            .items
            .as_ref()
            .map(|items| indices.iter().map(|&i| items[i].clone()).collect());
        v
    }

    /// Representatives of the classes of items at distance zero, in index
    /// order.
    pub fn distinct_representatives(&self) -> Vec<usize> {
        let mut reps: Vec<usize> = Vec::new();
        for i in 0..self.len {
            if reps.iter().all(|&r| self.distance(r, i) > 0.0) {
                reps.push(i);
            }
        }
        reps
    }
}

fn check_rows<T>(rows: &[Vec<T>], width: usize) -> Result<()> {
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(Error::Invalid(format!(
            "row {i} has {} coordinates, expected {width}",
            rows[i].len()
        )));
    }
    Ok(())
}

/// Values of each hypothesis on each point, with labels replaced by small
/// per-point codes so rows compare cheaply.
pub fn label_rows(hypotheses: &[Hypothesis], points: &[Instance]) -> Vec<Vec<u32>> {
    let mut rows = vec![Vec::with_capacity(points.len()); hypotheses.len()];
    let mut codes: Vec<Label> = Vec::new();
    for x in points {
        codes.clear();
        for (row, h) in rows.iter_mut().zip(hypotheses) {
            let y = h.eval(x);
            let code = match codes.iter().position(|c| *c == y) {
                Some(c) => c,
                None => {
                    codes.push(y);
                    codes.len() - 1
                }
            };
            row.push(code as u32);
        }
    }
    rows
}

/// `d_n(h1, h2)`: fraction of sample points where the two disagree.
pub fn empirical_distance(h1: &Hypothesis, h2: &Hypothesis, sample: &[Instance]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::Invalid("empirical distance needs a nonempty sample".into()));
    }
    let diff = sample.iter().filter(|x| h1.disagree(h2, x)).count();
    Ok(diff as f64 / sample.len() as f64)
}

/// A disagreement probability with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub value: f64,
    pub se: f64,
    pub exact: bool,
}

/// `d_μ(h1, h2)`, summed exactly over the grid or estimated from
/// `n_samples` uniform draws on the unit interval.
pub fn d_mu_estimate(
    h1: &Hypothesis,
    h2: &Hypothesis,
    mu: &BaseMeasure,
    n_samples: usize,
    rng: &mut SimRng,
) -> Result<DistanceEstimate> {
    if let Some(points) = mu.grid_points() {
        return Ok(DistanceEstimate {
            value: empirical_distance(h1, h2, &points)?,
            se: 0.0,
            exact: true,
        });
    }
    if n_samples == 0 {
        return Err(Error::Invalid("Monte Carlo estimate needs samples".into()));
    }
    let hits = (0..n_samples)
        .filter(|_| h1.disagree(h2, &Instance::Dyadic(rng.gen())))
        .count();
    let p = hits as f64 / n_samples as f64;
    Ok(DistanceEstimate {
        value: p,
        se: crate::stats::proportion_se(p, n_samples),
        exact: false,
    })
}
