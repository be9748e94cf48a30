use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One scale of the entropy regret bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTerm {
    pub eps: f64,
    /// Complexity value at `eps^2`.
    pub c: f64,
    pub value: f64,
}

/// The entropy regret bound minimized over a scale grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretBound {
    pub value: f64,
    pub eps: f64,
    pub terms: Vec<BoundTerm>,
}

/// `min over ε of 6 (εT/σ + sqrt(T ln C(ε²)))`, with `c_values[i]` the
/// complexity at `eps_grid[i]^2`.
pub fn eval_regret_bound(horizon: usize, sigma: f64, eps_grid: &[f64], c_values: &[f64]) -> Result<RegretBound> {
    if eps_grid.is_empty() || eps_grid.len() != c_values.len() {
        return Err(Error::Invalid(format!(
            "{} scales but {} complexity values",
            eps_grid.len(),
            c_values.len()
        )));
    }
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::Config(format!("sigma {sigma} outside (0, 1]")));
    }
    let t = horizon as f64;
    let mut terms = Vec::with_capacity(eps_grid.len());
    for (&eps, &c) in eps_grid.iter().zip(c_values) {
        if !(eps > 0.0) || !(c >= 1.0) {
            return Err(Error::Invalid(format!("need eps > 0 and C >= 1, got eps = {eps}, C = {c}")));
        }
        let value = 6.0 * (eps * t / sigma + (t * c.ln()).sqrt());
        terms.push(BoundTerm { eps, c, value });
    }
    let best = terms
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .copied()
        .expect("nonempty");
    Ok(RegretBound {
        value: best.value,
        eps: best.eps,
        terms,
    })
}

/// `6 inf_ε (εT/σ + sqrt(T G ln(41 |Y| / ε²)))` over a scale grid.
pub fn graph_entropy_bound(horizon: usize, graph_dim: usize, labels: usize, sigma: f64, eps_grid: &[f64]) -> f64 {
    let t = horizon as f64;
    let g = graph_dim as f64;
    eps_grid
        .iter()
        .map(|&eps| 6.0 * (eps * t / sigma + (t * g * (41.0 * labels as f64 / (eps * eps)).ln()).sqrt()))
        .fold(f64::INFINITY, f64::min)
}

/// `12 sqrt(T G ln(41 T |Y| / σ²))`, the value of the graph-dimension bound
/// at `ε = σ / sqrt(T)`.
pub fn graph_dimension_bound(horizon: usize, graph_dim: usize, labels: usize, sigma: f64) -> f64 {
    let t = horizon as f64;
    12.0 * (t * graph_dim as f64 * (41.0 * t * labels as f64 / (sigma * sigma)).ln()).sqrt()
}

/// `(41/ε)^VC`, the packing bound for binary classes.
pub fn haussler_cover_bound(eps: f64, vc: usize) -> f64 {
    (41.0 / eps).powi(vc as i32)
}

/// `sqrt(2 T ln N)`, the expected-regret guarantee of exponential weights
/// over `N` experts.
pub fn rewa_regret_bound(horizon: usize, experts: usize) -> f64 {
    (2.0 * horizon as f64 * (experts as f64).ln()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_scale_value() {
        let b = eval_regret_bound(1024, 1.0, &[0.1], &[100.0]).unwrap();
        let expect = 6.0 * (102.4 + (1024.0 * 100f64.ln()).sqrt());
        assert!((b.value - expect).abs() < 1e-9);
        assert!((b.value - 1026.4).abs() < 0.05);
    }

    #[test]
    fn closed_form_value() {
        let v = graph_dimension_bound(100, 1, 2, 1.0);
        assert!((v - 360.2).abs() < 0.05, "{v}");
    }

    #[test]
    fn unit_complexity_vanishes_on_fine_grids() {
        let grid: Vec<f64> = (1..=20).map(|k| 2f64.powi(-k)).collect();
        let b = eval_regret_bound(1000, 1.0, &grid, &[1.0; 20]).unwrap();
        assert!(b.value < 0.01);
    }

    #[test]
    fn bound_grows_as_sigma_shrinks() {
        let a = eval_regret_bound(1024, 1.0, &[0.1, 0.2], &[10.0, 5.0]).unwrap();
        let b = eval_regret_bound(1024, 0.5, &[0.1, 0.2], &[10.0, 5.0]).unwrap();
        assert!(b.value > a.value);
    }

    #[test]
    fn closed_form_dominates_grid_minimum() {
        let t = 1024;
        let grid = [1.0 / 32.0];
        assert!(graph_entropy_bound(t, 1, 2, 1.0, &grid) <= graph_dimension_bound(t, 1, 2, 1.0) + 1e-9);
        assert!(eval_regret_bound(10, 1.0, &[0.1], &[0.5]).is_err());
    }
}
