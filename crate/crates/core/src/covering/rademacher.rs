use crate::error::{Error, Result};

/// Largest sample for exhaustive sign enumeration.
pub const RADEMACHER_LIMIT: usize = 12;

/// Exact empirical Rademacher complexity
/// `(1/n) E_τ[sup_f Σ τ_i f(x_i)]` of `{0,1}`-valued functions, one row per
/// function over the `n` sample points.
pub fn rademacher_exact(rows: &[Vec<bool>]) -> Result<f64> {
    let Some(n) = rows.first().map(Vec::len) else {
        return Err(Error::Invalid("empty function class".into()));
    };
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("rows must share a nonzero width".into()));
    }
    if n > RADEMACHER_LIMIT {
        return Err(Error::TooLarge {
            what: "sample size",
            size: n,
            limit: RADEMACHER_LIMIT,
        });
    }
    let masks: Vec<u32> = rows
        .iter()
        .map(|r| r.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (u32::from(b) << i)))
        .collect();
    let full = (1u32 << n) - 1;
    let total: i64 = (0..=full)
        .map(|plus| {
            masks
                .iter()
                .map(|&m| (m & plus).count_ones() as i64 - (m & !plus & full).count_ones() as i64)
                .max()
                .expect("nonempty")
        })
        .sum();
    Ok(total as f64 / (f64::from(1u32 << n) * n as f64))
}
