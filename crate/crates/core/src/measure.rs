//! Base measures, σ-smooth distributions and smooth processes.
//!
//! Distributions have piecewise-constant density against the base measure,
//! so the density bound is a maximum over finitely many pieces and the
//! σ-smoothness certificate is a direct comparison.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{grid_cells, Instance};
use crate::error::{Error, Result};
use crate::game::SimRng;

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

/// Relative slack when comparing a density bound with `1/σ`.
const CERTIFICATE_RTOL: f64 = 1e-12;
/// Allowed deviation of total mass from 1.
const MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseMeasure {
    UniformUnit,
    UniformGrid { side: u32 },
}

impl BaseMeasure {
    pub fn sample(&self, rng: &mut SimRng) -> Instance {
        match *self {
            BaseMeasure::UniformUnit => Instance::Dyadic(rng.gen()),
            BaseMeasure::UniformGrid { side } => {
                let cells = side * side;
                Instance::Grid {
                    index: rng.gen_range(1..=cells),
                    side,
                }
            }
        }
    }

    /// Number of grid cells, or `None` for the unit interval.
    pub fn cells(&self) -> Option<usize> {
        match *self {
            BaseMeasure::UniformUnit => None,
            BaseMeasure::UniformGrid { side } => Some((side * side) as usize),
        }
    }

    /// Every grid point, in index order.
    pub fn grid_points(&self) -> Option<Vec<Instance>> {
        match *self {
            BaseMeasure::UniformUnit => None,
            BaseMeasure::UniformGrid { side } => Some(
                (1..=side * side)
                    .map(|index| Instance::Grid { index, side })
                    .collect(),
            ),
        }
    }

    pub fn contains(&self, x: &Instance) -> bool {
        match (self, x) {
            (BaseMeasure::UniformUnit, Instance::Dyadic(_)) => true,
            (BaseMeasure::UniformGrid { side }, Instance::Grid { side: s, .. }) => side == s,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let BaseMeasure::UniformGrid { side } = self {
            grid_cells(*side)?;
        }
        Ok(())
    }

    /// The base measure itself as a distribution.
    pub fn as_distribution(&self) -> SmoothDistribution {
        match *self {
            BaseMeasure::UniformUnit => SmoothDistribution::Unit {
                pieces: vec![UnitPiece {
                    lo: 0,
                    hi: u64::MAX,
                    mass: 1.0,
                }],
            },
            BaseMeasure::UniformGrid { side } => {
                let cells = (side * side) as usize;
                SmoothDistribution::Grid {
                    side,
                    masses: vec![1.0 / cells as f64; cells],
                }
            }
        }
    }
}

/// Mass spread uniformly over the dyadic points `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitPiece {
    pub lo: u64,
    pub hi: u64,
    pub mass: f64,
}

impl UnitPiece {
    /// Lebesgue length of the piece.
    pub fn length(&self) -> f64 {
        (u128::from(self.hi) - u128::from(self.lo) + 1) as f64 / TWO_POW_64
    }
}

/// A distribution with piecewise-constant density against a base measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", try_from = "DistributionRepr")]
pub enum SmoothDistribution {
    Unit { pieces: Vec<UnitPiece> },
    Grid { side: u32, masses: Vec<f64> },
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum DistributionRepr {
    Unit { pieces: Vec<UnitPiece> },
    Grid { side: u32, masses: Vec<f64> },
}

impl TryFrom<DistributionRepr> for SmoothDistribution {
    type Error = Error;

    fn try_from(repr: DistributionRepr) -> Result<Self> {
        match repr {
            DistributionRepr::Unit { pieces } => SmoothDistribution::unit(pieces),
            DistributionRepr::Grid { side, masses } => SmoothDistribution::grid(side, masses),
        }
    }
}

fn check_masses<'a>(masses: impl Iterator<Item = &'a f64>) -> Result<()> {
    let mut total = 0.0;
    for &m in masses {
        if !m.is_finite() || m < 0.0 {
            return Err(Error::Config(format!("invalid mass {m}")));
        }
        total += m;
    }
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::Config(format!(
            "distribution is not normalized (total mass {total})"
        )));
    }
    Ok(())
}

impl SmoothDistribution {
    /// Pieces must be disjoint and sorted; masses must sum to one.
    pub fn unit(pieces: Vec<UnitPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Config("distribution has no pieces".into()));
        }
        for piece in &pieces {
            if piece.lo > piece.hi {
                return Err(Error::Config(format!(
                    "empty piece {}..={}",
                    piece.lo, piece.hi
                )));
            }
        }
        for pair in pieces.windows(2) {
            if pair[0].hi >= pair[1].lo {
                return Err(Error::Config("pieces overlap or are unsorted".into()));
            }
        }
        check_masses(pieces.iter().map(|p| &p.mass))?;
        Ok(SmoothDistribution::Unit { pieces })
    }

    pub fn grid(side: u32, masses: Vec<f64>) -> Result<Self> {
        let cells = grid_cells(side)?;
        if masses.len() as u64 != cells {
            return Err(Error::Config(format!(
                "{} masses for {cells} grid cells",
                masses.len()
            )));
        }
        check_masses(masses.iter())?;
        Ok(SmoothDistribution::Grid { side, masses })
    }

    /// Uniform over `[a, b)`.
    pub fn uniform_interval(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::Config(format!("bad interval [{a}, {b})")));
        }
        let lo = (a * TWO_POW_64) as u64;
        let hi = if b >= 1.0 {
            u64::MAX
        } else {
            ((b * TWO_POW_64) as u64).saturating_sub(1)
        };
        SmoothDistribution::unit(vec![UnitPiece { lo, hi, mass: 1.0 }])
    }

    /// All mass on the listed grid cells (1-based), spread uniformly.
    pub fn uniform_on_cells(side: u32, cells: &[u32]) -> Result<Self> {
        let total = grid_cells(side)? as usize;
        if cells.is_empty() {
            return Err(Error::Config("no cells".into()));
        }
        let mut masses = vec![0.0; total];
        let w = 1.0 / cells.len() as f64;
        for &c in cells {
            if c == 0 || c as usize > total {
                return Err(Error::Config(format!("cell {c} outside grid")));
            }
            masses[c as usize - 1] += w;
        }
        SmoothDistribution::grid(side, masses)
    }

    /// Supremum of the density against the base measure of the same domain.
    pub fn density_bound(&self) -> f64 {
        match self {
            SmoothDistribution::Unit { pieces } => pieces
                .iter()
                .filter(|p| p.mass > 0.0)
                .map(|p| p.mass / p.length())
                .fold(0.0, f64::max),
            SmoothDistribution::Grid { side, masses } => {
                let cells = f64::from(*side) * f64::from(*side);
                masses.iter().map(|&m| m * cells).fold(0.0, f64::max)
            }
        }
    }

    pub fn matches(&self, mu: &BaseMeasure) -> bool {
        matches!(
            (self, mu),
            (SmoothDistribution::Unit { .. }, BaseMeasure::UniformUnit)
        ) || matches!(
            (self, mu),
            (SmoothDistribution::Grid { side, .. }, BaseMeasure::UniformGrid { side: s }) if side == s
        )
    }

    pub fn sample(&self, rng: &mut SimRng) -> Instance {
        let u: f64 = rng.gen();
        match self {
            SmoothDistribution::Unit { pieces } => {
                let piece = pick(pieces.iter().map(|p| p.mass), u)
                    .map(|i| pieces[i])
                    .unwrap_or(pieces[pieces.len() - 1]);
                Instance::Dyadic(rng.gen_range(piece.lo..=piece.hi))
            }
            SmoothDistribution::Grid { side, masses } => {
                let i = pick(masses.iter().copied(), u).unwrap_or(masses.len() - 1);
                Instance::Grid {
                    index: i as u32 + 1,
                    side: *side,
                }
            }
        }
    }
}

/// First index whose cumulative mass exceeds `u`, skipping empty pieces.
fn pick(masses: impl Iterator<Item = f64>, u: f64) -> Option<usize> {
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, m) in masses.enumerate() {
        if m <= 0.0 {
            continue;
        }
        last_positive = Some(i);
        acc += m;
        if u < acc {
            return Some(i);
        }
    }
    last_positive
}

/// Draws one instance from `d`.
pub fn sample_instance(d: &SmoothDistribution, rng: &mut SimRng) -> Instance {
    d.sample(rng)
}

/// Whether `d` has density at most `1/sigma` against `mu`.
pub fn smoothness_certificate(d: &SmoothDistribution, mu: &BaseMeasure, sigma: f64) -> Result<bool> {
    check_sigma(sigma)?;
    if !d.matches(mu) {
        return Err(Error::Domain(format!(
            "distribution over a different domain than {mu:?}"
        )));
    }
    Ok(d.density_bound() <= (1.0 / sigma) * (1.0 + CERTIFICATE_RTOL))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::Config(format!("sigma {sigma} outside (0, 1]")));
    }
    Ok(())
}

/// A certified sequence of σ-smooth distributions, fixed before play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothProcess {
    sigma: f64,
    base: BaseMeasure,
    distributions: Vec<SmoothDistribution>,
}

impl SmoothProcess {
    pub fn new(sigma: f64, base: BaseMeasure, distributions: Vec<SmoothDistribution>) -> Result<Self> {
        base.validate()?;
        for (t, d) in distributions.iter().enumerate() {
            if !smoothness_certificate(d, &base, sigma)? {
                return Err(Error::Config(format!(
                    "round {} distribution has density {} > 1/sigma = {}",
                    t + 1,
                    d.density_bound(),
                    1.0 / sigma
                )));
            }
        }
        Ok(SmoothProcess {
            sigma,
            base,
            distributions,
        })
    }

    /// `T` copies of the base measure; valid for every σ.
    pub fn iid(base: BaseMeasure, horizon: usize) -> Result<Self> {
        SmoothProcess::new(1.0, base, vec![base.as_distribution(); horizon])
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn base(&self) -> BaseMeasure {
        self.base
    }

    pub fn horizon(&self) -> usize {
        self.distributions.len()
    }

    pub fn distributions(&self) -> &[SmoothDistribution] {
        &self.distributions
    }

    /// One independent draw per round.
    pub fn sample_path(&self, rng: &mut SimRng) -> Vec<Instance> {
        self.distributions.iter().map(|d| d.sample(rng)).collect()
    }

    /// Re-checks every certificate.
    pub fn verify(&self) -> Result<()> {
        SmoothProcess::new(self.sigma, self.base, self.distributions.clone()).map(|_| ())
    }
}

/// Named families of σ-smooth processes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum ProcessFamily {
    /// Every round uses the base measure.
    Base,
    /// Uniform on a window of the given width whose position slides from
    /// the left end of the domain to the right end over the horizon.
    SlidingWindow { width: f64 },
    /// Half base measure, half uniform on a sliding window.
    HalfWindow { width: f64 },
}

impl ProcessFamily {
    pub fn name(&self) -> String {
        match self {
            ProcessFamily::Base => "base".into(),
            ProcessFamily::SlidingWindow { width } => format!("sliding_window({width})"),
            ProcessFamily::HalfWindow { width } => format!("half_window({width})"),
        }
    }

    /// The family member that is exactly `1/sigma`-dense, when one exists.
    pub fn tight(sigma: f64) -> ProcessFamily {
        if sigma >= 1.0 {
            ProcessFamily::Base
        } else {
            ProcessFamily::SlidingWindow { width: sigma }
        }
    }
}

fn window_distribution(base: &BaseMeasure, width: f64, t: usize, horizon: usize) -> Result<SmoothDistribution> {
    if !(width > 0.0 && width <= 1.0) {
        return Err(Error::Config(format!("window width {width} outside (0, 1]")));
    }
    let progress = if horizon > 1 {
        t as f64 / (horizon - 1) as f64
    } else {
        0.0
    };
    match *base {
        BaseMeasure::UniformUnit => {
            let len = ((width * TWO_POW_64).round() as u128).clamp(1, 1u128 << 64);
            let max_lo = (1u128 << 64) - len;
            let lo = ((progress * max_lo as f64) as u128).min(max_lo);
            let hi = lo + len - 1;
            SmoothDistribution::unit(vec![UnitPiece {
                lo: lo as u64,
                hi: hi as u64,
                mass: 1.0,
            }])
        }
        BaseMeasure::UniformGrid { side } => {
            let cells = side * side;
            let k = ((width * f64::from(cells)).round() as u32).clamp(1, cells);
            let start = (progress * f64::from(cells - k)).round() as u32;
            let window: Vec<u32> = (start + 1..=start + k).collect();
            SmoothDistribution::uniform_on_cells(side, &window)
        }
    }
}

fn half_window_distribution(base: &BaseMeasure, width: f64, t: usize, horizon: usize) -> Result<SmoothDistribution> {
    let window = window_distribution(base, width, t, horizon)?;
    match (base.as_distribution(), window) {
        (SmoothDistribution::Grid { side, masses: a }, SmoothDistribution::Grid { masses: b, .. }) => {
            let masses = a.iter().zip(&b).map(|(x, y)| 0.5 * x + 0.5 * y).collect();
            SmoothDistribution::grid(side, masses)
        }
        (_, SmoothDistribution::Unit { pieces }) => {
            let w = pieces[0];
            let mut out = Vec::with_capacity(3);
            if w.lo > 0 {
                let left = UnitPiece { lo: 0, hi: w.lo - 1, mass: 0.0 };
                out.push(UnitPiece {
                    mass: 0.5 * left.length(),
                    ..left
                });
            }
            out.push(UnitPiece {
                mass: 0.5 + 0.5 * w.length(),
                ..w
            });
            if w.hi < u64::MAX {
                let right = UnitPiece { lo: w.hi + 1, hi: u64::MAX, mass: 0.0 };
                out.push(UnitPiece {
                    mass: 0.5 * right.length(),
                    ..right
                });
            }
            // Renormalize away f64 rounding in the piece lengths.
            let total: f64 = out.iter().map(|p| p.mass).sum();
            for p in &mut out {
                p.mass /= total;
            }
            SmoothDistribution::unit(out)
        }
        _ => unreachable!("base and window share a domain"),
    }
}

/// Builds and certifies a process of the given family.
pub fn make_smooth_process(
    family: &ProcessFamily,
    sigma: f64,
    mu: BaseMeasure,
    horizon: usize,
) -> Result<SmoothProcess> {
    check_sigma(sigma)?;
    let distributions = (0..horizon)
        .map(|t| match family {
            ProcessFamily::Base => Ok(mu.as_distribution()),
            ProcessFamily::SlidingWindow { width } => window_distribution(&mu, *width, t, horizon),
            ProcessFamily::HalfWindow { width } => half_window_distribution(&mu, *width, t, horizon),
        })
        .collect::<Result<Vec<_>>>()?;
    SmoothProcess::new(sigma, mu, distributions)
}
