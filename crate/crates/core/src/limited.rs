//! The three-opinion game under limited exposure.
//!
//! Opinions sit at `(0, 1, 2)`. In every equilibrium the extreme totals
//! coincide, `E_1 = E_3`, and the moderate-to-extreme ratio
//! `W = E_2 / (E_1 + E_3)` is the unique root in `[0, 1]` of
//!
//! ```text
//! Q(W, delta) = 4 (delta + W)^3 - (1 + delta^2 + 2 delta W)^2
//! ```
//!
//! Given `W`, the moderates' first-order condition fixes the level:
//! `E_1 = delta / (2 (delta + W)^2)`.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{AggregateEfforts, EffortProfile, ExposureLevel, OpinionConfig};

/// Default bisection tolerance on `W`.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Bisection iteration cap.
pub const MAX_BISECTIONS: usize = 200;

/// Bound on the extremes' reverted first-order residual accepted from the solver.
pub const FOC_CHECK_TOL: f64 = 1e-9;

pub fn q_residual(w: f64, delta: ExposureLevel) -> f64 {
    let d = delta.value();
    let lhs = 4.0 * (d + w).powi(3);
    let rhs = 1.0 + d * d + 2.0 * d * w;
    lhs - rhs * rhs
}

/// Root of [`q_residual`] on `[0, 1]` by bisection.
///
/// `Q(0, delta) <= 0 < Q(1, delta)`, with equality at `W = 0` only for
/// full exposure, which is answered directly.
pub fn solve_w(delta: ExposureLevel, tol: f64) -> Result<f64> {
    let fail = |reason: String| GameError::SolverFailure {
        delta: Some(delta.value()),
        reason,
    };
    if !(tol > 0.0) {
        return Err(fail(format!("tolerance must be positive, got {tol}")));
    }
    if delta.is_full() {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (q_lo, q_hi) = (q_residual(lo, delta), q_residual(hi, delta));
    if !(q_lo <= 0.0 && q_hi > 0.0) {
        return Err(fail(format!("bracket lost: Q(0)={q_lo}, Q(1)={q_hi}")));
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            return Ok(mid);
        }
        let q = q_residual(mid, delta);
        if q == 0.0 {
            return Ok(mid);
        }
        if q < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(fail(format!(
        "bracket width {:e} above tolerance {tol:e} after {MAX_BISECTIONS} bisections",
        hi - lo
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitedEquilibrium {
    pub delta: ExposureLevel,
    /// `E_2 / (E_1 + E_3)`.
    pub w: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    /// `E_2 / E_1`.
    pub r_star: f64,
}

impl LimitedEquilibrium {
    pub fn aggregates(&self) -> AggregateEfforts {
        AggregateEfforts::new(vec![self.e1, self.e2, self.e3])
            .expect("equilibrium aggregates are nonnegative")
    }

    /// `(0, 1, 2)` with one player per opinion.
    pub fn config() -> OpinionConfig {
        OpinionConfig::unit_triple([1, 1, 1]).expect("static config")
    }

    /// Per-player profile with the group totals split evenly.
    pub fn profile(&self, sizes: [usize; 3]) -> Result<(OpinionConfig, EffortProfile)> {
        let config = OpinionConfig::unit_triple(sizes)?;
        let profile = EffortProfile::even_split(&config, &self.aggregates())?;
        Ok((config, profile))
    }

    /// `2 delta^2 + 2 delta W - E_1 (1 + delta^2 + 2 delta W)^2`, the extremes'
    /// condition after substituting `E_3 = E_1` and `E_2 = 2 W E_1`.
    pub fn reverted_extreme_residual(&self) -> f64 {
        let d = self.delta.value();
        let s = 1.0 + d * d + 2.0 * d * self.w;
        2.0 * d * d + 2.0 * d * self.w - self.e1 * s * s
    }

    /// `2 delta - E_1 (2 delta + 2 W)^2`, the moderates' reverted condition.
    pub fn reverted_moderate_residual(&self) -> f64 {
        let d = self.delta.value();
        let s = 2.0 * d + 2.0 * self.w;
        2.0 * d - self.e1 * s * s
    }
}

pub fn solve_equilibrium(delta: ExposureLevel, tol: f64) -> Result<LimitedEquilibrium> {
    let w = solve_w(delta, tol)?;
    let d = delta.value();
    let e1 = d / (2.0 * (d + w).powi(2));
    let e2 = 2.0 * w * e1;
    let eq = LimitedEquilibrium {
        delta,
        w,
        e1,
        e2,
        e3: e1,
        r_star: 2.0 * w,
    };
    let residual = eq.reverted_extreme_residual();
    if residual.abs() > FOC_CHECK_TOL {
        return Err(GameError::SolverFailure {
            delta: Some(d),
            reason: format!("extreme first-order residual {residual:e}"),
        });
    }
    Ok(eq)
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PolarizationValue(f64);

impl PolarizationValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `sum_{i,j} E_i^2 E_j |O_i - O_j| / (sum_i E_i)^3` over ordered pairs.
pub fn polarization(agg: &AggregateEfforts, config: &OpinionConfig) -> Result<PolarizationValue> {
    if agg.len() != config.k() {
        return Err(GameError::DimensionMismatch {
            expected: config.k(),
            got: agg.len(),
        });
    }
    let total = agg.total();
    if total <= 0.0 {
        return Err(GameError::NullDebate);
    }
    let e = agg.values();
    let mut acc = 0.0;
    for (i, ei) in e.iter().enumerate() {
        for (j, ej) in e.iter().enumerate() {
            acc += ei * ei * ej * config.distance(i, j);
        }
    }
    Ok(PolarizationValue(acc / total.powi(3)))
}

/// Polarization of `(E_1, 2 W E_1, E_1)` on `(0, 1, 2)`.
pub fn polarization_reduced(w: f64) -> PolarizationValue {
    PolarizationValue((w * w + 0.5 * w + 0.5) / (1.0 + w).powi(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub w: f64,
    pub e1: f64,
    pub e2: f64,
    pub polarization: f64,
}

/// `steps` evenly spaced exposure levels from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, steps: usize) -> Result<Vec<ExposureLevel>> {
    if steps == 0 {
        return Err(GameError::InvalidArgument("grid needs at least one point".into()));
    }
    if steps == 1 {
        return Ok(vec![ExposureLevel::new(start)?]);
    }
    let span = stop - start;
    (0..steps)
        .map(|s| {
            let d = if s + 1 == steps {
                stop
            } else {
                start + span * s as f64 / (steps - 1) as f64
            };
            ExposureLevel::new(d)
        })
        .collect()
}

/// 100 points on `[0.01, 1]`.
pub fn default_grid() -> Vec<ExposureLevel> {
    linear_grid(0.01, 1.0, 100).expect("static grid")
}

pub fn sweep(grid: &[ExposureLevel], tol: f64) -> Result<Vec<SweepRow>> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GameError::InvalidArgument(
            "grid must be strictly increasing".into(),
        ));
    }
    let config = LimitedEquilibrium::config();
    grid.iter()
        .map(|&delta| {
            let eq = solve_equilibrium(delta, tol)?;
            let p = polarization(&eq.aggregates(), &config)?;
            Ok(SweepRow {
                delta: delta.value(),
                w: eq.w,
                e1: eq.e1,
                e2: eq.e2,
                polarization: p.value(),
            })
        })
        .collect()
}
