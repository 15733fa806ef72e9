//! Brute-force checks that do not rely on the closed forms: unilateral best
//! responses by golden-section search, first-order residuals, and
//! finite-difference derivatives.
//!
//! A player's payoff is concave in own effort (the distance term is
//! `-N / (S + e_j)` with `N, S >= 0` fixed by the opponents), so a
//! derivative-free unimodal search on `[0, upper]` plus the boundary
//! `e_j = 0` finds the best response.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{
    aggregate, payoff_for, perceived_weights, AggregateEfforts, EffortProfile, ExposureLevel,
    OpinionConfig, Payoff,
};
use crate::limited::LimitedEquilibrium;

/// Default deviation gain tolerated by [`certify_equilibrium`].
pub const CERTIFY_TOL: f64 = 1e-6;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Right end of the search interval; defaults to `4 |O_1 - O_k|`.
    pub upper: Option<f64>,
    /// Stop once the bracket is narrower than this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            upper: None,
            tol: 1e-9,
            max_iter: 200,
        }
    }
}

/// Default search bound. Above `|O_1 - O_k|` the effort cost alone exceeds
/// the largest possible distance saving, so `e_j = 0` dominates; four times
/// that leaves ample room.
pub fn default_upper(config: &OpinionConfig) -> f64 {
    4.0 * config.span()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    Boundary,
    InteriorSearch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    pub effort: f64,
    pub payoff: Payoff,
    pub method: SearchMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub player: usize,
    pub current_effort: f64,
    pub best_effort: f64,
    pub payoff_gain: f64,
    pub method: SearchMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub tol: f64,
    pub reports: Vec<DeviationReport>,
}

impl Certificate {
    pub fn max_gain(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| r.payoff_gain)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_certified(&self) -> bool {
        self.max_gain() <= self.tol
    }
}

fn score(p: Payoff) -> f64 {
    p.finite().unwrap_or(f64::NEG_INFINITY)
}

fn slack(values: &[f64]) -> f64 {
    let scale = values
        .iter()
        .filter(|v| v.is_finite())
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    1e-12 * scale
}

pub fn best_response(
    j: usize,
    profile: &EffortProfile,
    config: &OpinionConfig,
    delta: Option<ExposureLevel>,
) -> Result<f64> {
    Ok(best_response_with(j, profile, config, delta, SearchOptions::default())?.effort)
}

pub fn best_response_with(
    j: usize,
    profile: &EffortProfile,
    config: &OpinionConfig,
    delta: Option<ExposureLevel>,
    opts: SearchOptions,
) -> Result<BestResponse> {
    profile.effort(j)?;
    let upper = opts.upper.unwrap_or_else(|| default_upper(config));
    if !(upper > 0.0 && upper.is_finite()) {
        return Err(GameError::InvalidArgument(format!(
            "search bound must be positive, got {upper}"
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(GameError::InvalidArgument(format!(
            "search tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let eval = |e: f64| -> Result<Payoff> { payoff_for(j, &profile.with_effort(j, e)?, config, delta) };

    let at_zero = eval(0.0)?;
    let (mut a, mut b) = (0.0, upper);
    let (mut fa, mut fb) = (score(at_zero), score(eval(b)?));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = score(eval(c)?);
    let mut fd = score(eval(d)?);

    let mut iter = 0;
    while b - a > opts.tol && iter < opts.max_iter {
        // Concavity: an inner point never sits below both of its neighbours.
        let s = slack(&[fa, fb, fc, fd]);
        if fc < fa.min(fd) - s {
            return Err(GameError::NotUnimodal { at: c });
        }
        if fd < fc.min(fb) - s {
            return Err(GameError::NotUnimodal { at: d });
        }
        if fc >= fd {
            b = d;
            fb = fd;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = score(eval(c)?);
        } else {
            a = c;
            fa = fc;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = score(eval(d)?);
        }
        iter += 1;
    }

    let (mut x, mut fx) = if fc >= fd { (c, fc) } else { (d, fd) };
    let mid = 0.5 * (a + b);
    let fmid = score(eval(mid)?);
    if fmid > fx {
        x = mid;
        fx = fmid;
    }
    // Ties within rounding go to the boundary.
    let f0 = score(at_zero);
    if f0 >= fx - 4.0 * f64::EPSILON * fx.abs() {
        return Ok(BestResponse {
            effort: 0.0,
            payoff: at_zero,
            method: SearchMethod::Boundary,
        });
    }
    Ok(BestResponse {
        effort: x,
        payoff: eval(x)?,
        method: SearchMethod::InteriorSearch,
    })
}

/// One deviation report per player; certified when no player gains more
/// than `tol` by deviating alone.
pub fn certify_equilibrium(
    profile: &EffortProfile,
    config: &OpinionConfig,
    delta: Option<ExposureLevel>,
    tol: f64,
) -> Result<Certificate> {
    if profile.is_zero() {
        return Err(GameError::NullDebate);
    }
    let reports = (0..profile.len())
        .map(|j| {
            let current = payoff_for(j, profile, config, delta)?;
            let best = best_response_with(j, profile, config, delta, SearchOptions::default())?;
            let gain = best
                .payoff
                .gain_over(current)
                .expect("nonzero profile with a finite best response");
            Ok(DeviationReport {
                player: j,
                current_effort: profile.effort(j)?,
                best_effort: best.effort,
                payoff_gain: gain,
                method: best.method,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Certificate { tol, reports })
}

/// `sum_l E_l |O_l - O_i| - (sum_l E_l)^2`: the full-monitoring first-order
/// condition of any player at opinion `i`, scaled by the squared total.
pub fn foc_residual_baseline(agg: &AggregateEfforts, config: &OpinionConfig, i: usize) -> Result<f64> {
    if agg.len() != config.k() {
        return Err(GameError::DimensionMismatch {
            expected: config.k(),
            got: agg.len(),
        });
    }
    if i >= config.k() {
        return Err(GameError::IndexOutOfRange {
            index: i,
            len: config.k(),
        });
    }
    let weighted: f64 = agg
        .values()
        .iter()
        .enumerate()
        .map(|(l, e)| e * config.distance(l, i))
        .sum();
    let total = agg.total();
    Ok(weighted - total * total)
}

/// Limited-exposure counterpart on `(0, 1, 2)`:
/// `sum_l delta^|i-l| E_l |O_l - O_i| - (sum_l delta^|i-l| E_l)^2`.
pub fn foc_residual_limited(agg: &AggregateEfforts, delta: ExposureLevel, i: usize) -> Result<f64> {
    let config = LimitedEquilibrium::config();
    if agg.len() != 3 {
        return Err(GameError::DimensionMismatch {
            expected: 3,
            got: agg.len(),
        });
    }
    if i >= 3 {
        return Err(GameError::IndexOutOfRange { index: i, len: 3 });
    }
    let w = perceived_weights(agg, &config, delta, i);
    let weighted: f64 = w
        .iter()
        .enumerate()
        .map(|(l, x)| x * config.distance(l, i))
        .sum();
    let total: f64 = w.iter().sum();
    Ok(weighted - total * total)
}

/// `dU_j / de_j`, i.e. the first-order residual divided by the squared
/// (perceived) total effort.
pub fn analytic_derivative(
    j: usize,
    profile: &EffortProfile,
    config: &OpinionConfig,
    delta: Option<ExposureLevel>,
) -> Result<f64> {
    let agg = aggregate(profile, config)?;
    let i = profile.opinion_of(j)?;
    let (residual, total) = match delta {
        None => (foc_residual_baseline(&agg, config, i)?, agg.total()),
        Some(d) => {
            if !config.is_unit_triple() {
                return Err(GameError::UnsupportedLayout);
            }
            let total: f64 = perceived_weights(&agg, config, d, i).iter().sum();
            (foc_residual_limited(&agg, d, i)?, total)
        }
    };
    if total <= 0.0 {
        return Err(GameError::NullDebate);
    }
    Ok(residual / (total * total))
}

/// Central difference of player `j`'s payoff in own effort with step `h`.
pub fn finite_difference_check(
    j: usize,
    profile: &EffortProfile,
    config: &OpinionConfig,
    delta: Option<ExposureLevel>,
    h: f64,
) -> Result<f64> {
    let e = profile.effort(j)?;
    if !(h > 0.0 && e > h) {
        return Err(GameError::InvalidArgument(format!(
            "step {h} must be positive and below the effort {e}"
        )));
    }
    let at = |x: f64| -> Result<f64> {
        payoff_for(j, &profile.with_effort(j, x)?, config, delta)?
            .finite()
            .ok_or(GameError::NullDebate)
    };
    Ok((at(e + h)? - at(e - h)?) / (2.0 * h))
}
