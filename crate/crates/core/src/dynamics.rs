//! Inter-generational opinion dynamics.
//!
//! Each generation plays the limited-exposure game; a newcomer at opinion
//! `i` adopts opinion `l` with the probability that `l` is perceived from
//! `i`. The ratio `r* = E_2 / E_1` does not depend on population shares,
//! so the same matrix governs every stage:
//!
//! ```text
//!        | 1        delta r*   delta^2 | / (1 + delta r* + delta^2)
//!   Q =  | delta    r*         delta   | / (2 delta + r*)
//!        | delta^2  delta r*   1       | / (1 + delta r* + delta^2)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{observed_distribution_limited, ExposureLevel};
use crate::limited::{self, LimitedEquilibrium};

pub const SIMPLEX_TOL: f64 = 1e-12;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Stationary shares in the full-exposure limit. The chain is reducible at
/// `delta = 1`, so this is a limit value rather than a computed point.
pub const FULL_EXPOSURE_LIMIT: [f64; 3] = [0.5, 0.0, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix([[f64; 3]; 3]);

impl TransitionMatrix {
    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn mul(&self, other: &TransitionMatrix) -> TransitionMatrix {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|m| self.0[i][m] * other.0[m][j]).sum();
            }
        }
        TransitionMatrix(out)
    }

    /// Entry `(i, j)` equals entry `(2 - i, 2 - j)`.
    pub fn is_centrosymmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.0[i][j] == self.0[2 - i][2 - j]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpinionDistribution([f64; 3]);

impl OpinionDistribution {
    pub fn new(probs: [f64; 3]) -> Result<Self> {
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(GameError::InvalidDistribution(
                "shares must lie in [0, 1]".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(GameError::InvalidDistribution(format!(
                "shares sum to {total}"
            )));
        }
        Ok(Self(probs))
    }

    pub fn uniform() -> Self {
        Self([1.0 / 3.0; 3])
    }

    pub fn probs(&self) -> [f64; 3] {
        self.0
    }

    pub fn has_full_support(&self) -> bool {
        self.0.iter().all(|&p| p > 0.0)
    }

    pub fn l1_distance(&self, other: &OpinionDistribution) -> f64 {
        self.0.iter().zip(other.0).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// Row `i` is the distribution perceived from opinion `i` at equilibrium.
pub fn transition_matrix(eq: &LimitedEquilibrium) -> Result<TransitionMatrix> {
    let config = LimitedEquilibrium::config();
    let agg = eq.aggregates();
    let mut rows = [[0.0; 3]; 3];
    for (i, row) in rows.iter_mut().enumerate() {
        let dist = observed_distribution_limited(&agg, &config, eq.delta, i)?;
        row.copy_from_slice(dist.probs());
    }
    Ok(TransitionMatrix(rows))
}

/// Solves the stage game at `delta` and returns its transition matrix.
pub fn stage_matrix(delta: ExposureLevel, solver_tol: f64) -> Result<TransitionMatrix> {
    transition_matrix(&limited::solve_equilibrium(delta, solver_tol)?)
}

/// One generation: `pi_t = pi_{t-1} Q`.
pub fn process_step(pi: &OpinionDistribution, q: &TransitionMatrix) -> OpinionDistribution {
    let mut next = [0.0; 3];
    for (j, cell) in next.iter_mut().enumerate() {
        *cell = (0..3).map(|i| pi.0[i] * q.0[i][j]).sum();
    }
    let total: f64 = next.iter().sum();
    for p in &mut next {
        *p = (*p / total).min(1.0);
    }
    OpinionDistribution(next)
}

/// How the per-stage matrix is obtained during iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StageMode {
    /// Solve once and reuse the matrix.
    #[default]
    Fixed,
    /// Re-solve the stage game every generation.
    Resolve,
}

pub fn iterate_to_stationary(
    pi0: &OpinionDistribution,
    delta: ExposureLevel,
    tol: f64,
    max_iter: usize,
) -> Result<(OpinionDistribution, usize)> {
    iterate_to_stationary_with(pi0, delta, tol, max_iter, StageMode::Fixed)
}

/// Applies [`process_step`] until successive shares are within `tol` in L1.
pub fn iterate_to_stationary_with(
    pi0: &OpinionDistribution,
    delta: ExposureLevel,
    tol: f64,
    max_iter: usize,
    mode: StageMode,
) -> Result<(OpinionDistribution, usize)> {
    if delta.is_full() {
        return Err(GameError::InvalidArgument(
            "the process is reducible at full exposure; use FULL_EXPOSURE_LIMIT".into(),
        ));
    }
    if !pi0.has_full_support() {
        return Err(GameError::InvalidDistribution(
            "initial shares must give every opinion positive mass".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(GameError::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let fixed = stage_matrix(delta, limited::DEFAULT_TOL)?;
    let mut pi = *pi0;
    let mut last_step = f64::INFINITY;
    for t in 1..=max_iter {
        let q = match mode {
            StageMode::Fixed => fixed,
            StageMode::Resolve => stage_matrix(delta, limited::DEFAULT_TOL)?,
        };
        let next = process_step(&pi, &q);
        last_step = next.l1_distance(&pi);
        pi = next;
        if last_step <= tol {
            return Ok((pi, t));
        }
    }
    Err(GameError::NotConverged {
        max_iter,
        last_step,
    })
}

fn interior(delta: ExposureLevel) -> Result<()> {
    if delta.is_full() {
        Err(GameError::InvalidArgument(
            "stationary shares at full exposure are the limit FULL_EXPOSURE_LIMIT".into(),
        ))
    } else {
        Ok(())
    }
}

/// `(s, r*, s) / (2 s + r*)` with `s = sqrt(delta + r*/2)`.
pub fn stationary_from_ratio(delta: ExposureLevel, r_star: f64) -> Result<OpinionDistribution> {
    let s = (delta.value() + 0.5 * r_star).sqrt();
    let norm = 2.0 * s + r_star;
    let ext = s / norm;
    OpinionDistribution::new([ext, r_star / norm, ext])
}

pub fn stationary_closed_form(delta: ExposureLevel) -> Result<OpinionDistribution> {
    interior(delta)?;
    let r_star = 2.0 * limited::solve_w(delta, limited::DEFAULT_TOL)?;
    stationary_from_ratio(delta, r_star)
}

/// Stationary share of the moderate opinion.
pub fn middle_mass(delta: ExposureLevel) -> Result<f64> {
    Ok(stationary_closed_form(delta)?.probs()[1])
}

/// `(2 delta + r*) sqrt(delta + r*/2) - (1 + delta^2 + delta r*)`. Vanishes
/// exactly when `W = r*/2` solves the equilibrium cubic, which is what makes
/// the closed-form shares a fixed point of the process.
pub fn stationary_identity_residual(eq: &LimitedEquilibrium) -> f64 {
    let d = eq.delta.value();
    let r = eq.r_star;
    (2.0 * d + r) * (d + 0.5 * r).sqrt() - (1.0 + d * d + d * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(x: f64) -> ExposureLevel {
        ExposureLevel::new(x).unwrap()
    }

    fn eq(x: f64) -> LimitedEquilibrium {
        limited::solve_equilibrium(d(x), limited::DEFAULT_TOL).unwrap()
    }

    #[test]
    fn full_exposure_matrix() {
        let q = transition_matrix(&eq(1.0)).unwrap();
        for row in q.rows() {
            assert_eq!(row, &[0.5, 0.0, 0.5]);
        }
    }

    #[test]
    fn matrix_matches_ratio_form() {
        for x in [0.1, 0.5, 0.83] {
            let e = eq(x);
            let q = transition_matrix(&e).unwrap();
            let r = e.r_star;
            let outer = 1.0 + x * r + x * x;
            let mid = 2.0 * x + r;
            let want = [
                [1.0 / outer, x * r / outer, x * x / outer],
                [x / mid, r / mid, x / mid],
                [x * x / outer, x * r / outer, 1.0 / outer],
            ];
            for (i, row) in want.iter().enumerate() {
                for (j, &w) in row.iter().enumerate() {
                    assert_abs_diff_eq!(q.get(i, j), w, epsilon = 1e-14);
                }
            }
            assert!(q.is_centrosymmetric());
            assert_eq!(q.get(0, 2), q.get(2, 0));
            for row in q.rows() {
                assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                assert!(row.iter().all(|&p| p > 0.0));
            }
        }
    }

    #[test]
    fn half_exposure_rows() {
        let e = eq(0.5);
        assert_abs_diff_eq!(e.r_star, 0.7367, epsilon = 1e-4);
        let q = transition_matrix(&e).unwrap();
        let expect = [[0.6179, 0.2276, 0.1545], [0.2879, 0.4242, 0.2879]];
        for (row, want) in q.rows().iter().zip(expect) {
            for (a, b) in row.iter().zip(want) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn step_examples() {
        let q = stage_matrix(d(0.4), limited::DEFAULT_TOL).unwrap();
        let e1 = OpinionDistribution::new([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(process_step(&e1, &q).probs(), q.rows()[0]);

        let pi = OpinionDistribution::new([0.2, 0.5, 0.3]).unwrap();
        let twice = process_step(&process_step(&pi, &q), &q);
        let squared = process_step(&pi, &q.mul(&q));
        for (a, b) in twice.probs().iter().zip(squared.probs()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }

        let stat = stationary_closed_form(d(0.4)).unwrap();
        let moved = process_step(&stat, &q);
        assert!(moved.l1_distance(&stat) < 1e-12);
    }

    #[test]
    fn half_exposure_stationary() {
        let pi = stationary_closed_form(d(0.5)).unwrap();
        assert_abs_diff_eq!(pi.probs()[0], 0.358_348_931_860_944_7, epsilon = 1e-11);
        assert_abs_diff_eq!(pi.probs()[1], 0.283_302_136_278_110_5, epsilon = 1e-11);
        assert_eq!(pi.probs()[0], pi.probs()[2]);

        for start in [[1.0 / 3.0; 3], [0.8, 0.1, 0.1], [0.05, 0.05, 0.9]] {
            let pi0 = OpinionDistribution::new(start).unwrap();
            let (got, iters) =
                iterate_to_stationary(&pi0, d(0.5), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            assert!(iters > 0);
            assert!(got.l1_distance(&pi) < 1e-8);
        }
    }

    #[test]
    fn near_full_exposure() {
        let pi0 = OpinionDistribution::uniform();
        let (pi, _) = iterate_to_stationary(&pi0, d(0.999), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(pi.probs()[1] < 1e-2);
        assert_abs_diff_eq!(pi.probs()[0], 0.5, epsilon = 1e-2);
    }

    #[test]
    fn small_exposure_limit() {
        // r* -> 2^(1/3) as delta -> 0.
        let r = 2f64.cbrt();
        let s = (0.5 * r).sqrt();
        let lim = [s / (2.0 * s + r), r / (2.0 * s + r)];
        assert_abs_diff_eq!(lim[0], 0.2788, epsilon = 1e-4);
        assert_abs_diff_eq!(lim[1], 0.4425, epsilon = 1e-4);
        let pi = stationary_closed_form(d(1e-6)).unwrap();
        assert_abs_diff_eq!(pi.probs()[0], lim[0], epsilon = 1e-3);
        assert_abs_diff_eq!(pi.probs()[1], lim[1], epsilon = 1e-3);
    }

    #[test]
    fn resolve_mode_is_bitwise_identical() {
        let a = stage_matrix(d(0.37), limited::DEFAULT_TOL).unwrap();
        let b = stage_matrix(d(0.37), limited::DEFAULT_TOL).unwrap();
        assert_eq!(a, b);
        let pi0 = OpinionDistribution::new([0.6, 0.3, 0.1]).unwrap();
        let fixed = iterate_to_stationary_with(&pi0, d(0.37), 1e-12, 10_000, StageMode::Fixed);
        let resolved =
            iterate_to_stationary_with(&pi0, d(0.37), 1e-12, 10_000, StageMode::Resolve);
        assert_eq!(fixed.unwrap(), resolved.unwrap());
    }

    #[test]
    fn preconditions() {
        let partial = OpinionDistribution::new([0.5, 0.0, 0.5]).unwrap();
        assert!(iterate_to_stationary(&partial, d(0.5), 1e-10, 100).is_err());
        let u = OpinionDistribution::uniform();
        assert!(iterate_to_stationary(&u, ExposureLevel::FULL, 1e-10, 100).is_err());
        assert!(matches!(
            iterate_to_stationary(&u, d(0.5), 1e-10, 1),
            Err(GameError::NotConverged { max_iter: 1, .. })
        ));
        assert!(stationary_closed_form(ExposureLevel::FULL).is_err());
        assert!(OpinionDistribution::new([0.5, 0.5, 0.5]).is_err());
    }

    #[test]
    fn moderates_shrink_with_exposure() {
        let mut last = f64::INFINITY;
        for s in 1..100 {
            let m = middle_mass(d(s as f64 / 100.0)).unwrap();
            assert!(m < last);
            last = m;
        }
        assert!(middle_mass(d(0.999_999)).unwrap() < 1e-5);
    }

    #[test]
    fn identity_holds_at_equilibrium() {
        for s in 1..=20 {
            let e = eq(s as f64 / 20.0);
            assert!(stationary_identity_residual(&e).abs() < 1e-10);
        }
    }
}
