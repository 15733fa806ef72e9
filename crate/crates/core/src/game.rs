//! Domain types of the indoctrination contest and the payoff machinery.
//!
//! Players are indexed by a flat `usize` and carry an assignment to an
//! opinion index. Both indices are zero-based: opinion `0` is the leftmost
//! extreme and opinion `k - 1` the rightmost one.
//!
//! The observed distribution of a profile weights every opinion by the total
//! effort spent on it. Under limited exposure, a signal emitted at opinion `l`
//! reaches a player at opinion `i` damped by `delta^|O_i - O_l|`, so each
//! viewpoint sees its own perceived distribution.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};

/// Absolute tolerance for the unit-spacing check of the three-opinion game.
pub const UNIT_SPACING_TOL: f64 = 1e-12;

/// Tolerance on the total mass of an [`ObservedDistribution`].
pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpinionConfig {
    opinions: Vec<f64>,
    sizes: Vec<usize>,
}

impl OpinionConfig {
    pub fn new(opinions: Vec<f64>, sizes: Vec<usize>) -> Result<Self> {
        if opinions.len() < 2 {
            return Err(GameError::InvalidConfig(format!(
                "need at least two opinions, got {}",
                opinions.len()
            )));
        }
        if sizes.len() != opinions.len() {
            return Err(GameError::DimensionMismatch {
                expected: opinions.len(),
                got: sizes.len(),
            });
        }
        if opinions.iter().any(|o| !o.is_finite()) {
            return Err(GameError::InvalidConfig("opinions must be finite".into()));
        }
        if opinions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GameError::InvalidConfig(
                "opinions must be strictly increasing".into(),
            ));
        }
        if sizes.contains(&0) {
            return Err(GameError::InvalidConfig(
                "every opinion needs at least one player".into(),
            ));
        }
        Ok(Self { opinions, sizes })
    }

    /// One player per opinion.
    pub fn singletons(opinions: Vec<f64>) -> Result<Self> {
        let k = opinions.len();
        Self::new(opinions, vec![1; k])
    }

    /// The unit-spaced line `(0, 1, 2)` used by the limited-exposure game.
    pub fn unit_triple(sizes: [usize; 3]) -> Result<Self> {
        Self::new(vec![0.0, 1.0, 2.0], sizes.to_vec())
    }

    pub fn k(&self) -> usize {
        self.opinions.len()
    }

    /// Total number of players.
    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn opinions(&self) -> &[f64] {
        &self.opinions
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Distance between the two extreme opinions, `|O_1 - O_k|`.
    pub fn span(&self) -> f64 {
        self.opinions[self.k() - 1] - self.opinions[0]
    }

    pub fn is_extreme(&self, i: usize) -> bool {
        i == 0 || i + 1 == self.k()
    }

    pub fn distance(&self, i: usize, l: usize) -> f64 {
        (self.opinions[i] - self.opinions[l]).abs()
    }

    /// Three opinions with gaps of exactly one (up to [`UNIT_SPACING_TOL`]).
    pub fn is_unit_triple(&self) -> bool {
        self.k() == 3
            && self
                .opinions
                .windows(2)
                .all(|w| ((w[1] - w[0]) - 1.0).abs() <= UNIT_SPACING_TOL)
    }

    /// Group-major assignment: the first `n_1` players hold opinion 0, and so on.
    pub fn grouped_assignment(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(i, &n)| std::iter::repeat_n(i, n))
            .collect()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.k() {
            Ok(())
        } else {
            Err(GameError::IndexOutOfRange {
                index: i,
                len: self.k(),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffortProfile {
    efforts: Vec<f64>,
    assignment: Vec<usize>,
}

impl EffortProfile {
    /// Builds a profile and checks that `assignment` fills every group of
    /// `config` with exactly `n_i` players.
    pub fn new(efforts: Vec<f64>, assignment: Vec<usize>, config: &OpinionConfig) -> Result<Self> {
        if efforts.len() != assignment.len() {
            return Err(GameError::DimensionMismatch {
                expected: assignment.len(),
                got: efforts.len(),
            });
        }
        if efforts.len() != config.n() {
            return Err(GameError::DimensionMismatch {
                expected: config.n(),
                got: efforts.len(),
            });
        }
        if let Some(e) = efforts.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(GameError::InvalidProfile(format!(
                "efforts must be finite and nonnegative, got {e}"
            )));
        }
        let mut counts = vec![0usize; config.k()];
        for &i in &assignment {
            config.check_index(i)?;
            counts[i] += 1;
        }
        if counts != config.sizes {
            return Err(GameError::InvalidProfile(format!(
                "assignment group sizes {counts:?} do not match {:?}",
                config.sizes
            )));
        }
        Ok(Self { efforts, assignment })
    }

    /// Profile with the group-major assignment of `config`.
    pub fn grouped(config: &OpinionConfig, efforts: Vec<f64>) -> Result<Self> {
        Self::new(efforts, config.grouped_assignment(), config)
    }

    /// Splits each group total evenly among its members.
    pub fn even_split(config: &OpinionConfig, agg: &AggregateEfforts) -> Result<Self> {
        if agg.len() != config.k() {
            return Err(GameError::DimensionMismatch {
                expected: config.k(),
                got: agg.len(),
            });
        }
        let efforts = config
            .grouped_assignment()
            .into_iter()
            .map(|i| agg.values()[i] / config.sizes[i] as f64)
            .collect();
        Self::grouped(config, efforts)
    }

    pub fn len(&self) -> usize {
        self.efforts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.efforts.is_empty()
    }

    pub fn efforts(&self) -> &[f64] {
        &self.efforts
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn effort(&self, j: usize) -> Result<f64> {
        self.efforts
            .get(j)
            .copied()
            .ok_or(GameError::IndexOutOfRange {
                index: j,
                len: self.len(),
            })
    }

    pub fn opinion_of(&self, j: usize) -> Result<usize> {
        self.assignment
            .get(j)
            .copied()
            .ok_or(GameError::IndexOutOfRange {
                index: j,
                len: self.len(),
            })
    }

    pub fn is_zero(&self) -> bool {
        self.efforts.iter().all(|&e| e == 0.0)
    }

    /// Unilateral deviation: the same profile with player `j` exerting `effort`.
    pub fn with_effort(&self, j: usize, effort: f64) -> Result<Self> {
        self.effort(j)?;
        if !(effort.is_finite() && effort >= 0.0) {
            return Err(GameError::InvalidProfile(format!(
                "efforts must be finite and nonnegative, got {effort}"
            )));
        }
        let mut next = self.clone();
        next.efforts[j] = effort;
        Ok(next)
    }

    fn check_against(&self, config: &OpinionConfig) -> Result<()> {
        if self.len() != config.n() {
            return Err(GameError::DimensionMismatch {
                expected: config.n(),
                got: self.len(),
            });
        }
        if let Some(&i) = self.assignment.iter().find(|&&i| i >= config.k()) {
            return Err(GameError::IndexOutOfRange {
                index: i,
                len: config.k(),
            });
        }
        Ok(())
    }
}

/// Per-opinion effort totals `E_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateEfforts(Vec<f64>);

impl AggregateEfforts {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(e) = values.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(GameError::InvalidProfile(format!(
                "aggregate efforts must be finite and nonnegative, got {e}"
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedDistribution(Vec<f64>);

impl ObservedDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(GameError::InvalidDistribution(
                "probabilities must lie in [0, 1]".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(GameError::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Fraction of a signal retained per unit of opinion distance.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ExposureLevel(f64);

impl ExposureLevel {
    pub const FULL: ExposureLevel = ExposureLevel(1.0);

    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta <= 1.0 {
            Ok(Self(delta))
        } else {
            Err(GameError::InvalidExposure(delta))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_full(self) -> bool {
        self.0 == 1.0
    }

    /// Retained weight across an opinion distance `d`.
    pub fn weight(self, d: f64) -> f64 {
        if d == 0.0 || self.is_full() {
            1.0
        } else {
            self.0.powf(d)
        }
    }
}

/// A player's utility. The all-zero profile has no finite payoff: its value
/// is the infimum over nonzero profiles, which is unbounded below, so it is
/// kept as a separate variant that orders below every finite value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub enum Payoff {
    NullDebate,
    Finite(f64),
}

impl Payoff {
    pub fn finite(self) -> Option<f64> {
        match self {
            Payoff::Finite(v) => Some(v),
            Payoff::NullDebate => None,
        }
    }

    pub fn is_null_debate(self) -> bool {
        matches!(self, Payoff::NullDebate)
    }

    /// `self - other`, or `None` when either side is the null-debate value.
    pub fn gain_over(self, other: Payoff) -> Option<f64> {
        Some(self.finite()? - other.finite()?)
    }
}

pub fn aggregate(profile: &EffortProfile, config: &OpinionConfig) -> Result<AggregateEfforts> {
    profile.check_against(config)?;
    let mut totals = vec![0.0; config.k()];
    for (&e, &i) in profile.efforts.iter().zip(&profile.assignment) {
        totals[i] += e;
    }
    AggregateEfforts::new(totals)
}

pub fn observed_distribution(agg: &AggregateEfforts) -> Result<ObservedDistribution> {
    normalize(agg.values().to_vec())
}

/// Distribution perceived from `viewpoint`: weights `delta^|O_i - O_l| E_l`,
/// normalized. With full exposure this is exactly [`observed_distribution`].
pub fn observed_distribution_limited(
    agg: &AggregateEfforts,
    config: &OpinionConfig,
    delta: ExposureLevel,
    viewpoint: usize,
) -> Result<ObservedDistribution> {
    check_agg(agg, config)?;
    config.check_index(viewpoint)?;
    normalize(perceived_weights(agg, config, delta, viewpoint))
}

pub(crate) fn perceived_weights(
    agg: &AggregateEfforts,
    config: &OpinionConfig,
    delta: ExposureLevel,
    viewpoint: usize,
) -> Vec<f64> {
    agg.values()
        .iter()
        .enumerate()
        .map(|(l, &e)| delta.weight(config.distance(viewpoint, l)) * e)
        .collect()
}

fn normalize(weights: Vec<f64>) -> Result<ObservedDistribution> {
    // Summing in sorted order makes the total independent of opinion order,
    // so mirrored viewpoints normalize bit-for-bit identically.
    let mut sorted = weights.clone();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if total <= 0.0 {
        return Err(GameError::NullDebate);
    }
    let mut probs: Vec<f64> = weights.into_iter().map(|w| w / total).collect();
    // Clamp the one-ulp overshoot that division can produce.
    for p in &mut probs {
        *p = p.min(1.0);
    }
    ObservedDistribution::new(probs)
}

fn check_agg(agg: &AggregateEfforts, config: &OpinionConfig) -> Result<()> {
    if agg.len() != config.k() {
        return Err(GameError::DimensionMismatch {
            expected: config.k(),
            got: agg.len(),
        });
    }
    Ok(())
}

/// `E[|O_i - X|]` for `X` drawn from `dist`.
pub fn expected_distance(
    dist: &ObservedDistribution,
    config: &OpinionConfig,
    viewpoint: usize,
) -> Result<f64> {
    if dist.len() != config.k() {
        return Err(GameError::DimensionMismatch {
            expected: config.k(),
            got: dist.len(),
        });
    }
    config.check_index(viewpoint)?;
    Ok(dist
        .probs()
        .iter()
        .enumerate()
        .map(|(l, p)| p * config.distance(viewpoint, l))
        .sum())
}

/// Full-monitoring utility `-e_j - E[|O_i - X_e|]`.
pub fn payoff(j: usize, profile: &EffortProfile, config: &OpinionConfig) -> Result<Payoff> {
    let agg = aggregate(profile, config)?;
    let i = profile.opinion_of(j)?;
    match observed_distribution(&agg) {
        Ok(dist) => Ok(Payoff::Finite(
            -profile.efforts[j] - expected_distance(&dist, config, i)?,
        )),
        Err(GameError::NullDebate) => Ok(Payoff::NullDebate),
        Err(e) => Err(e),
    }
}

/// Limited-exposure utility. Only defined on three unit-spaced opinions.
///
/// A zero perceived total is reported as [`Payoff::NullDebate`]; since every
/// weight is positive for `delta > 0` this happens exactly at the zero profile.
pub fn payoff_limited(
    j: usize,
    profile: &EffortProfile,
    config: &OpinionConfig,
    delta: ExposureLevel,
) -> Result<Payoff> {
    if !config.is_unit_triple() {
        return Err(GameError::UnsupportedLayout);
    }
    let agg = aggregate(profile, config)?;
    let i = profile.opinion_of(j)?;
    match observed_distribution_limited(&agg, config, delta, i) {
        Ok(dist) => Ok(Payoff::Finite(
            -profile.efforts[j] - expected_distance(&dist, config, i)?,
        )),
        Err(GameError::NullDebate) => Ok(Payoff::NullDebate),
        Err(e) => Err(e),
    }
}

/// Dispatches to [`payoff`] or [`payoff_limited`].
pub fn payoff_for(
    j: usize,
    profile: &EffortProfile,
    config: &OpinionConfig,
    delta: Option<ExposureLevel>,
) -> Result<Payoff> {
    match delta {
        Some(d) => payoff_limited(j, profile, config, d),
        None => payoff(j, profile, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn cfg(opinions: &[f64], sizes: &[usize]) -> OpinionConfig {
        OpinionConfig::new(opinions.to_vec(), sizes.to_vec()).unwrap()
    }

    fn agg(v: &[f64]) -> AggregateEfforts {
        AggregateEfforts::new(v.to_vec()).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(OpinionConfig::new(vec![0.0], vec![1]).is_err());
        assert!(OpinionConfig::new(vec![0.0, 0.0], vec![1, 1]).is_err());
        assert!(OpinionConfig::new(vec![1.0, 0.0], vec![1, 1]).is_err());
        assert!(OpinionConfig::new(vec![0.0, 1.0], vec![1, 0]).is_err());
        assert!(OpinionConfig::new(vec![0.0, 1.0], vec![1]).is_err());
        let c = cfg(&[0.0, 1.0, 3.0], &[2, 1, 4]);
        assert_eq!(c.n(), 7);
        assert_eq!(c.span(), 3.0);
        assert!(!c.is_unit_triple());
        assert!(cfg(&[-1.0, 0.0, 1.0], &[1, 1, 1]).is_unit_triple());
    }

    #[test]
    fn profile_validation() {
        let c = cfg(&[0.0, 1.0], &[2, 1]);
        assert!(EffortProfile::grouped(&c, vec![0.1, -0.1, 0.0]).is_err());
        assert!(EffortProfile::grouped(&c, vec![0.1, 0.1]).is_err());
        assert!(EffortProfile::new(vec![0.0; 3], vec![0, 1, 1], &c).is_err());
        assert!(EffortProfile::new(vec![0.0; 3], vec![1, 0, 0], &c).is_ok());
        assert!(EffortProfile::new(vec![0.0; 3], vec![0, 0, 2], &c).is_err());
    }

    #[test]
    fn aggregate_examples() {
        let c = cfg(&[0.0, 1.0, 2.0], &[1, 1, 1]);
        let p = EffortProfile::grouped(&c, vec![1.0, 1.0, 2.0]).unwrap();
        assert_eq!(aggregate(&p, &c).unwrap().values(), &[1.0, 1.0, 2.0]);

        let c = cfg(&[0.0, 1.0], &[2, 1]);
        let p = EffortProfile::grouped(&c, vec![0.1, 0.15, 0.25]).unwrap();
        let e = aggregate(&p, &c).unwrap();
        assert_abs_diff_eq!(e.values()[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values()[1], 0.25, epsilon = 1e-15);

        let p = EffortProfile::grouped(&c, vec![0.0; 3]).unwrap();
        assert_eq!(aggregate(&p, &c).unwrap().values(), &[0.0, 0.0]);

        let other = cfg(&[0.0, 1.0], &[1, 1]);
        assert!(matches!(
            aggregate(&p, &other),
            Err(GameError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn observed_distribution_examples() {
        assert_eq!(
            observed_distribution(&agg(&[1.0, 1.0, 2.0])).unwrap().probs(),
            &[0.25, 0.25, 0.5]
        );
        assert_eq!(
            observed_distribution(&agg(&[0.25, 0.0, 0.25])).unwrap().probs(),
            &[0.5, 0.0, 0.5]
        );
        assert_eq!(
            observed_distribution(&agg(&[3.0, 0.0])).unwrap().probs(),
            &[1.0, 0.0]
        );
        assert_eq!(
            observed_distribution(&agg(&[0.0, 0.0])),
            Err(GameError::NullDebate)
        );
    }

    #[test]
    fn limited_distribution_examples() {
        let c = cfg(&[0.0, 1.0, 2.0], &[1, 1, 1]);
        let e = agg(&[1.0, 1.0, 1.0]);
        let half = ExposureLevel::new(0.5).unwrap();

        let d = observed_distribution_limited(&e, &c, half, 0).unwrap();
        let expect = [1.0 / 1.75, 0.5 / 1.75, 0.25 / 1.75];
        for (p, q) in d.probs().iter().zip(expect) {
            assert_abs_diff_eq!(*p, q, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(d.probs()[0], 0.5714, epsilon = 1e-4);

        let d = observed_distribution_limited(&e, &c, half, 1).unwrap();
        assert_eq!(d.probs(), &[0.25, 0.5, 0.25]);

        for v in 0..3 {
            assert_eq!(
                observed_distribution_limited(&e, &c, ExposureLevel::FULL, v).unwrap(),
                observed_distribution(&e).unwrap()
            );
        }
        assert!(observed_distribution_limited(&e, &c, half, 3).is_err());
    }

    #[test]
    fn exposure_domain() {
        assert!(ExposureLevel::new(0.0).is_err());
        assert!(ExposureLevel::new(1.0 + 1e-15).is_err());
        assert!(ExposureLevel::new(f64::NAN).is_err());
        assert!(ExposureLevel::new(1.0).unwrap().is_full());
    }

    #[test]
    fn expected_distance_examples() {
        let c2 = cfg(&[0.0, 1.0], &[1, 1]);
        let c3 = cfg(&[0.0, 1.0, 2.0], &[1, 1, 1]);
        let point = ObservedDistribution::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(expected_distance(&point, &c3, 1).unwrap(), 0.0);
        let half = ObservedDistribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(expected_distance(&half, &c2, 0).unwrap(), 0.5);
        let ext = ObservedDistribution::new(vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(expected_distance(&ext, &c3, 1).unwrap(), 1.0);
    }

    #[test]
    fn payoff_examples() {
        let c = cfg(&[0.0, 1.0], &[1, 1]);
        let p = EffortProfile::grouped(&c, vec![0.25, 0.25]).unwrap();
        assert_eq!(payoff(0, &p, &c).unwrap(), Payoff::Finite(-0.75));
        // -|O_1 - O_k| / 2 * (1 + 1 / (2 n_i))
        assert_abs_diff_eq!(
            payoff(1, &p, &c).unwrap().finite().unwrap(),
            -0.5 * (1.0 + 0.5),
            epsilon = 1e-15
        );

        let c3 = cfg(&[0.0, 1.0, 2.0], &[2, 1, 1]);
        let p = EffortProfile::grouped(&c3, vec![0.0, 0.7, 0.0, 0.0]).unwrap();
        assert_eq!(payoff(0, &p, &c3).unwrap(), Payoff::Finite(0.0));

        let z = EffortProfile::grouped(&c, vec![0.0, 0.0]).unwrap();
        assert_eq!(payoff(0, &z, &c).unwrap(), Payoff::NullDebate);
        assert!(Payoff::NullDebate < Payoff::Finite(-1e300));
        assert_eq!(Payoff::NullDebate.gain_over(Payoff::Finite(0.0)), None);
    }

    #[test]
    fn payoff_limited_examples() {
        let c = cfg(&[0.0, 1.0, 2.0], &[1, 1, 1]);
        let p = EffortProfile::grouped(&c, vec![1.0, 1.0, 1.0]).unwrap();
        let half = ExposureLevel::new(0.5).unwrap();
        let u = payoff_limited(0, &p, &c, half).unwrap().finite().unwrap();
        assert_abs_diff_eq!(u, -1.0 - (0.5 + 0.25 * 2.0) / 1.75, epsilon = 1e-15);
        assert_abs_diff_eq!(u, -1.5714, epsilon = 1e-4);

        for e in [[0.3, 0.1, 0.5], [1.0, 0.0, 2.0], [0.0, 0.0, 0.4]] {
            let p = EffortProfile::grouped(&c, e.to_vec()).unwrap();
            for j in 0..3 {
                assert_eq!(
                    payoff_limited(j, &p, &c, ExposureLevel::FULL).unwrap(),
                    payoff(j, &p, &c).unwrap()
                );
            }
        }

        // Silent moderate facing E_1 = E_3: distance 2 delta E_1 / (2 delta E_1 + E_2).
        let (e1, e2, d) = (0.4, 0.3, 0.7);
        let c = cfg(&[0.0, 1.0, 2.0], &[1, 2, 1]);
        let p = EffortProfile::grouped(&c, vec![e1, 0.0, e2, e1]).unwrap();
        let u = payoff_limited(1, &p, &c, ExposureLevel::new(d).unwrap())
            .unwrap()
            .finite()
            .unwrap();
        assert_abs_diff_eq!(u, -(2.0 * d * e1) / (2.0 * d * e1 + e2), epsilon = 1e-15);
    }

    #[test]
    fn payoff_limited_rejects_other_layouts() {
        let d = ExposureLevel::new(0.5).unwrap();
        let c = cfg(&[0.0, 1.0, 3.0], &[1, 1, 1]);
        let p = EffortProfile::grouped(&c, vec![1.0; 3]).unwrap();
        assert_eq!(payoff_limited(0, &p, &c, d), Err(GameError::UnsupportedLayout));
        let c = cfg(&[0.0, 1.0], &[1, 1]);
        let p = EffortProfile::grouped(&c, vec![1.0; 2]).unwrap();
        assert_eq!(payoff_limited(0, &p, &c, d), Err(GameError::UnsupportedLayout));
        let c = cfg(&[0.0, 1.0, 2.0], &[1, 1, 1]);
        let z = EffortProfile::grouped(&c, vec![0.0; 3]).unwrap();
        assert_eq!(payoff_limited(1, &z, &c, d).unwrap(), Payoff::NullDebate);
    }

    fn config_strategy() -> impl Strategy<Value = OpinionConfig> {
        (2usize..=6)
            .prop_flat_map(|k| {
                (
                    prop::collection::vec(0.05f64..2.0, k),
                    prop::collection::vec(1usize..=4, k),
                    -5.0f64..5.0,
                )
            })
            .prop_map(|(gaps, sizes, start)| {
                let mut o = start;
                let opinions = gaps
                    .iter()
                    .map(|g| {
                        o += g;
                        o
                    })
                    .collect();
                OpinionConfig::new(opinions, sizes).unwrap()
            })
    }

    fn profile_strategy() -> impl Strategy<Value = (OpinionConfig, EffortProfile)> {
        config_strategy().prop_flat_map(|c| {
            let n = c.n();
            prop::collection::vec(0.0f64..3.0, n).prop_map(move |mut e| {
                e[0] += 1e-3;
                let p = EffortProfile::grouped(&c, e).unwrap();
                (c.clone(), p)
            })
        })
    }

    proptest! {
        #[test]
        fn distribution_sums_to_one_and_is_scale_free(
            (c, p) in profile_strategy(),
            scale in 0.01f64..100.0,
        ) {
            let a = aggregate(&p, &c).unwrap();
            let d = observed_distribution(&a).unwrap();
            prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let scaled = AggregateEfforts::new(a.values().iter().map(|e| e * scale).collect()).unwrap();
            let ds = observed_distribution(&scaled).unwrap();
            for (x, y) in d.probs().iter().zip(ds.probs()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn full_exposure_matches_full_monitoring((c, p) in profile_strategy()) {
            let a = aggregate(&p, &c).unwrap();
            let full = observed_distribution(&a).unwrap();
            for v in 0..c.k() {
                prop_assert_eq!(
                    &observed_distribution_limited(&a, &c, ExposureLevel::FULL, v).unwrap(),
                    &full
                );
            }
        }

        #[test]
        fn expected_distance_nonnegative((c, p) in profile_strategy()) {
            let a = aggregate(&p, &c).unwrap();
            let d = observed_distribution(&a).unwrap();
            for v in 0..c.k() {
                let dist = expected_distance(&d, &c, v).unwrap();
                prop_assert!(dist >= 0.0);
                let only_v = d.probs().iter().enumerate().all(|(l, &q)| l == v || q == 0.0);
                prop_assert_eq!(dist == 0.0, only_v);
            }
        }

        #[test]
        fn payoff_concave_in_own_effort(
            (c, p) in profile_strategy(),
            who in any::<prop::sample::Index>(),
            a in 0.0f64..3.0,
            b in 0.0f64..3.0,
        ) {
            let j = who.index(c.n());
            let at = |e: f64| payoff(j, &p.with_effort(j, e).unwrap(), &c).unwrap();
            let (ua, ub, um) = (at(a), at(b), at((a + b) / 2.0));
            if let (Some(ua), Some(ub), Some(um)) = (ua.finite(), ub.finite(), um.finite()) {
                prop_assert!(um >= (ua + ub) / 2.0 - 1e-12);
            }
        }

        #[test]
        fn payoff_decreasing_when_own_opinion_dominates(
            (c, _) in profile_strategy(),
            group in any::<prop::sample::Index>(),
            a in 0.01f64..3.0,
            b in 0.01f64..3.0,
        ) {
            let i = group.index(c.k());
            let assignment = c.grouped_assignment();
            let j = assignment.iter().position(|&g| g == i).unwrap();
            let efforts = assignment.iter().map(|&g| if g == i { 1.0 } else { 0.0 }).collect();
            let p = EffortProfile::grouped(&c, efforts).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-9);
            let ulo = payoff(j, &p.with_effort(j, lo).unwrap(), &c).unwrap();
            let uhi = payoff(j, &p.with_effort(j, hi).unwrap(), &c).unwrap();
            prop_assert!(uhi < ulo);
        }
    }
}
