//! Equilibria of the full-monitoring game.
//!
//! Moderates stay silent and each extreme group spends `|O_1 - O_k| / 4` in
//! total, whatever the moderate positions and group sizes are. Only the
//! group totals are pinned down; any split inside an extreme group is an
//! equilibrium too. The even split is the canonical representative.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{aggregate, AggregateEfforts, EffortProfile, OpinionConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineEquilibrium {
    pub aggregates: AggregateEfforts,
    pub symmetric_profile: EffortProfile,
    pub per_opinion_payoff: Vec<f64>,
}

impl BaselineEquilibrium {
    pub fn solve(config: &OpinionConfig) -> Self {
        Self {
            aggregates: aggregate_equilibrium(config),
            symmetric_profile: symmetric_equilibrium(config),
            per_opinion_payoff: symmetric_payoffs(config),
        }
    }
}

pub fn aggregate_equilibrium(config: &OpinionConfig) -> AggregateEfforts {
    let quarter = config.span() / 4.0;
    let values = (0..config.k())
        .map(|i| if config.is_extreme(i) { quarter } else { 0.0 })
        .collect();
    AggregateEfforts::new(values).expect("span of a valid config is positive and finite")
}

pub fn symmetric_equilibrium(config: &OpinionConfig) -> EffortProfile {
    EffortProfile::even_split(config, &aggregate_equilibrium(config))
        .expect("aggregates are built from the same config")
}

/// Payoff of any player at opinion `i` under [`symmetric_equilibrium`]:
/// `-|O_1 - O_k| / 2 * (1 + 1 / (2 n_i))` for extremes, `-|O_1 - O_k| / 2` otherwise.
pub fn symmetric_payoffs(config: &OpinionConfig) -> Vec<f64> {
    let half = config.span() / 2.0;
    (0..config.k())
        .map(|i| {
            let bonus = if config.is_extreme(i) {
                1.0 / (2.0 * config.sizes()[i] as f64)
            } else {
                0.0
            };
            -half * (1.0 + bonus)
        })
        .collect()
}

/// Checks that a user-supplied profile reproduces the equilibrium group
/// totals within `tol`. Any such split is an equilibrium.
pub fn validate_split(profile: &EffortProfile, config: &OpinionConfig, tol: f64) -> Result<()> {
    let got = aggregate(profile, config)?;
    let want = aggregate_equilibrium(config);
    for (i, (g, w)) in got.values().iter().zip(want.values()).enumerate() {
        if (g - w).abs() > tol {
            return Err(GameError::InvalidProfile(format!(
                "group {i} spends {g}, equilibrium total is {w}"
            )));
        }
    }
    Ok(())
}
