//! Tolerance set used throughout verification and solving.
//!
//! Every threshold is overridable per problem file (the optional
//! `tolerances` object) and per CLI flag. The defaults are ordered so that
//! recovery tolerances dominate solve tolerances.

use serde::{Deserialize, Serialize};

/// All numeric thresholds in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Integrality tolerance for the leading integer block.
    pub tol_int: f64,
    /// Eigenvalue floor when validating quadratic forms.
    pub tol_psd: f64,
    /// Active-set width: children of a max within this of the maximum count
    /// as attaining it; constraints within this of zero count as active.
    pub tol_act: f64,
    /// Generic numeric slack for inequality checks.
    pub tol_num: f64,
    /// Constraint feasibility slack.
    pub tol_feas: f64,
    /// Complementarity slack |u_j g_j|.
    pub tol_comp: f64,
    /// Stationarity slack on the continuous block of aggregated subgradients.
    pub tol_stat: f64,
    /// Margin that turns strict inequalities into a testable condition.
    pub tol_strict: f64,
    /// Target model gap for cutting-plane solves.
    pub eps_solve: f64,
    /// Grid resolution target for the brute-force oracle.
    pub eps_oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_int: 1e-9,
            tol_psd: 1e-9,
            tol_act: 1e-8,
            tol_num: 1e-7,
            tol_feas: 1e-7,
            tol_comp: 1e-6,
            tol_stat: 1e-6,
            tol_strict: 1e-7,
            eps_solve: 1e-8,
            eps_oracle: 1e-5,
        }
    }
}

impl Tolerances {
    /// All thresholds must be strictly positive.
    pub fn validate(&self) -> Result<(), String> {
        let entries = [
            ("tol_int", self.tol_int),
            ("tol_psd", self.tol_psd),
            ("tol_act", self.tol_act),
            ("tol_num", self.tol_num),
            ("tol_feas", self.tol_feas),
            ("tol_comp", self.tol_comp),
            ("tol_stat", self.tol_stat),
            ("tol_strict", self.tol_strict),
            ("eps_solve", self.eps_solve),
            ("eps_oracle", self.eps_oracle),
        ];
        for (name, v) in entries {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerance {name} must be positive and finite, got {v}"));
            }
        }
        Ok(())
    }
}
