//! Exponential growth rates of the kissing-number bounds.
//!
//! Rates are carried as `log₂` of the per-dimension base; reports also give
//! the base `2^value`.

mod lower;
mod registry;
mod upper;
mod volume;

pub use lower::{f_rate, lower_bound_rate, sup_f, LowerRateParams, LowerRateVars, DEFAULT_GRID};
pub use registry::{RateArgs, RateFunction, RateRegistry};
pub use upper::{
    alpha_function, alpha_sup, blichfeldt_finite_log, blichfeldt_rate, upper_bound_rate,
    upper_sweep, xprime_complement_rate, xprime_complement_rate_at, SweepRanges, SweepRow,
    UpperRateParams,
};
pub use volume::{
    ball_volume_ratio, blichfeldt_integral_identity, blichfeldt_monte_carlo,
    cap_cylinder_bound_check, ln_ball_volume, CapCylinderReport, IdentityCheck,
};

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    pub function: String,
    pub params: BTreeMap<String, f64>,
    /// `log₂` of the base.
    pub value: f64,
    pub base: f64,
    pub argmax: Option<Vec<f64>>,
    pub grid: Option<usize>,
    pub tolerance: Option<f64>,
    /// Feasibility flag, where the function has one.
    pub feasible: Option<bool>,
    pub extra: BTreeMap<String, f64>,
}

impl RateReport {
    pub(crate) fn new(function: &str, value: f64) -> Self {
        Self {
            function: function.to_string(),
            params: BTreeMap::new(),
            value,
            base: value.exp2(),
            argmax: None,
            grid: None,
            tolerance: None,
            feasible: None,
            extra: BTreeMap::new(),
        }
    }

    pub(crate) fn param(mut self, key: &str, v: f64) -> Self {
        self.params.insert(key.to_string(), v);
        self
    }

    pub(crate) fn with_extra(mut self, key: &str, v: f64) -> Self {
        self.extra.insert(key.to_string(), v);
        self
    }
}
