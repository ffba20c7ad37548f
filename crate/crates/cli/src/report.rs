use serde::Serialize;

use crate::scenario::{Kind, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The scenario does not exercise the preconditions of this invariant.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl Check {
    /// Passes when `residual ≤ tolerance`; a NaN residual fails.
    pub fn at_most(name: &'static str, residual: f64, tolerance: f64, detail: impl Into<String>) -> Check {
        let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
        Check { name, status, residual: Some(residual), tolerance: Some(tolerance), detail: detail.into() }
    }

    pub fn skipped(name: &'static str, why: impl Into<String>) -> Check {
        Check { name, status: Status::Skipped, residual: None, tolerance: None, detail: why.into() }
    }

    /// Overrides the status to fail, keeping the measurement.
    pub fn fail_if(mut self, bad: bool, why: &str) -> Check {
        if bad {
            self.status = Status::Fail;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(why);
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Invariants each experiment kind reports, in report order.
pub fn declared_invariants(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Particle => {
            &["h0_drift", "mass_law", "hamiltonian_conservation", "force_correction", "gauge_invariance", "proper_time"]
        }
        Kind::Fields => {
            &["lorenz", "gauss", "div_b", "maxwell", "energy_drift", "wave_residual", "plane_wave_convergence"]
        }
        Kind::Radiation => &["series_consistency", "uniform_null", "charge_square_scaling", "monte_carlo_rate"],
        Kind::Brackets => {
            &["antisymmetry_leibniz", "magnetic_jacobi", "abelian_minimal_shift", "nonabelian_covanishing"]
        }
        Kind::Fock => &["vacuum_amplitude", "truncation_convergence", "ladder_commutators", "current_algebra"],
        Kind::Quantum => &["norm", "energy", "variant_coincidence", "ehrenfest"],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Phase {
    pub name: &'static str,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub passed: bool,
    pub invariants: Vec<Check>,
    pub wall_time_s: f64,
    /// Wall time of the separately timed parts of the run, if any.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub phases: Vec<Phase>,
    /// Written files, relative to the output directory.
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
