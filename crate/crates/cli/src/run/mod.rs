//! One runner per experiment kind.

use std::fmt::Display;
use std::path::Path;

use crate::report::{Check, Phase};
use crate::scenario::{Kind, Scenario};
use crate::table::Table;
use crate::CliError;

pub mod brackets;
pub mod fields;
pub mod fock;
pub mod particle;
pub mod quantum;
pub mod radiation;

/// What a runner hands back: the series, the checks in declared order and
/// any extra files it wrote into the output directory.
pub struct Outcome {
    pub table: Table,
    pub checks: Vec<Check>,
    pub extra: Vec<String>,
    pub phases: Vec<Phase>,
}

pub(crate) fn runtime(e: impl Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Runs `sc`, which must already be validated, writing side files into `dir`.
pub fn execute(sc: &Scenario, dir: &Path) -> Result<Outcome, CliError> {
    match sc.kind {
        Kind::Particle => particle::run(sc.particle.as_ref().unwrap()),
        Kind::Fields => fields::run(sc.fields.as_ref().unwrap(), dir, &sc.name),
        Kind::Radiation => radiation::run(sc.radiation.as_ref().unwrap(), sc.seed),
        Kind::Brackets => brackets::run(sc.brackets.as_ref().unwrap(), sc.seed),
        Kind::Fock => fock::run(sc.fock.as_ref().unwrap()),
        Kind::Quantum => quantum::run(sc.quantum.as_ref().unwrap()),
    }
}
