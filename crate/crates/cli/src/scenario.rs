//! Scenario files: one JSON document per experiment.

use serde::{Deserialize, Serialize};
use vacfield::fields::Scheme as FieldScheme;
use vacfield::fock::{Monomial, Scheme as FockScheme};
use vacfield::particle::Integrator;
use vacfield::quantum::Variant;
use vacfield::radiation::Shape;

use crate::CliError;

const MAX_STEPS: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Particle,
    Fields,
    Radiation,
    Brackets,
    Fock,
    Quantum,
}

impl Kind {
    pub const ALL: [Kind; 6] =
        [Kind::Particle, Kind::Fields, Kind::Radiation, Kind::Brackets, Kind::Fock, Kind::Quantum];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Particle => "particle",
            Kind::Fields => "fields",
            Kind::Radiation => "radiation",
            Kind::Brackets => "brackets",
            Kind::Fock => "fock",
            Kind::Quantum => "quantum",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    /// Output directory, relative to the output root. Defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particle: Option<ParticleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<FieldsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radiation: Option<RadiationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brackets: Option<BracketsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock: Option<FockSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum: Option<QuantumSpec>,
}

fn one() -> f64 {
    1.0
}

fn every() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    FreeVacuum,
    HamiltonianFree,
    HamiltonianInteraction,
    HamiltonianDual,
    LorentzClassical,
    LorentzModified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", deny_unknown_fields)]
pub enum SourceSpec {
    Uniform { w0: f64 },
    Ramp { w0: f64, grad: [f64; 3] },
    StaticCoulomb { charge: f64, position: [f64; 3], w0: f64 },
    MovingCoulomb { charge: f64, position: [f64; 3], velocity: [f64; 3] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSpec {
    pub dynamics: Dynamics,
    #[serde(default)]
    pub integrator: Integrator,
    pub source: SourceSpec,
    /// Constant vector added to the source's `A`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector_offset: Option<[f64; 3]>,
    #[serde(default = "one")]
    pub xi: f64,
    #[serde(default = "one")]
    pub m0: f64,
    #[serde(default = "one")]
    pub c: f64,
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    /// Lab-time step, or proper-time step for the Hamiltonian flows.
    pub dt: f64,
    pub steps: usize,
    #[serde(default = "every")]
    pub sample_every: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldInitial {
    /// Vacuum plane wave `A_y = a cos(x - t)` on an `n × 4 × 4` box.
    PlaneWave,
    /// Admissible data on an `n³` cube driven by `ρ₀` and an oscillating
    /// current.
    OscillatingSource,
}

fn courant() -> f64 {
    0.25
}

fn half() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsSpec {
    pub initial: FieldInitial,
    pub n: usize,
    #[serde(default)]
    pub scheme: FieldScheme,
    /// `dt / h`
    #[serde(default = "courant")]
    pub courant: f64,
    pub steps: usize,
    #[serde(default = "every")]
    pub sample_every: usize,
    #[serde(default = "half")]
    pub amplitude: f64,
    #[serde(default = "half")]
    pub current: f64,
    #[serde(default = "half")]
    pub omega: f64,
    /// Repeat at `n/2` for the convergence-order invariants.
    #[serde(default)]
    pub refine: bool,
    #[serde(default)]
    pub snapshot: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method", deny_unknown_fields)]
pub enum QuadratureSpec {
    MonteCarlo {
        pairs: u64,
        #[serde(default = "partitions")]
        partitions: u32,
    },
    Gauss {
        order: usize,
    },
}

fn partitions() -> u32 {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinusoidSpec {
    pub drift: [f64; 3],
    pub amplitude: [f64; 3],
    pub omega: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiationSpec {
    pub shape: Shape,
    pub radius: f64,
    #[serde(default = "one")]
    pub xi: f64,
    #[serde(default = "one")]
    pub c: f64,
    pub quadrature: QuadratureSpec,
    pub order: usize,
    pub trajectory: SinusoidSpec,
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
}

fn points() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketsSpec {
    #[serde(default = "points")]
    pub points: usize,
    #[serde(default = "one")]
    pub xi: f64,
    /// Uniform monopole density added to the divergence-free test field.
    #[serde(default)]
    pub monopole: f64,
    /// Size of the rotation angle in the pure-gauge su(2) family.
    #[serde(default = "half")]
    pub gauge_amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", deny_unknown_fields)]
pub enum SystemSpec {
    /// `du/dt = u - u²`
    Logistic,
    /// `du_j/dt = λ_j u_j`, each `λ_j` as `[re, im]`.
    Linear {
        lambda: Vec<[f64; 2]>,
    },
    Polynomial {
        s: usize,
        rhs: Vec<Vec<Monomial>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockSpec {
    pub system: SystemSpec,
    pub u0: Vec<[f64; 2]>,
    pub n_max: u32,
    pub t: f64,
    pub samples: usize,
    #[serde(default)]
    pub scheme: FockScheme,
    /// Oracle RK4 sub-steps per sample interval.
    #[serde(default = "oracle_steps")]
    pub oracle_steps: usize,
}

fn oracle_steps() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", deny_unknown_fields)]
pub enum PotentialSpec {
    Uniform { w: f64 },
    Ramp { w0: f64, grad: f64 },
}

/// `A(x) = offset + amplitude · sin(2π mode x / L)`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorPotentialSpec {
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "unit_mode")]
    pub mode: u32,
}

fn unit_mode() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    #[serde(default)]
    pub x0: f64,
    pub sigma: f64,
    #[serde(default)]
    pub k0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSpec {
    pub variant: Variant,
    pub n: usize,
    pub length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<f64>,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub xi: f64,
    pub potential: PotentialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector_potential: Option<VectorPotentialSpec>,
    pub packet: PacketSpec,
    pub dtau: f64,
    pub steps: usize,
    #[serde(default = "every")]
    pub sample_every: usize,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn finite(name: &str, xs: &[f64]) -> Result<(), CliError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(schema(format!("{name}: values must be finite")))
    }
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(schema(format!("{name}: must be positive, got {x}")))
    }
}

fn in_range(name: &str, x: usize, lo: usize, hi: usize) -> Result<(), CliError> {
    if (lo..=hi).contains(&x) {
        Ok(())
    } else {
        Err(schema(format!("{name}: must lie in {lo}..={hi}, got {x}")))
    }
}

impl Scenario {
    /// Parses and validates, reporting `line:column` and the field path of
    /// the first problem.
    pub fn from_json(text: &str) -> Result<Scenario, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let sc: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            let path = e.path().to_string();
            let at = if path == "." { String::new() } else { format!(" at `{path}`") };
            schema(format!("line {} column {}{at}: {inner}", inner.line(), inner.column()))
        })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn output_dir(&self) -> &str {
        self.output.as_deref().unwrap_or(&self.name)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(schema(format!("name: use letters, digits, '-', '_' or '.', got {:?}", self.name)));
        }
        if let Some(o) = &self.output {
            let p = std::path::Path::new(o);
            if o.is_empty() || p.is_absolute() || p.components().any(|c| matches!(c, std::path::Component::ParentDir)) {
                return Err(schema(format!("output: must be a relative path without '..', got {o:?}")));
            }
        }
        let present: Vec<Kind> = [
            (Kind::Particle, self.particle.is_some()),
            (Kind::Fields, self.fields.is_some()),
            (Kind::Radiation, self.radiation.is_some()),
            (Kind::Brackets, self.brackets.is_some()),
            (Kind::Fock, self.fock.is_some()),
            (Kind::Quantum, self.quantum.is_some()),
        ]
        .into_iter()
        .filter_map(|(k, p)| p.then_some(k))
        .collect();
        if present != [self.kind] {
            let names: Vec<&str> = present.iter().map(|k| k.name()).collect();
            return Err(schema(format!(
                "kind `{}` needs exactly the `{}` block, found [{}]",
                self.kind.name(),
                self.kind.name(),
                names.join(", ")
            )));
        }
        match self.kind {
            Kind::Particle => self.particle.as_ref().unwrap().validate(),
            Kind::Fields => self.fields.as_ref().unwrap().validate(),
            Kind::Radiation => self.radiation.as_ref().unwrap().validate(),
            Kind::Brackets => self.brackets.as_ref().unwrap().validate(),
            Kind::Fock => self.fock.as_ref().unwrap().validate(),
            Kind::Quantum => self.quantum.as_ref().unwrap().validate(),
        }
    }
}

impl SourceSpec {
    fn numbers(&self) -> Vec<f64> {
        match self {
            SourceSpec::Uniform { w0 } => vec![*w0],
            SourceSpec::Ramp { w0, grad } => vec![*w0, grad[0], grad[1], grad[2]],
            SourceSpec::StaticCoulomb { charge, position, w0 } => {
                vec![*charge, position[0], position[1], position[2], *w0]
            }
            SourceSpec::MovingCoulomb { charge, position, velocity } => {
                let mut v = vec![*charge];
                v.extend(position);
                v.extend(velocity);
                v
            }
        }
    }
}

impl ParticleSpec {
    fn validate(&self) -> Result<(), CliError> {
        finite("particle.source", &self.source.numbers())?;
        finite("particle.vector_offset", &self.vector_offset.unwrap_or_default())?;
        finite("particle.xi", &[self.xi])?;
        finite("particle.position", &self.position)?;
        finite("particle.velocity", &self.velocity)?;
        positive("particle.m0", self.m0)?;
        positive("particle.c", self.c)?;
        positive("particle.dt", self.dt)?;
        in_range("particle.steps", self.steps, 1, MAX_STEPS)?;
        in_range("particle.sample_every", self.sample_every, 1, MAX_STEPS)
    }
}

impl FieldsSpec {
    fn validate(&self) -> Result<(), CliError> {
        let hi = match self.initial {
            FieldInitial::PlaneWave => 1024,
            FieldInitial::OscillatingSource => 96,
        };
        in_range("fields.n", self.n, if self.refine { 8 } else { 4 }, hi)?;
        if self.refine && self.n % 2 != 0 {
            return Err(schema(format!("fields.n: refinement needs an even n, got {}", self.n)));
        }
        positive("fields.courant", self.courant)?;
        finite("fields.amplitude", &[self.amplitude, self.current, self.omega])?;
        in_range("fields.steps", self.steps, 2, MAX_STEPS)?;
        if self.refine && self.steps % 2 != 0 {
            return Err(schema(format!("fields.steps: refinement needs an even step count, got {}", self.steps)));
        }
        in_range("fields.sample_every", self.sample_every, 1, MAX_STEPS)
    }
}

impl RadiationSpec {
    fn validate(&self) -> Result<(), CliError> {
        positive("radiation.radius", self.radius)?;
        finite("radiation.xi", &[self.xi])?;
        positive("radiation.c", self.c)?;
        match self.quadrature {
            QuadratureSpec::MonteCarlo { pairs, partitions } => {
                if !(16..=100_000_000).contains(&pairs) {
                    return Err(schema(format!("radiation.quadrature.pairs: must lie in 16..=1e8, got {pairs}")));
                }
                if partitions == 0 || u64::from(partitions) * 16 > pairs || partitions > 1024 {
                    return Err(schema(format!("radiation.quadrature.partitions: out of range, got {partitions}")));
                }
            }
            QuadratureSpec::Gauss { order } => in_range("radiation.quadrature.order", order, 1, 512)?,
        }
        in_range("radiation.order", self.order, 0, 12)?;
        let tr = &self.trajectory;
        finite("radiation.trajectory", &[tr.drift, tr.amplitude].concat())?;
        finite("radiation.trajectory", &[tr.omega, tr.phase, self.t0, self.t1])?;
        in_range("radiation.samples", self.samples, 1, 100_000)
    }
}

impl BracketsSpec {
    fn validate(&self) -> Result<(), CliError> {
        in_range("brackets.points", self.points, 1, 10_000)?;
        finite("brackets.xi", &[self.xi, self.monopole, self.gauge_amplitude])
    }
}

impl FockSpec {
    pub fn modes(&self) -> usize {
        match &self.system {
            SystemSpec::Logistic => 1,
            SystemSpec::Linear { lambda } => lambda.len(),
            SystemSpec::Polynomial { s, .. } => *s,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let s = self.modes();
        in_range("fock.system", s, 1, 8)?;
        if self.u0.len() != s {
            return Err(schema(format!("fock.u0: expected {s} entries, got {}", self.u0.len())));
        }
        finite("fock.u0", &self.u0.concat())?;
        if let SystemSpec::Linear { lambda } = &self.system {
            finite("fock.system.lambda", &lambda.concat())?;
        }
        in_range("fock.n_max", self.n_max as usize, 2, 200)?;
        let size = vacfield::fock::basis_size(s, self.n_max);
        let limit = match self.scheme {
            FockScheme::Exponential => 1500,
            FockScheme::Rk4 { max_dt } => {
                positive("fock.scheme.max_dt", max_dt)?;
                50_000
            }
        };
        if size > limit {
            return Err(schema(format!("fock.n_max: basis of {size} states exceeds {limit} for this scheme")));
        }
        if !(self.t >= 0.0 && self.t <= 100.0) {
            return Err(schema(format!("fock.t: must lie in [0, 100], got {}", self.t)));
        }
        in_range("fock.samples", self.samples, 1, 10_000)?;
        in_range("fock.oracle_steps", self.oracle_steps, 1, 100_000)
    }
}

impl QuantumSpec {
    fn validate(&self) -> Result<(), CliError> {
        in_range("quantum.n", self.n, 3, 1 << 16)?;
        positive("quantum.length", self.length)?;
        finite("quantum.origin", &[self.origin.unwrap_or(0.0)])?;
        positive("quantum.mass", self.mass)?;
        positive("quantum.hbar", self.hbar)?;
        finite("quantum.xi", &[self.xi])?;
        match self.potential {
            PotentialSpec::Uniform { w } => finite("quantum.potential", &[w])?,
            PotentialSpec::Ramp { w0, grad } => finite("quantum.potential", &[w0, grad])?,
        }
        if let Some(a) = &self.vector_potential {
            finite("quantum.vector_potential", &[a.offset, a.amplitude])?;
        }
        positive("quantum.packet.sigma", self.packet.sigma)?;
        finite("quantum.packet", &[self.packet.x0, self.packet.k0])?;
        if !(self.dtau >= 0.0 && self.dtau.is_finite()) {
            return Err(schema(format!("quantum.dtau: must be non-negative, got {}", self.dtau)));
        }
        in_range("quantum.steps", self.steps, 1, MAX_STEPS)?;
        in_range("quantum.sample_every", self.sample_every, 1, MAX_STEPS)
    }
}
