use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitsError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs at least 4 cells per axis, got {0:?}")]
    TooFewCells([usize; 3]),
    #[error("grid {0:?} has too many nodes")]
    TooLarge([usize; 3]),
    #[error("grid spacing must be positive, got {0:?}")]
    BadSpacing([f64; 3]),
    #[error("grid origin must be finite, got {0:?}")]
    BadOrigin([f64; 3]),
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("operation requires a periodic grid")]
    UnsupportedBoundary,
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("constraint violated: {what} residual {residual:e} exceeds {tolerance:e}")]
    ConstraintViolation { what: &'static str, residual: f64, tolerance: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParticleError {
    #[error("speed {speed} is not below light speed {c}")]
    Superluminal { speed: f64, c: f64 },
    #[error("vacuum potential {w_bar:e} is too close to zero")]
    DegenerateMass { w_bar: f64 },
    #[error("vacuum potential {w_bar} must be negative for the Hamiltonian models")]
    NonNegativePotential { w_bar: f64 },
    #[error("outside the Hamiltonian domain: W̄² - |p|² = {gap:e}")]
    OutsideDomain { gap: f64 },
    #[error("no real mass branch: 1 - 4|ξA₀/E₀|² = {discriminant}")]
    NoRealBranch { discriminant: f64 },
    #[error("free vacuum dynamics needs a stationary potential")]
    NonStationary,
    #[error("evaluation point coincides with the source position")]
    CoincidentSource,
    #[error("source coupling {source_xi} differs from particle charge {particle_xi}")]
    ChargeMismatch { source_xi: f64, particle_xi: f64 },
    #[error("Hamiltonian flows are formulated with c = 1, got c = {c}")]
    UnsupportedUnits { c: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("time step {dt} exceeds the stability limit, use |dt| <= {max_dt}")]
    Cfl { dt: f64, max_dt: f64 },
    #[error("net charge {total:e} cannot be neutralised on a periodic grid")]
    NetCharge { total: f64 },
    #[error("charge density has content in unresolved grid modes (amplitude {amplitude:e})")]
    UnresolvedCharge { amplitude: f64 },
    #[error("source violates continuity: residual {residual:e} at t = {t}")]
    Continuity { residual: f64, t: f64 },
    #[error("source speed {speed} is not below c = {c}")]
    Superluminal { speed: f64, c: f64 },
    #[error("no retarded time found within a window of {window:e}")]
    NoRetardedRoot { window: f64 },
    #[error("evaluation point lies on the source trajectory")]
    OnTrajectory,
    #[error("quadrature node left the evaluable region at t = {t}")]
    NodeEscaped { t: f64 },
    #[error("surface is not grid aligned: {0}")]
    OffGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SnapshotError {
    #[error("bad snapshot header: {0}")]
    Header(String),
    #[error("snapshot payload: {0}")]
    Payload(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("i/o: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadiationError {
    #[error("invalid charge distribution: {0}")]
    Distribution(String),
    #[error("quadrature did not converge: relative error {relative:e} above {tolerance:e}")]
    Quadrature { relative: f64, tolerance: f64 },
    #[error("speed {speed} exceeds the slow-motion limit {limit}")]
    NotSlow { speed: f64, limit: f64 },
    #[error("speed {speed} is not below c = {c}")]
    Superluminal { speed: f64, c: f64 },
    #[error("trajectory provides derivatives only up to order {available}, {requested} requested")]
    DerivativeUnavailable { requested: usize, available: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invalid structure constants: {0}")]
    Constants(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("mode {mode} out of range for {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("basis of size {size} exceeds the limit {limit}")]
    BasisTooLarge { size: usize, limit: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("state and operator live on different bases")]
    BasisMismatch,
    #[error("evolution time must be finite and non-negative, got {0}")]
    NegativeTime(f64),
    #[error("evolution overflowed ({0}); rescale the system or shorten the horizon")]
    Overflow(String),
    #[error("vacuum amplitude vanishes, cannot extract")]
    VanishingVacuum,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("grid mismatch: expected {expected} points, found {found}")]
    GridMismatch { expected: usize, found: usize },
    #[error("linear solve stalled at relative residual {residual:e} (tolerance {tolerance:e})")]
    NonConvergence { residual: f64, tolerance: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
