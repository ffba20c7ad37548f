//! Poisson brackets on finite-dimensional phase spaces.
//!
//! Coordinates are ordered `(q, p)` for the canonical and magnetic
//! structures and `(q, p, u, y)` for the extended Yang–Mills structure.
//! The sign convention throughout is `{p_j, q^i} = δ_j^i`.

mod bracket;
mod magnetic;
mod yang_mills;

pub use bracket::{bracket, jacobi_residual, jacobi_scan, Canonical, Observable, PoissonStructure};
pub use magnetic::{minimal_shift, minimal_unshift, AbelianGaugeField, MagneticStructure, ShiftedMagnetic};
pub use yang_mills::{
    pure_gauge_su2, shifted_canonicality_residual, yang_mills_residual, CanonicalityReport, ExtendedStructure,
    NonAbelianGaugeField, ReducedStructure, StructureConstants, YangMillsResidual,
};

/// 5-point central difference of `f` at `0` with step `h`.
pub(crate) fn diff5<T, F>(h: f64, mut f: F) -> T
where
    F: FnMut(f64) -> T,
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    let (a, b, c, d) = (f(2.0 * h), f(h), f(-h), f(-2.0 * h));
    ((b - c) * 8.0 + d - a) * (1.0 / (12.0 * h))
}
