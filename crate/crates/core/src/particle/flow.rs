use serde::{Deserialize, Serialize};

use super::force::{classical_from_sample, free_vacuum_accel, gradient_correction};
use super::hamiltonian::{hamiltonian_dual, hamiltonian_free, hamiltonian_interaction};
use super::source::{PotentialSample, PotentialSource};
use super::{check_speed, ParticleParams, ParticleState, Vec3};
use crate::error::ParticleError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianModel {
    Free,
    Interaction,
    Dual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    #[default]
    Rk4,
    ImplicitMidpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceLaw {
    Classical,
    Modified,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowSample {
    pub tau: f64,
    pub t: f64,
    pub r: Vec3,
    pub u: Vec3,
    /// Kinetic momentum `-W̄u` (canonical minus `ξA` for the coupled models).
    pub p: Vec3,
    /// Canonical momentum of the model.
    pub canonical: Vec3,
    pub h: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowResult {
    pub samples: Vec<FlowSample>,
    /// Set when integration stopped early, e.g. on leaving the domain.
    pub diagnostic: Option<String>,
}

const MIDPOINT_TOL: f64 = 1e-12;
const MIDPOINT_MAX_ITER: usize = 200;

fn rk4<const N: usize, E>(
    y: &[f64; N],
    h: f64,
    mut f: impl FnMut(&[f64; N]) -> Result<[f64; N], E>,
) -> Result<[f64; N], E> {
    let add = |a: &[f64; N], b: &[f64; N], s: f64| -> [f64; N] { std::array::from_fn(|i| a[i] + s * b[i]) };
    let k1 = f(y)?;
    let k2 = f(&add(y, &k1, 0.5 * h))?;
    let k3 = f(&add(y, &k2, 0.5 * h))?;
    let k4 = f(&add(y, &k3, h))?;
    Ok(std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
}

fn implicit_midpoint<const N: usize>(
    y: &[f64; N],
    h: f64,
    mut f: impl FnMut(&[f64; N]) -> Result<[f64; N], ParticleError>,
) -> Result<[f64; N], String> {
    let mut next = {
        let k = f(y).map_err(|e| e.to_string())?;
        std::array::from_fn(|i| y[i] + h * k[i])
    };
    for _ in 0..MIDPOINT_MAX_ITER {
        let mid: [f64; N] = std::array::from_fn(|i| 0.5 * (y[i] + next[i]));
        let k = f(&mid).map_err(|e| e.to_string())?;
        let cand: [f64; N] = std::array::from_fn(|i| y[i] + h * k[i]);
        let mut diff = 0.0_f64;
        let mut scale = 1.0_f64;
        for i in 0..N {
            diff = diff.max((cand[i] - next[i]).abs());
            scale = scale.max(cand[i].abs());
        }
        next = cand;
        if diff <= MIDPOINT_TOL * scale {
            return Ok(next);
        }
    }
    Err("implicit midpoint iteration did not converge".into())
}

fn v3(y: &[f64], at: usize) -> Vec3 {
    Vec3::new(y[at], y[at + 1], y[at + 2])
}

struct Model<'a> {
    kind: HamiltonianModel,
    source: &'a PotentialSource,
    xi: f64,
}

impl Model<'_> {
    fn sample(&self, t: f64, r: &Vec3) -> Result<PotentialSample, ParticleError> {
        let s = self.source.sample(t, r)?;
        if s.w_bar.abs() < 1e-12 {
            return Err(ParticleError::DegenerateMass { w_bar: s.w_bar });
        }
        Ok(s)
    }

    fn value(&self, s: &PotentialSample, pc: &Vec3) -> Result<f64, ParticleError> {
        match self.kind {
            HamiltonianModel::Free => hamiltonian_free(pc, s.w_bar),
            HamiltonianModel::Interaction => hamiltonian_interaction(pc, s.w_bar, &s.a, self.xi),
            HamiltonianModel::Dual => hamiltonian_dual(pc, s.w_bar, &s.a, self.xi),
        }
    }

    /// `(dr/dτ, dP/dτ)`
    fn equations(&self, s: &PotentialSample, pc: &Vec3) -> Result<(Vec3, Vec3), ParticleError> {
        let w = s.w_bar;
        let wg = s.grad_w_bar * w;
        let xi = self.xi;
        let domain = |k: &Vec3| {
            let gap = w * w - k.norm_squared();
            if gap > 0.0 {
                Ok(gap.sqrt())
            } else {
                Err(ParticleError::OutsideDomain { gap })
            }
        };
        Ok(match self.kind {
            HamiltonianModel::Free => {
                let sq = domain(pc)?;
                (pc / sq, wg / sq)
            }
            HamiltonianModel::Interaction => {
                let sq = domain(pc)?;
                let ap = s.a.dot(pc);
                let s3 = sq * sq * sq;
                let rdot = pc / sq - s.a * (xi / sq) - pc * (xi * ap / s3);
                let pdot = wg / sq + s.jac_a.transpose() * pc * (xi / sq) - wg * (xi * ap / s3);
                (rdot, pdot)
            }
            HamiltonianModel::Dual => {
                let k = pc - s.a * xi;
                let sq = domain(&k)?;
                (k / sq, (wg + s.jac_a.transpose() * k * xi) / sq)
            }
        })
    }

    fn kinetic(&self, s: &PotentialSample, pc: &Vec3) -> Vec3 {
        match self.kind {
            HamiltonianModel::Free => *pc,
            _ => pc - s.a * self.xi,
        }
    }

    fn rhs(&self, y: &[f64; 7]) -> Result<[f64; 7], ParticleError> {
        let r = v3(y, 0);
        let pc = v3(y, 3);
        let s = self.sample(y[6], &r)?;
        let (rd, pd) = self.equations(&s, &pc)?;
        let td = (1.0 + rd.norm_squared()).sqrt();
        Ok([rd.x, rd.y, rd.z, pd.x, pd.y, pd.z, td])
    }

    fn record(&self, tau: f64, y: &[f64; 7]) -> Result<FlowSample, ParticleError> {
        let r = v3(y, 0);
        let pc = v3(y, 3);
        let s = self.sample(y[6], &r)?;
        let (rd, _) = self.equations(&s, &pc)?;
        let u = rd / (1.0 + rd.norm_squared()).sqrt();
        Ok(FlowSample { tau, t: y[6], r, u, p: self.kinetic(&s, &pc), canonical: pc, h: self.value(&s, &pc)? })
    }
}

/// Canonical momentum that reproduces lab velocity `u` in the given model.
pub fn initial_canonical_momentum(
    model: HamiltonianModel,
    state: &ParticleState,
    source: &PotentialSource,
    xi: f64,
) -> Result<Vec3, ParticleError> {
    let s = source.sample(state.t, &state.r)?;
    let p = -state.u * s.w_bar;
    Ok(match model {
        HamiltonianModel::Free => p,
        _ => p + s.a * xi,
    })
}

/// Proper-time integration of one of the Hamiltonian models. Works in
/// units with `c = 1`.
pub fn hamiltonian_flow(
    model: HamiltonianModel,
    initial: &ParticleState,
    source: &PotentialSource,
    params: &ParticleParams,
    steps: usize,
    dtau: f64,
    integrator: Integrator,
) -> Result<FlowResult, ParticleError> {
    let pc = initial_canonical_momentum(model, initial, source, params.xi)?;
    hamiltonian_flow_from(model, initial, pc, source, params, steps, dtau, integrator)
}

/// As [`hamiltonian_flow`] but with an explicit starting canonical momentum.
#[allow(clippy::too_many_arguments)]
pub fn hamiltonian_flow_from(
    model: HamiltonianModel,
    initial: &ParticleState,
    canonical: Vec3,
    source: &PotentialSource,
    params: &ParticleParams,
    steps: usize,
    dtau: f64,
    integrator: Integrator,
) -> Result<FlowResult, ParticleError> {
    if params.units.c != 1.0 {
        return Err(ParticleError::UnsupportedUnits { c: params.units.c });
    }
    if !(dtau > 0.0 && dtau.is_finite()) {
        return Err(ParticleError::InvalidParameter(format!("dtau {dtau}")));
    }
    source.check_charge(params.xi)?;
    check_speed(&initial.u, 1.0)?;
    let w0 = source.sample(initial.t, &initial.r)?.w_bar;
    if w0.abs() < 1e-12 {
        return Err(ParticleError::DegenerateMass { w_bar: w0 });
    }
    if w0 > 0.0 {
        return Err(ParticleError::NonNegativePotential { w_bar: w0 });
    }

    let m = Model { kind: model, source, xi: params.xi };
    let mut y = [initial.r.x, initial.r.y, initial.r.z, canonical.x, canonical.y, canonical.z, initial.t];
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(m.record(initial.tau, &y)?);
    let mut diagnostic = None;
    for n in 1..=steps {
        let next = match integrator {
            Integrator::Rk4 => rk4(&y, dtau, |z| m.rhs(z)).map_err(|e| e.to_string()),
            Integrator::ImplicitMidpoint => implicit_midpoint(&y, dtau, |z| m.rhs(z)),
        };
        let rec =
            next.and_then(|z| m.record(initial.tau + n as f64 * dtau, &z).map(|s| (z, s)).map_err(|e| e.to_string()));
        match rec {
            Ok((z, s)) => {
                y = z;
                samples.push(s);
            }
            Err(e) => {
                diagnostic = Some(format!("stopped after {} of {} steps: {}", n - 1, steps, e));
                break;
            }
        }
    }
    Ok(FlowResult { samples, diagnostic })
}

/// Lab-time RK4 of the free vacuum-field model; proper time is integrated
/// alongside.
pub fn integrate_free_vacuum(
    initial: &ParticleState,
    source: &PotentialSource,
    c: f64,
    dt: f64,
    steps: usize,
) -> Result<Vec<ParticleState>, ParticleError> {
    if !source.is_stationary() {
        return Err(ParticleError::NonStationary);
    }
    check_speed(&initial.u, c)?;
    let rhs = |y: &[f64; 8]| -> Result<[f64; 8], ParticleError> {
        let r = v3(y, 0);
        let u = v3(y, 3);
        let g = check_speed(&u, c)?;
        let s = source.sample(y[7], &r)?;
        let a = free_vacuum_accel(&s, &u, c)?;
        Ok([u.x, u.y, u.z, a.x, a.y, a.z, 1.0 / g, 1.0])
    };
    let mut y = [initial.r.x, initial.r.y, initial.r.z, initial.u.x, initial.u.y, initial.u.z, initial.tau, initial.t];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(*initial);
    for _ in 0..steps {
        y = rk4(&y, dt, rhs)?;
        out.push(ParticleState { r: v3(&y, 0), u: v3(&y, 3), t: y[7], tau: y[6] });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzSample {
    pub state: ParticleState,
    pub p: Vec3,
    /// Running `∫ F_c dt` of the gradient correction along this trajectory.
    pub correction_integral: Vec3,
}

/// Lab-time RK4 of `dp/dt = F` with `p = m₀γu`, for either force law.
pub fn integrate_lorentz(
    law: ForceLaw,
    initial: &ParticleState,
    source: &PotentialSource,
    params: &ParticleParams,
    dt: f64,
    steps: usize,
) -> Result<Vec<LorentzSample>, ParticleError> {
    let c = params.units.c;
    let m0 = params.m0;
    if !(m0 > 0.0) {
        return Err(ParticleError::InvalidParameter(format!("rest mass {m0}")));
    }
    source.check_charge(params.xi)?;
    let p0 = initial.u * (m0 * check_speed(&initial.u, c)?);
    let velocity = |p: &Vec3| {
        let g = (1.0 + p.norm_squared() / (m0 * m0 * c * c)).sqrt();
        (p / (m0 * g), g)
    };
    let rhs = |y: &[f64; 11]| -> Result<[f64; 11], ParticleError> {
        let r = v3(y, 0);
        let p = v3(y, 3);
        let (u, g) = velocity(&p);
        let s = source.sample(y[10], &r)?;
        let fc = gradient_correction(&s, &u, params.xi, c);
        let mut f = classical_from_sample(&s, &u, params.xi, c);
        if law == ForceLaw::Modified {
            f += fc;
        }
        Ok([u.x, u.y, u.z, f.x, f.y, f.z, fc.x, fc.y, fc.z, 1.0 / g, 1.0])
    };
    let mut y = [initial.r.x, initial.r.y, initial.r.z, p0.x, p0.y, p0.z, 0.0, 0.0, 0.0, initial.tau, initial.t];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(LorentzSample { state: *initial, p: p0, correction_integral: Vec3::zeros() });
    for _ in 0..steps {
        y = rk4(&y, dt, rhs)?;
        let p = v3(&y, 3);
        let (u, _) = velocity(&p);
        out.push(LorentzSample {
            state: ParticleState { r: v3(&y, 0), u, t: y[10], tau: y[9] },
            p,
            correction_integral: v3(&y, 6),
        });
    }
    Ok(out)
}
