use vacfield::particle::{
    force_correction, hamiltonian_flow, hamiltonian_flow_from, initial_canonical_momentum, integrate_free_vacuum,
    integrate_lorentz, lorentz_force_classical, lorentz_force_modified, vacuum_energy, ForceLaw, HamiltonianModel,
    ParticleParams, ParticleState, PotentialSource, Vec3,
};
use vacfield::Units;

use super::{runtime, Outcome};
use crate::report::Check;
use crate::scenario::{Dynamics, ParticleSpec, SourceSpec};
use crate::table::Table;
use crate::CliError;

const COLUMNS: [&str; 15] =
    ["t", "tau", "x", "y", "z", "ux", "uy", "uz", "px", "py", "pz", "energy", "fcx", "fcy", "fcz"];

const GAUGE_SHIFT: [f64; 3] = [0.3, -0.2, 0.5];

fn v(a: [f64; 3]) -> Vec3 {
    Vec3::from(a)
}

pub fn build_source(spec: &ParticleSpec) -> Result<PotentialSource, CliError> {
    let src = match &spec.source {
        SourceSpec::Uniform { w0 } => PotentialSource::uniform(*w0),
        SourceSpec::Ramp { w0, grad } => PotentialSource::ramp(*w0, v(*grad)),
        SourceSpec::StaticCoulomb { charge, position, w0 } => {
            PotentialSource::static_coulomb(*charge, v(*position), spec.xi, *w0)
        }
        SourceSpec::MovingCoulomb { charge, position, velocity } => {
            PotentialSource::moving_coulomb(*charge, v(*position), v(*velocity), spec.xi, spec.c).map_err(runtime)?
        }
    };
    Ok(match spec.vector_offset {
        Some(a) => src.with_vector_offset(v(a)),
        None => src,
    })
}

/// One trajectory point with everything the invariants need.
struct Point {
    state: ParticleState,
    p: Vec3,
    energy: f64,
    fc: Vec3,
}

fn model_of(d: Dynamics) -> Option<HamiltonianModel> {
    match d {
        Dynamics::HamiltonianFree => Some(HamiltonianModel::Free),
        Dynamics::HamiltonianInteraction => Some(HamiltonianModel::Interaction),
        Dynamics::HamiltonianDual => Some(HamiltonianModel::Dual),
        _ => None,
    }
}

fn max_rel_drift(xs: impl Iterator<Item = f64>, x0: f64) -> f64 {
    xs.map(|x| ((x - x0) / x0).abs()).fold(0.0, f64::max)
}

pub fn run(spec: &ParticleSpec) -> Result<Outcome, CliError> {
    let source = build_source(spec)?;
    let mut params = ParticleParams::new(spec.xi, spec.m0);
    params.units = Units::new(spec.c, 1.0).map_err(runtime)?;
    let start = ParticleState::new(v(spec.position), v(spec.velocity));
    let c = spec.c;

    let mut truncated = None;
    let points: Vec<Point> = match spec.dynamics {
        Dynamics::FreeVacuum => {
            let traj = integrate_free_vacuum(&start, &source, c, spec.dt, spec.steps).map_err(runtime)?;
            traj.into_iter()
                .map(|s| {
                    let smp = source.sample(s.t, &s.r).map_err(runtime)?;
                    let energy = vacuum_energy(&s, &source, c).map_err(runtime)?;
                    Ok(Point { state: s, p: -s.u * smp.w_bar / (c * c), energy, fc: Vec3::zeros() })
                })
                .collect::<Result<_, CliError>>()?
        }
        Dynamics::HamiltonianFree | Dynamics::HamiltonianInteraction | Dynamics::HamiltonianDual => {
            let model = model_of(spec.dynamics).unwrap();
            let out = hamiltonian_flow(model, &start, &source, &params, spec.steps, spec.dt, spec.integrator)
                .map_err(runtime)?;
            truncated = out.diagnostic;
            out.samples
                .iter()
                .map(|s| Point {
                    state: ParticleState { r: s.r, u: s.u, t: s.t, tau: s.tau },
                    p: s.p,
                    energy: s.h,
                    fc: Vec3::zeros(),
                })
                .collect()
        }
        Dynamics::LorentzClassical | Dynamics::LorentzModified => {
            let law = if spec.dynamics == Dynamics::LorentzModified { ForceLaw::Modified } else { ForceLaw::Classical };
            let out = integrate_lorentz(law, &start, &source, &params, spec.dt, spec.steps).map_err(runtime)?;
            out.iter()
                .map(|s| {
                    let g = 1.0 / (1.0 - s.state.u.norm_squared() / (c * c)).sqrt();
                    Point { state: s.state, p: s.p, energy: spec.m0 * g * c * c, fc: s.correction_integral }
                })
                .collect()
        }
    };
    if let Some(why) = truncated {
        return Err(CliError::Runtime(format!("particle: {why}")));
    }

    let mut table = Table::new(COLUMNS);
    for (i, pt) in points.iter().enumerate() {
        if i % spec.sample_every == 0 || i + 1 == points.len() {
            let (s, p, f) = (&pt.state, &pt.p, &pt.fc);
            table.push(vec![
                s.t, s.tau, s.r.x, s.r.y, s.r.z, s.u.x, s.u.y, s.u.z, p.x, p.y, p.z, pt.energy, f.x, f.y, f.z,
            ]);
        }
    }

    let mut checks = Vec::new();
    let free = spec.dynamics == Dynamics::FreeVacuum;
    if free {
        let h0 = points[0].energy;
        let drift = max_rel_drift(points.iter().map(|p| p.energy), h0);
        checks.push(Check::at_most("h0_drift", drift, 1e-8, format!("H0 = {h0}, max relative drift")));
        let m0 = -h0;
        let mut worst = 0.0_f64;
        for pt in &points {
            let w = source.sample(pt.state.t, &pt.state.r).map_err(runtime)?.w_bar;
            let m = -w * (1.0 - pt.state.u.norm_squared() / (c * c)).sqrt();
            worst = worst.max(((m - m0) / m0).abs());
        }
        checks.push(Check::at_most("mass_law", worst, 1e-8, format!("-W̄√(1-u²) against m0 = {m0}")));
    } else {
        checks.push(Check::skipped("h0_drift", "only for free_vacuum dynamics"));
        checks.push(Check::skipped("mass_law", "only for free_vacuum dynamics"));
    }

    if model_of(spec.dynamics).is_some() && source.is_stationary() {
        let h0 = points[0].energy;
        let drift = max_rel_drift(points.iter().map(|p| p.energy), h0);
        checks.push(Check::at_most("hamiltonian_conservation", drift, 1e-8, format!("H(0) = {h0}")));
    } else if model_of(spec.dynamics).is_some() {
        checks.push(Check::skipped("hamiltonian_conservation", "time-dependent source"));
    } else {
        checks.push(Check::skipped("hamiltonian_conservation", "only for Hamiltonian flows"));
    }

    checks.push(force_structure(&points, &source, &params)?);

    if spec.dynamics == Dynamics::HamiltonianDual {
        let shift = v(GAUGE_SHIFT);
        let shifted = source.clone().with_vector_offset(source.a_offset() + shift);
        let p0 = initial_canonical_momentum(HamiltonianModel::Dual, &start, &source, spec.xi).map_err(runtime)?;
        let other = hamiltonian_flow_from(
            HamiltonianModel::Dual,
            &start,
            p0 + shift * spec.xi,
            &shifted,
            &params,
            spec.steps,
            spec.dt,
            spec.integrator,
        )
        .map_err(runtime)?;
        let gap = points
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a.state.r - b.r).norm().max((a.state.u - b.u).norm()))
            .fold(0.0, f64::max);
        let short = other.samples.len() != points.len();
        checks.push(
            Check::at_most("gauge_invariance", gap, 1e-9, format!("A shifted by {GAUGE_SHIFT:?}"))
                .fail_if(short, "shifted flow stopped early"),
        );
    } else {
        checks.push(Check::skipped("gauge_invariance", "only for hamiltonian_dual dynamics"));
    }

    let step = spec.dt;
    let sq = |u: &Vec3| (1.0 - u.norm_squared() / (c * c)).sqrt();
    let mut worst = 0.0_f64;
    for w in points.windows(2) {
        let (a, b) = (&w[0].state, &w[1].state);
        let est = (b.t - a.t) * 0.5 * (sq(&a.u) + sq(&b.u));
        worst = worst.max((est - (b.tau - a.tau)).abs());
    }
    checks.push(Check::at_most("proper_time", worst, step.powi(3), "trapezoid Δt·√(1-u²) against Δτ, per step"));

    Ok(Outcome { table, checks, extra: Vec::new(), phases: Vec::new() })
}

/// Modified minus classical force against the evaluated gradient term,
/// and exact vanishing when the source's `A` is spatially constant.
fn force_structure(points: &[Point], source: &PotentialSource, params: &ParticleParams) -> Result<Check, CliError> {
    let mut worst = 0.0_f64;
    let mut largest = 0.0_f64;
    let mut jac = 0.0_f64;
    for pt in points {
        let s = &pt.state;
        let diff = lorentz_force_modified(s, source, params).map_err(runtime)?
            - lorentz_force_classical(s, source, params).map_err(runtime)?;
        let fc = force_correction(s, source, params).map_err(runtime)?;
        worst = worst.max((diff - fc).norm() / fc.norm().max(1.0));
        largest = largest.max(fc.norm());
        jac = jac.max(source.sample(s.t, &s.r).map_err(runtime)?.jac_a.amax());
    }
    let constant_a = jac == 0.0;
    let detail = if constant_a {
        "A spatially constant: correction must vanish".to_string()
    } else {
        format!("largest |F_c| = {largest}")
    };
    Ok(Check::at_most("force_correction", worst, 1e-12, detail)
        .fail_if(constant_a && largest != 0.0, "nonzero correction for constant A"))
}
