use std::f64::consts::PI;

use vacfield::particle::{integrate_free_vacuum, ParticleState, PotentialSource, Vec3};
use vacfield::quantum::{evolve, Grid1, QuantumModel, Variant, WaveFunction1D};
use vacfield::Units;

use super::{runtime, Outcome};
use crate::report::Check;
use crate::scenario::{PotentialSpec, QuantumSpec};
use crate::table::Table;
use crate::CliError;

const COLUMNS: [&str; 5] = ["tau", "norm", "energy", "mean_x", "variance"];

pub fn model(spec: &QuantumSpec, variant: Variant) -> Result<QuantumModel, CliError> {
    let grid = Grid1::new(spec.n, spec.length, spec.origin.unwrap_or(-0.5 * spec.length)).map_err(runtime)?;
    let xs = grid.points();
    let w = match spec.potential {
        PotentialSpec::Uniform { w } => vec![w; spec.n],
        PotentialSpec::Ramp { w0, grad } => xs.iter().map(|x| w0 + grad * x).collect(),
    };
    let a = match &spec.vector_potential {
        Some(a) => {
            let k = 2.0 * PI * f64::from(a.mode) / spec.length;
            xs.iter().map(|x| a.offset + a.amplitude * (k * x).sin()).collect()
        }
        None => vec![0.0; spec.n],
    };
    let units = Units::new(1.0, spec.hbar).map_err(runtime)?;
    QuantumModel::new(variant, grid, spec.mass, w, a, spec.xi, units).map_err(runtime)
}

pub fn run(spec: &QuantumSpec) -> Result<Outcome, CliError> {
    let m = model(spec, spec.variant)?;
    let p = &spec.packet;
    let psi0 = WaveFunction1D::gaussian(m.grid, p.x0, p.sigma, p.k0).map_err(runtime)?;
    let (last, rows) = evolve(&m, &psi0, spec.dtau, spec.steps, spec.sample_every).map_err(runtime)?;

    let mut table = Table::new(COLUMNS);
    for r in &rows {
        table.push(vec![r.tau, r.norm, r.energy, r.mean_x, r.variance]);
    }
    let (n0, e0) = (rows[0].norm, rows[0].energy);
    let norm = rows.iter().map(|r| ((r.norm - n0) / n0).abs()).fold(0.0, f64::max);
    let energy = rows.iter().map(|r| ((r.energy - e0) / e0).abs()).fold(0.0, f64::max);
    let mut checks = vec![
        Check::at_most("norm", norm, 1e-10, format!("relative, over {} steps", spec.steps)),
        Check::at_most("energy", energy, 1e-8, format!("⟨H⟩(0) = {e0}")),
    ];

    if m.vector_potential.iter().all(|a| *a == 0.0) {
        let mut worst = 0.0_f64;
        for v in [Variant::Free, Variant::Minimal, Variant::Modified] {
            if v == spec.variant {
                continue;
            }
            let (other, _) = evolve(&model(spec, v)?, &psi0, spec.dtau, spec.steps, spec.steps).map_err(runtime)?;
            let d = last.psi.iter().zip(&other.psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            worst = worst.max(d);
        }
        checks.push(Check::at_most("variant_coincidence", worst, 1e-12, "max pointwise gap to the other two variants"));
    } else {
        checks.push(Check::skipped("variant_coincidence", "A is not identically zero"));
    }

    match spec.potential {
        PotentialSpec::Ramp { w0, grad } if spec.variant == Variant::Free && p.k0 == 0.0 => {
            // classical path from the packet centre, at rest, in lab time
            let source = PotentialSource::ramp(w0, Vec3::new(grad, 0.0, 0.0));
            let start = ParticleState::new(Vec3::new(p.x0, 0.0, 0.0), Vec3::zeros());
            let horizon = spec.dtau * spec.steps as f64;
            let dt = (horizon / 4000.0).min(1e-3);
            // lab time runs ahead of proper time, so overshoot a little
            let steps = (1.5 * horizon / dt).ceil() as usize + 1;
            let path = integrate_free_vacuum(&start, &source, 1.0, dt, steps).map_err(runtime)?;
            let mut worst = 0.0_f64;
            for r in &rows[1..] {
                let Some(k) = path.iter().position(|s| s.tau >= r.tau) else {
                    return Err(CliError::Runtime("quantum: classical path too short".into()));
                };
                let (a, b) = (&path[k.max(1) - 1], &path[k.max(1)]);
                let x = a.r.x + (b.r.x - a.r.x) * (r.tau - a.tau) / (b.tau - a.tau);
                let shift = x - p.x0;
                if shift != 0.0 {
                    worst = worst.max((r.mean_x - x).abs() / shift.abs());
                }
            }
            checks.push(Check::at_most("ehrenfest", worst, 0.02, "packet centre against classical displacement"));
        }
        _ => checks.push(Check::skipped("ehrenfest", "needs the free variant in a ramp, packet at rest")),
    }
    Ok(Outcome { table, checks, extra: Vec::new(), phases: Vec::new() })
}
