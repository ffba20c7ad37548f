use vacfield::particle::Vec3;
use vacfield::radiation::{ChargeDistribution, DistanceMoments, Quadrature, SelfForceSeries, SinusoidalVelocity};

use super::{runtime, Outcome};
use crate::report::Check;
use crate::scenario::{QuadratureSpec, RadiationSpec};
use crate::table::Table;
use crate::CliError;

const COLUMNS: [&str; 10] = ["t", "fx", "fy", "fz", "mass_x", "mass_y", "mass_z", "rad_x", "rad_y", "rad_z"];

fn quadrature(q: QuadratureSpec, seed: u64) -> Quadrature {
    match q {
        QuadratureSpec::MonteCarlo { pairs, partitions } => Quadrature::MonteCarlo { pairs, seed, partitions },
        QuadratureSpec::Gauss { order } => Quadrature::Gauss { order },
    }
}

fn trajectory(spec: &RadiationSpec) -> SinusoidalVelocity {
    let tr = &spec.trajectory;
    SinusoidalVelocity { drift: tr.drift.into(), amplitude: tr.amplitude.into(), omega: tr.omega, phase: tr.phase }
}

fn times(spec: &RadiationSpec) -> Vec<f64> {
    let n = spec.samples;
    if n == 1 {
        return vec![spec.t0];
    }
    (0..n).map(|i| spec.t0 + (spec.t1 - spec.t0) * i as f64 / (n - 1) as f64).collect()
}

fn forces(
    moments: &DistanceMoments,
    spec: &RadiationSpec,
    traj: &SinusoidalVelocity,
) -> Result<Vec<vacfield::radiation::SelfForce>, CliError> {
    let series = SelfForceSeries::new(moments, spec.order, spec.c).map_err(runtime)?;
    times(spec).into_iter().map(|t| series.evaluate(traj, t).map_err(runtime)).collect()
}

fn rel(a: Vec3, b: Vec3) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / b.norm().max(f64::MIN_POSITIVE)
    }
}

pub fn run(spec: &RadiationSpec, seed: u64) -> Result<Outcome, CliError> {
    let quad = quadrature(spec.quadrature, seed);
    let dist = ChargeDistribution::new(spec.shape, spec.radius, spec.xi, quad).map_err(runtime)?;
    let max_m = spec.order.max(2);
    let moments = dist.moments(max_m).map_err(runtime)?;
    let traj = trajectory(spec);
    let out = forces(&moments, spec, &traj)?;
    let ts = times(spec);

    let mut table = Table::new(COLUMNS);
    for (t, f) in ts.iter().zip(&out) {
        let mass = f.em_mass_term();
        let rad = f.radiation_term().unwrap_or_else(Vec3::zeros);
        table.push(vec![*t, f.total[0], f.total[1], f.total[2], mass.x, mass.y, mass.z, rad.x, rad.y, rad.z]);
    }

    let mut checks = Vec::new();
    let (c, xi) = (spec.c, spec.xi);
    let i: Vec<f64> = moments.values.iter().map(|e| e.value).collect();
    if spec.order >= 1 {
        use vacfield::radiation::RigidTrajectory;
        let e_es = moments.self_energy();
        let mut worst = 0.0_f64;
        for (t, f) in ts.iter().zip(&out) {
            let du = traj.velocity_derivative(*t, 1).unwrap();
            let ddu = traj.velocity_derivative(*t, 2).unwrap();
            worst = worst.max(rel(f.em_mass_term(), -du * (4.0 * e_es / (3.0 * c * c))));
            worst = worst.max(rel(f.radiation_term().unwrap(), ddu * (2.0 * xi * xi / (3.0 * c.powi(3)))));
        }
        let mut detail = format!("I0 = {}, I1 = {}, I2 = {}", i[0], i[1], i[2]);
        let mut tail_bad = false;
        if spec.order >= 2 {
            // the remainder beyond the two resummed terms, exactly integrated
            let tail = |a: f64| -> Result<f64, CliError> {
                let g = ChargeDistribution::new(spec.shape, a, xi, Quadrature::Gauss { order: 16 }).map_err(runtime)?;
                let m = g.moments(spec.order).map_err(runtime)?;
                let f = SelfForceSeries::new(&m, spec.order, c)
                    .map_err(runtime)?
                    .evaluate(&traj, ts[0])
                    .map_err(runtime)?;
                Ok(f.terms[2..].iter().map(|t| Vec3::from(t.force)).sum::<Vec3>().norm())
            };
            let (t1, t2) = (tail(spec.radius)?, tail(0.5 * spec.radius)?);
            if t1 > 0.0 {
                let r = t1 / t2;
                tail_bad = (r - 2.0).abs() > 0.1;
                detail.push_str(&format!("; remainder {t1} → {t2} under a/2, ratio {r} (need 2 ± 5%)"));
            }
        }
        checks.push(
            Check::at_most("series_consistency", worst, 1e-12, detail)
                .fail_if(tail_bad, "remainder does not scale as a"),
        );
    } else {
        checks.push(Check::skipped("series_consistency", "needs order ≥ 1"));
    }

    let mut still = spec.clone();
    still.trajectory.amplitude = [0.0; 3];
    let null =
        forces(&moments, &still, &trajectory(&still))?.iter().map(|f| Vec3::from(f.total).norm()).fold(0.0, f64::max);
    checks.push(Check::at_most("uniform_null", null, 0.0, "constant drift velocity, all terms"));

    let double = ChargeDistribution::new(spec.shape, spec.radius, 2.0 * xi, quad).map_err(runtime)?;
    let scaled = forces(&double.moments(max_m).map_err(runtime)?, spec, &traj)?;
    let mut worst = 0.0_f64;
    for (a, b) in out.iter().zip(&scaled) {
        for (ta, tb) in a.terms.iter().zip(&b.terms) {
            worst = worst.max(rel(Vec3::from(tb.force), Vec3::from(ta.force) * 4.0));
        }
    }
    checks.push(Check::at_most("charge_square_scaling", worst, 1e-12, "every term at 2ξ against 4× the term at ξ"));

    match spec.quadrature {
        QuadratureSpec::MonteCarlo { pairs, partitions } => {
            let again = dist.moments(max_m).map_err(runtime)?;
            let mut small = ChargeDistribution::new(
                spec.shape,
                spec.radius,
                xi,
                Quadrature::MonteCarlo { pairs: pairs / 16, seed, partitions },
            )
            .map_err(runtime)?;
            small.tolerance = f64::MAX;
            let coarse = small.moments(2).map_err(runtime)?;
            let r = coarse.values[2].error / moments.values[2].error;
            checks.push(
                Check::at_most(
                    "monte_carlo_rate",
                    (r / 4.0 - 1.0).abs(),
                    0.2,
                    format!("standard error of I2 at N/16 over N: {r} (need 4 ± 20%)"),
                )
                .fail_if(again != moments, "same seed gave different moments"),
            );
        }
        QuadratureSpec::Gauss { .. } => checks.push(Check::skipped("monte_carlo_rate", "deterministic quadrature")),
    }

    Ok(Outcome { table, checks, extra: Vec::new(), phases: Vec::new() })
}
