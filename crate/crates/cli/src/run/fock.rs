use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use vacfield::fock::{
    coherent_embed, evolve_series, extract, ladder_matrices, liouvillian_build, FockBasis, PolynomialSystem,
    SparseMatrix,
};

use super::{runtime, Outcome};
use crate::report::Check;
use crate::scenario::{FockSpec, SystemSpec};
use crate::table::Table;
use crate::CliError;

/// Extra slack on the monotone check once both errors sit at round-off.
const FLOOR: f64 = 1e-13;

fn c(z: [f64; 2]) -> Complex64 {
    Complex64::new(z[0], z[1])
}

pub fn system(spec: &FockSpec) -> Result<PolynomialSystem, CliError> {
    match &spec.system {
        SystemSpec::Logistic => Ok(PolynomialSystem::logistic()),
        SystemSpec::Linear { lambda } => {
            Ok(PolynomialSystem::linear(&lambda.iter().map(|l| c(*l)).collect::<Vec<_>>()))
        }
        SystemSpec::Polynomial { s, rhs } => PolynomialSystem::new(*s, rhs.clone()).map_err(runtime),
    }
}

struct Run {
    extracted: Vec<Vec<Complex64>>,
    vacuum: Vec<Complex64>,
}

fn truncated(spec: &FockSpec, sys: &PolynomialSystem, n: u32) -> Result<Run, CliError> {
    let basis = FockBasis::new(sys.s, n).map_err(runtime)?;
    let k = liouvillian_build(sys, &basis).map_err(runtime)?;
    let u0: Vec<Complex64> = spec.u0.iter().map(|z| c(*z)).collect();
    let s0 = coherent_embed(&u0, &basis).map_err(runtime)?;
    let states = evolve_series(&s0, &k, spec.t, spec.samples, spec.scheme).map_err(runtime)?;
    let extracted = states.iter().map(extract).collect::<Result<Vec<_>, _>>().map_err(runtime)?;
    Ok(Run { extracted, vacuum: states.iter().map(|s| s.vacuum_amplitude()).collect() })
}

fn max_error(run: &Run, oracle: &[Vec<Complex64>]) -> f64 {
    run.extracted.iter().zip(oracle).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm())).fold(0.0, f64::max)
}

fn commutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a * b - b * a
}

/// Largest entry of `m - expected` among rows and columns with total
/// occupation at most `below`.
fn sub_deviation(basis: &FockBasis, m: &DMatrix<Complex64>, expected: &DMatrix<Complex64>, below: u32) -> f64 {
    let keep: Vec<usize> = (0..basis.len()).filter(|&i| basis.total(i) <= below).collect();
    let mut worst = 0.0_f64;
    for &i in &keep {
        for &j in &keep {
            worst = worst.max((m[(i, j)] - expected[(i, j)]).norm());
        }
    }
    worst
}

type Ladder = (DMatrix<Complex64>, DMatrix<Complex64>);

fn ladders(basis: &Arc<FockBasis>) -> Result<Vec<Ladder>, CliError> {
    (0..basis.modes())
        .map(|j| {
            let (a, ad): (SparseMatrix, SparseMatrix) = ladder_matrices(basis, j).map_err(runtime)?;
            Ok((a.to_dense(), ad.to_dense()))
        })
        .collect()
}

pub fn run(spec: &FockSpec) -> Result<Outcome, CliError> {
    let sys = system(spec)?;
    let s = sys.s;
    let n = spec.n_max;
    let main = truncated(spec, &sys, n)?;

    let dt = spec.t / spec.samples as f64;
    let mut oracle = vec![spec.u0.iter().map(|z| c(*z)).collect::<Vec<_>>()];
    for k in 0..spec.samples {
        let next = sys.integrate(&oracle[k], dt, spec.oracle_steps);
        oracle.push(next);
    }

    let mut cols = vec!["t".to_string()];
    for j in 0..s {
        cols.extend([format!("u{j}_re"), format!("u{j}_im"), format!("oracle{j}_re"), format!("oracle{j}_im")]);
    }
    cols.extend(["vacuum_re".to_string(), "vacuum_im".to_string()]);
    let mut table = Table::new(cols);
    for k in 0..=spec.samples {
        let mut row = vec![k as f64 * dt];
        for j in 0..s {
            let (u, o) = (main.extracted[k][j], oracle[k][j]);
            row.extend([u.re, u.im, o.re, o.im]);
        }
        row.extend([main.vacuum[k].re, main.vacuum[k].im]);
        table.push(row);
    }

    let one = Complex64::new(1.0, 0.0);
    let vac = main.vacuum.iter().map(|v| (v - one).norm()).fold(0.0, f64::max);
    let mut checks = vec![Check::at_most("vacuum_amplitude", vac, f64::EPSILON, "max |⟨Ω|ψ(t)⟩ - 1|")];

    let err = max_error(&main, &oracle);
    let prev = max_error(&truncated(spec, &sys, n - 1)?, &oracle);
    checks.push(
        Check::at_most(
            "truncation_convergence",
            err,
            1e-4,
            format!("max |u - oracle| at N = {n}: {err:e}, at N = {}: {prev:e}", n - 1),
        )
        .fail_if(err > prev + FLOOR, "error grew with N"),
    );

    // the algebra checks on a small basis
    let small = FockBasis::new(s, n.min(if s > 2 { 4 } else { 8 })).map_err(runtime)?;
    let lad = ladders(&small)?;
    let dim = small.len();
    let zero = DMatrix::<Complex64>::zeros(dim, dim);
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let top = small.max_occupation();
    let (mut aa, mut aad) = (0.0_f64, 0.0_f64);
    let (mut rr, mut ra) = (0.0_f64, 0.0_f64);
    let rho: Vec<DMatrix<Complex64>> = lad.iter().map(|(a, ad)| ad * a).collect();
    for j in 0..s {
        for k in 0..s {
            aa = aa.max(commutator(&lad[j].0, &lad[k].0).camax());
            let delta = if j == k { &id } else { &zero };
            aad = aad.max(sub_deviation(&small, &commutator(&lad[j].0, &lad[k].1), delta, top - 1));
            rr = rr.max(sub_deviation(&small, &commutator(&rho[j], &rho[k]), &zero, top));
            let expect = if j == k { -&lad[k].0 } else { zero.clone() };
            ra = ra.max(sub_deviation(&small, &commutator(&rho[j], &lad[k].0), &expect, top));
        }
    }
    checks.push(Check::at_most(
        "ladder_commutators",
        aa.max(aad),
        1e-14,
        format!("[a_j, a_k] {aa:e}, [a_j, a_k⁺] - δ {aad:e} below N = {top}"),
    ));
    checks.push(Check::at_most(
        "current_algebra",
        rr.max(ra),
        1e-14,
        format!("[ρ_j, ρ_k] {rr:e}, [ρ_j, a_k] + δ a_k {ra:e}"),
    ));
    Ok(Outcome { table, checks, extra: Vec::new(), phases: Vec::new() })
}
