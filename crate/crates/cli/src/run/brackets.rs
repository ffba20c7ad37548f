use std::sync::Arc;

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vacfield::particle::Vec3;
use vacfield::reduction::{
    bracket, jacobi_residual, minimal_shift, pure_gauge_su2, shifted_canonicality_residual, yang_mills_residual,
    AbelianGaugeField, Canonical, ExtendedStructure, MagneticStructure, NonAbelianGaugeField, Observable,
    PoissonStructure, ShiftedMagnetic, StructureConstants,
};

use super::{runtime, Outcome};
use crate::report::Check;
use crate::scenario::BracketsSpec;
use crate::table::Table;
use crate::CliError;

const COLUMNS: [&str; 9] = ["point", "q1", "q2", "q3", "jacobi", "xi_div_b", "leibniz", "shift", "ym_pure"];

/// Smooth potential with analytic Jacobian `(i, j) = ∂_i A_j`.
fn wavy_potential(q: &Vec3) -> Vec3 {
    Vec3::new((q.y * q.z).sin(), q.x.cos() + q.z * q.z, q.x * q.y * q.z)
}

fn wavy_jacobian(q: &Vec3) -> Matrix3<f64> {
    let c = (q.y * q.z).cos();
    Matrix3::new(0.0, -q.x.sin(), q.y * q.z, q.z * c, 0.0, q.x * q.z, q.y * c, 2.0 * q.z, q.x * q.y)
}

fn wavy(xi: f64) -> AbelianGaugeField {
    AbelianGaugeField::with_jacobian(xi, wavy_potential, wavy_jacobian)
}

fn point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.5..1.5)).collect()
}

fn q3(z: &[f64]) -> Vec3 {
    Vec3::new(z[0], z[1], z[2])
}

/// Random quadratic observable in `n` coordinates, with its gradient left
/// analytic or to differences.
fn quadratic(rng: &mut ChaCha8Rng, n: usize, analytic: bool) -> Observable {
    let lin: Arc<Vec<f64>> = Arc::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
    let quad: Arc<Vec<f64>> = Arc::new((0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect());
    let (l, q) = (lin.clone(), quad.clone());
    let value = move |z: &[f64]| {
        let mut v: f64 = l.iter().zip(z).map(|(a, x)| a * x).sum();
        for i in 0..n {
            for j in 0..n {
                v += q[i * n + j] * z[i] * z[j];
            }
        }
        v
    };
    if !analytic {
        return Observable::new(value);
    }
    Observable::with_gradient(value, move |z| {
        let mut g = lin.to_vec();
        for i in 0..n {
            for j in 0..n {
                g[i] += quad[i * n + j] * z[j];
                g[j] += quad[i * n + j] * z[i];
            }
        }
        g
    })
}

/// su(2) potential with random quadratic components.
fn random_su2(rng: &mut ChaCha8Rng) -> NonAbelianGaugeField {
    let mut r = || rng.random_range(-1.0..1.0);
    // coefficients[s][j] = (constant, linear[k], symmetric quadratic[k][l])
    let mut coef = Vec::new();
    for _ in 0..3 {
        let mut comps = Vec::new();
        for _ in 0..3 {
            let b = r();
            let lin = Vec3::new(r(), r(), r());
            let mut quad = Matrix3::zeros();
            for k in 0..3 {
                for l in k..3 {
                    let v = 0.5 * r();
                    quad[(k, l)] = v;
                    quad[(l, k)] = v;
                }
            }
            comps.push((b, lin, quad));
        }
        coef.push(comps);
    }
    let coef = Arc::new(coef);
    let c2 = coef.clone();
    NonAbelianGaugeField::with_jacobian(
        StructureConstants::su2(),
        move |x| {
            coef.iter()
                .map(|comps| Vec3::from_fn(|j, _| comps[j].0 + comps[j].1.dot(x) + x.dot(&(comps[j].2 * x))))
                .collect()
        },
        move |x| c2.iter().map(|comps| Matrix3::from_fn(|i, j| comps[j].1[i] + 2.0 * (comps[j].2 * x)[i])).collect(),
    )
}

fn pure_gauge(amp: f64) -> NonAbelianGaugeField {
    pure_gauge_su2(
        move |q| Vec3::new(amp * q.y.sin(), amp * q.x * q.z, amp * (q.x + q.z).cos()),
        move |q| {
            let s = (q.x + q.z).sin();
            // (i, k) = ∂θ_k/∂q^i
            Matrix3::new(0.0, amp * q.z, -amp * s, amp * q.y.cos(), 0.0, 0.0, 0.0, amp * q.x, -amp * s)
        },
    )
}

pub fn run(spec: &BracketsSpec, seed: u64) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi = spec.xi;
    let lambda = spec.monopole;
    let field = move |q: &Vec3| {
        let j = wavy_jacobian(q);
        Vec3::new(j[(1, 2)] - j[(2, 1)], j[(2, 0)] - j[(0, 2)], j[(0, 1)] - j[(1, 0)])
            + Vec3::new(lambda * q.x, 0.0, 0.0)
    };
    let magnetic = MagneticStructure::from_field(xi, field);
    let gauge = wavy(xi);
    let shifted = ShiftedMagnetic { gauge: gauge.clone() };
    let random = random_su2(&mut rng);
    let extended = ExtendedStructure { gauge: random.clone() };
    let pure = pure_gauge(spec.gauge_amplitude);
    let canonical = Canonical { n: 3 };
    let momentum = |i: usize| Observable::coordinate(3 + i);
    let target = canonical.matrix(&[0.0; 6]);

    let mut table = Table::new(COLUMNS);
    let (mut jac_worst, mut leib_worst, mut shift_worst) = (0.0_f64, 0.0_f64, 0.0_f64);
    let (mut ym_pure, mut canon_pure) = (0.0_f64, 0.0_f64);
    let (mut ym_random, mut canon_random) = (0.0_f64, 0.0_f64);
    let structures: [&dyn PoissonStructure; 3] = [&canonical, &magnetic, &extended];
    for k in 0..spec.points {
        let z = point(&mut rng, 6);
        let q = q3(&z);
        let j = jacobi_residual(&magnetic, &momentum(0), &momentum(1), &momentum(2), &z).map_err(runtime)?;
        let expected = xi * lambda;
        jac_worst = jac_worst.max((j - expected).abs());

        let mut leib = 0.0_f64;
        for s in structures {
            let n = s.dim();
            let (f, g, h) = (quadratic(&mut rng, n, true), quadratic(&mut rng, n, false), quadratic(&mut rng, n, true));
            let zz = point(&mut rng, n);
            let fg = bracket(s, &f, &g, &zz).map_err(runtime)?;
            let gf = bracket(s, &g, &f, &zz).map_err(runtime)?;
            let lhs = bracket(s, &f, &g.product(&h), &zz).map_err(runtime)?;
            let rhs = g.value(&zz) * bracket(s, &f, &h, &zz).map_err(runtime)? + fg * h.value(&zz);
            leib = leib.max((fg + gf).abs()).max((lhs - rhs).abs() / (1.0 + lhs.abs()));
        }
        leib_worst = leib_worst.max(leib);

        let zt = minimal_shift(&gauge, &z).map_err(runtime)?;
        let shift = (shifted.matrix(&zt) - &target).amax();
        shift_worst = shift_worst.max(shift);

        let ym = yang_mills_residual(&pure, &q).map_err(runtime)?.max_abs();
        ym_pure = ym_pure.max(ym);
        if k < 20 {
            // y = 0 is the invariant element of su(2)
            let mut ze = point(&mut rng, 12);
            ze[9..].fill(0.0);
            canon_pure = canon_pure.max(shifted_canonicality_residual(&pure, &ze).map_err(runtime)?.max);
            let zr = point(&mut rng, 12);
            ym_random += yang_mills_residual(&random, &q3(&zr)).map_err(runtime)?.mean_abs();
            canon_random += shifted_canonicality_residual(&random, &zr).map_err(runtime)?.max;
        }
        table.push(vec![k as f64, q.x, q.y, q.z, j, expected, leib, shift, ym]);
    }
    let family = spec.points.min(20) as f64;
    let (ym_random, canon_random) = (ym_random / family, canon_random / family);

    let checks = vec![
        Check::at_most("antisymmetry_leibniz", leib_worst, 1e-8, "canonical, magnetic and extended su(2) structures"),
        Check::at_most(
            "magnetic_jacobi",
            jac_worst,
            1e-6,
            format!("Jacobi sum of (p1, p2, p3) against ξ·∇·B = {}", xi * lambda),
        ),
        Check::at_most("abelian_minimal_shift", shift_worst, 1e-10, "shifted magnetic brackets against canonical"),
        Check::at_most(
            "nonabelian_covanishing",
            ym_pure,
            1e-6,
            format!(
                "pure gauge: Yang–Mills {ym_pure:e}, canonicality {canon_pure:e}; \
                 random: mean Yang–Mills {ym_random:.3}, canonicality {canon_random:.3}"
            ),
        )
        .fail_if(canon_pure > 1e-10, "pure-gauge canonicality above 1e-10")
        .fail_if(!(ym_random >= 1e-2 && canon_random >= 1e-2), "random family does not violate both"),
    ];
    Ok(Outcome { table, checks, extra: Vec::new(), phases: Vec::new() })
}
