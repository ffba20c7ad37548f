use std::f64::consts::PI;

use proptest::prelude::*;
use vacfield::fields::{
    derive_eb, field_hamiltonian, field_rhs, max_stable_dt, maxwell_diagnostics, solve_poisson, step,
    CanonicalFieldState, FieldEvolver, Scheme, SourceModel,
};
use vacfield::grid::{curl, divergence, gradient, inner_vector, laplacian};
use vacfield::{FieldError, Grid3, ScalarField, VectorField};

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn plane_wave(n: usize, a0: f64, t: f64) -> CanonicalFieldState {
    let grid = Grid3::boxed([n, 4, 4], [2.0 * PI, 1.0, 1.0]).unwrap();
    let (k, w) = (1.0, 1.0);
    let a = VectorField::from_fn(&grid, |p| [0.0, a0 * (k * p[0] - w * t).cos(), 0.0]);
    let y = VectorField::from_fn(&grid, |p| [0.0, a0 * w * (k * p[0] - w * t).sin(), 0.0]);
    CanonicalFieldState::new(a, y, ScalarField::zeros(&grid), ScalarField::zeros(&grid), t).unwrap()
}

fn l2_error(s: &CanonicalFieldState, exact: &CanonicalFieldState) -> f64 {
    let mut d = 0.0;
    for c in 0..3 {
        for (x, y) in s.a.component(c).iter().zip(exact.a.component(c)) {
            d += (x - y).powi(2);
        }
    }
    (d * s.grid().cell_volume()).sqrt()
}

fn charged_state(n: usize) -> (CanonicalFieldState, ScalarField) {
    let grid = Grid3::cube(n, 2.0 * PI).unwrap();
    let rho = ScalarField::from_fn(&grid, |p| 0.3 * p[0].cos() + 0.2 * (p[1] + p[2]).sin());
    let a = VectorField::from_fn(&grid, |p| [0.1 * p[2].sin(), 0.2 * p[0].cos(), 0.05 * (p[0] + p[1]).sin()]);
    (CanonicalFieldState::admissible(&rho, a, 0.0).unwrap(), rho)
}

#[test]
fn zero_state_has_zero_energy() {
    let grid = Grid3::cube(8, 1.0).unwrap();
    let s = CanonicalFieldState::zeros(&grid).unwrap();
    assert_eq!(field_hamiltonian(&s, &SourceModel::vacuum()).unwrap(), 0.0);
    let (e, b) = derive_eb(&s).unwrap();
    assert_eq!(e.max_abs(), 0.0);
    assert_eq!(b.max_abs(), 0.0);
}

#[test]
fn single_mode_y_energy_is_half_norm() {
    let grid = Grid3::cube(8, 2.0 * PI).unwrap();
    let mut s = CanonicalFieldState::zeros(&grid).unwrap();
    s.y = VectorField::from_fn(&grid, |p| [0.0, 0.0, p[0].sin()]);
    let h = field_hamiltonian(&s, &SourceModel::vacuum()).unwrap();
    let expect = 0.5 * inner_vector(&s.y, &s.y).unwrap();
    assert!((h - expect).abs() < 1e-13 * expect);
}

#[test]
fn static_admissible_data_is_stationary() {
    let (s, rho) = charged_state(12);
    let mut st = s.clone();
    st.a = VectorField::zeros(s.grid());
    st.chi = ScalarField::zeros(s.grid());
    let src = SourceModel::stationary(rho, VectorField::zeros(s.grid())).unwrap();
    let r = field_rhs(&st, &src).unwrap();
    let m = [r.a.max_abs(), r.y.max_abs(), max_abs(r.w.values()), max_abs(r.chi.values())];
    for x in m {
        assert!(x < 1e-13, "{m:?}");
    }
    // E = -∇W and B = 0
    let (e, b) = derive_eb(&st).unwrap();
    let g = gradient(&st.w).unwrap();
    for c in 0..3 {
        for (x, y) in e.component(c).iter().zip(g.component(c)) {
            assert_eq!(*x, -*y);
        }
    }
    assert_eq!(b.max_abs(), 0.0);
}

#[test]
fn poisson_matches_spectral_oracle() {
    // for ρ = cos(x) the centered operator gives W = cos(x) h² / sin²(h)
    let n = 16;
    let grid = Grid3::cube(n, 2.0 * PI).unwrap();
    let h = grid.h()[0];
    let rho = ScalarField::from_fn(&grid, |p| p[0].cos());
    let w = solve_poisson(&rho).unwrap();
    let f = h * h / h.sin().powi(2);
    for (i, v) in w.values().iter().enumerate() {
        let x = grid.node_position(i)[0];
        assert!((v - f * x.cos()).abs() < 1e-13);
    }
}

#[test]
fn poisson_rejects_net_charge_and_nyquist() {
    let grid = Grid3::cube(8, 1.0).unwrap();
    let rho = ScalarField::constant(&grid, 1.0);
    assert!(matches!(solve_poisson(&rho), Err(FieldError::NetCharge { .. })));
    let rho =
        ScalarField::new(grid.clone(), (0..grid.len()).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()).unwrap();
    assert!(matches!(solve_poisson(&rho), Err(FieldError::UnresolvedCharge { .. })));
}

#[test]
fn plane_wave_rhs_second_order() {
    let err = |n: usize| {
        let s = plane_wave(n, 1.0, 0.0);
        let r = field_rhs(&s, &SourceModel::vacuum()).unwrap();
        // exact: ∂A/∂t = Y, ∂Y/∂t = -ω² A
        let mut e: f64 = 0.0;
        for i in 0..s.grid().len() {
            e = e.max((r.a.component(1)[i] - s.y.component(1)[i]).abs());
            e = e.max((r.y.component(1)[i] + s.a.component(1)[i]).abs());
        }
        e
    };
    let (e1, e2) = (err(16), err(32));
    assert!(e1 > 1e-3);
    assert!((e1 / e2 - 4.0).abs() < 0.1, "{e1} {e2}");
}

#[test]
fn plane_wave_e_equals_b() {
    let err = |n: usize| {
        let s = plane_wave(n, 1.0, 0.3);
        let (e, b) = derive_eb(&s).unwrap();
        (0..s.grid().len())
            .map(|i| {
                let ne = e.at(i).iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb = b.at(i).iter().map(|x| x * x).sum::<f64>().sqrt();
                (ne - nb).abs()
            })
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(16), err(32));
    assert!(e1 < 0.05 && e1 / e2 > 3.5, "{e1} {e2}");
}

#[test]
fn dt_zero_is_identity_and_cfl_is_enforced() {
    let (s, rho) = charged_state(8);
    let src = SourceModel::stationary(rho, VectorField::zeros(s.grid())).unwrap();
    assert_eq!(step(&s, &src, 0.0, Scheme::Rk4).unwrap(), s);
    let max = max_stable_dt(s.grid());
    match step(&s, &src, 1.01 * max, Scheme::Verlet) {
        Err(FieldError::Cfl { max_dt, .. }) => assert_eq!(max_dt, max),
        other => panic!("{other:?}"),
    }
    assert!(step(&s, &src, f64::NAN, Scheme::Rk4).is_err());
}

#[test]
fn plane_wave_converges_at_second_order() {
    let err = |n: usize| {
        let s = plane_wave(n, 1.0, 0.0);
        let h = s.grid().h()[0];
        let t = 2.0 * PI;
        let steps = (t / (h / 4.0)).round() as usize;
        let mut ev = FieldEvolver::new(&s, SourceModel::vacuum(), t / steps as f64, Scheme::Rk4).unwrap();
        ev.advance(steps);
        l2_error(&ev.state(), &plane_wave(n, 1.0, t))
    };
    let (e16, e32, e64) = (err(16), err(32), err(64));
    for r in [e16 / e32, e32 / e64] {
        assert!((r - 4.0).abs() < 0.4, "{e16} {e32} {e64}");
    }
}

#[test]
fn plane_wave_energy_drift_small() {
    let s = plane_wave(32, 1.0, 0.0);
    let src = SourceModel::vacuum();
    let dt = max_stable_dt(s.grid()) / 4.0;
    let h0 = field_hamiltonian(&s, &src).unwrap();
    let mut ev = FieldEvolver::new(&s, src.clone(), dt, Scheme::Rk4).unwrap();
    ev.advance(1000);
    let h1 = field_hamiltonian(&ev.state(), &src).unwrap();
    assert!(((h1 - h0) / h0).abs() < 1e-8, "{}", (h1 - h0) / h0);
}

#[test]
fn verlet_energy_bounded_and_constraints_kept() {
    let (s, rho) = charged_state(8);
    let src = SourceModel::stationary(rho, VectorField::zeros(s.grid())).unwrap();
    let dt = max_stable_dt(s.grid()) / 2.0;
    let h0 = field_hamiltonian(&s, &src).unwrap();
    let mut ev = FieldEvolver::new(&s, src.clone(), dt, Scheme::Verlet).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        ev.advance(10);
        let h = field_hamiltonian(&ev.state(), &src).unwrap();
        worst = worst.max(((h - h0) / h0).abs());
    }
    assert!(worst < 2e-2, "{worst}");
    let d = maxwell_diagnostics(&ev.state(), &src).unwrap();
    assert!(d.lorenz_residual < 1e-12 && d.gauss_residual < 1e-12, "{d:?}");
}

#[test]
fn pure_gauge_data_keeps_e_zero() {
    let grid = Grid3::cube(8, 2.0 * PI).unwrap();
    let psi = ScalarField::from_fn(&grid, |p| (p[0] + 2.0 * p[1]).sin() + 0.5 * p[2].cos());
    let a = gradient(&psi).unwrap();
    let chi = divergence(&a).unwrap();
    let s = CanonicalFieldState::new(a, VectorField::zeros(&grid), ScalarField::zeros(&grid), chi, 0.0).unwrap();
    let mut ev = FieldEvolver::new(&s, SourceModel::vacuum(), 0.1, Scheme::Rk4).unwrap();
    ev.advance(200);
    let st = ev.state();
    assert!(st.y.max_abs() < 1e-12, "{}", st.y.max_abs());
    assert!(max_abs(st.w.values()) > 1e-2);
}

#[test]
fn constraints_survive_many_steps() {
    let (s, rho) = charged_state(12);
    let j = VectorField::from_fn(s.grid(), |p| [0.0, 0.0, 0.4 * (2.0 * p[1]).cos()]);
    let src = SourceModel::stationary(rho, j).unwrap();
    let mut ev = FieldEvolver::new(&s, src.clone(), max_stable_dt(s.grid()) / 2.0, Scheme::Rk4).unwrap();
    ev.advance(2000);
    let d = maxwell_diagnostics(&ev.state(), &src).unwrap();
    assert!(d.lorenz_residual < 1e-12, "{d:?}");
    assert!(d.gauss_residual < 1e-12, "{d:?}");
    assert!(d.div_b_residual < 1e-13, "{d:?}");
    assert!(d.faraday_residual < 1e-12 && d.ampere_residual < 1e-12, "{d:?}");
}

#[test]
fn corrupted_chi_shows_unit_lorenz_residual() {
    let (mut s, rho) = charged_state(8);
    let src = SourceModel::stationary(rho, VectorField::zeros(s.grid())).unwrap();
    let clean = maxwell_diagnostics(&s, &src).unwrap();
    assert!(clean.lorenz_residual < 1e-14);
    s.chi.values_mut().iter_mut().for_each(|x| *x += 1.0);
    let d = maxwell_diagnostics(&s, &src).unwrap();
    assert!((d.lorenz_residual - 1.0).abs() < 1e-14, "{}", d.lorenz_residual);
}

#[test]
fn harmonic_source_checks_continuity() {
    let grid = Grid3::cube(8, 2.0 * PI).unwrap();
    let omega = 0.7;
    // j = (sin x, 0, 0) has discrete divergence cos(x) sin(h)/h
    let h = grid.h()[0];
    let j1 = VectorField::from_fn(&grid, |p| [p[0].sin(), 0.0, 0.0]);
    let rho1 = ScalarField::from_fn(&grid, |p| p[0].cos() * h.sin() / h / omega);
    let rho0 = ScalarField::zeros(&grid);
    let src = SourceModel::harmonic(rho0.clone(), rho1.clone(), j1.clone(), omega).unwrap();
    for t in [0.0, 0.4, 1.3] {
        assert!(src.continuity_residual(t).unwrap() < 1e-12);
    }
    let bad = ScalarField::from_fn(&grid, |p| p[0].cos() / omega);
    assert!(matches!(SourceModel::harmonic(rho0, bad, j1, omega), Err(FieldError::Continuity { .. })));
    let div_j = VectorField::from_fn(&grid, |p| [p[0].sin(), 0.0, 0.0]);
    assert!(SourceModel::stationary(ScalarField::zeros(&grid), div_j).is_err());
}

#[test]
fn harmonic_source_keeps_gauss_to_quadrature_error() {
    let grid = Grid3::cube(8, 2.0 * PI).unwrap();
    let h = grid.h()[0];
    let omega = 0.7;
    let j1 = VectorField::from_fn(&grid, |p| [0.2 * p[0].sin(), 0.0, 0.0]);
    let rho1 = ScalarField::from_fn(&grid, |p| 0.2 * p[0].cos() * h.sin() / h / omega);
    let rho0 = ScalarField::from_fn(&grid, |p| 0.1 * p[1].sin());
    let src = SourceModel::harmonic(rho0, rho1, j1, omega).unwrap();
    let rho_t0 = src.rho(&grid, 0.0).unwrap();
    let s = CanonicalFieldState::admissible(&rho_t0, VectorField::zeros(&grid), 0.0).unwrap();
    let dt = max_stable_dt(&grid) / 4.0;
    let mut ev = FieldEvolver::new(&s, src.clone(), dt, Scheme::Rk4).unwrap();
    ev.advance(400);
    let d = maxwell_diagnostics(&ev.state(), &src).unwrap();
    // RK4 integrates j(t) with Simpson weights, so G drifts at O(dt⁴)
    assert!(d.gauss_residual < 1e-6, "{d:?}");
    assert!(d.lorenz_residual < 1e-12, "{d:?}");
}

#[test]
fn wave_residual_is_static_stencil_gap() {
    // static W: the residual is exactly (div∘grad - Δ)W
    let (s, rho) = charged_state(8);
    let lap = laplacian(&s.w).unwrap();
    let dg = divergence(&gradient(&s.w).unwrap()).unwrap();
    let gap: Vec<f64> = dg.values().iter().zip(lap.values()).map(|(a, b)| a - b).collect();
    assert!(max_abs(&gap) > 1e-3);
    let mut st = s.clone();
    st.a = VectorField::zeros(s.grid());
    st.chi = ScalarField::zeros(s.grid());
    let src = SourceModel::stationary(rho, VectorField::zeros(s.grid())).unwrap();
    let at = |t: f64| CanonicalFieldState { time: t, ..st.clone() };
    let r = vacfield::fields::wave_residuals(&at(-0.1), &at(0.0), &at(0.1), &src).unwrap();
    assert!((r.scalar - max_abs(&gap)).abs() < 1e-12, "{r:?}");
    assert!(r.vector == 0.0);
}

#[test]
fn curl_of_b_matches_generic_operator() {
    // the fused kernel must agree with the generic stencil operators
    let (s, _) = charged_state(8);
    let r = field_rhs(&s, &SourceModel::vacuum()).unwrap();
    let cc = curl(&curl(&s.a).unwrap()).unwrap();
    for c in 0..3 {
        for (x, y) in r.y.component(c).iter().zip(cc.component(c)) {
            assert!((x + y).abs() < 1e-14);
        }
    }
    let ka = {
        let g = gradient(&s.w).unwrap();
        let mut k = s.y.clone();
        for c in 0..3 {
            for (x, y) in k.component_mut(c).iter_mut().zip(g.component(c)) {
                *x -= y;
            }
        }
        k
    };
    let dk = divergence(&ka).unwrap();
    for (x, y) in r.chi.values().iter().zip(dk.values()) {
        assert!((x - y).abs() < 1e-14);
    }
}

fn random_state(n: usize, coef: &[f64]) -> CanonicalFieldState {
    let grid = Grid3::cube(n, 2.0 * PI).unwrap();
    let f = |o: usize| {
        let coef = coef.to_vec();
        ScalarField::from_fn(&grid, move |p| {
            coef[o] * (p[0] + coef[o + 1]).sin() + coef[o + 2] * (p[1] - 2.0 * p[2] + coef[o + 3]).cos()
        })
        .into_values()
    };
    let a = VectorField::new(grid.clone(), [f(0), f(4), f(8)]).unwrap();
    let y = VectorField::new(grid.clone(), [f(12), f(16), f(20)]).unwrap();
    let w = ScalarField::new(grid.clone(), f(24)).unwrap();
    let chi = ScalarField::new(grid.clone(), f(28)).unwrap();
    CanonicalFieldState::new(a, y, w, chi, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constraint_functionals_have_zero_rate(coef in prop::collection::vec(-1.0f64..1.0, 32)) {
        let s = random_state(6, &coef);
        let r = field_rhs(&s, &SourceModel::vacuum()).unwrap();
        let div_a = divergence(&r.a).unwrap();
        let div_y = divergence(&r.y).unwrap();
        for i in 0..s.grid().len() {
            prop_assert!((div_a.values()[i] - r.chi.values()[i]).abs() < 1e-13);
            prop_assert!(div_y.values()[i].abs() < 1e-12);
        }
    }

    #[test]
    fn rk4_step_keeps_constraint_values(coef in prop::collection::vec(-1.0f64..1.0, 32)) {
        let s = random_state(6, &coef);
        let src = SourceModel::vacuum();
        let l0 = s.lorenz_functional().unwrap();
        let g0 = s.gauss_functional(&ScalarField::zeros(s.grid())).unwrap();
        let next = step(&s, &src, max_stable_dt(s.grid()), Scheme::Rk4).unwrap();
        let l1 = next.lorenz_functional().unwrap();
        let g1 = next.gauss_functional(&ScalarField::zeros(s.grid())).unwrap();
        for i in 0..s.grid().len() {
            prop_assert!((l1.values()[i] - l0.values()[i]).abs() < 1e-13);
            prop_assert!((g1.values()[i] - g0.values()[i]).abs() < 1e-12);
        }
    }
}
