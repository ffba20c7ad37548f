use proptest::prelude::*;
use vacfield::particle::*;
use vacfield::{ParticleError, Units};

fn v(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

#[test]
fn classical_mass_and_momentum() {
    let params = ParticleParams::new(1.0, 1.0);
    let st = ParticleState::new(Vec3::zeros(), v(0.6, 0.0, 0.0));
    let p = classical_momentum(&st, &params).unwrap();
    assert!((p - v(0.75, 0.0, 0.0)).norm() < 1e-15);
    assert_eq!(classical_momentum(&ParticleState::new(Vec3::zeros(), Vec3::zeros()), &params).unwrap(), Vec3::zeros());
    assert_eq!(classical_mass(&Vec3::zeros(), 2.0, 1.0).unwrap(), 2.0);
    assert!(close(classical_mass(&v(0.0, 0.6, 0.0), 1.0, 1.0).unwrap(), 1.25, 1e-15));
    assert!(close(classical_mass(&v(0.0, 0.0, 0.8), 1.0, 1.0).unwrap(), 5.0 / 3.0, 1e-15));
    // c is honoured
    assert!(close(classical_mass(&v(1.8, 0.0, 0.0), 1.0, 3.0).unwrap(), 1.25, 1e-15));
    let m = classical_mass(&st.u, 1.0, 1.0).unwrap();
    assert!((p - st.u * m).norm() < 1e-15);
    assert!(matches!(classical_mass(&v(1.0, 0.0, 0.0), 1.0, 1.0), Err(ParticleError::Superluminal { .. })));
}

#[test]
fn field_level_lorentz_force() {
    let f = lorentz_force_from_fields(2.0, &v(0.3, -0.2, 0.5), &v(1.5, 0.0, 0.0), &Vec3::zeros(), 1.0);
    assert_eq!(f, v(3.0, 0.0, 0.0));
    let f = lorentz_force_from_fields(2.0, &v(0.4, 0.0, 0.0), &Vec3::zeros(), &v(0.0, 0.0, 1.5), 1.0);
    assert!((f - v(0.0, -2.0 * 0.4 * 1.5, 0.0)).norm() < 1e-15);
}

fn fd_gradient(f: impl Fn(&Vec3) -> f64, r: &Vec3, h: f64) -> Vec3 {
    let mut g = Vec3::zeros();
    for k in 0..3 {
        let mut e = Vec3::zeros();
        e[k] = h;
        g[k] = (f(&(r + e)) - f(&(r - e))) / (2.0 * h);
    }
    g
}

#[test]
fn static_coulomb_at_rest_feels_minus_grad() {
    let xi = -0.7;
    let src = PotentialSource::static_coulomb(1.3, v(0.1, 0.2, -0.3), xi, -1.0);
    let params = ParticleParams::new(xi, 1.0);
    let st = ParticleState::new(v(1.0, -0.5, 0.4), Vec3::zeros());
    let f = lorentz_force_classical(&st, &src, &params).unwrap();
    let g = fd_gradient(|r| src.sample(0.0, r).unwrap().w_bar, &st.r, 1e-5);
    assert!((f + g).norm() <= 1e-8 * g.norm());
}

#[test]
fn charge_mismatch_is_rejected() {
    let src = PotentialSource::static_coulomb(1.0, Vec3::zeros(), 1.0, -1.0);
    let st = ParticleState::new(v(1.0, 0.0, 0.0), Vec3::zeros());
    let r = lorentz_force_classical(&st, &src, &ParticleParams::new(2.0, 1.0));
    assert!(matches!(r, Err(ParticleError::ChargeMismatch { .. })));
}

#[test]
fn constant_vector_potential_gives_no_correction() {
    let xi = 0.8;
    let src = PotentialSource::static_coulomb(-1.0, Vec3::zeros(), xi, -2.0).with_vector_offset(v(0.3, -0.1, 0.2));
    let params = ParticleParams::new(xi, 1.0);
    let st = ParticleState::new(v(0.7, 0.4, -0.9), v(0.2, 0.5, -0.1));
    let a = lorentz_force_classical(&st, &src, &params).unwrap();
    let b = lorentz_force_modified(&st, &src, &params).unwrap();
    assert_eq!(a, b);
}

#[test]
fn comoving_particle_gives_no_correction() {
    let xi = 1.0;
    let uf = v(0.3, 0.1, 0.0);
    let src = PotentialSource::moving_coulomb(0.5, Vec3::zeros(), uf, xi, 1.0).unwrap();
    let st = ParticleState::new(v(1.0, 1.0, 0.5), uf);
    let fc = force_correction(&st, &src, &ParticleParams::new(xi, 1.0)).unwrap();
    assert_eq!(fc, Vec3::zeros());
}

#[test]
fn moving_source_vector_potential_tracks_scalar() {
    let xi = -0.6;
    let uf = v(0.2, -0.3, 0.1);
    let src = PotentialSource::moving_coulomb(1.4, v(0.2, 0.0, 0.0), uf, xi, 1.0).unwrap();
    let s = src.sample(0.7, &v(1.0, -1.0, 2.0)).unwrap();
    assert!((s.a * xi - uf * s.w_bar).norm() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn correction_matches_finite_difference(
        rx in -2.0f64..2.0, ry in -2.0f64..2.0, rz in -2.0f64..2.0,
        ux in -0.5f64..0.5, uy in -0.5f64..0.5, uz in -0.5f64..0.5,
        fx in -0.5f64..0.5, fy in -0.5f64..0.5, t in 0.0f64..2.0,
        c in 0.8f64..2.0,
    ) {
        let uf = v(fx, fy, 0.1);
        let r0 = v(0.3, -0.2, 0.1);
        let r = v(rx, ry, rz);
        prop_assume!((r - (r0 + uf * t)).norm() > 0.5);
        let xi = 0.9;
        let src = PotentialSource::moving_coulomb(1.1, r0, uf, xi, c).unwrap();
        let mut params = ParticleParams::new(xi, 1.0);
        params.units = Units::new(c, 1.0).unwrap();
        let st = ParticleState { r, u: v(ux, uy, uz), t, tau: 0.0 };
        let diff = lorentz_force_modified(&st, &src, &params).unwrap() - lorentz_force_classical(&st, &src, &params).unwrap();
        let w = st.u - uf;
        let oracle = -fd_gradient(|q| xi * src.sample(t, q).unwrap().a.dot(&w) / c, &r, 1e-5);
        prop_assert!((diff - oracle).norm() <= 1e-6 * oracle.norm().max(1e-12), "{} vs {}", diff, oracle);
    }
}

#[test]
fn suppressed_force_factor() {
    let xi = 1.0;
    let st = ParticleState::new(v(1.0, 0.5, 0.0), Vec3::zeros());
    let params = ParticleParams::new(xi, 1.0);
    let srest = PotentialSource::moving_coulomb(1.0, Vec3::zeros(), Vec3::zeros(), xi, 1.0).unwrap();
    let g = srest.sample(0.0, &st.r).unwrap().grad_w_bar;
    assert_eq!(total_force_suppressed(&st, &srest, &params).unwrap(), -g);
    let sm = PotentialSource::moving_coulomb(1.0, Vec3::zeros(), v(0.0, 0.0, 0.6), xi, 1.0).unwrap();
    let s = sm.sample(0.0, &st.r).unwrap();
    let f = total_force_suppressed(&st, &sm, &params).unwrap();
    assert!((f - (-s.grad_w_bar * 0.64)).norm() < 1e-15);
    assert!(PotentialSource::moving_coulomb(1.0, Vec3::zeros(), v(1.0, 0.0, 0.0), xi, 1.0).is_err());
}

#[test]
fn free_vacuum_rhs_cases() {
    let st = ParticleState::new(v(1.0, 2.0, 0.0), v(0.3, 0.0, 0.1));
    let a = free_vacuum_rhs(&st, &PotentialSource::uniform(-1.2), 1.0).unwrap();
    assert_eq!(a, Vec3::zeros());

    let src = PotentialSource::static_coulomb(0.5, Vec3::zeros(), 1.0, -1.0);
    let st = ParticleState::new(v(1.0, 1.0, 0.0), Vec3::zeros());
    let s = src.sample(0.0, &st.r).unwrap();
    let a = free_vacuum_rhs(&st, &src, 1.0).unwrap();
    assert!((a - s.grad_w_bar / s.w_bar).norm() < 1e-15);

    let moving = PotentialSource::moving_coulomb(1.0, Vec3::zeros(), v(0.1, 0.0, 0.0), 1.0, 1.0).unwrap();
    assert_eq!(free_vacuum_rhs(&st, &moving, 1.0), Err(ParticleError::NonStationary));
    assert!(matches!(
        free_vacuum_rhs(&st, &PotentialSource::uniform(1e-13), 1.0),
        Err(ParticleError::DegenerateMass { .. })
    ));
}

#[test]
fn hamiltonian_values() {
    assert_eq!(hamiltonian_free(&Vec3::zeros(), -1.0).unwrap(), -1.0);
    assert!(close(hamiltonian_free(&v(0.0, 0.0, 3f64.sqrt()), -2.0).unwrap(), -1.0, 1e-15));
    assert_eq!(hamiltonian_free(&Vec3::zeros(), -0.7).unwrap(), -0.7);
    assert!(matches!(hamiltonian_free(&v(1.0, 0.0, 0.0), 0.5), Err(ParticleError::OutsideDomain { .. })));

    let p = v(1.0, 0.0, 0.0);
    let h = hamiltonian_interaction(&p, -2.0, &v(0.1, 0.0, 0.0), 1.0).unwrap();
    let s3 = 3f64.sqrt();
    assert!(close(h, -s3 - 0.1 / s3, 1e-15));
    assert_eq!(hamiltonian_interaction(&p, -2.0, &Vec3::zeros(), 1.0).unwrap(), hamiltonian_free(&p, -2.0).unwrap());
    assert!(hamiltonian_interaction(&v(2.0, 0.0, 0.0), -2.0, &Vec3::zeros(), 1.0).is_err());

    let a = v(0.2, -0.4, 0.3);
    let xi = 0.5;
    let pd = v(0.0, 3f64.sqrt(), 0.0) + a * xi;
    assert!(close(hamiltonian_dual(&pd, -2.0, &a, xi).unwrap(), -1.0, 1e-15));
    assert_eq!(hamiltonian_dual(&p, -2.0, &Vec3::zeros(), xi).unwrap(), hamiltonian_free(&p, -2.0).unwrap());
    let shift = v(1.5, -0.7, 2.0);
    let h0 = hamiltonian_dual(&pd, -2.0, &a, xi).unwrap();
    let h1 = hamiltonian_dual(&(pd + shift * xi), -2.0, &(a + shift), xi).unwrap();
    assert!(close(h1, h0, 1e-14));
}

/// Energy at u = 0 as a function of the rest mass.
fn energy_of_mass(m: f64, a2: f64) -> f64 {
    m * (1.0 - a2 / (m * m)) / (1.0 - 2.0 * a2 / (m * m)).sqrt()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn rest_mass_branches_match_root_solve() {
    let (e0, xa) = (1.0, 0.3);
    let b = rest_mass_from_energy(e0, xa).unwrap();
    assert!(close(b.physical.m0, 0.99f64.sqrt(), 1e-14));
    assert!(close(b.unphysical.m0, 0.19f64.sqrt(), 1e-14));

    // energy_of_mass has a single minimum at m = 2|ξA₀|; one root on each side
    let a2 = xa * xa;
    let g = |m: f64| energy_of_mass(m, a2) - e0;
    let m_min = 2.0 * xa;
    let hi = bisect(g, m_min, 10.0);
    let lo = bisect(g, (2.0 * a2).sqrt() * (1.0 + 1e-12), m_min);
    assert!(close(b.physical.m0, hi, 1e-12));
    assert!(close(b.unphysical.m0, lo, 1e-12));
    assert!(!b.physical.near_singular);
}

#[test]
fn rest_mass_limits() {
    let b = rest_mass_from_energy(2.5, 0.0).unwrap();
    assert_eq!(b.physical.m0, 2.5);
    assert_eq!(b.unphysical.m0, 0.0);
    assert!(b.unphysical.near_singular);

    let xa = 1e-4;
    let b = rest_mass_from_energy(1.0, xa).unwrap();
    assert!((b.physical.m0 - 1.0).abs() < 1e-7);
    assert!(close(b.unphysical.m0, 2f64.sqrt() * xa, 1e-6));
    assert!(b.unphysical.near_singular);

    assert!(matches!(rest_mass_from_energy(1.0, 0.6), Err(ParticleError::NoRealBranch { .. })));
}

#[test]
fn uniform_potential_flow_is_straight() {
    let src = PotentialSource::uniform(-1.5);
    let params = ParticleParams::new(1.0, 1.0);
    let st = ParticleState::new(v(0.0, 1.0, 0.0), v(0.3, -0.2, 0.1));
    for model in [HamiltonianModel::Free, HamiltonianModel::Interaction, HamiltonianModel::Dual] {
        let out = hamiltonian_flow(model, &st, &src, &params, 500, 1e-2, Integrator::Rk4).unwrap();
        assert!(out.diagnostic.is_none());
        let h0 = out.samples[0].h;
        for s in &out.samples {
            assert!((s.h - h0).abs() <= 2.0 * f64::EPSILON * h0.abs());
            assert!((s.u - st.u).norm() < 1e-14);
            // on a straight line r - r0 is parallel to u
            assert!((s.r - st.r).cross(&st.u).norm() < 1e-12);
        }
    }
}

#[test]
fn hamiltonian_flow_requires_unit_light_speed() {
    let mut params = ParticleParams::new(1.0, 1.0);
    params.units = Units::new(2.0, 1.0).unwrap();
    let st = ParticleState::new(Vec3::zeros(), Vec3::zeros());
    let r = hamiltonian_flow(
        HamiltonianModel::Free,
        &st,
        &PotentialSource::uniform(-1.0),
        &params,
        1,
        0.1,
        Integrator::Rk4,
    );
    assert_eq!(r, Err(ParticleError::UnsupportedUnits { c: 2.0 }));
}

fn coulomb_repulsive() -> (PotentialSource, ParticleParams) {
    (PotentialSource::static_coulomb(0.1, Vec3::zeros(), 1.0, -1.0), ParticleParams::new(1.0, 1.0))
}

#[test]
fn free_flow_agrees_with_lab_time_integration() {
    let (src, params) = coulomb_repulsive();
    let st = ParticleState::new(v(1.0, 0.3, 0.0), v(0.0, 0.2, 0.1));
    let steps = 4000;
    let flow = hamiltonian_flow(HamiltonianModel::Free, &st, &src, &params, steps, 5e-4, Integrator::Rk4).unwrap();
    let end = flow.samples.last().unwrap();
    let lab = integrate_free_vacuum(&st, &src, 1.0, end.t / steps as f64, steps).unwrap();
    let last = lab.last().unwrap();
    assert!((last.t - end.t).abs() < 1e-12);
    assert!((last.r - end.r).norm() < 1e-10, "{}", (last.r - end.r).norm());
    assert!((last.u - end.u).norm() < 1e-10);
    assert!((last.tau - end.tau).abs() < 1e-10);
}

#[test]
fn free_vacuum_conserves_h0_and_mass() {
    let (src, _) = coulomb_repulsive();
    let st = ParticleState::new(v(1.0, 0.0, 0.0), Vec3::zeros());
    let traj = integrate_free_vacuum(&st, &src, 1.0, 1e-3, 20_000).unwrap();
    let m0 = -src.sample(0.0, &st.r).unwrap().w_bar;
    for s in &traj {
        let h = vacuum_energy(s, &src, 1.0).unwrap();
        assert!((h + m0).abs() <= 1e-10 * m0);
    }
    // tau is monotone
    assert!(traj.windows(2).all(|w| w[1].tau >= w[0].tau));
}

#[test]
fn free_vacuum_with_explicit_light_speed() {
    let c = 2.5;
    let src = PotentialSource::static_coulomb(0.3, Vec3::zeros(), 1.0, -1.0);
    let st = ParticleState::new(v(1.0, 0.2, 0.0), v(0.0, 0.9, 0.0));
    let traj = integrate_free_vacuum(&st, &src, c, 1e-3, 5000).unwrap();
    let h0 = vacuum_energy(&st, &src, c).unwrap();
    let h1 = vacuum_energy(traj.last().unwrap(), &src, c).unwrap();
    assert!(((h1 - h0) / h0).abs() < 1e-11);
}

/// Moving attractive Coulomb source used for the dual-model checks.
fn moving_attractor() -> (PotentialSource, ParticleParams, ParticleState) {
    let xi = -1.0;
    let src = PotentialSource::moving_coulomb(1.0, Vec3::zeros(), v(0.1, 0.0, 0.0), xi, 1.0).unwrap();
    (src, ParticleParams::new(xi, 1.0), ParticleState::new(v(0.0, 1.0, 0.0), v(0.2, 0.1, 0.0)))
}

#[test]
fn dual_flow_reproduces_lorentz_force() {
    let (src, params, st) = moving_attractor();
    let dtau = 1e-3;
    let out = hamiltonian_flow(HamiltonianModel::Dual, &st, &src, &params, 1000, dtau, Integrator::Rk4).unwrap();
    assert!(out.diagnostic.is_none());
    let s = &out.samples;
    let d5 =
        |f: &dyn Fn(usize) -> f64, i: usize| (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * dtau);
    let mut worst = 0.0_f64;
    for i in (2..s.len() - 2).step_by(37) {
        let tt = d5(&|k| s[k].t, i);
        let dp = Vec3::new(d5(&|k| s[k].p.x, i), d5(&|k| s[k].p.y, i), d5(&|k| s[k].p.z, i)) / tt;
        let state = ParticleState { r: s[i].r, u: s[i].u, t: s[i].t, tau: s[i].tau };
        let f = lorentz_force_classical(&state, &src, &params).unwrap();
        worst = worst.max((dp - f).norm() / f.norm());
    }
    assert!(worst < 1e-7, "{worst}");
}

#[test]
fn dual_flow_is_gauge_invariant() {
    let (src, params, st) = moving_attractor();
    let shift = v(0.4, -1.1, 0.25);
    let shifted = src.clone().with_vector_offset(shift);
    let a = hamiltonian_flow(HamiltonianModel::Dual, &st, &src, &params, 300, 1e-3, Integrator::Rk4).unwrap();
    let p0 = initial_canonical_momentum(HamiltonianModel::Dual, &st, &src, params.xi).unwrap();
    let b = hamiltonian_flow_from(
        HamiltonianModel::Dual,
        &st,
        p0 + shift * params.xi,
        &shifted,
        &params,
        300,
        1e-3,
        Integrator::Rk4,
    )
    .unwrap();
    for (x, y) in a.samples.iter().zip(&b.samples) {
        assert!((x.r - y.r).norm() < 1e-13);
        assert!((x.u - y.u).norm() < 1e-13);
    }
}

#[test]
fn interaction_flow_conserves_energy_in_static_field() {
    let xi = 1.0;
    let src = PotentialSource::static_coulomb(0.2, Vec3::zeros(), xi, -1.0).with_vector_offset(v(0.05, 0.02, -0.03));
    let params = ParticleParams::new(xi, 1.0);
    let st = ParticleState::new(v(1.0, 0.0, 0.2), v(0.0, 0.3, 0.0));
    for model in [HamiltonianModel::Free, HamiltonianModel::Interaction, HamiltonianModel::Dual] {
        let out = hamiltonian_flow(model, &st, &src, &params, 20_000, 1e-3, Integrator::Rk4).unwrap();
        let h0 = out.samples[0].h;
        let drift = out.samples.iter().map(|s| ((s.h - h0) / h0).abs()).fold(0.0, f64::max);
        assert!(drift <= 1e-8, "{model:?} {drift}");
    }
}

#[test]
fn implicit_midpoint_has_bounded_energy_error() {
    let (src, params) = coulomb_repulsive();
    let st = ParticleState::new(v(1.0, 0.0, 0.0), v(0.0, 0.3, 0.0));
    let steps = 1_000_000;
    let out = hamiltonian_flow(HamiltonianModel::Free, &st, &src, &params, steps, 5e-3, Integrator::ImplicitMidpoint)
        .unwrap();
    assert!(out.diagnostic.is_none());
    let h0 = out.samples[0].h;
    let err: Vec<f64> = out.samples.iter().map(|s| ((s.h - h0) / h0).abs()).collect();
    let half = err.len() / 2;
    let first = err[..half].iter().cloned().fold(0.0, f64::max);
    let second = err[half..].iter().cloned().fold(0.0, f64::max);
    assert!(second <= 2.0 * first + 1e-12, "{first} {second}");
}

#[test]
fn proper_time_bookkeeping() {
    let (src, params, st) = moving_attractor();
    let dtau = 2e-3;
    let out = hamiltonian_flow(HamiltonianModel::Dual, &st, &src, &params, 500, dtau, Integrator::Rk4).unwrap();
    for w in out.samples.windows(2) {
        let dt = w[1].t - w[0].t;
        let g = |u: &Vec3| (1.0 - u.norm_squared()).sqrt();
        let est = dt * 0.5 * (g(&w[0].u) + g(&w[1].u));
        assert!((est - dtau).abs() < dtau.powi(3), "{est}");
        assert!(w[1].tau > w[0].tau);
    }
}

#[test]
fn classical_and_modified_agree_for_constant_potential() {
    let xi = 1.0;
    let src = PotentialSource::static_coulomb(0.3, Vec3::zeros(), xi, -1.0).with_vector_offset(v(0.1, 0.0, 0.2));
    let params = ParticleParams::new(xi, 1.0);
    let st = ParticleState::new(v(1.0, 0.0, 0.0), v(0.0, 0.2, 0.0));
    let a = integrate_lorentz(ForceLaw::Classical, &st, &src, &params, 1e-3, 2000).unwrap();
    let b = integrate_lorentz(ForceLaw::Modified, &st, &src, &params, 1e-3, 2000).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.p, y.p);
        assert_eq!(y.correction_integral, Vec3::zeros());
    }
}

#[test]
fn modified_minus_classical_tracks_logged_correction() {
    let xi = 1.0;
    let src = PotentialSource::moving_coulomb(-0.2, v(-1.0, 0.0, 0.0), v(0.3, 0.0, 0.0), xi, 1.0).unwrap();
    // a heavy particle keeps the two trajectories close, so the momentum gap
    // is the integrated correction up to second-order separation effects
    let params = ParticleParams::new(xi, 100.0);
    let st = ParticleState::new(v(0.0, 1.0, 0.0), v(0.0, 0.0, 0.1));
    let a = integrate_lorentz(ForceLaw::Classical, &st, &src, &params, 1e-3, 2000).unwrap();
    let b = integrate_lorentz(ForceLaw::Modified, &st, &src, &params, 1e-3, 2000).unwrap();
    let (x, y) = (a.last().unwrap(), b.last().unwrap());
    let dp = y.p - x.p;
    let fc = y.correction_integral;
    assert!(fc.norm() > 1e-3);
    assert!((dp - fc).norm() < 0.01 * fc.norm(), "{dp} {fc}");
}

#[test]
fn leaving_the_domain_truncates_the_flow() {
    // a receding attractor drains |W̄| until the momentum no longer fits
    let xi = -1.0;
    let src = PotentialSource::moving_coulomb(1.0, Vec3::zeros(), v(0.9, 0.0, 0.0), xi, 1.0).unwrap();
    let params = ParticleParams::new(xi, 1.0);
    let st = ParticleState::new(v(0.0, 0.5, 0.0), v(0.0, 0.0, 0.6));
    let out = hamiltonian_flow(HamiltonianModel::Dual, &st, &src, &params, 200_000, 1e-2, Integrator::Rk4).unwrap();
    let msg = out.diagnostic.expect("flow should stop");
    assert!(msg.contains("stopped after"), "{msg}");
    assert!(out.samples.len() < 200_001);
}
