use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vacfield::particle::Vec3;
use vacfield::reduction::{
    bracket, jacobi_residual, jacobi_scan, minimal_shift, minimal_unshift, pure_gauge_su2,
    shifted_canonicality_residual, yang_mills_residual, AbelianGaugeField, Canonical, ExtendedStructure,
    MagneticStructure, NonAbelianGaugeField, Observable, PoissonStructure, ReducedStructure, ShiftedMagnetic,
    StructureConstants,
};
use vacfield::ReductionError;

fn point(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.5..1.5)).collect()
}

fn q(z: &[f64]) -> Vec3 {
    Vec3::new(z[0], z[1], z[2])
}

/// Random cubic in all coordinates, with its exact gradient.
fn cubic(rng: &mut impl Rng, n: usize) -> Observable {
    let lin: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let quad: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let cub: Vec<(usize, usize, usize, f64)> = (0..6)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n), rng.random_range(-1.0..1.0)))
        .collect();
    let (lin2, quad2, cub2) = (lin.clone(), quad.clone(), cub.clone());
    Observable::with_gradient(
        move |z| {
            let mut v: f64 = lin.iter().zip(z).map(|(a, x)| a * x).sum();
            for i in 0..n {
                for j in 0..n {
                    v += quad[i * n + j] * z[i] * z[j];
                }
            }
            v + cub.iter().map(|&(a, b, c, k)| k * z[a] * z[b] * z[c]).sum::<f64>()
        },
        move |z| {
            let mut g = lin2.clone();
            for i in 0..n {
                for j in 0..n {
                    g[i] += quad2[i * n + j] * z[j];
                    g[j] += quad2[i * n + j] * z[i];
                }
            }
            for &(a, b, c, k) in &cub2 {
                g[a] += k * z[b] * z[c];
                g[b] += k * z[a] * z[c];
                g[c] += k * z[a] * z[b];
            }
            g
        },
    )
}

/// The same kind of cubic, left to central differences.
fn cubic_fd(rng: &mut impl Rng, n: usize) -> Observable {
    let f = cubic(rng, n);
    Observable::new(move |z| f.value(z))
}

/// A smooth potential with analytic Jacobian.
fn wavy(xi: f64) -> AbelianGaugeField {
    AbelianGaugeField::with_jacobian(
        xi,
        |q| Vec3::new((q.y * q.z).sin(), q.x.cos() + q.z * q.z, q.x * q.y * q.z),
        |q| {
            let c = (q.y * q.z).cos();
            // (i, j) = ∂_i A_j
            Matrix3::new(0.0, -q.x.sin(), q.y * q.z, q.z * c, 0.0, q.x * q.z, q.y * c, 2.0 * q.z, q.x * q.y)
        },
    )
}

#[test]
fn canonical_pairs() {
    let s = Canonical { n: 3 };
    let z = [0.3, -0.1, 2.0, 1.0, 0.5, -0.7];
    for i in 0..3 {
        for j in 0..3 {
            let b = bracket(&s, &Observable::coordinate(3 + j), &Observable::coordinate(i), &z).unwrap();
            assert_eq!(b, if i == j { 1.0 } else { 0.0 });
            let qq = bracket(&s, &Observable::coordinate(i), &Observable::coordinate(j), &z).unwrap();
            assert_eq!(qq, 0.0);
        }
    }
    let f = cubic(&mut ChaCha8Rng::seed_from_u64(1), 6);
    assert!(bracket(&s, &f, &f, &z).unwrap().abs() < 1e-12);
}

#[test]
fn uniform_field_momentum_bracket() {
    let b0 = 0.8;
    let xi = -1.3;
    let analytic = AbelianGaugeField::with_jacobian(
        xi,
        move |q| Vec3::new(-0.5 * b0 * q.y, 0.5 * b0 * q.x, 0.0),
        move |_| Matrix3::new(0.0, 0.5 * b0, 0.0, -0.5 * b0, 0.0, 0.0, 0.0, 0.0, 0.0),
    );
    let differenced = AbelianGaugeField::new(xi, move |q| Vec3::new(-0.5 * b0 * q.y, 0.5 * b0 * q.x, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for g in [analytic, differenced] {
        let s = MagneticStructure::from_gauge(&g);
        for _ in 0..5 {
            let z = point(&mut rng, 6);
            let b = bracket(&s, &Observable::coordinate(3), &Observable::coordinate(4), &z).unwrap();
            assert!((b + xi * b0).abs() < 1e-12, "{b}");
        }
    }
}

#[test]
fn structures_are_antisymmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ext = ExtendedStructure { gauge: random_su2(&mut rng) };
    let red = ReducedStructure { gauge: random_su2(&mut rng), e: vec![0.3, -1.0, 0.2] };
    let structures: Vec<Box<dyn PoissonStructure>> = vec![
        Box::new(Canonical { n: 3 }),
        Box::new(MagneticStructure::from_gauge(&wavy(0.7))),
        Box::new(ShiftedMagnetic { gauge: wavy(0.7) }),
        Box::new(ext),
        Box::new(red),
    ];
    for s in &structures {
        for _ in 0..20 {
            let z = point(&mut rng, s.dim());
            let m = s.matrix(&z);
            assert!((&m + m.transpose()).amax() <= 1e-14);
        }
    }
}

#[test]
fn canonical_jacobi_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = Canonical { n: 3 };
    for _ in 0..10 {
        let (f, g, h) = (cubic(&mut rng, 6), cubic(&mut rng, 6), cubic(&mut rng, 6));
        let z = point(&mut rng, 6);
        let r = jacobi_residual(&s, &f, &g, &h, &z).unwrap();
        assert!(r.abs() < 1e-8, "{r}");
    }
}

/// The cyclic sum `ξ(∂_1 F_32 + ∂_2 F_13 + ∂_3 F_21)` written out by hand.
fn cyclic_sum_oracle(xi: f64, div_b: f64) -> f64 {
    // F_32 = -B_1, F_13 = -B_2, F_21 = -B_3
    -xi * div_b
}

#[test]
fn momentum_jacobi_vanishes_for_potential_fields() {
    let s = MagneticStructure::from_gauge(&wavy(1.7));
    let p = |i: usize| Observable::coordinate(3 + i);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<Vec<f64>> = (0..20).map(|_| point(&mut rng, 6)).collect();
    for r in jacobi_scan(&s, &p(0), &p(1), &p(2), &pts).unwrap() {
        assert!(r.abs() < 1e-8, "{r}");
    }
}

#[test]
fn momentum_jacobi_measures_monopole_density() {
    let xi = 1.0;
    let s = MagneticStructure::from_field(xi, |q| Vec3::new(q.x, 0.0, 0.0));
    let p = |i: usize| Observable::coordinate(3 + i);
    let z = [0.2, -0.4, 1.1, 0.3, 0.0, -2.0];
    let r = jacobi_residual(&s, &p(0), &p(1), &p(2), &z).unwrap();
    assert!((r - cyclic_sum_oracle(xi, 1.0)).abs() < 1e-6, "{r}");

    // a field with position-dependent divergence
    let xi = -0.6;
    let b = |q: &Vec3| Vec3::new(q.x * q.y, (q.z + q.x).sin(), q.z * q.z * q.y);
    let div = |q: &Vec3| q.y + 2.0 * q.z * q.y;
    let s = MagneticStructure::from_field(xi, b);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let z = point(&mut rng, 6);
        let r = jacobi_residual(&s, &p(0), &p(1), &p(2), &z).unwrap();
        assert!((r - cyclic_sum_oracle(xi, div(&q(&z)))).abs() < 1e-6);
    }
}

#[test]
fn brackets_obey_leibniz() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let structures: Vec<Box<dyn PoissonStructure>> = vec![
        Box::new(Canonical { n: 3 }),
        Box::new(MagneticStructure::from_gauge(&wavy(0.9))),
        Box::new(ExtendedStructure { gauge: random_su2(&mut rng) }),
    ];
    for s in &structures {
        let n = s.dim();
        for _ in 0..5 {
            let (f, g, h) = (cubic(&mut rng, n), cubic_fd(&mut rng, n), cubic(&mut rng, n));
            let z = point(&mut rng, n);
            let lhs = bracket(s.as_ref(), &f, &g.product(&h), &z).unwrap();
            let rhs = g.value(&z) * bracket(s.as_ref(), &f, &h, &z).unwrap()
                + bracket(s.as_ref(), &f, &g, &z).unwrap() * h.value(&z);
            assert!((lhs - rhs).abs() < 1e-8 * (1.0 + lhs.abs()), "{lhs} {rhs}");
        }
    }
}

#[test]
fn analytic_gradients_are_checked() {
    let good = Observable::with_gradient(|z| z[0] * z[1].sin(), |z| vec![z[1].sin(), z[0] * z[1].cos()]);
    let bad = Observable::with_gradient(|z| z[0] * z[1].sin(), |z| vec![z[1].sin(), z[0] * z[1].sin()]);
    let z = [0.7, 1.2];
    assert!(good.gradient_deviation(&z) < 1e-6);
    assert!(bad.gradient_deviation(&z) > 1e-2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        assert!(wavy(1.0).jacobian_deviation(&q(&point(&mut rng, 3))) < 1e-6);
    }
    let wrong = AbelianGaugeField::with_jacobian(1.0, |q| Vec3::new(q.y, 0.0, 0.0), |_| Matrix3::identity());
    assert!(wrong.jacobian_deviation(&Vec3::zeros()) > 0.5);
}

#[test]
fn minimal_shift_makes_brackets_canonical() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let zero = AbelianGaugeField::new(2.0, |_| Vec3::zeros());
    let z = point(&mut rng, 6);
    assert_eq!(minimal_shift(&zero, &z).unwrap(), z);
    let canonical = Canonical { n: 3 }.matrix(&z);
    for g in [wavy(1.3), AbelianGaugeField::new(-0.4, |q| Vec3::new(q.y.exp(), q.x * q.z, (q.x - q.y).cos()))] {
        for _ in 0..20 {
            let z = point(&mut rng, 6);
            let back = minimal_unshift(&g, &minimal_shift(&g, &z).unwrap()).unwrap();
            assert!(back.iter().zip(&z).all(|(a, b)| (a - b).abs() <= 1e-14 * (1.0 + b.abs())));
            let zt = minimal_shift(&g, &z).unwrap();
            let m = ShiftedMagnetic { gauge: g.clone() }.matrix(&zt);
            assert!((m - &canonical).amax() < 1e-10);
        }
    }
}

#[test]
fn dimension_mismatch_is_reported() {
    let s = Canonical { n: 3 };
    let e = bracket(&s, &Observable::coordinate(0), &Observable::coordinate(1), &[0.0; 4]);
    assert_eq!(e, Err(ReductionError::Dimension { expected: 6, found: 4 }));
    assert!(minimal_shift(&wavy(1.0), &[0.0; 5]).is_err());
    let g = NonAbelianGaugeField::new(StructureConstants::su2(), |_| vec![Vec3::zeros(); 2]);
    assert!(yang_mills_residual(&g, &Vec3::zeros()).is_err());
    assert!(shifted_canonicality_residual(&random_su2(&mut ChaCha8Rng::seed_from_u64(0)), &[0.0; 6]).is_err());
}

#[test]
fn structure_constants_are_validated() {
    let su2 = StructureConstants::su2();
    let raw: Vec<f64> = (0..3)
        .flat_map(|r| (0..3).flat_map(move |s| (0..3).map(move |k| (r, s, k))))
        .map(|(r, s, k)| su2.get(r, s, k))
        .collect();
    assert!(StructureConstants::new(3, raw.clone()).is_ok());
    let mut skew = raw.clone();
    skew[5] = 2.0; // (r, s, k) = (0, 1, 2)
    assert!(matches!(StructureConstants::new(3, skew), Err(ReductionError::Constants(_))));
    // antisymmetric in (s,k) but not a Lie algebra
    let mut c = vec![0.0; 27];
    let mut set = |r: usize, s: usize, k: usize, v: f64| {
        c[(r * 3 + s) * 3 + k] = v;
        c[(r * 3 + k) * 3 + s] = -v;
    };
    set(0, 0, 1, 1.0);
    set(1, 1, 2, 1.0);
    set(2, 2, 0, 1.0);
    assert!(matches!(StructureConstants::new(3, c), Err(ReductionError::Constants(_))));
    assert!(StructureConstants::new(2, vec![0.0; 7]).is_err());
}

/// Quadratic potentials `A^s_j = b^s_j + L^s_jk q^k + Q^s_jkl q^k q^l`
/// with their exact first and second derivatives.
#[derive(Clone)]
struct Quadratic {
    b: Vec<[f64; 3]>,
    l: Vec<[[f64; 3]; 3]>,
    q: Vec<[[[f64; 3]; 3]; 3]>,
}

impl Quadratic {
    fn random(rng: &mut impl Rng, m: usize) -> Self {
        let mut r = || rng.random_range(-1.0..1.0);
        let b = (0..m).map(|_| [r(), r(), r()]).collect();
        let l = (0..m).map(|_| [[r(), r(), r()], [r(), r(), r()], [r(), r(), r()]]).collect();
        let mut q = vec![[[[0.0; 3]; 3]; 3]; m];
        for qs in q.iter_mut() {
            for j in 0..3 {
                for k in 0..3 {
                    for l in k..3 {
                        let v = 0.5 * r();
                        qs[j][k][l] = v;
                        qs[j][l][k] = v;
                    }
                }
            }
        }
        Quadratic { b, l, q }
    }

    fn value(&self, x: &Vec3) -> Vec<Vec3> {
        (0..self.b.len())
            .map(|s| {
                Vec3::from_fn(|j, _| {
                    let mut v = self.b[s][j];
                    for k in 0..3 {
                        v += self.l[s][j][k] * x[k];
                        for l in 0..3 {
                            v += self.q[s][j][k][l] * x[k] * x[l];
                        }
                    }
                    v
                })
            })
            .collect()
    }

    /// `∂_i A^s_j`
    fn d1(&self, s: usize, i: usize, j: usize, x: &Vec3) -> f64 {
        self.l[s][j][i] + 2.0 * (0..3).map(|l| self.q[s][j][i][l] * x[l]).sum::<f64>()
    }

    /// `∂_l ∂_i A^s_j`
    fn d2(&self, s: usize, l: usize, i: usize, j: usize) -> f64 {
        2.0 * self.q[s][j][i][l]
    }

    fn jacobian(&self, x: &Vec3) -> Vec<Matrix3<f64>> {
        (0..self.b.len()).map(|s| Matrix3::from_fn(|i, j| self.d1(s, i, j, x))).collect()
    }
}

fn random_su2(rng: &mut impl Rng) -> NonAbelianGaugeField {
    let p = Quadratic::random(rng, 3);
    let p2 = p.clone();
    NonAbelianGaugeField::with_jacobian(StructureConstants::su2(), move |x| p.value(x), move |x| p2.jacobian(x))
}

/// The Yang–Mills sum assembled from exact derivatives, looping over the
/// structure-constant indices outermost.
fn ym_oracle(p: &Quadratic, c: &StructureConstants, x: &Vec3) -> Vec<f64> {
    let m = c.dim();
    let a = p.value(x);
    let f = |s: usize, i: usize, j: usize| {
        let mut v = p.d1(s, i, j, x) - p.d1(s, j, i, x);
        for r in (0..m).rev() {
            for k in (0..m).rev() {
                v += c.get(s, k, r) * a[k][i] * a[r][j];
            }
        }
        v
    };
    let df = |s: usize, i: usize, j: usize, l: usize| {
        let mut v = p.d2(s, l, i, j) - p.d2(s, l, j, i);
        for r in (0..m).rev() {
            for k in (0..m).rev() {
                v += c.get(s, k, r) * (p.d1(k, l, i, x) * a[r][j] + a[k][i] * p.d1(r, l, j, x));
            }
        }
        v
    };
    let mut out = vec![0.0; m * 27];
    for l in (0..3).rev() {
        for j in (0..3).rev() {
            for i in (0..3).rev() {
                for s in (0..m).rev() {
                    let mut v = 0.0;
                    for r in (0..m).rev() {
                        for k in (0..m).rev() {
                            v += c.get(s, k, r) * (f(k, l, i) * a[r][j] + f(k, j, l) * a[r][i] + f(k, i, j) * a[r][l]);
                        }
                    }
                    v += df(s, j, l, i) + df(s, l, i, j) + df(s, i, j, l);
                    out[((s * 3 + i) * 3 + j) * 3 + l] = v;
                }
            }
        }
    }
    out
}

#[test]
fn abelian_embedding_satisfies_bianchi() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let p = Quadratic::random(&mut rng, 2);
    let g = NonAbelianGaugeField::new(StructureConstants::abelian(2), move |x| p.value(x));
    for _ in 0..10 {
        let r = yang_mills_residual(&g, &q(&point(&mut rng, 3))).unwrap();
        assert!(r.max_abs() < 1e-8, "{}", r.max_abs());
    }
}

#[test]
fn random_su2_residual_matches_exact_assembly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let c = StructureConstants::su2();
    let mut mean = 0.0;
    for _ in 0..10 {
        let p = Quadratic::random(&mut rng, 3);
        let (pv, pj) = (p.clone(), p.clone());
        let g = NonAbelianGaugeField::with_jacobian(c.clone(), move |x| pv.value(x), move |x| pj.jacobian(x));
        let x = q(&point(&mut rng, 3));
        let r = yang_mills_residual(&g, &x).unwrap();
        let oracle = ym_oracle(&p, &c, &x);
        for (a, b) in r.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{a} {b}");
        }
        mean += r.mean_abs() / 10.0;
    }
    assert!(mean >= 1e-2, "{mean}");
}

fn theta(x: &Vec3) -> Vec3 {
    Vec3::new(0.7 * x.x + 0.2 * x.y * x.z, (x.y - 0.3 * x.z).sin(), 0.5 * x.x * x.y + 0.1)
}

fn dtheta(x: &Vec3) -> Matrix3<f64> {
    let c = (x.y - 0.3 * x.z).cos();
    // (i, k) = ∂_i θ_k
    Matrix3::new(0.7, 0.0, 0.5 * x.y, 0.2 * x.z, c, 0.5 * x.x, 0.2 * x.y, -0.3 * c, 0.0)
}

fn su2_element(th: &Vec3) -> Matrix2<Complex64> {
    // exp(θ·a) with a_k = -(i/2) σ_k
    let t = th.norm();
    let n = if t > 0.0 { th / t } else { Vec3::zeros() };
    let (c, s) = ((0.5 * t).cos(), (0.5 * t).sin());
    let i = Complex64::i();
    Matrix2::new(
        Complex64::new(c, 0.0) - i * s * n.z,
        (-i * n.x - Complex64::new(n.y, 0.0)) * s,
        (-i * n.x + Complex64::new(n.y, 0.0)) * s,
        Complex64::new(c, 0.0) + i * s * n.z,
    )
}

#[test]
fn pure_gauge_matches_matrix_group_oracle() {
    let g = pure_gauge_su2(theta, dtheta);
    let sigma = [
        Matrix2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ),
        Matrix2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ),
        Matrix2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let x = q(&point(&mut rng, 3));
        let a = g.potential(&x).unwrap();
        let ginv = su2_element(&theta(&x)).adjoint();
        for i in 0..3 {
            let h = 1e-4;
            let mut e = Vec3::zeros();
            e[i] = h;
            let dg = (su2_element(&theta(&(x + e))) - su2_element(&theta(&(x - e)))) / Complex64::new(2.0 * h, 0.0);
            let m = ginv * dg;
            for k in 0..3 {
                // a_k = -(i/2) σ_k, so the coefficient is i tr(σ_k M)
                let coeff = Complex64::i() * (sigma[k] * m).trace();
                assert!((coeff.re - a[k][i]).abs() < 1e-7 && coeff.im.abs() < 1e-7, "{coeff} {}", a[k][i]);
            }
        }
        let f = g.curvature(&x).unwrap();
        assert!(f.iter().all(|f| f.amax() < 1e-9));
    }
}

#[test]
fn pure_gauge_residuals_vanish_together() {
    let g = pure_gauge_su2(theta, dtheta);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10 {
        let x = point(&mut rng, 3);
        assert!(yang_mills_residual(&g, &q(&x)).unwrap().max_abs() <= 1e-6);
        // y = 0 is the only invariant element of su(2)
        let mut z = point(&mut rng, 12);
        z[9..].fill(0.0);
        assert!(shifted_canonicality_residual(&g, &z).unwrap().max <= 1e-10);
    }
    let r = random_su2(&mut rng);
    let z = point(&mut rng, 12);
    assert!(yang_mills_residual(&r, &q(&z)).unwrap().mean_abs() > 1e-2);
    assert!(shifted_canonicality_residual(&r, &z).unwrap().max > 1e-2);
}

#[test]
fn abelian_shift_is_canonical() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let p = Quadratic::random(&mut rng, 1);
    let g = NonAbelianGaugeField::new(StructureConstants::abelian(1), move |x| p.value(x));
    for _ in 0..10 {
        let z = point(&mut rng, 8);
        let rep = shifted_canonicality_residual(&g, &z).unwrap();
        assert!(rep.max <= 1e-10, "{:?}", rep.blocks);
    }
}

#[test]
fn su2_shift_leaves_algebra_brackets() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let g = random_su2(&mut rng);
    let c = StructureConstants::su2();
    for _ in 0..10 {
        let z = point(&mut rng, 12);
        let y = &z[9..12];
        let rep = shifted_canonicality_residual(&g, &z).unwrap();
        for s in 0..3 {
            for k in 0..3 {
                let expect: f64 = (0..3).map(|r| c.get(r, s, k) * y[r]).sum();
                assert!((rep.deviation[(9 + s, 9 + k)] - expect).abs() < 1e-10);
            }
        }
        assert!(rep.block("yy").unwrap() > 0.0);
        for name in ["qq", "qp", "pp", "qu", "pu", "uu", "qy", "uy"] {
            assert!(rep.block(name).unwrap() <= 1e-10, "{name} {:?}", rep.blocks);
        }
        let mut frozen = z.clone();
        frozen[9..].fill(0.0);
        assert!(shifted_canonicality_residual(&g, &frozen).unwrap().block("yy").unwrap() == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn self_bracket_vanishes(seed in any::<u64>(), z in prop::collection::vec(-2.0f64..2.0, 6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = cubic(&mut rng, 6);
        let s = MagneticStructure::from_gauge(&wavy(1.1));
        prop_assert!(bracket(&s, &f, &f, &z).unwrap().abs() < 1e-9);
    }

    #[test]
    fn bracket_is_antisymmetric(seed in any::<u64>(), z in prop::collection::vec(-2.0f64..2.0, 6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g) = (cubic(&mut rng, 6), cubic(&mut rng, 6));
        let s = MagneticStructure::from_field(0.4, |q| Vec3::new(q.y, q.z * q.x, 1.0));
        let (a, b) = (bracket(&s, &f, &g, &z).unwrap(), bracket(&s, &g, &f, &z).unwrap());
        prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}
