use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3};

use super::bracket::PoissonStructure;
use super::diff5;
use super::magnetic::fd_jacobian;
use crate::error::ReductionError;
use crate::particle::Vec3;

/// Lie-algebra structure constants, `[a_s, a_k] = Σ_r c^r_{sk} a_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    m: usize,
    c: Vec<f64>,
}

impl StructureConstants {
    /// `c[(r * m + s) * m + k] = c^r_{sk}`. Checks antisymmetry in `(s, k)`
    /// and the algebra Jacobi identity to `1e-14`.
    pub fn new(m: usize, c: Vec<f64>) -> Result<Self, ReductionError> {
        if m == 0 || c.len() != m * m * m {
            return Err(ReductionError::Constants(format!(
                "need m >= 1 and m³ = {} entries, got {}",
                m * m * m,
                c.len()
            )));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(ReductionError::Constants("non-finite entry".into()));
        }
        let sc = StructureConstants { m, c };
        for r in 0..m {
            for s in 0..m {
                for k in 0..m {
                    if (sc.get(r, s, k) + sc.get(r, k, s)).abs() > 1e-14 {
                        return Err(ReductionError::Constants(format!("c^{r}_({s},{k}) is not antisymmetric")));
                    }
                }
            }
        }
        for s in 0..m {
            for k in 0..m {
                for l in 0..m {
                    for t in 0..m {
                        let j: f64 = (0..m)
                            .map(|r| {
                                sc.get(r, s, k) * sc.get(t, r, l)
                                    + sc.get(r, k, l) * sc.get(t, r, s)
                                    + sc.get(r, l, s) * sc.get(t, r, k)
                            })
                            .sum();
                        if j.abs() > 1e-14 {
                            return Err(ReductionError::Constants(format!("Jacobi identity fails by {j:e}")));
                        }
                    }
                }
            }
        }
        Ok(sc)
    }

    /// `c^r_{sk} = ε_{rsk}`
    pub fn su2() -> Self {
        let mut c = vec![0.0; 27];
        for (r, s, k, v) in
            [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0), (0, 2, 1, -1.0), (1, 0, 2, -1.0), (2, 1, 0, -1.0)]
        {
            c[(r * 3 + s) * 3 + k] = v;
        }
        StructureConstants { m: 3, c }
    }

    pub fn abelian(m: usize) -> Self {
        StructureConstants { m: m.max(1), c: vec![0.0; m.max(1).pow(3)] }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, r: usize, s: usize, k: usize) -> f64 {
        self.c[(r * self.m + s) * self.m + k]
    }
}

type PotFn = Arc<dyn Fn(&Vec3) -> Vec<Vec3> + Send + Sync>;
type JacFn = Arc<dyn Fn(&Vec3) -> Vec<Matrix3<f64>> + Send + Sync>;

/// Potentials `A^(s)(q)`, one vector per generator;
/// `jacobian(q)[s][(i, j)] = ∂A^(s)_j/∂q^i`.
#[derive(Clone)]
pub struct NonAbelianGaugeField {
    pub constants: StructureConstants,
    potential: PotFn,
    jacobian: Option<JacFn>,
}

impl std::fmt::Debug for NonAbelianGaugeField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonAbelianGaugeField").field("constants", &self.constants).finish_non_exhaustive()
    }
}

impl NonAbelianGaugeField {
    pub fn new(constants: StructureConstants, potential: impl Fn(&Vec3) -> Vec<Vec3> + Send + Sync + 'static) -> Self {
        NonAbelianGaugeField { constants, potential: Arc::new(potential), jacobian: None }
    }

    pub fn with_jacobian(
        constants: StructureConstants,
        potential: impl Fn(&Vec3) -> Vec<Vec3> + Send + Sync + 'static,
        jacobian: impl Fn(&Vec3) -> Vec<Matrix3<f64>> + Send + Sync + 'static,
    ) -> Self {
        NonAbelianGaugeField { constants, potential: Arc::new(potential), jacobian: Some(Arc::new(jacobian)) }
    }

    fn m(&self) -> usize {
        self.constants.dim()
    }

    pub fn potential(&self, q: &Vec3) -> Result<Vec<Vec3>, ReductionError> {
        let a = (self.potential)(q);
        if a.len() != self.m() {
            return Err(ReductionError::Dimension { expected: self.m(), found: a.len() });
        }
        if a.iter().any(|v| !v.iter().all(|x| x.is_finite())) {
            return Err(ReductionError::NonFinite("gauge potential".into()));
        }
        Ok(a)
    }

    pub fn jacobian(&self, q: &Vec3) -> Result<Vec<Matrix3<f64>>, ReductionError> {
        let j = match &self.jacobian {
            Some(j) => j(q),
            None => {
                self.potential(q)?;
                (0..self.m()).map(|s| fd_jacobian(q, |x| (self.potential)(x)[s])).collect()
            }
        };
        if j.len() != self.m() {
            return Err(ReductionError::Dimension { expected: self.m(), found: j.len() });
        }
        Ok(j)
    }

    /// `F^(s)_ij = ∂_i A^(s)_j - ∂_j A^(s)_i + Σ_kr c^s_{kr} A^(k)_i A^(r)_j`
    pub fn curvature(&self, q: &Vec3) -> Result<Vec<Matrix3<f64>>, ReductionError> {
        let a = self.potential(q)?;
        let jac = self.jacobian(q)?;
        let m = self.m();
        Ok((0..m)
            .map(|s| {
                let mut f = jac[s] - jac[s].transpose();
                for k in 0..m {
                    for r in 0..m {
                        let c = self.constants.get(s, k, r);
                        if c != 0.0 {
                            f += a[k] * a[r].transpose() * c;
                        }
                    }
                }
                f
            })
            .collect())
    }
}

/// su(2) potential `A = g⁻¹ dg` of `g(q) = exp(θ(q)·a)`, built from `θ`
/// and its Jacobian `dtheta[(i, k)] = ∂θ_k/∂q^i`. Its curvature vanishes.
pub fn pure_gauge_su2(
    theta: impl Fn(&Vec3) -> Vec3 + Send + Sync + 'static,
    dtheta: impl Fn(&Vec3) -> Matrix3<f64> + Send + Sync + 'static,
) -> NonAbelianGaugeField {
    NonAbelianGaugeField::new(StructureConstants::su2(), move |q| {
        let th = theta(q);
        let d = dtheta(q);
        let t2 = th.norm_squared();
        let t = t2.sqrt();
        let (c1, c2) = if t < 1e-3 {
            (0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0)
        } else {
            ((1.0 - t.cos()) / t2, (t - t.sin()) / (t2 * t))
        };
        // rows of the result are generators, columns the base direction i
        let mut a = vec![Vec3::zeros(); 3];
        for i in 0..3 {
            let di = Vec3::new(d[(i, 0)], d[(i, 1)], d[(i, 2)]);
            let x = th.cross(&di);
            let v = di - x * c1 + th.cross(&x) * c2;
            for s in 0..3 {
                a[s][i] = v[s];
            }
        }
        a
    })
}

/// Left-hand side of the Yang–Mills field equations, indexed `(s; i, j, l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct YangMillsResidual {
    pub m: usize,
    pub values: Vec<f64>,
}

impl YangMillsResidual {
    pub fn get(&self, s: usize, i: usize, j: usize, l: usize) -> f64 {
        self.values[((s * 3 + i) * 3 + j) * 3 + l]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn mean_abs(&self) -> f64 {
        self.values.iter().map(|x| x.abs()).sum::<f64>() / self.values.len() as f64
    }
}

/// `∂_l F^s_ij + ∂_i F^s_jl + ∂_j F^s_li
///  + Σ_kr c^s_{kr} (F^k_ij A^r_l + F^k_jl A^r_i + F^k_li A^r_j)`
pub fn yang_mills_residual(gauge: &NonAbelianGaugeField, q: &Vec3) -> Result<YangMillsResidual, ReductionError> {
    let m = gauge.m();
    let a = gauge.potential(q)?;
    let f = gauge.curvature(q)?;
    let mut df: Vec<Vec<Matrix3<f64>>> = Vec::with_capacity(3);
    for l in 0..3 {
        let h = 1e-3 * q[l].abs().max(1.0);
        let mut err = None;
        let mut at = |e: f64| {
            let mut x = *q;
            x[l] += e;
            match gauge.curvature(&x) {
                Ok(v) => DVec(v),
                Err(e) => {
                    err = Some(e);
                    DVec(vec![Matrix3::from_element(f64::NAN); m])
                }
            }
        };
        let d = diff5(h, &mut at);
        if let Some(e) = err {
            return Err(e);
        }
        df.push(d.0);
    }
    let mut values = vec![0.0; m * 27];
    for s in 0..m {
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    let mut v = df[l][s][(i, j)] + df[i][s][(j, l)] + df[j][s][(l, i)];
                    for k in 0..m {
                        for r in 0..m {
                            let c = gauge.constants.get(s, k, r);
                            if c != 0.0 {
                                v += c * (f[k][(i, j)] * a[r][l] + f[k][(j, l)] * a[r][i] + f[k][(l, i)] * a[r][j]);
                            }
                        }
                    }
                    values[((s * 3 + i) * 3 + j) * 3 + l] = v;
                }
            }
        }
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(ReductionError::NonFinite("Yang-Mills residual".into()));
    }
    Ok(YangMillsResidual { m, values })
}

// Vec<Matrix3> with the arithmetic the difference stencil needs.
struct DVec(Vec<Matrix3<f64>>);

impl std::ops::Sub for DVec {
    type Output = DVec;
    fn sub(self, o: DVec) -> DVec {
        DVec(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl std::ops::Add for DVec {
    type Output = DVec;
    fn add(self, o: DVec) -> DVec {
        DVec(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Mul<f64> for DVec {
    type Output = DVec;
    fn mul(self, k: f64) -> DVec {
        DVec(self.0.into_iter().map(|a| a * k).collect())
    }
}

/// `(q, p)` with `{p_i, p_j} = Σ_s e_s F^(s)_ji(q)` for fixed `e`.
#[derive(Clone, Debug)]
pub struct ReducedStructure {
    pub gauge: NonAbelianGaugeField,
    pub e: Vec<f64>,
}

impl PoissonStructure for ReducedStructure {
    fn dim(&self) -> usize {
        6
    }

    fn matrix(&self, z: &[f64]) -> DMatrix<f64> {
        let q = Vec3::new(z[0], z[1], z[2]);
        let f = self.gauge.curvature(&q).expect("gauge evaluable");
        let mut m = super::Canonical { n: 3 }.matrix(z);
        for i in 0..3 {
            for j in 0..3 {
                m[(3 + i, 3 + j)] = self.e.iter().zip(&f).map(|(e, f)| e * f[(j, i)]).sum();
            }
        }
        m
    }
}

/// `(q, p, u, y)`: `{y_s, y_k} = Σ_r c^r_{sk} y_r`, `{p_i, q^j} = δ`,
/// `{p_i, p_j} = Σ_s y_s F^(s)_ji`, `{y_s, u^k} = δ`, `{u^s, p_j} = A^(s)_j`,
/// all other pairs zero.
#[derive(Clone, Debug)]
pub struct ExtendedStructure {
    pub gauge: NonAbelianGaugeField,
}

impl ExtendedStructure {
    fn parts(&self, z: &[f64]) -> (Vec3, usize) {
        (Vec3::new(z[0], z[1], z[2]), self.gauge.m())
    }
}

impl PoissonStructure for ExtendedStructure {
    fn dim(&self) -> usize {
        6 + 2 * self.gauge.m()
    }

    fn matrix(&self, z: &[f64]) -> DMatrix<f64> {
        let (q, m) = self.parts(z);
        let (u0, y0) = (6, 6 + m);
        let y = &z[y0..y0 + m];
        let a = self.gauge.potential(&q).expect("gauge evaluable");
        let f = self.gauge.curvature(&q).expect("gauge evaluable");
        let mut pi = super::Canonical { n: 3 }.matrix(&z[..6]).resize(6 + 2 * m, 6 + 2 * m, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                pi[(3 + i, 3 + j)] = (0..m).map(|s| y[s] * f[s][(j, i)]).sum();
            }
        }
        for s in 0..m {
            for k in 0..m {
                pi[(y0 + s, y0 + k)] = (0..m).map(|r| self.gauge.constants.get(r, s, k) * y[r]).sum();
            }
            pi[(y0 + s, u0 + s)] = 1.0;
            pi[(u0 + s, y0 + s)] = -1.0;
            for j in 0..3 {
                pi[(u0 + s, 3 + j)] = a[s][j];
                pi[(3 + j, u0 + s)] = -a[s][j];
            }
        }
        pi
    }
}

/// Brackets of the shifted coordinates `(q, p̃, u, y)` against the fully
/// canonical table.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalityReport {
    pub max: f64,
    /// Largest deviation per coordinate-block pair, e.g. `"yy"` or `"pp"`.
    pub blocks: Vec<(String, f64)>,
    /// `Π̃ - Π_canonical`, in the ordering `(q, p̃, u, y)`.
    pub deviation: DMatrix<f64>,
}

impl CanonicalityReport {
    pub fn block(&self, name: &str) -> Option<f64> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Pushes the extended bracket at `z = (q, p, u, y)` through
/// `p̃ = p + Σ_s y_s A^(s)(q)` and compares with the canonical table, in
/// which `{y_s, y_k}` vanishes as it does at an invariant element.
pub fn shifted_canonicality_residual(
    gauge: &NonAbelianGaugeField,
    z: &[f64],
) -> Result<CanonicalityReport, ReductionError> {
    let st = ExtendedStructure { gauge: gauge.clone() };
    let n = st.dim();
    if z.len() != n {
        return Err(ReductionError::Dimension { expected: n, found: z.len() });
    }
    if z.iter().any(|x| !x.is_finite()) {
        return Err(ReductionError::NonFinite("phase-space point".into()));
    }
    let (q, m) = st.parts(z);
    let y0 = 6 + m;
    let a = gauge.potential(&q)?;
    let jac = gauge.jacobian(&q)?;
    let pi = st.matrix(z);
    let mut t = DMatrix::identity(n, n);
    for i in 0..3 {
        for k in 0..3 {
            t[(3 + i, k)] = (0..m).map(|s| z[y0 + s] * jac[s][(k, i)]).sum();
        }
        for s in 0..m {
            t[(3 + i, y0 + s)] = a[s][i];
        }
    }
    let shifted = &t * pi * t.transpose();
    let mut target = DMatrix::zeros(n, n);
    for i in 0..3 {
        target[(3 + i, i)] = 1.0;
        target[(i, 3 + i)] = -1.0;
    }
    for s in 0..m {
        target[(y0 + s, 6 + s)] = 1.0;
        target[(6 + s, y0 + s)] = -1.0;
    }
    let deviation = shifted - target;
    let ranges = [("q", 0..3), ("p", 3..6), ("u", 6..6 + m), ("y", y0..y0 + m)];
    let mut blocks = Vec::new();
    for (ai, (an, ar)) in ranges.iter().enumerate() {
        for (bn, br) in ranges.iter().skip(ai) {
            let mut v = 0.0f64;
            for a in ar.clone() {
                for b in br.clone() {
                    v = v.max(deviation[(a, b)].abs());
                }
            }
            blocks.push((format!("{an}{bn}"), v));
        }
    }
    let max = deviation.amax();
    Ok(CanonicalityReport { max, blocks, deviation })
}
