use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::diff5;
use crate::error::ReductionError;

/// Phase space of dimension `dim` with bracket matrix `Π_ab = {z_a, z_b}`.
pub trait PoissonStructure: Sync {
    fn dim(&self) -> usize;
    fn matrix(&self, z: &[f64]) -> DMatrix<f64>;
}

/// `z = (q^1..q^n, p_1..p_n)` with `{p_j, q^i} = δ_j^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub n: usize,
}

impl PoissonStructure for Canonical {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn matrix(&self, _z: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(n + i, i)] = 1.0;
            m[(i, n + i)] = -1.0;
        }
        m
    }
}

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Scalar function on phase space. Without an analytic gradient, central
/// differences with step `1e-5 · scale` are used.
#[derive(Clone)]
pub struct Observable {
    f: ScalarFn,
    grad: Option<GradFn>,
    scale: f64,
}

impl std::fmt::Debug for Observable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Observable")
            .field("analytic_gradient", &self.grad.is_some())
            .field("scale", &self.scale)
            .finish()
    }
}

impl Observable {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Observable { f: Arc::new(f), grad: None, scale: 1.0 }
    }

    pub fn with_gradient(
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Observable { f: Arc::new(f), grad: Some(Arc::new(grad)), scale: 1.0 }
    }

    /// The coordinate function `z ↦ z_i`.
    pub fn coordinate(i: usize) -> Self {
        Observable::with_gradient(
            move |z| z[i],
            move |z| {
                let mut g = vec![0.0; z.len()];
                g[i] = 1.0;
                g
            },
        )
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        (self.f)(z)
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        match &self.grad {
            Some(g) => g(z),
            None => self.fd_gradient(z),
        }
    }

    fn fd_gradient(&self, z: &[f64]) -> Vec<f64> {
        let h = 1e-5 * self.scale;
        let mut x = z.to_vec();
        (0..z.len())
            .map(|k| {
                x[k] = z[k] + h;
                let up = (self.f)(&x);
                x[k] = z[k] - h;
                let dn = (self.f)(&x);
                x[k] = z[k];
                (up - dn) / (2.0 * h)
            })
            .collect()
    }

    /// Largest deviation of the analytic gradient from central differences,
    /// relative to `max(1, |∇f|)`. Zero without an analytic gradient.
    pub fn gradient_deviation(&self, z: &[f64]) -> f64 {
        let Some(g) = &self.grad else { return 0.0 };
        let a = g(z);
        let fd = self.fd_gradient(z);
        let norm = a.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        a.iter().zip(&fd).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / norm
    }

    /// Pointwise product, with the Leibniz gradient when both factors have one.
    pub fn product(&self, other: &Observable) -> Observable {
        let (f, g) = (self.clone(), other.clone());
        let value = {
            let (f, g) = (f.clone(), g.clone());
            move |z: &[f64]| f.value(z) * g.value(z)
        };
        if self.has_gradient() && other.has_gradient() {
            Observable::with_gradient(value, move |z| {
                let (fv, gv) = (f.value(z), g.value(z));
                f.gradient(z).iter().zip(g.gradient(z)).map(|(a, b)| a * gv + fv * b).collect()
            })
        } else {
            Observable::new(value).with_scale(self.scale.min(other.scale))
        }
    }
}

fn check_point(s: &dyn PoissonStructure, z: &[f64]) -> Result<(), ReductionError> {
    if z.len() != s.dim() {
        return Err(ReductionError::Dimension { expected: s.dim(), found: z.len() });
    }
    if z.iter().any(|x| !x.is_finite()) {
        return Err(ReductionError::NonFinite("phase-space point".into()));
    }
    Ok(())
}

fn raw_bracket(s: &dyn PoissonStructure, f: &Observable, g: &Observable, z: &[f64]) -> Result<f64, ReductionError> {
    let (df, dg) = (f.gradient(z), g.gradient(z));
    if df.len() != z.len() || dg.len() != z.len() {
        return Err(ReductionError::Dimension { expected: z.len(), found: df.len().min(dg.len()) });
    }
    let m = s.matrix(z);
    let mut sum = 0.0;
    for a in 0..z.len() {
        if df[a] == 0.0 {
            continue;
        }
        for b in 0..z.len() {
            sum += df[a] * m[(a, b)] * dg[b];
        }
    }
    if !sum.is_finite() {
        return Err(ReductionError::NonFinite("bracket".into()));
    }
    Ok(sum)
}

/// `{f, g}(z) = ∇f(z)ᵀ Π(z) ∇g(z)`
pub fn bracket(s: &dyn PoissonStructure, f: &Observable, g: &Observable, z: &[f64]) -> Result<f64, ReductionError> {
    check_point(s, z)?;
    raw_bracket(s, f, g, z)
}

/// `{f, {g, h}}`, differentiating the inner bracket with a 5-point stencil.
fn outer(
    s: &dyn PoissonStructure,
    f: &Observable,
    g: &Observable,
    h: &Observable,
    z: &[f64],
) -> Result<f64, ReductionError> {
    let df = f.gradient(z);
    let m = s.matrix(z);
    let mut x = z.to_vec();
    let mut sum = 0.0;
    for b in 0..z.len() {
        let coeff: f64 = (0..z.len()).map(|a| df[a] * m[(a, b)]).sum();
        if coeff == 0.0 {
            continue;
        }
        let step = 1e-3 * z[b].abs().max(1.0);
        let mut err = None;
        let d = diff5(step, |e| {
            x[b] = z[b] + e;
            let v = raw_bracket(s, g, h, &x).unwrap_or_else(|e| {
                err = Some(e);
                f64::NAN
            });
            x[b] = z[b];
            v
        });
        if let Some(e) = err {
            return Err(e);
        }
        sum += coeff * d;
    }
    if !sum.is_finite() {
        return Err(ReductionError::NonFinite("nested difference".into()));
    }
    Ok(sum)
}

/// `{f,{g,h}} + {g,{h,f}} + {h,{f,g}}`
pub fn jacobi_residual(
    s: &dyn PoissonStructure,
    f: &Observable,
    g: &Observable,
    h: &Observable,
    z: &[f64],
) -> Result<f64, ReductionError> {
    check_point(s, z)?;
    Ok(outer(s, f, g, h, z)? + outer(s, g, h, f, z)? + outer(s, h, f, g, z)?)
}

/// Jacobi residual at every point, in point order.
pub fn jacobi_scan(
    s: &dyn PoissonStructure,
    f: &Observable,
    g: &Observable,
    h: &Observable,
    points: &[Vec<f64>],
) -> Result<Vec<f64>, ReductionError> {
    points.par_iter().map(|z| jacobi_residual(s, f, g, h, z)).collect()
}
