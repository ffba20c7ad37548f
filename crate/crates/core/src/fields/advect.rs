use crate::error::FieldError;
use crate::particle::Vec3;

pub trait VelocityField {
    fn velocity(&self, t: f64, x: &Vec3) -> Vec3;

    /// `∇·u`, by central differences unless overridden.
    fn divergence(&self, t: f64, x: &Vec3) -> f64 {
        let mut d = 0.0;
        for axis in 0..3 {
            let h = 1e-5 * x[axis].abs().max(1.0);
            let mut p = *x;
            let mut m = *x;
            p[axis] += h;
            m[axis] -= h;
            d += (self.velocity(t, &p)[axis] - self.velocity(t, &m)[axis]) / (2.0 * h);
        }
        d
    }
}

impl<F: Fn(f64, &Vec3) -> Vec3> VelocityField for F {
    fn velocity(&self, t: f64, x: &Vec3) -> Vec3 {
        self(t, x)
    }
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxDomain {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl BoxDomain {
    pub fn new(lo: Vec3, hi: Vec3) -> Result<Self, FieldError> {
        if (0..3).any(|i| !(lo[i] < hi[i]) || !lo[i].is_finite() || !hi[i].is_finite()) {
            return Err(FieldError::InvalidParameter(format!("empty box {lo:?} .. {hi:?}")));
        }
        Ok(BoxDomain { lo, hi })
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        (0..3).all(|i| x[i] >= self.lo[i] && x[i] <= self.hi[i])
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Quadrature nodes carried by the flow; `weight` already includes the
/// Jacobian of the flow map.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeCloud {
    pub x: Vec<Vec3>,
    pub weight: Vec<f64>,
}

impl NodeCloud {
    /// Tensor-product Gauss–Legendre rule on a box.
    pub fn tensor(domain: &BoxDomain, n: usize) -> Result<Self, FieldError> {
        if n == 0 {
            return Err(FieldError::InvalidParameter("need at least one node per axis".into()));
        }
        let (g, gw) = gauss_legendre(n);
        let half = (domain.hi - domain.lo) * 0.5;
        let mid = (domain.hi + domain.lo) * 0.5;
        let mut x = Vec::with_capacity(n * n * n);
        let mut weight = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    x.push(mid + Vec3::new(g[i] * half.x, g[j] * half.y, g[k] * half.z));
                    weight.push(gw[i] * gw[j] * gw[k] * half.x * half.y * half.z);
                }
            }
        }
        Ok(NodeCloud { x, weight })
    }

    pub fn integrate(&self, t: f64, f: &dyn Fn(f64, &Vec3) -> f64) -> f64 {
        self.x.iter().zip(&self.weight).map(|(x, w)| w * f(t, x)).sum()
    }

    /// One RK4 step of `dx/dt = u`, `dJ/dt = (∇·u) J` for every node.
    pub fn advance(&mut self, u: &dyn VelocityField, t: f64, dt: f64) {
        let rate = |t: f64, x: &Vec3, j: f64| (u.velocity(t, x), u.divergence(t, x) * j);
        let half = 0.5 * dt;
        for (x, w) in self.x.iter_mut().zip(self.weight.iter_mut()) {
            let (x0, j0) = (*x, *w);
            let (v1, d1) = rate(t, &x0, j0);
            let (v2, d2) = rate(t + half, &(x0 + v1 * half), j0 + d1 * half);
            let (v3, d3) = rate(t + half, &(x0 + v2 * half), j0 + d2 * half);
            let (v4, d4) = rate(t + dt, &(x0 + v3 * dt), j0 + d3 * dt);
            *x = x0 + (v1 + (v2 + v3) * 2.0 + v4) * (dt / 6.0);
            *w = j0 + (d1 + 2.0 * (d2 + d3) + d4) * (dt / 6.0);
        }
    }
}

/// `∫_{Ω_t} f d³r` at `steps + 1` equally spaced times, where `Ω_t` is the
/// image of `omega0` under the flow of `u`. Nodes leaving `region` abort.
pub fn advected_integral(
    f: &dyn Fn(f64, &Vec3) -> f64,
    u: &dyn VelocityField,
    omega0: &BoxDomain,
    nodes_per_axis: usize,
    t_range: (f64, f64),
    steps: usize,
    region: Option<&BoxDomain>,
) -> Result<Vec<(f64, f64)>, FieldError> {
    let (t0, t1) = t_range;
    if steps == 0 || !(t0.is_finite() && t1.is_finite()) {
        return Err(FieldError::InvalidParameter("need a finite time range and at least one step".into()));
    }
    let mut cloud = NodeCloud::tensor(omega0, nodes_per_axis)?;
    let dt = (t1 - t0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    for s in 0..=steps {
        let t = t0 + dt * s as f64;
        if s > 0 {
            cloud.advance(u, t - dt, dt);
        }
        if let Some(reg) = region {
            if cloud.x.iter().any(|x| !reg.contains(x)) {
                return Err(FieldError::NodeEscaped { t });
            }
        }
        out.push((t, cloud.integrate(t, f)));
    }
    Ok(out)
}
