use crate::error::FieldError;
use crate::particle::Vec3;

/// Worldline of a point source.
pub trait SourceTrajectory {
    fn position(&self, t: f64) -> Vec3;
    fn velocity(&self, t: f64) -> Vec3;
    /// Upper bound of `|u_f|` along the whole trajectory.
    fn max_speed(&self) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformMotion {
    pub r0: Vec3,
    pub u: Vec3,
}

impl SourceTrajectory for UniformMotion {
    fn position(&self, t: f64) -> Vec3 {
        self.r0 + self.u * t
    }

    fn velocity(&self, _t: f64) -> Vec3 {
        self.u
    }

    fn max_speed(&self) -> f64 {
        self.u.norm()
    }
}

/// Circle in the plane `z = center.z`, angle `phase + omega t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircularOrbit {
    pub center: Vec3,
    pub radius: f64,
    pub omega: f64,
    pub phase: f64,
}

impl SourceTrajectory for CircularOrbit {
    fn position(&self, t: f64) -> Vec3 {
        let a = self.phase + self.omega * t;
        self.center + Vec3::new(a.cos(), a.sin(), 0.0) * self.radius
    }

    fn velocity(&self, t: f64) -> Vec3 {
        let a = self.phase + self.omega * t;
        Vec3::new(-a.sin(), a.cos(), 0.0) * (self.radius * self.omega)
    }

    fn max_speed(&self) -> f64 {
        (self.radius * self.omega).abs()
    }
}

const TIME_TOL: f64 = 1e-12;

/// Solves `|r - r_f(t')| = c (t - t')` for `t' ≤ t`.
pub fn retarded_time(traj: &dyn SourceTrajectory, t: f64, r: &Vec3, c: f64) -> Result<f64, FieldError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(FieldError::InvalidParameter(format!("light speed {c}")));
    }
    let v = traj.max_speed();
    if !(v < c) {
        return Err(FieldError::Superluminal { speed: v, c });
    }
    let g = |tp: f64| (r - traj.position(tp)).norm() - c * (t - tp);
    let mut hi = t;
    let g_hi = g(hi);
    if !(g_hi > 0.0) {
        return if g_hi == 0.0 {
            Err(FieldError::OnTrajectory)
        } else {
            Err(FieldError::NoRetardedRoot { window: 0.0 })
        };
    }
    let mut window = g_hi / c;
    let mut lo = t - window;
    let mut g_lo = g(lo);
    let mut tries = 0;
    while g_lo > 0.0 {
        tries += 1;
        window *= 2.0;
        if tries > 60 || !window.is_finite() {
            return Err(FieldError::NoRetardedRoot { window });
        }
        hi = lo;
        lo = t - window;
        g_lo = g(lo);
    }
    if !g_lo.is_finite() {
        return Err(FieldError::NoRetardedRoot { window });
    }
    let tol = TIME_TOL * t.abs().max(1.0);
    let mut g_hi = g(hi);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm > 0.0 {
            hi = mid;
            g_hi = gm;
        } else {
            lo = mid;
            g_lo = gm;
        }
    }
    // final secant step inside the bracket
    let denom = g_hi - g_lo;
    if denom > 0.0 {
        let s = lo - g_lo * (hi - lo) / denom;
        if s >= lo && s <= hi {
            return Ok(s);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Retarded point-charge potentials
/// `φ = ξ_f / (R (1 - ⟨n, u_f/c⟩))`, `A = φ u_f / c`, evaluated at the
/// retarded time.
pub fn lienard_wiechert(
    traj: &dyn SourceTrajectory,
    xi_f: f64,
    t: f64,
    r: &Vec3,
    c: f64,
) -> Result<(f64, Vec3), FieldError> {
    let tr = retarded_time(traj, t, r, c)?;
    let d = r - traj.position(tr);
    let dist = d.norm();
    if dist == 0.0 {
        return Err(FieldError::OnTrajectory);
    }
    let beta = traj.velocity(tr) / c;
    let phi = xi_f / (dist - d.dot(&beta));
    Ok((phi, beta * phi))
}

/// Field of a charge in uniform motion written in terms of its present
/// position: `φ = ξ_f γ / |R'|` with `R'` the rest-frame separation.
pub fn boosted_coulomb(xi_f: f64, r_f: &Vec3, u: &Vec3, r: &Vec3, c: f64) -> Result<(f64, Vec3), FieldError> {
    let speed = u.norm();
    if !(speed < c) {
        return Err(FieldError::Superluminal { speed, c });
    }
    let d = r - r_f;
    let gamma = 1.0 / (1.0 - (speed / c).powi(2)).sqrt();
    let along = if speed > 0.0 { d.dot(u) / speed } else { 0.0 };
    let rest2 = d.norm_squared() + (gamma * gamma - 1.0) * along * along;
    if rest2 == 0.0 {
        return Err(FieldError::OnTrajectory);
    }
    let phi = xi_f * gamma / rest2.sqrt();
    Ok((phi, u * (phi / c)))
}
