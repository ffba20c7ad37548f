use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::FockError;

fn check(rho_bar: f64, cell: f64) -> Result<(), FockError> {
    if !(rho_bar > 0.0 && rho_bar.is_finite()) || !(cell > 0.0 && cell.is_finite()) {
        return Err(FockError::InvalidParameter(format!("need rho_bar > 0 and cell > 0, got {rho_bar}, {cell}")));
    }
    Ok(())
}

/// Poissonian generating functional `L(f) = exp(ρ̄ Σ_x (e^{i f(x)} - 1) · cell)`.
pub fn bogolubov_poisson(f: &[f64], rho_bar: f64, cell: f64) -> Result<Complex64, FockError> {
    check(rho_bar, cell)?;
    if f.iter().any(|x| !x.is_finite()) {
        return Err(FockError::InvalidParameter("non-finite test function".into()));
    }
    let s: Complex64 = f.iter().map(|&x| Complex64::new(x.cos() - 1.0, x.sin())).sum();
    Ok((s * (rho_bar * cell)).exp())
}

/// `G[k][j] = L(f_k - f_j)`, Hermitian for a real functional.
pub fn gram_matrix(fs: &[Vec<f64>], rho_bar: f64, cell: f64) -> Result<DMatrix<Complex64>, FockError> {
    let n = fs.len();
    if let Some(bad) = fs.iter().find(|f| f.len() != fs[0].len()) {
        return Err(FockError::Dimension { expected: fs[0].len(), found: bad.len() });
    }
    let mut g = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for k in 0..n {
        for j in 0..n {
            let d: Vec<f64> = fs[k].iter().zip(&fs[j]).map(|(a, b)| a - b).collect();
            g[(k, j)] = bogolubov_poisson(&d, rho_bar, cell)?;
        }
    }
    Ok(g)
}

/// Smallest eigenvalue of the Hermitian part of the Gram matrix.
pub fn gram_min_eigenvalue(fs: &[Vec<f64>], rho_bar: f64, cell: f64) -> Result<f64, FockError> {
    if fs.is_empty() {
        return Err(FockError::InvalidParameter("no test functions".into()));
    }
    let g = gram_matrix(fs, rho_bar, cell)?;
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}

/// Normal-ordered moment at distinct lattice sites,
/// `(-i)^n ∂ⁿL / ∂f(x_1)…∂f(x_n) |_{f=0} / cellⁿ`, by central mixed
/// differences with step `eps`.
pub fn normal_ordered_moment(
    sites: &[usize],
    lattice: usize,
    rho_bar: f64,
    cell: f64,
    eps: f64,
) -> Result<Complex64, FockError> {
    check(rho_bar, cell)?;
    let n = sites.len();
    if n == 0 || n > 16 {
        return Err(FockError::InvalidParameter(format!("moment order must lie in 1..=16, got {n}")));
    }
    if sites.iter().any(|&x| x >= lattice) {
        return Err(FockError::InvalidParameter("site outside the lattice".into()));
    }
    let mut sorted = sites.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != n {
        return Err(FockError::InvalidParameter("sites must be distinct".into()));
    }
    if !(eps > 0.0) {
        return Err(FockError::InvalidParameter(format!("step must be positive, got {eps}")));
    }
    let mut f = vec![0.0; lattice];
    let mut acc = Complex64::new(0.0, 0.0);
    for mask in 0u32..(1 << n) {
        let mut sign = 1.0;
        for (b, &x) in sites.iter().enumerate() {
            if mask >> b & 1 == 1 {
                f[x] = -eps;
                sign = -sign;
            } else {
                f[x] = eps;
            }
        }
        acc += bogolubov_poisson(&f, rho_bar, cell)? * sign;
    }
    let d = acc / (2.0 * eps).powi(n as i32);
    Ok(d * Complex64::new(0.0, -1.0).powu(n as u32) / cell.powi(n as i32))
}
