use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{FockBasis, TruncatedFockVector};
use crate::error::FockError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-compressed complex matrix on a Fock basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub basis: Arc<FockBasis>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseMatrix {
    /// Duplicate entries are summed; exact zeros are dropped.
    pub fn from_triplets(basis: Arc<FockBasis>, mut entries: Vec<(usize, usize, Complex64)>) -> Self {
        let n = basis.len();
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if (last.0, last.1) == (r, c) => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != ZERO);
        let mut row_ptr = vec![0; n + 1];
        for e in &merged {
            row_ptr[e.0 + 1] += 1;
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        let cols = merged.iter().map(|e| e.1).collect();
        let vals = merged.iter().map(|e| e.2).collect();
        SparseMatrix { basis, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.cols[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.row(r).find(|&(k, _)| k == c).map_or(ZERO, |(_, v)| v)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let f = |r: usize| self.row(r).fold(ZERO, |acc, (c, v)| acc + v * x[c]);
        if self.dim() >= 2048 {
            (0..self.dim()).into_par_iter().map(f).collect()
        } else {
            (0..self.dim()).map(f).collect()
        }
    }

    pub fn apply(&self, state: &TruncatedFockVector) -> Result<TruncatedFockVector, FockError> {
        if state.basis != self.basis {
            return Err(FockError::BasisMismatch);
        }
        Ok(TruncatedFockVector { basis: self.basis.clone(), coeffs: self.matvec(&state.coeffs) })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> SparseMatrix {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.dim() {
            t.extend(self.row(r).map(|(c, v)| (c, r, v.conj())));
        }
        SparseMatrix::from_triplets(self.basis.clone(), t)
    }

    pub fn scale(&self, s: Complex64) -> SparseMatrix {
        let mut m = self.clone();
        m.vals.iter_mut().for_each(|v| *v *= s);
        m
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut d = DMatrix::from_element(self.dim(), self.dim(), ZERO);
        for r in 0..self.dim() {
            for (c, v) in self.row(r) {
                d[(r, c)] = v;
            }
        }
        d
    }

    /// Largest absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut col = vec![0.0; self.dim()];
        for (&c, v) in self.cols.iter().zip(&self.vals) {
            col[c] += v.norm();
        }
        col.into_iter().fold(0.0, f64::max)
    }
}

/// `(a_j, a_j⁺)` on the basis. `a_j⁺` sends the top shell to zero.
pub fn ladder_matrices(basis: &Arc<FockBasis>, j: usize) -> Result<(SparseMatrix, SparseMatrix), FockError> {
    basis.check_mode(j)?;
    let mut down = Vec::new();
    let mut up = Vec::new();
    let mut m = vec![0u32; basis.modes()];
    for (c, n) in basis.states().iter().enumerate() {
        m.copy_from_slice(n);
        if n[j] > 0 {
            m[j] = n[j] - 1;
            let r = basis.position(&m).expect("lower state in basis");
            down.push((r, c, Complex64::new((n[j] as f64).sqrt(), 0.0)));
        }
        m[j] = n[j] + 1;
        if let Some(r) = basis.position(&m) {
            up.push((r, c, Complex64::new(((n[j] + 1) as f64).sqrt(), 0.0)));
        }
    }
    Ok((SparseMatrix::from_triplets(basis.clone(), down), SparseMatrix::from_triplets(basis.clone(), up)))
}

/// The density `ρ_j = a_j⁺ a_j`.
pub fn number_operator(basis: &Arc<FockBasis>, j: usize) -> Result<SparseMatrix, FockError> {
    basis.check_mode(j)?;
    let t = basis.states().iter().enumerate().map(|(i, n)| (i, i, Complex64::new(n[j] as f64, 0.0))).collect();
    Ok(SparseMatrix::from_triplets(basis.clone(), t))
}

/// `coefficient · u^powers`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coefficient: Complex64,
    pub powers: Vec<u32>,
}

impl Monomial {
    pub fn new(coefficient: impl Into<Complex64>, powers: Vec<u32>) -> Self {
        Monomial { coefficient: coefficient.into(), powers }
    }

    pub fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }

    pub fn eval(&self, u: &[Complex64]) -> Complex64 {
        self.powers.iter().zip(u).fold(self.coefficient, |acc, (&p, &x)| acc * x.powu(p))
    }
}

/// `du_j/dt = K_j(u)` with polynomial right-hand sides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialSystem {
    pub s: usize,
    pub rhs: Vec<Vec<Monomial>>,
}

impl PolynomialSystem {
    pub fn new(s: usize, rhs: Vec<Vec<Monomial>>) -> Result<Self, FockError> {
        let sys = PolynomialSystem { s, rhs };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<(), FockError> {
        if self.s == 0 || self.rhs.len() != self.s {
            return Err(FockError::Dimension { expected: self.s.max(1), found: self.rhs.len() });
        }
        for m in self.rhs.iter().flatten() {
            if m.powers.len() != self.s {
                return Err(FockError::Dimension { expected: self.s, found: m.powers.len() });
            }
            if !m.coefficient.is_finite() {
                return Err(FockError::InvalidParameter("non-finite coefficient".into()));
            }
        }
        Ok(())
    }

    /// `du_j/dt = λ_j u_j`
    pub fn linear(lambda: &[Complex64]) -> Self {
        let s = lambda.len();
        let rhs = (0..s)
            .map(|j| {
                let mut p = vec![0; s];
                p[j] = 1;
                vec![Monomial::new(lambda[j], p)]
            })
            .collect();
        PolynomialSystem { s, rhs }
    }

    /// `du/dt = u - u²`
    pub fn logistic() -> Self {
        PolynomialSystem { s: 1, rhs: vec![vec![Monomial::new(1.0, vec![1]), Monomial::new(-1.0, vec![2])]] }
    }

    pub fn degree(&self) -> u32 {
        self.rhs.iter().flatten().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.rhs.iter().map(|k| k.iter().map(|m| m.eval(u)).sum()).collect()
    }

    /// Classical RK4 on `u` itself, `steps` equal steps up to `t`.
    pub fn integrate(&self, u0: &[Complex64], t: f64, steps: usize) -> Vec<Complex64> {
        let dt = t / steps.max(1) as f64;
        let axpy = |u: &[Complex64], k: &[Complex64], a: f64| -> Vec<Complex64> {
            u.iter().zip(k).map(|(x, y)| x + y * a).collect()
        };
        let mut u = u0.to_vec();
        for _ in 0..steps {
            let k1 = self.eval(&u);
            let k2 = self.eval(&axpy(&u, &k1, 0.5 * dt));
            let k3 = self.eval(&axpy(&u, &k2, 0.5 * dt));
            let k4 = self.eval(&axpy(&u, &k3, dt));
            for j in 0..u.len() {
                u[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (dt / 6.0);
            }
        }
        u
    }
}

/// `(creations α, annihilations β, coefficient)`, read as `c · (a⁺)^α a^β`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalOrderedTerm {
    pub creation: Vec<u32>,
    pub annihilation: Vec<u32>,
    pub coefficient: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalOrderedOperator {
    pub s: usize,
    pub terms: Vec<NormalOrderedTerm>,
}

/// `√(hi! / lo!)`
fn falling_sqrt(hi: u32, lo: u32) -> f64 {
    (lo + 1..=hi).fold(1.0, |acc, k| acc * (k as f64).sqrt())
}

impl NormalOrderedOperator {
    /// `K̂ = Σ_j a_j⁺ K_j(a)`
    pub fn liouvillian(system: &PolynomialSystem) -> Result<Self, FockError> {
        system.validate()?;
        let s = system.s;
        let mut terms = Vec::new();
        for (j, k) in system.rhs.iter().enumerate() {
            for m in k {
                let mut creation = vec![0; s];
                creation[j] = 1;
                terms.push(NormalOrderedTerm { creation, annihilation: m.powers.clone(), coefficient: m.coefficient });
            }
        }
        Ok(NormalOrderedOperator { s, terms })
    }

    pub fn matrix(&self, basis: &Arc<FockBasis>) -> Result<SparseMatrix, FockError> {
        if self.s != basis.modes() {
            return Err(FockError::Dimension { expected: basis.modes(), found: self.s });
        }
        for t in &self.terms {
            if t.creation.len() != self.s || t.annihilation.len() != self.s {
                return Err(FockError::Dimension {
                    expected: self.s,
                    found: t.creation.len().min(t.annihilation.len()),
                });
            }
        }
        let entries: Vec<(usize, usize, Complex64)> = basis
            .states()
            .par_iter()
            .enumerate()
            .flat_map_iter(|(col, n)| {
                self.terms.iter().filter_map(move |t| {
                    if n.iter().zip(&t.annihilation).any(|(a, b)| a < b) {
                        return None;
                    }
                    let mut amp = 1.0;
                    let m: Vec<u32> = (0..n.len())
                        .map(|k| {
                            let lo = n[k] - t.annihilation[k];
                            let hi = lo + t.creation[k];
                            amp *= falling_sqrt(n[k], lo) * falling_sqrt(hi, lo);
                            hi
                        })
                        .collect();
                    let row = basis.position(&m)?;
                    Some((row, col, t.coefficient * amp))
                })
            })
            .collect();
        Ok(SparseMatrix::from_triplets(basis.clone(), entries))
    }
}

/// The matrix of `K̂` for `system` on `basis`.
pub fn liouvillian_build(system: &PolynomialSystem, basis: &Arc<FockBasis>) -> Result<SparseMatrix, FockError> {
    NormalOrderedOperator::liouvillian(system)?.matrix(basis)
}
