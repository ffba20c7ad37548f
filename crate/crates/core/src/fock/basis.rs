use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::FockError;

/// Largest basis [`FockBasis::new`] will build.
pub const MAX_BASIS: usize = 5_000_000;

/// Occupation states `n` of `s` modes with `Σ n_j ≤ N`.
///
/// States are ordered by total occupation, then lexicographically with the
/// first mode most significant and descending, so the vacuum sits at 0 and
/// the one-particle state of mode `j` at `1 + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockBasis {
    s: usize,
    n_max: u32,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisInfo {
    pub modes: usize,
    pub max_occupation: u32,
    pub size: usize,
}

/// `C(n + s, s)`, saturating.
pub fn basis_size(s: usize, n_max: u32) -> usize {
    let mut c: u128 = 1;
    for k in 1..=s as u128 {
        c = c * (n_max as u128 + k) / k;
        if c > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    c as usize
}

fn shell(s: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == s {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        shell(s, total - first, prefix, out);
        prefix.pop();
    }
}

impl FockBasis {
    pub fn new(s: usize, n_max: u32) -> Result<Arc<Self>, FockError> {
        if s == 0 {
            return Err(FockError::InvalidParameter("need at least one mode".into()));
        }
        let size = basis_size(s, n_max);
        if size > MAX_BASIS {
            return Err(FockError::BasisTooLarge { size, limit: MAX_BASIS });
        }
        let mut states = Vec::with_capacity(size);
        for total in 0..=n_max {
            shell(s, total, &mut Vec::with_capacity(s), &mut states);
        }
        let index = states.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        Ok(Arc::new(FockBasis { s, n_max, states, index }))
    }

    pub fn modes(&self) -> usize {
        self.s
    }

    pub fn max_occupation(&self) -> u32 {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn position(&self, n: &[u32]) -> Option<usize> {
        self.index.get(n).copied()
    }

    pub fn total(&self, i: usize) -> u32 {
        self.states[i].iter().sum()
    }

    pub fn one_particle(&self, j: usize) -> Result<usize, FockError> {
        self.check_mode(j)?;
        if self.n_max == 0 {
            return Err(FockError::InvalidParameter("basis has no one-particle shell".into()));
        }
        Ok(1 + j)
    }

    pub(crate) fn check_mode(&self, j: usize) -> Result<(), FockError> {
        if j >= self.s {
            return Err(FockError::ModeOutOfRange { mode: j, modes: self.s });
        }
        Ok(())
    }

    pub fn info(&self) -> BasisInfo {
        BasisInfo { modes: self.s, max_occupation: self.n_max, size: self.len() }
    }
}

/// Coefficients of a state on a truncated basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedFockVector {
    pub basis: Arc<FockBasis>,
    pub coeffs: Vec<Complex64>,
}

impl TruncatedFockVector {
    pub fn new(basis: Arc<FockBasis>, coeffs: Vec<Complex64>) -> Result<Self, FockError> {
        if coeffs.len() != basis.len() {
            return Err(FockError::Dimension { expected: basis.len(), found: coeffs.len() });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(FockError::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(TruncatedFockVector { basis, coeffs })
    }

    pub fn vacuum(basis: Arc<FockBasis>) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
        coeffs[0] = Complex64::new(1.0, 0.0);
        TruncatedFockVector { basis, coeffs }
    }

    /// The basis vector `|n⟩`.
    pub fn basis_state(basis: Arc<FockBasis>, n: &[u32]) -> Result<Self, FockError> {
        let i = basis
            .position(n)
            .ok_or_else(|| FockError::InvalidParameter(format!("occupation {n:?} is not in the basis")))?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
        coeffs[i] = Complex64::new(1.0, 0.0);
        Ok(TruncatedFockVector { basis, coeffs })
    }

    pub fn vacuum_amplitude(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn norm_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &TruncatedFockVector) -> Result<Complex64, FockError> {
        if self.basis != other.basis {
            return Err(FockError::BasisMismatch);
        }
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum())
    }
}

/// `exp{(u, a⁺)}|Ω⟩` on the truncated basis, without normalization:
/// the coefficient on `|n⟩` is `Π_j u_j^n_j / √(n_j!)`.
pub fn coherent_embed(u: &[Complex64], basis: &Arc<FockBasis>) -> Result<TruncatedFockVector, FockError> {
    if u.len() != basis.modes() {
        return Err(FockError::Dimension { expected: basis.modes(), found: u.len() });
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(FockError::InvalidParameter("non-finite coherent parameter".into()));
    }
    let n_max = basis.max_occupation() as usize;
    // table[j][k] = u_j^k / √(k!)
    let table: Vec<Vec<Complex64>> = u
        .iter()
        .map(|&uj| {
            let mut row = Vec::with_capacity(n_max + 1);
            let mut c = Complex64::new(1.0, 0.0);
            row.push(c);
            for k in 1..=n_max {
                c = c * uj / (k as f64).sqrt();
                row.push(c);
            }
            row
        })
        .collect();
    let coeffs = basis
        .states()
        .iter()
        .map(|n| n.iter().zip(&table).fold(Complex64::new(1.0, 0.0), |acc, (&k, row)| acc * row[k as usize]))
        .collect();
    Ok(TruncatedFockVector { basis: basis.clone(), coeffs })
}
