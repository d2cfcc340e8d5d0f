//! Symmetric tridiagonal eigenproblems.
//!
//! Eigenvalues come from Sturm-sequence bisection: the LDLᵀ pivot signs of
//! T − xI count the eigenvalues below x, and that count is bisected inside
//! the Gershgorin bounds. Only the k lowest eigenvalues are ever needed
//! here, the method is branch-deterministic, and it needs no external
//! linear-algebra dependency. Eigenvectors come from inverse iteration with
//! a partially pivoted tridiagonal LU factorization.

use crate::error::{Error, Result};

const MAX_BISECT_ITER: usize = 200;
const INVERSE_ITERATIONS: usize = 4;

/// Symmetric tridiagonal matrix: `diag` of length n, `off` of length n − 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::domain("matrix must have at least one row"));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::domain(format!(
                "off-diagonal length {} does not match dimension {}",
                off.len(),
                diag.len()
            )));
        }
        Ok(SymTridiag { diag, off })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Interval guaranteed to contain every eigenvalue.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i < n - 1 {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via the signs
    /// of the LDLᵀ pivots of T − xI).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin =
            f64::MIN_POSITIVE * self.off.iter().fold(1.0f64, |acc, &e| acc.max(e * e));
        let mut count = 0;
        let mut d = 1.0f64;
        for i in 0..self.n() {
            let off2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            d = self.diag[i] - x - off2 / d;
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k` smallest eigenvalues in ascending order, each bisected to
    /// relative machine precision. Deterministic.
    pub fn lowest_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        if k == 0 || k > self.n() {
            return Err(Error::domain(format!(
                "requested {k} eigenvalues of a {}x{0} matrix",
                self.n()
            )));
        }
        let (glo, ghi) = self.gershgorin();
        let span = ghi - glo;
        // upper endpoint strictly above every eigenvalue
        let top = ghi + span * 1e-12 + f64::MIN_POSITIVE;
        let mut out: Vec<f64> = Vec::with_capacity(k);
        for j in 0..k {
            // invariant: count(lo) <= j < count(hi)
            let mut lo = glo;
            if let Some(&prev) = out.last() {
                // previous eigenvalue is a tighter floor unless a cluster
                // pushed its midpoint past the j-th eigenvalue
                if self.count_below(prev) <= j {
                    lo = prev;
                }
            }
            let mut hi = top;
            let mut iter = 0;
            while hi - lo > (lo.abs() + hi.abs()) * f64::EPSILON && iter < MAX_BISECT_ITER {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.count_below(mid) <= j {
                    lo = mid;
                } else {
                    hi = mid;
                }
                iter += 1;
            }
            out.push(0.5 * (lo + hi));
        }
        Ok(out)
    }

    /// The `k` smallest eigenvalues with their orthonormal eigenvectors
    /// (unit Euclidean norm, first dominant component positive).
    pub fn lowest_eigenpairs(&self, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let values = self.lowest_eigenvalues(k)?;
        let n = self.n();
        let (glo, ghi) = self.gershgorin();
        let scale = (ghi - glo).max(glo.abs()).max(ghi.abs()).max(f64::MIN_POSITIVE);
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
        for &lambda in &values {
            // shift slightly off the eigenvalue so the factorization stays regular
            let factor = TridiagFactor::new(self, lambda - scale * 1e-13);
            let mut v = seed_vector(n);
            for _ in 0..INVERSE_ITERATIONS {
                factor.solve(&mut v);
                orthogonalize(&mut v, &vectors);
                if !normalize(&mut v) {
                    // start vector annihilated; restart from a shifted seed
                    v = seed_vector(n);
                    v[0] += 1.0;
                    normalize(&mut v);
                }
            }
            orthogonalize(&mut v, &vectors);
            normalize(&mut v);
            fix_sign(&mut v);
            vectors.push(v);
        }
        Ok((values, vectors))
    }
}

/// Deterministic dense start vector with no special symmetry (a fixed
/// linear-congruential sequence), so inverse iteration cannot stall on a
/// parity-symmetric matrix.
fn seed_vector(n: usize) -> Vec<f64> {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    (0..n)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for u in basis {
        let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
        for (vi, ui) in v.iter_mut().zip(u) {
            *vi -= dot * ui;
        }
    }
}

fn normalize(v: &mut [f64]) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < f64::MIN_POSITIVE {
        return false;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    true
}

fn fix_sign(v: &mut [f64]) {
    let mut imax = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[imax].abs() {
            imax = i;
        }
    }
    if v[imax] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// LU factorization of T − σI with partial pivoting. Pivoting introduces a
/// second superdiagonal, so U carries three bands.
struct TridiagFactor {
    du: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagFactor {
    fn new(t: &SymTridiag, sigma: f64) -> Self {
        let n = t.n();
        let maxabs =
            t.diag.iter().chain(t.off.iter()).fold(0.0f64, |a, &x| a.max(x.abs()));
        // pivots below this are indistinguishable from an exactly singular shift
        let pivmin = (maxabs * f64::EPSILON * f64::EPSILON).max(f64::MIN_POSITIVE);
        let mut du = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n];
        let mut swapped = vec![false; n];
        du[0] = t.diag[0] - sigma;
        if n > 1 {
            u1[0] = t.off[0];
        }
        for i in 0..n.saturating_sub(1) {
            let lower = t.off[i];
            let next_diag = t.diag[i + 1] - sigma;
            let next_upper = if i + 1 < n - 1 { t.off[i + 1] } else { 0.0 };
            if du[i].abs() >= lower.abs() {
                let pivot = if du[i].abs() < pivmin { pivmin } else { du[i] };
                let m = lower / pivot;
                mult[i] = m;
                du[i + 1] = next_diag - m * u1[i];
                u1[i + 1] = next_upper - m * u2[i];
                u2[i + 1] = 0.0;
            } else {
                // swap rows i and i+1
                let m = du[i] / lower;
                mult[i] = m;
                swapped[i] = true;
                let (row_u1, row_u2) = (u1[i], u2[i]);
                du[i] = lower;
                u1[i] = next_diag;
                u2[i] = next_upper;
                du[i + 1] = row_u1 - m * next_diag;
                u1[i + 1] = row_u2 - m * next_upper;
                u2[i + 1] = 0.0;
            }
        }
        if du[n - 1].abs() < pivmin {
            du[n - 1] = pivmin;
        }
        TridiagFactor { du, u1, u2, mult, swapped }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.mult[i] * x[i];
        }
        x[n - 1] /= self.du[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - self.u1[n - 2] * x[n - 1]) / self.du[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.u1[i] * x[i + 1] - self.u2[i] * x[i + 2]) / self.du[i];
        }
    }
}
