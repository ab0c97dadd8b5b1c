//! Symmetric tridiagonal eigenproblem: Sturm-sequence bisection for
//! eigenvalues and inverse iteration for eigenvectors.

/// Real symmetric tridiagonal matrix with diagonal `diag` and
/// sub/super-diagonal `off` (`off.len() == diag.len() - 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let pivmin = f64::EPSILON * self.norm_bound() * 1e-3;
        let mut count = 0;
        let mut q = self.diag[0] - sigma;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let e = self.off[i - 1];
            q = self.diag[i] - sigma - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// k-th smallest eigenvalue (0-based), bisected to full precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * self.norm_bound() * 4.0 + f64::MIN_POSITIVE;
        lo -= pad;
        hi += pad;
        bisect(lo, hi, |s| self.count_below(s) > k)
    }

    /// Lowest `n` eigenvalues in ascending order.
    pub fn lowest_eigenvalues(&self, n: usize) -> Vec<f64> {
        (0..n).map(|k| self.eigenvalue(k)).collect()
    }

    /// Solves `(T - shift) x = rhs` by Gaussian elimination with partial
    /// pivoting. Zero pivots are replaced by a tiny value so that the
    /// routine can be used at an eigenvalue (inverse iteration).
    fn shifted_solve(&self, shift: f64, rhs: &mut [f64]) {
        let n = self.len();
        let tiny = f64::EPSILON * self.norm_bound();
        // rows: (l, d, u, u2) after pivoting; u2 is fill-in.
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - shift).collect();
        let mut u: Vec<f64> = self.off.clone();
        let mut l: Vec<f64> = self.off.clone();
        let mut u2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= l[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let m = l[i] / d[i];
                l[i] = m;
                d[i + 1] -= m * u[i];
            } else {
                // swap rows i and i+1
                swapped[i] = true;
                let m = d[i] / l[i];
                d[i] = l[i];
                let tmp = d[i + 1];
                d[i + 1] = u[i] - m * tmp;
                u[i] = tmp;
                if i + 1 < n - 1 {
                    u2[i] = u[i + 1];
                    u[i + 1] *= -m;
                }
                l[i] = m;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        // forward substitution with L (and pivots)
        for i in 0..n - 1 {
            if swapped[i] {
                rhs.swap(i, i + 1);
            }
            rhs[i + 1] -= l[i] * rhs[i];
        }
        // back substitution with U
        rhs[n - 1] /= d[n - 1];
        if n >= 2 {
            rhs[n - 2] = (rhs[n - 2] - u[n - 2] * rhs[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            rhs[i] = (rhs[i] - u[i] * rhs[i + 1] - u2[i] * rhs[i + 2]) / d[i];
        }
    }

    /// Unit-norm eigenvector for eigenvalue `lambda`, orthogonalized
    /// against `previous` (which must be unit-norm).
    pub fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.len();
        // deterministic, non-symmetric start vector
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.1 * ((i as f64) * 0.754_877_666).sin())
            .collect();
        for _ in 0..4 {
            orthogonalize(&mut x, previous);
            normalize(&mut x);
            self.shifted_solve(lambda, &mut x);
        }
        orthogonalize(&mut x, previous);
        normalize(&mut x);
        x
    }
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let p: f64 = x.iter().zip(b).map(|(a, c)| a * c).sum();
        x.iter_mut().zip(b).for_each(|(a, c)| *a -= p * c);
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

/// Smallest `s` in `[lo, hi]` with `pred(s)` true, for a predicate that is
/// monotone false→true. Iterates until the bracket stops shrinking.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Discrete Laplacian with known spectrum 2 - 2cos(kπ/(n+1)).
    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn laplacian_spectrum() {
        let n = 50;
        let t = laplacian(n);
        for k in 0..n {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((t.eigenvalue(k) - exact).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal_and_satisfy_equation() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| ((i * 7 % 11) as f64) * 0.3).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| -1.0 - 0.01 * i as f64).collect();
        let t = SymTridiagonal::new(diag.clone(), off.clone());
        let mut vecs: Vec<Vec<f64>> = Vec::new();
        for k in 0..6 {
            let lam = t.eigenvalue(k);
            let v = t.eigenvector(lam, &vecs);
            // residual
            for i in 0..n {
                let mut r = (diag[i] - lam) * v[i];
                if i > 0 {
                    r += off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    r += off[i] * v[i + 1];
                }
                assert!(r.abs() < 1e-10, "residual {r}");
            }
            vecs.push(v);
        }
        for a in 0..vecs.len() {
            for b in 0..vecs.len() {
                let dot: f64 = vecs[a].iter().zip(&vecs[b]).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn one_by_one() {
        let t = SymTridiagonal::new(vec![3.5], vec![]);
        assert!((t.eigenvalue(0) - 3.5).abs() < 1e-14);
        assert_eq!(t.eigenvector(3.5, &[]), vec![1.0]);
    }
}
