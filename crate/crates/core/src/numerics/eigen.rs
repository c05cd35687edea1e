//! Lowest eigenpairs of a real symmetric tridiagonal matrix.
//!
//! Eigenvalues come from Sturm-sequence bisection; eigenvectors from inverse
//! iteration with a pivoted tridiagonal LU, re-orthogonalised inside clusters.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit Euclidean norm.
    pub vector: Vec<f64>,
}

const MAX_INVERSE_ITERATIONS: usize = 12;
const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// The `k` smallest eigenpairs of the symmetric tridiagonal matrix with the
/// given diagonal and off-diagonal, in ascending order.
pub fn solve_tridiag_eigen(diagonal: &[f64], off_diagonal: &[f64], k: usize) -> Result<Vec<EigenPair>> {
    let n = diagonal.len();
    if n == 0 {
        return Err(Error::invalid("diagonal", "matrix is empty"));
    }
    if off_diagonal.len() + 1 != n {
        return Err(Error::invalid(
            "off_diagonal",
            format!("expected {} entries, got {}", n - 1, off_diagonal.len()),
        ));
    }
    if k > n {
        return Err(Error::invalid("k", format!("k = {k} exceeds matrix size {n}")));
    }
    if diagonal.iter().chain(off_diagonal).any(|v| !v.is_finite()) {
        return Err(Error::invalid("diagonal", "matrix entries must be finite"));
    }

    let norm = inf_norm(diagonal, off_diagonal);
    let (lo, hi) = gershgorin(diagonal, off_diagonal);
    let values: Vec<f64> = (0..k)
        .map(|j| bisect(diagonal, off_diagonal, j, lo, hi, norm))
        .collect();

    let cluster_gap = 1e-3 * norm.max(f64::MIN_POSITIVE);
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(k);
    for (j, &lambda) in values.iter().enumerate() {
        let cluster: Vec<&EigenPair> = pairs
            .iter()
            .filter(|p| (p.value - lambda).abs() <= cluster_gap)
            .collect();
        let vector = inverse_iteration(diagonal, off_diagonal, lambda, norm, j, &cluster)?;
        pairs.push(EigenPair { value: lambda, vector });
    }
    Ok(pairs)
}

/// Row-sum norm of the tridiagonal matrix.
pub fn inf_norm(d: &[f64], e: &[f64]) -> f64 {
    (0..d.len())
        .map(|i| {
            let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
            let right = if i < e.len() { e[i].abs() } else { 0.0 };
            d[i].abs() + left + right
        })
        .fold(0.0, f64::max)
}

/// `||A v - lambda v||_inf`.
pub fn residual_inf(d: &[f64], e: &[f64], lambda: f64, v: &[f64]) -> f64 {
    let n = d.len();
    (0..n)
        .map(|i| {
            let mut av = d[i] * v[i];
            if i > 0 {
                av += e[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                av += e[i] * v[i + 1];
            }
            (av - lambda * v[i]).abs()
        })
        .fold(0.0, f64::max)
}

fn gershgorin(d: &[f64], e: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..d.len() {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i < e.len() { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let pad = 1e-12 * (hi - lo).abs().max(1.0);
    (lo - pad, hi + pad)
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect(d: &[f64], e: &[f64], index: usize, mut lo: f64, mut hi: f64, norm: f64) -> f64 {
    let pivmin = f64::MIN_POSITIVE.max(e.iter().map(|v| v * v).fold(0.0, f64::max) * f64::MIN_POSITIVE);
    let tol = 2.0 * f64::EPSILON * norm.max(f64::MIN_POSITIVE);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid, pivmin) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// LU factors of `T - shift I` with partial pivoting (LAPACK `gttrf` layout).
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(diag: &[f64], off: &[f64], shift: f64, tiny: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = tiny.copysign(*v);
            }
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.dl[i] * b[i];
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn start_vector(n: usize, seed: usize) -> Vec<f64> {
    // xorshift; deterministic and different per eigen-index
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ ((seed as u64 + 1).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

fn inverse_iteration(
    d: &[f64],
    e: &[f64],
    lambda: f64,
    norm: f64,
    index: usize,
    cluster: &[&EigenPair],
) -> Result<Vec<f64>> {
    let n = d.len();
    let scale = norm.max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;
    let lu = TridiagLu::factor(d, e, lambda, tiny);
    let mut v = start_vector(n, index);
    normalize(&mut v);
    for _ in 0..MAX_INVERSE_ITERATIONS {
        lu.solve(&mut v);
        for p in cluster {
            let overlap: f64 = v.iter().zip(&p.vector).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(&p.vector).for_each(|(a, b)| *a -= overlap * b);
        }
        if normalize(&mut v) == 0.0 {
            return Err(Error::NumericalFailure(format!(
                "inverse iteration collapsed for eigenvalue {lambda}"
            )));
        }
        if residual_inf(d, e, lambda, &v) <= RESIDUAL_TOLERANCE * scale * 1e-2 {
            return Ok(v);
        }
    }
    if residual_inf(d, e, lambda, &v) <= RESIDUAL_TOLERANCE * scale {
        Ok(v)
    } else {
        Err(Error::NumericalFailure(format!(
            "inverse iteration did not converge for eigenvalue {lambda}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_three_closed_form() {
        let pairs = solve_tridiag_eigen(&[2.0, 2.0, 2.0], &[-1.0, -1.0], 3).unwrap();
        let s = 2f64.sqrt();
        let expected = [2.0 - s, 2.0, 2.0 + s];
        for (p, e) in pairs.iter().zip(expected) {
            assert!((p.value - e).abs() < 1e-13, "{} vs {}", p.value, e);
        }
    }

    #[test]
    fn identity_is_degenerate() {
        let n = 6;
        let pairs = solve_tridiag_eigen(&vec![1.0; n], &vec![0.0; n - 1], n).unwrap();
        for p in &pairs {
            assert!((p.value - 1.0).abs() < 1e-14);
        }
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = pairs[i].vector.iter().zip(&pairs[j].vector).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn residual_and_orthogonality_on_laplacian() {
        let n = 400;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let pairs = solve_tridiag_eigen(&d, &e, 8).unwrap();
        let norm = inf_norm(&d, &e);
        for (j, p) in pairs.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((p.value - exact).abs() < 1e-12);
            assert!(residual_inf(&d, &e, p.value, &p.vector) <= 1e-8 * norm);
        }
        for i in 0..pairs.len() {
            for j in 0..i {
                let dot: f64 = pairs[i].vector.iter().zip(&pairs[j].vector).map(|(a, b)| a * b).sum();
                assert!(dot.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn ascending_order() {
        let d: Vec<f64> = (0..50).map(|i| ((i * 7) % 11) as f64).collect();
        let e = vec![0.3; 49];
        let pairs = solve_tridiag_eigen(&d, &e, 50).unwrap();
        assert!(pairs.windows(2).all(|w| w[0].value <= w[1].value));
    }

    #[test]
    fn bad_shapes() {
        assert!(solve_tridiag_eigen(&[1.0, 2.0], &[], 1).is_err());
        assert!(solve_tridiag_eigen(&[1.0, 2.0], &[0.5], 3).is_err());
    }
}
