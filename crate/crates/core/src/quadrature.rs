//! Gauss–Hermite and Gauss–Legendre rules via Golub–Welsch.
//!
//! Nodes and weights come from the eigendecomposition of the Jacobi matrix of
//! the orthogonal-polynomial recurrence; a rule with `n` nodes integrates
//! polynomials of degree `2n - 1` exactly against its weight.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Eigenvalues and first eigenvector components of a symmetric tridiagonal
/// matrix, by implicit QL with shifts. `diag` has length n, `off` length n-1.
/// Returns (eigenvalues ascending, first components of the matching
/// normalized eigenvectors).
fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    if n == 1 {
        return (d, z);
    }

    for l in 0..n {
        let mut iter = 0;
        'sweep: loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 50, "tridiagonal QL did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // deflation mid-sweep: drop the shift and restart
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    continue 'sweep;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let nodes = order.iter().map(|&i| d[i]).collect();
    let firsts = order.iter().map(|&i| z[i]).collect();
    (nodes, firsts)
}

/// Enforces the exact +/- symmetry both rules have analytically, so that odd
/// integrands cancel to exactly zero under paired summation.
fn symmetrize(nodes: &mut [f64], weights: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let s = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -s;
        nodes[j] = s;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

/// Gauss–Hermite rule for the weight e^{-s^2} on (-inf, inf).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let (mut nodes, firsts) = symmetric_tridiagonal_eigen(&diag, &off);
    let mu0 = std::f64::consts::PI.sqrt();
    let mut weights: Vec<f64> = firsts.iter().map(|&v| mu0 * v * v).collect();
    symmetrize(&mut nodes, &mut weights);
    (nodes, weights)
}

/// Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (mut nodes, firsts) = symmetric_tridiagonal_eigen(&diag, &off);
    let mut weights: Vec<f64> = firsts.iter().map(|&v| 2.0 * v * v).collect();
    symmetrize(&mut nodes, &mut weights);
    (nodes, weights)
}

type RuleCache = Mutex<HashMap<(u8, usize), Arc<(Vec<f64>, Vec<f64>)>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoized [`gauss_hermite`].
pub fn cached_gauss_hermite(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    let mut map = cache().lock().unwrap();
    map.entry((0, n))
        .or_insert_with(|| Arc::new(gauss_hermite(n)))
        .clone()
}

/// Memoized [`gauss_legendre`].
pub fn cached_gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    let mut map = cache().lock().unwrap();
    map.entry((1, n))
        .or_insert_with(|| Arc::new(gauss_legendre(n)))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn hermite_low_order_moments() {
        let (x, w) = gauss_hermite(20);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, PI.sqrt(), max_relative = 1e-14);
        // int s^2 e^{-s^2} = sqrt(pi)/2, int s^4 e^{-s^2} = 3 sqrt(pi)/4
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert_relative_eq!(m2, PI.sqrt() / 2.0, max_relative = 1e-13);
        assert_relative_eq!(m4, 3.0 * PI.sqrt() / 4.0, max_relative = 1e-13);
    }

    #[test]
    fn hermite_two_point_rule_is_exact() {
        let (x, w) = gauss_hermite(2);
        assert_relative_eq!(x[0], -(0.5f64).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(x[1], (0.5f64).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(w[0], PI.sqrt() / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn legendre_polynomial_exactness() {
        let (x, w) = gauss_legendre(6);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 2.0, max_relative = 1e-14);
        // int_{-1}^{1} x^10 = 2/11, degree 10 <= 2*6-1
        let m10: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert_relative_eq!(m10, 2.0 / 11.0, max_relative = 1e-13);
    }

    #[test]
    fn nodes_are_symmetric() {
        for n in [3usize, 8, 17, 40] {
            let (x, _) = gauss_hermite(n);
            for i in 0..n {
                assert_relative_eq!(x[i], -x[n - 1 - i], epsilon = 1e-13);
            }
        }
    }
}
