//! Closed-form solutions used as oracles: caloric (heat) polynomials and the
//! Gaussian-weighted Hermite eigenfunctions of the similarity operator.

use crate::error::{LabError, Result};

/// Largest caloric-polynomial degree the lab constructs.
pub const MAX_CALORIC_DEGREE: usize = 6;
/// Largest Hermite mode index the lab constructs.
pub const MAX_HERMITE_MODE: usize = 8;

/// 1-D heat polynomial p_m(x, t) = m! sum_j x^{m-2j} t^j / ((m-2j)! j!).
/// Satisfies p_t = p_xx and p(lambda x, lambda^2 t) = lambda^m p(x, t).
fn heat_poly_1d(m: usize, x: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut coeff = 1.0; // m! / ((m-2j)! j!) at j = 0
    for j in 0..=(m / 2) {
        sum += coeff * x.powi((m - 2 * j) as i32) * t.powi(j as i32);
        // advance to j+1: multiply by (m-2j)(m-2j-1)/(j+1)
        if 2 * (j + 1) <= m {
            coeff *= ((m - 2 * j) * (m - 2 * j - 1)) as f64 / (j + 1) as f64;
        }
    }
    sum
}

/// Derivative in x of the 1-D heat polynomial: p_m' = m p_{m-1} (Appell).
fn heat_poly_1d_dx(m: usize, x: f64, t: f64) -> f64 {
    if m == 0 {
        0.0
    } else {
        m as f64 * heat_poly_1d(m - 1, x, t)
    }
}

/// Physicists' Hermite polynomial H_k(z).
pub fn hermite_polynomial(k: usize, z: f64) -> f64 {
    let mut h0 = 1.0;
    if k == 0 {
        return h0;
    }
    let mut h1 = 2.0 * z;
    for j in 1..k {
        let h2 = 2.0 * z * h1 - 2.0 * j as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Caloric polynomial of total parabolic degree m in n dimensions, realized
/// as a product of 1-D heat polynomials with the degree split as evenly as
/// possible across coordinates. Vanishes to order exactly m at the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaloricPolynomial {
    degrees: Vec<usize>,
}

impl CaloricPolynomial {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m > MAX_CALORIC_DEGREE {
            return Err(LabError::DegreeOutOfRange(m, MAX_CALORIC_DEGREE));
        }
        if !(1..=3).contains(&n) {
            return Err(LabError::InvalidGrid(format!("dimension {n}")));
        }
        let q = m / n;
        let r = m % n;
        let degrees = (0..n).map(|a| q + usize::from(a < r)).collect();
        Ok(CaloricPolynomial { degrees })
    }

    /// Product with explicit per-coordinate degrees.
    pub fn from_degrees(degrees: Vec<usize>) -> Result<Self> {
        let m: usize = degrees.iter().sum();
        if m > MAX_CALORIC_DEGREE {
            return Err(LabError::DegreeOutOfRange(m, MAX_CALORIC_DEGREE));
        }
        if degrees.is_empty() || degrees.len() > 3 {
            return Err(LabError::InvalidGrid(format!(
                "dimension {}",
                degrees.len()
            )));
        }
        Ok(CaloricPolynomial { degrees })
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Total parabolic degree m (the vanishing order at the origin).
    pub fn degree(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        debug_assert_eq!(x.len(), self.degrees.len());
        self.degrees
            .iter()
            .zip(x)
            .map(|(&m, &xa)| heat_poly_1d(m, xa, t))
            .product()
    }

    /// Spatial gradient, exact (factors differentiate via p_m' = m p_{m-1}).
    pub fn grad(&self, x: &[f64], t: f64) -> Vec<f64> {
        let n = self.degrees.len();
        let factors: Vec<f64> = self
            .degrees
            .iter()
            .zip(x)
            .map(|(&m, &xa)| heat_poly_1d(m, xa, t))
            .collect();
        (0..n)
            .map(|a| {
                let mut g = heat_poly_1d_dx(self.degrees[a], x[a], t);
                for b in 0..n {
                    if b != a {
                        g *= factors[b];
                    }
                }
                g
            })
            .collect()
    }

    /// Squared gradient magnitude at (x, t).
    pub fn grad_sq(&self, x: &[f64], t: f64) -> f64 {
        self.grad(x, t).iter().map(|g| g * g).sum()
    }
}

/// Constructs the caloric polynomial of degree m in dimension n.
pub fn caloric_polynomial(m: usize, n: usize) -> Result<CaloricPolynomial> {
    CaloricPolynomial::new(m, n)
}

/// Eigenfunction of H = -Delta + |y|^2/16 - n/4 with eigenvalue m/2:
/// a product of H_{k_i}(y_i/2) e^{-y_i^2/8} with total degree m = sum k_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteFunction {
    degrees: Vec<usize>,
}

impl HermiteFunction {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m > MAX_HERMITE_MODE {
            return Err(LabError::DegreeOutOfRange(m, MAX_HERMITE_MODE));
        }
        if !(1..=3).contains(&n) {
            return Err(LabError::InvalidGrid(format!("dimension {n}")));
        }
        let q = m / n;
        let r = m % n;
        let degrees = (0..n).map(|a| q + usize::from(a < r)).collect();
        Ok(HermiteFunction { degrees })
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn mode(&self) -> usize {
        self.degrees.iter().sum()
    }

    /// H-eigenvalue m/2.
    pub fn eigenvalue(&self) -> f64 {
        self.mode() as f64 / 2.0
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.degrees.len());
        self.degrees
            .iter()
            .zip(y)
            .map(|(&k, &ya)| hermite_polynomial(k, ya / 2.0) * (-ya * ya / 8.0).exp())
            .product()
    }
}

/// Constructs the order-m Hermite eigenfunction in dimension n.
pub fn hermite_data(m: usize, n: usize) -> Result<HermiteFunction> {
    HermiteFunction::new(m, n)
}
