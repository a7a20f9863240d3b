//! Backward-Gaussian weights and the weighted calculus built on them:
//! lattice periodization of integrals over R^n, exact spectral integrals for
//! band-limited torus fields, Gaussian moments over balls and all of R^n,
//! and the certified radial tail bound.

use crate::error::{LabError, Result};
use crate::field::ScalarField;
use crate::quadrature::{cached_gauss_hermite, cached_gauss_legendre};
use std::f64::consts::PI;

/// The backward Gaussian G(x, t) = |t|^{-n/2} e^{|x - x0|^2 / 4t}, t < 0,
/// normalized so that its total mass over R^n is (4 pi)^{n/2}.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardGaussian {
    center: Vec<f64>,
    t: f64,
}

impl BackwardGaussian {
    pub fn new(center: Vec<f64>, t: f64) -> Result<Self> {
        if !(t < 0.0) {
            return Err(LabError::NonNegativeTime(t));
        }
        if center.is_empty() || center.len() > 3 {
            return Err(LabError::DimensionMismatch(format!(
                "center dimension {}",
                center.len()
            )));
        }
        Ok(BackwardGaussian { center, t })
    }

    /// Centered at the origin of R^n.
    pub fn origin(n: usize, t: f64) -> Result<Self> {
        Self::new(vec![0.0; n], t)
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Pointwise weight |t|^{-n/2} e^{-|x - x0|^2 / 4|t|}.
    pub fn weight(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.center.len());
        let at = -self.t;
        let r2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        at.powf(-(self.dim() as f64) / 2.0) * (-r2 / (4.0 * at)).exp()
    }

    /// Total mass over R^n: (4 pi)^{n/2}.
    pub fn total_mass(&self) -> f64 {
        (4.0 * PI).powf(self.dim() as f64 / 2.0)
    }
}

/// Certified upper bound on the Gaussian tail mass
/// int_{|z| > R} G(z, t) dz, of the form
/// omega_{n-1} |t|^{-n/2} J_n(R, t) e^{-R^2 / 8|t|}.
pub fn gaussian_tail_mass(radius: f64, t: f64, n: usize) -> f64 {
    debug_assert!(radius > 0.0 && t < 0.0);
    let at = -t;
    let (omega, j) = match n {
        1 => (2.0, 4.0 * at / radius),
        2 => (2.0 * PI, 4.0 * at),
        3 => (4.0 * PI, 4.0 * at * radius + 32.0 * at * at / radius),
        _ => unreachable!("dimension {n}"),
    };
    omega * at.powf(-(n as f64) / 2.0) * j * (-radius * radius / (8.0 * at)).exp()
}

/// Certified upper bound for int_{R^n \ B(0,R)} f^2 G dx given |f| <= f_inf.
pub fn tail_bound(radius: f64, t: f64, f_inf: f64, n: usize) -> Result<f64> {
    if !(t < 0.0) {
        return Err(LabError::NonNegativeTime(t));
    }
    if !(radius > 0.0) {
        return Err(LabError::InvalidBallRadius(radius));
    }
    Ok(f_inf * f_inf * gaussian_tail_mass(radius, t, n))
}

/// Lattice periodization rule: sum over integer shifts |j|_inf <= shells of
/// the grid quadrature of f(x) G(x + j - x0, t).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeQuadrature {
    shells: usize,
    tolerance: f64,
}

impl LatticeQuadrature {
    pub fn new(shells: usize, tolerance: f64) -> Self {
        LatticeQuadrature { shells, tolerance }
    }

    /// Smallest shell count with e^{-R^2/8|t|} < 1e-14, then grown until the
    /// certified tail mass is below `tolerance`.
    pub fn auto(t: f64, tolerance: f64) -> Result<Self> {
        if !(t < 0.0) {
            return Err(LabError::NonNegativeTime(t));
        }
        let at = -t;
        let mut shells = (8.0 * at * 1e14_f64.ln()).sqrt().ceil().max(1.0) as usize;
        while shells < 64 && gaussian_tail_mass(shells as f64, t, 1) > tolerance {
            shells += 1;
        }
        Ok(LatticeQuadrature { shells, tolerance })
    }

    pub fn shells(&self) -> usize {
        self.shells
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// Per-axis periodized 1-D Gaussian table: for each node coordinate x_i,
/// sum_{|j| <= shells} |t|^{-1/2} e^{-(x_i + j - c)^2 / 4|t|}.
fn periodized_axis_table(
    points: usize,
    spacing: f64,
    center: f64,
    t: f64,
    shells: usize,
) -> Vec<f64> {
    let at = -t;
    let scale = at.sqrt().recip();
    let mut table = vec![0.0; points];
    for (i, v) in table.iter_mut().enumerate() {
        let x = -0.5 + i as f64 * spacing;
        let mut s = 0.0;
        for j in -(shells as i64)..=(shells as i64) {
            let z = x + j as f64 - center;
            s += (-z * z / (4.0 * at)).exp();
        }
        *v = s * scale;
    }
    table
}

/// Periodized integral int_{R^n} f(x) G(x - x0, t) dx for an Omega-periodic
/// field f, via the lattice unfolding sum_{j} int_{j + Omega}. The kernel
/// factorizes per axis, so the lattice sum is a product of 1-D tables.
///
/// The certified lattice truncation error (sup|f| times the Gaussian tail
/// mass beyond the covered box) must fall below the rule's tolerance,
/// otherwise the call reports it instead of silently absorbing it.
pub fn weighted_integral(
    f: &ScalarField,
    g: &BackwardGaussian,
    quad: &LatticeQuadrature,
) -> Result<f64> {
    let spec = f.spec();
    let n = spec.dim();
    if g.dim() != n {
        return Err(LabError::DimensionMismatch(format!(
            "Gaussian dimension {} vs field dimension {}",
            g.dim(),
            n
        )));
    }
    let tail = f.max_abs() * gaussian_tail_mass(quad.shells() as f64, g.t(), n);
    if tail > quad.tolerance() {
        return Err(LabError::LatticeToleranceUnreachable {
            shells: quad.shells(),
            tail,
            tolerance: quad.tolerance(),
        });
    }
    let points = spec.points();
    let tables: Vec<Vec<f64>> = (0..n)
        .map(|a| periodized_axis_table(points, spec.spacing(), g.center()[a], g.t(), quad.shells()))
        .collect();
    let values = f.values();
    let mut sum = 0.0;
    match n {
        1 => {
            for (i, v) in values.iter().enumerate() {
                sum += v * tables[0][i];
            }
        }
        2 => {
            for i0 in 0..points {
                let row = i0 * points;
                let t0 = tables[0][i0];
                for i1 in 0..points {
                    sum += values[row + i1] * t0 * tables[1][i1];
                }
            }
        }
        _ => {
            for i0 in 0..points {
                let t0 = tables[0][i0];
                for i1 in 0..points {
                    let t01 = t0 * tables[1][i1];
                    let base = (i0 * points + i1) * points;
                    for i2 in 0..points {
                        sum += values[base + i2] * t01 * tables[2][i2];
                    }
                }
            }
        }
    }
    Ok(sum * spec.cell_volume())
}

/// Exact value of int f G(. - x0, t) dx for the trigonometric interpolant of
/// `f`: each mode e^{2 pi i k.x} integrates to
/// (4 pi)^{n/2} e^{2 pi i k.x0} e^{-4 pi^2 |k|^2 |t|}.
///
/// Independent of grid resolution in t, so it stays exact arbitrarily close
/// to t = 0. Used by the frequency tracker and as the second quadrature route
/// in cross-checks.
pub fn weighted_integral_spectral(f: &ScalarField, g: &BackwardGaussian) -> Result<f64> {
    let spec = f.spec();
    let n = spec.dim();
    if g.dim() != n {
        return Err(LabError::DimensionMismatch(format!(
            "Gaussian dimension {} vs field dimension {}",
            g.dim(),
            n
        )));
    }
    let at = -g.t();
    let coeffs = f.spectral_coefficients();
    let mass = g.total_mass();
    let mut freqs = vec![0i64; n];
    let mut sum = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        spec.mode_freqs(i, &mut freqs);
        let k2: f64 = freqs.iter().map(|&k| (k * k) as f64).sum();
        let decay = (-4.0 * PI * PI * k2 * at).exp();
        if decay == 0.0 {
            continue;
        }
        let phase: f64 = freqs
            .iter()
            .zip(g.center())
            .map(|(&k, &c0)| 2.0 * PI * k as f64 * c0)
            .sum();
        sum += decay * (c.re * phase.cos() - c.im * phase.sin());
    }
    Ok(mass * sum)
}

/// Exact first moment int (x_axis - x0_axis) f(x) G(x - x0, t) dx for the
/// trigonometric interpolant of `f` (same spectral route; each mode picks up
/// the factor 4 pi i k_axis |t|).
pub fn weighted_first_moment_spectral(
    f: &ScalarField,
    g: &BackwardGaussian,
    axis: usize,
) -> Result<f64> {
    let spec = f.spec();
    let n = spec.dim();
    if g.dim() != n || axis >= n {
        return Err(LabError::DimensionMismatch(format!(
            "axis {axis} in dimension {n}"
        )));
    }
    let at = -g.t();
    let coeffs = f.spectral_coefficients();
    let mass = g.total_mass();
    let mut freqs = vec![0i64; n];
    let mut sum = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        spec.mode_freqs(i, &mut freqs);
        let k2: f64 = freqs.iter().map(|&k| (k * k) as f64).sum();
        let decay = (-4.0 * PI * PI * k2 * at).exp();
        if decay == 0.0 {
            continue;
        }
        let phase: f64 = freqs
            .iter()
            .zip(g.center())
            .map(|(&k, &c0)| 2.0 * PI * k as f64 * c0)
            .sum();
        let factor = 4.0 * PI * freqs[axis] as f64 * at;
        // Re( c e^{i phase} * i * factor ) = -factor * Im(c e^{i phase})
        sum -= factor * decay * (c.re * phase.sin() + c.im * phase.cos());
    }
    Ok(mass * sum)
}

/// int_{R^n} f(x) G(x - center, t) dx by scaled Gauss-Hermite product
/// quadrature (`order` nodes per axis; exact for polynomial f of degree
/// below 2*order).
pub fn gaussian_quadrature(
    f: impl Fn(&[f64]) -> f64,
    center: &[f64],
    t: f64,
    order: usize,
) -> Result<f64> {
    if !(t < 0.0) {
        return Err(LabError::NonNegativeTime(t));
    }
    let n = center.len();
    let rule = cached_gauss_hermite(order);
    let (nodes, weights) = (&rule.0, &rule.1);
    let scale = 2.0 * (-t).sqrt();
    let mut x = vec![0.0; n];
    let mut idx = vec![0usize; n];
    let mut sum = 0.0;
    loop {
        let mut w = 1.0;
        for a in 0..n {
            x[a] = center[a] + scale * nodes[idx[a]];
            w *= weights[idx[a]];
        }
        sum += w * f(&x);
        // advance the multi-index
        let mut a = 0;
        loop {
            idx[a] += 1;
            if idx[a] < order {
                break;
            }
            idx[a] = 0;
            a += 1;
            if a == n {
                return Ok(sum * 2f64.powi(n as i32));
            }
        }
    }
}

/// Gaussian moment int_{B(0,R)} x^mu t^l G(x, t) dx; `radius = None` means
/// R = infinity (the full moment).
///
/// Odd moments vanish exactly: quadrature nodes are summed in antipodal
/// pairs, so the cancellation happens in exact floating point.
pub fn moment(mu: &[usize], l: u32, t: f64, radius: Option<f64>) -> Result<f64> {
    if !(t < 0.0) {
        return Err(LabError::NonNegativeTime(t));
    }
    let n = mu.len();
    if !(1..=3).contains(&n) {
        return Err(LabError::DimensionMismatch(format!("dimension {n}")));
    }
    let at = -t;
    let tl = t.powi(l as i32);
    match radius {
        None => {
            // product of per-axis moments, Gauss-Hermite in pairs
            let order = 8 + mu.iter().max().copied().unwrap_or(0);
            let rule = cached_gauss_hermite(order);
            let (nodes, weights) = (&rule.0, &rule.1);
            let scale = 2.0 * at.sqrt();
            let mut total = tl;
            for &k in mu {
                let mut axis = 0.0;
                for j in 0..order / 2 {
                    let s = scale * nodes[order - 1 - j];
                    let pair = s.powi(k as i32) + (-s).powi(k as i32);
                    axis += weights[j] * pair;
                }
                if order % 2 == 1 {
                    let s = scale * nodes[order / 2]; // exactly 0
                    axis += weights[order / 2] * s.powi(k as i32);
                }
                total *= 2.0 * axis;
            }
            Ok(total)
        }
        Some(r) => {
            if !(r > 0.0) {
                return Err(LabError::InvalidBallRadius(r));
            }
            Ok(tl * ball_monomial_integral(mu, at, r))
        }
    }
}

/// int_{B(0,R)} x^mu |t|^{-n/2} e^{-|x|^2/4|t|} dx with polar-decomposed
/// product quadrature and antipodal pairing.
fn ball_monomial_integral(mu: &[usize], at: f64, r: f64) -> f64 {
    let n = mu.len();
    let total_deg: usize = mu.iter().sum();
    // radial rule resolving the Gaussian width sqrt(2|t|)
    let nr = (32 + (6.0 * r / at.sqrt()).ceil() as usize).min(600);
    let rad = cached_gauss_legendre(nr);
    let gnorm = at.powf(-(n as f64) / 2.0);
    match n {
        1 => {
            // pair +/- s directly
            let mut sum = 0.0;
            for j in 0..nr {
                let s = 0.5 * r * (rad.0[j] + 1.0); // in (0, r)
                let w = 0.5 * r * rad.1[j];
                let pair = s.powi(mu[0] as i32) + (-s).powi(mu[0] as i32);
                sum += w * pair * (-s * s / (4.0 * at)).exp();
            }
            gnorm * sum
        }
        2 => {
            let m_ang = 2 * (total_deg + 8).next_power_of_two();
            let dth = 2.0 * PI / m_ang as f64;
            let mut sum = 0.0;
            for j in 0..nr {
                let s = 0.5 * r * (rad.0[j] + 1.0);
                let wr = 0.5 * r * rad.1[j] * s * (-s * s / (4.0 * at)).exp();
                let mut ang = 0.0;
                for a in 0..m_ang / 2 {
                    let th = a as f64 * dth;
                    let d = [th.cos(), th.sin()];
                    let plus = (s * d[0]).powi(mu[0] as i32) * (s * d[1]).powi(mu[1] as i32);
                    let minus = (-s * d[0]).powi(mu[0] as i32) * (-s * d[1]).powi(mu[1] as i32);
                    ang += plus + minus;
                }
                sum += wr * ang * dth;
            }
            gnorm * sum
        }
        _ => {
            let m_ang = 2 * (total_deg + 8).next_power_of_two();
            let dth = 2.0 * PI / m_ang as f64;
            let nc = 2 * (total_deg / 2 + 8);
            let pol = cached_gauss_legendre(nc);
            let mut sum = 0.0;
            for j in 0..nr {
                let s = 0.5 * r * (rad.0[j] + 1.0);
                let wr = 0.5 * r * rad.1[j] * s * s * (-s * s / (4.0 * at)).exp();
                let mut sphere = 0.0;
                // half the cos(phi) nodes; antipode = (-c, theta + pi)
                for ic in 0..nc / 2 {
                    let c = pol.0[ic];
                    let sin_phi = (1.0 - c * c).sqrt();
                    let wc = pol.1[ic];
                    for a in 0..m_ang {
                        let th = a as f64 * dth;
                        let d = [sin_phi * th.cos(), sin_phi * th.sin(), c];
                        let plus = (s * d[0]).powi(mu[0] as i32)
                            * (s * d[1]).powi(mu[1] as i32)
                            * (s * d[2]).powi(mu[2] as i32);
                        let minus = (-s * d[0]).powi(mu[0] as i32)
                            * (-s * d[1]).powi(mu[1] as i32)
                            * (-s * d[2]).powi(mu[2] as i32);
                        sphere += wc * (plus + minus) * dth;
                    }
                }
                sum += wr * sphere;
            }
            gnorm * sum
        }
    }
}
