//! Start-point selection and the vanishing-order estimators: the cylinder
//! slope fit, the Gaussian-mass slope fit, and the frequency limit mode,
//! together with the order-bound verdict.

use crate::caloric::CaloricPolynomial;
use crate::error::{LabError, Result};
use crate::field::{fft_nd, ScalarField, TrigInterpolant};
use crate::frequency::{limit_mode, trace_caloric, trace_trajectory, ExponentSet, YGrid};
use crate::gaussian::{gaussian_quadrature, weighted_integral_spectral, BackwardGaussian};
use crate::quadrature::cached_gauss_legendre;
use crate::solver::Trajectory;
use rustfft::num_complex::Complex;

/// Start point selected by minimizing the Gaussian-weighted Dirichlet
/// quotient over grid nodes, certified against 2 eps q_D(-eps).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSelection {
    pub x: Vec<f64>,
    pub epsilon: f64,
    /// eps int |grad u|^2 G / int u^2 G at the selected center.
    pub achieved_ratio: f64,
    /// 2 eps q_D(-eps).
    pub bound: f64,
    pub certified: bool,
}

/// Periodized 1-D Gaussian kernel indexed by node offset d in 0..N:
/// K[d] = sum_{|j| <= shells} |t|^{-1/2} e^{-(d h + j)^2 / 4|t|}.
fn offset_kernel_table(points: usize, t: f64, shells: i64) -> Vec<f64> {
    let at = -t;
    let h = 1.0 / points as f64;
    let scale = at.sqrt().recip();
    (0..points)
        .map(|d| {
            let z0 = d as f64 * h;
            let mut s = 0.0;
            for j in -shells..=shells {
                let z = z0 + j as f64;
                s += (-z * z / (4.0 * at)).exp();
            }
            s * scale
        })
        .collect()
}

fn lattice_shells(t: f64) -> i64 {
    ((8.0 * -t * 1e14_f64.ln()).sqrt().ceil().max(1.0) as i64) + 1
}

/// All-centers weighted integrals num[j] = sum_i f_i K[(i - j) mod N] h^n
/// via circular correlation with the separable periodized kernel (FFT).
fn correlate_with_kernel(f: &ScalarField, t: f64) -> Vec<f64> {
    let spec = f.spec();
    let n = spec.dim();
    let points = spec.points();
    let shells = lattice_shells(t);
    let axis = offset_kernel_table(points, t, shells);
    // build the separable kernel on the full grid
    let mut kernel = vec![1.0f64; spec.node_count()];
    for (i, v) in kernel.iter_mut().enumerate() {
        let mut flat = i;
        for _ in 0..n {
            *v *= axis[flat % points];
            flat /= points;
        }
    }
    let mut fk: Vec<Complex<f64>> = kernel.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut ff: Vec<Complex<f64>> = f.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_nd(spec, &mut fk, false);
    fft_nd(spec, &mut ff, false);
    // correlation: conj of the kernel spectrum
    for (a, b) in ff.iter_mut().zip(&fk) {
        *a *= b.conj();
    }
    fft_nd(spec, &mut ff, true);
    let scale = spec.cell_volume() / spec.node_count() as f64;
    ff.iter().map(|c| c.re * scale).collect()
}

/// Selects the start point x_eps minimizing
/// eps int |grad u(x + y)|^2 G(y, -eps) dy / int u(x + y)^2 G(y, -eps) dy
/// over all grid nodes (every node is evaluated, via one FFT correlation),
/// and certifies the Lemma-level inequality ratio <= 2 eps q_D(-eps).
pub fn select_start_point(u: &ScalarField, eps: f64) -> Result<PointSelection> {
    if !(eps > 0.0) {
        return Err(LabError::Config(format!("epsilon must be positive, got {eps}")));
    }
    let q_d = u.dirichlet_quotient()?;
    let grad_sq = u.gradient().magnitude_squared();
    let u_sq = u.product(u);
    let t = -eps;
    let num = correlate_with_kernel(&grad_sq, t);
    let den = correlate_with_kernel(&u_sq, t);
    let mut best = f64::INFINITY;
    let mut best_idx = 0usize;
    for (i, (nm, dn)) in num.iter().zip(&den).enumerate() {
        if *dn <= 0.0 {
            continue;
        }
        let r = eps * nm / dn;
        if r < best {
            best = r;
            best_idx = i;
        }
    }
    if !best.is_finite() {
        return Err(LabError::ZeroField);
    }
    let bound = 2.0 * eps * q_d;
    let certified = best <= bound * (1.0 + 1e-12) + 1e-300;
    if !certified {
        return Err(LabError::CertificationFailed { ratio: best, bound });
    }
    let mut x = vec![0.0; u.spec().dim()];
    u.spec().node_coords(best_idx, &mut x);
    Ok(PointSelection {
        x,
        epsilon: eps,
        achieved_ratio: best,
        bound,
        certified,
    })
}

/// Exhaustive direct-summation search over every grid node, the independent
/// oracle for [`select_start_point`]. Uses the engine's lattice quadrature
/// per candidate center instead of the FFT correlation.
pub fn select_start_point_direct(u: &ScalarField, eps: f64) -> Result<PointSelection> {
    if !(eps > 0.0) {
        return Err(LabError::Config(format!("epsilon must be positive, got {eps}")));
    }
    let spec = u.spec();
    let n = spec.dim();
    let points = spec.points();
    let q_d = u.dirichlet_quotient()?;
    let grad_sq = u.gradient().magnitude_squared();
    let u_sq = u.product(u);
    let t = -eps;
    let shells = lattice_shells(t);
    let base = offset_kernel_table(points, t, shells);
    // kernel value for signed node offset d: base[(d mod N + N) mod N]
    let wrap = |d: i64| -> f64 {
        let m = d.rem_euclid(points as i64) as usize;
        base[m]
    };
    let mut best = f64::INFINITY;
    let mut best_idx = 0usize;
    let count = spec.node_count();
    let mut idx_i = vec![0usize; n];
    let mut idx_j = vec![0usize; n];
    for j in 0..count {
        let mut flat = j;
        for a in (0..n).rev() {
            idx_j[a] = flat % points;
            flat /= points;
        }
        let mut nm = 0.0;
        let mut dn = 0.0;
        for i in 0..count {
            let mut flat = i;
            for a in (0..n).rev() {
                idx_i[a] = flat % points;
                flat /= points;
            }
            let mut k = 1.0;
            for a in 0..n {
                k *= wrap(idx_i[a] as i64 - idx_j[a] as i64);
            }
            nm += grad_sq.values()[i] * k;
            dn += u_sq.values()[i] * k;
        }
        if dn <= 0.0 {
            continue;
        }
        let r = eps * nm / dn;
        if r < best {
            best = r;
            best_idx = j;
        }
    }
    if !best.is_finite() {
        return Err(LabError::ZeroField);
    }
    let bound = 2.0 * eps * q_d;
    let certified = best <= bound * (1.0 + 1e-12) + 1e-300;
    let mut x = vec![0.0; n];
    spec.node_coords(best_idx, &mut x);
    Ok(PointSelection {
        x,
        epsilon: eps,
        achieved_ratio: best,
        bound,
        certified,
    })
}

/// A solution presented to the estimators: a closed-form caloric polynomial
/// or a solved trajectory (trigonometric interpolation in space, linear in
/// time).
pub enum SolutionSource<'a> {
    Caloric(&'a CaloricPolynomial),
    Trajectory(&'a Trajectory),
}

enum SpaceSlice<'a> {
    Caloric(&'a CaloricPolynomial, f64),
    Torus(TrigInterpolant),
}

impl SpaceSlice<'_> {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            SpaceSlice::Caloric(p, t) => p.eval(x, *t),
            SpaceSlice::Torus(interp) => interp.eval(x),
        }
    }
}

impl SolutionSource<'_> {
    pub fn dim(&self) -> usize {
        match self {
            SolutionSource::Caloric(p) => p.dim(),
            SolutionSource::Trajectory(tr) => tr.spec().dim(),
        }
    }

    fn slice(&self, t: f64) -> Result<SpaceSlice<'_>> {
        match self {
            SolutionSource::Caloric(p) => Ok(SpaceSlice::Caloric(p, t)),
            SolutionSource::Trajectory(tr) => Ok(SpaceSlice::Torus(tr.field_at(t)?.interpolant())),
        }
    }
}

/// Result of the cylinder-norm slope fit.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderFit {
    /// Fitted order d: log-log slope minus (n+2)/2.
    pub order: f64,
    pub slope: f64,
    /// Max absolute deviation of log norms from the fitted line.
    pub residual: f64,
    pub radii: Vec<f64>,
    pub norms: Vec<f64>,
    /// Set when some cylinder norm underflowed; the order is then only a
    /// lower bound at the resolution limit.
    pub at_resolution_limit: bool,
}

/// Least-squares line through (x, y); returns (slope, intercept, max |dev|).
fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0f64, f64::max);
    (slope, intercept, resid)
}

/// Reference-cell quadrature nodes for the parabolic cylinder: spatial nodes
/// xi with |xi| < 1 and weights, plus time nodes sigma in [0, 1]. The same
/// reference nodes serve every radius, so scale-invariant integrands fit
/// exactly.
struct CylinderRule {
    space: Vec<(Vec<f64>, f64)>,
    time: Vec<(f64, f64)>,
}

fn cylinder_rule(n: usize) -> CylinderRule {
    let tr = cached_gauss_legendre(16);
    let time = tr
        .0
        .iter()
        .zip(&tr.1)
        .map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    let mut space = Vec::new();
    match n {
        1 => {
            let sr = cached_gauss_legendre(24);
            for (&x, &w) in sr.0.iter().zip(&sr.1) {
                space.push((vec![x], w));
            }
        }
        _ => {
            // midpoint lattice on [-1,1]^n with ball membership
            let m = 24usize;
            let h = 2.0 / m as f64;
            let w = h.powi(n as i32);
            let mut idx = vec![0usize; n];
            loop {
                let xi: Vec<f64> = idx.iter().map(|&i| -1.0 + (i as f64 + 0.5) * h).collect();
                if xi.iter().map(|v| v * v).sum::<f64>() < 1.0 {
                    space.push((xi, w));
                }
                let mut a = 0;
                loop {
                    idx[a] += 1;
                    if idx[a] < m {
                        break;
                    }
                    idx[a] = 0;
                    a += 1;
                    if a == n {
                        return CylinderRule { space, time };
                    }
                }
            }
        }
    }
    CylinderRule { space, time }
}

/// Fits the vanishing order from L^2 norms over shrinking parabolic
/// cylinders Q_r(x0, t0): least-squares slope of log ||u||_{L^2(Q_r)}
/// against log r, minus (n+2)/2.
pub fn vanishing_order_cylinder(
    src: &SolutionSource,
    x0: &[f64],
    t0: f64,
    radii: &[f64],
) -> Result<CylinderFit> {
    let n = src.dim();
    if x0.len() != n {
        return Err(LabError::DimensionMismatch("cylinder center".into()));
    }
    if radii.len() < 3 {
        return Err(LabError::TooFewSamples {
            needed: 3,
            got: radii.len(),
        });
    }
    let rule = cylinder_rule(n);
    let mut norms = Vec::with_capacity(radii.len());
    let mut x = vec![0.0; n];
    for &r in radii {
        let mut total = 0.0;
        for &(sigma, wt) in &rule.time {
            let t = t0 - r * r * sigma;
            let slice = src.slice(t)?;
            let mut space_sum = 0.0;
            for (xi, wx) in &rule.space {
                for a in 0..n {
                    x[a] = x0[a] + r * xi[a];
                }
                let v = slice.eval(&x);
                space_sum += wx * v * v;
            }
            total += wt * space_sum;
        }
        norms.push((total * r.powi(n as i32 + 2)).sqrt());
    }
    let at_limit = norms.iter().any(|&v| v < 1e-150);
    if at_limit {
        return Ok(CylinderFit {
            order: f64::INFINITY,
            slope: f64::INFINITY,
            residual: 0.0,
            radii: radii.to_vec(),
            norms,
            at_resolution_limit: true,
        });
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let (slope, _, residual) = fit_line(&xs, &ys);
    Ok(CylinderFit {
        order: slope - (n as f64 + 2.0) / 2.0,
        slope,
        residual,
        radii: radii.to_vec(),
        norms,
        at_resolution_limit: false,
    })
}

/// Result of the Gaussian-mass slope fit.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFit {
    /// Fitted order m: slope of log int u^2 G against log |t|.
    pub order: f64,
    pub residual: f64,
    pub times: Vec<f64>,
    pub integrals: Vec<f64>,
}

/// Fits m from samples (t_k, int u^2 G dx) with t_k increasing toward 0^-.
pub fn vanishing_order_gaussian(samples: &[(f64, f64)]) -> Result<GaussianFit> {
    if samples.len() < 5 {
        return Err(LabError::TooFewSamples {
            needed: 5,
            got: samples.len(),
        });
    }
    for &(t, v) in samples {
        if !(t < 0.0) {
            return Err(LabError::NonNegativeTime(t));
        }
        if !(v > 0.0) {
            return Err(LabError::NonPositiveIntegral { t, value: v });
        }
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(LabError::Config(
            "gaussian samples must increase toward 0^-".into(),
        ));
    }
    let xs: Vec<f64> = samples.iter().map(|&(t, _)| (-t).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, v)| v.ln()).collect();
    let (slope, _, residual) = fit_line(&xs, &ys);
    Ok(GaussianFit {
        order: slope,
        residual,
        times: samples.iter().map(|s| s.0).collect(),
        integrals: samples.iter().map(|s| s.1).collect(),
    })
}

/// Gaussian-mass samples int u^2 G(x - c(t), t) dx at the given times, with
/// the center drifting along c(t) = x_eps |t|/eps (pass x_eps = 0 for the
/// plain study at the origin).
pub fn gaussian_norm_samples(
    src: &SolutionSource,
    x_eps: &[f64],
    eps: f64,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let n = src.dim();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let center: Vec<f64> = x_eps.iter().map(|&c| c * (-t) / eps).collect();
        let v = match src {
            SolutionSource::Caloric(p) => {
                gaussian_quadrature(|x| p.eval(x, t).powi(2), &center, t, 24)?
            }
            SolutionSource::Trajectory(tr) => {
                let u = tr.field_at(t)?;
                let u_sq = u.product(&u);
                let g = BackwardGaussian::new(center.clone(), t)?;
                weighted_integral_spectral(&u_sq, &g)?
            }
        };
        let _ = n;
        out.push((t, v));
    }
    Ok(out)
}

/// The three estimates side by side with their diagnostics.
#[derive(Debug, Clone)]
pub struct VanishingReport {
    pub d_cyl: f64,
    pub m_gauss: f64,
    pub m_freq: i64,
    pub freq_stable: bool,
    /// M0^a + M1^b from the exponent set.
    pub bound: f64,
    pub cyl_residual: f64,
    pub gauss_residual: f64,
    pub qbar_final: f64,
    pub at_resolution_limit: bool,
}

/// Dyadic ladders from the fit-window design: radii 2^{-k}, k = 3..7 and
/// times -4^{-k}, k = 2..6.
pub fn default_radii() -> Vec<f64> {
    (3..=7).map(|k| 2f64.powi(-k)).collect()
}

pub fn default_times() -> Vec<f64> {
    (2..=6).map(|k| -4f64.powi(-k)).collect()
}

/// Runs all three estimators on a caloric oracle (study point at the
/// origin, zero drift).
pub fn estimate_vanishing_caloric(
    p: &CaloricPolynomial,
    exps: &ExponentSet,
    ygrid: &YGrid,
) -> Result<VanishingReport> {
    let src = SolutionSource::Caloric(p);
    let n = p.dim();
    let cyl = vanishing_order_cylinder(&src, &vec![0.0; n], 0.0, &default_radii())?;
    let samples = gaussian_norm_samples(&src, &vec![0.0; n], exps.epsilon, &default_times())?;
    let gauss = vanishing_order_gaussian(&samples)?;
    let trace = trace_caloric(p, exps.epsilon, 3.0, 73, ygrid)?;
    let lm = limit_mode(&trace)?;
    Ok(VanishingReport {
        d_cyl: cyl.order,
        m_gauss: gauss.order,
        m_freq: lm.mode,
        freq_stable: lm.stable,
        bound: exps.big_m,
        cyl_residual: cyl.residual,
        gauss_residual: gauss.residual,
        qbar_final: trace.samples().last().map(|s| s.qbar).unwrap_or(f64::NAN),
        at_resolution_limit: cyl.at_resolution_limit,
    })
}

/// Runs the estimators on a solved trajectory with the drift-translated
/// study point (x_eps, eps); ladders are scaled into the trajectory range.
pub fn estimate_vanishing_trajectory(
    traj: &Trajectory,
    x_eps: &[f64],
    eps: f64,
    exps: &ExponentSet,
    trace_samples: usize,
) -> Result<VanishingReport> {
    let src = SolutionSource::Trajectory(traj);
    // cylinders must fit inside [t_start, 0]
    let span = -traj.first_time();
    let r_max = (span.min(1.0) / 4.0).sqrt().min(0.125);
    let radii: Vec<f64> = (0..5).map(|k| r_max * 2f64.powi(-k)).collect();
    let cyl = vanishing_order_cylinder(&src, x_eps, 0.0, &radii)?;
    let t_deep = (-eps).max(traj.first_time());
    let times: Vec<f64> = (0..5).map(|k| t_deep * 4f64.powi(-k)).collect();
    let samples = gaussian_norm_samples(&src, x_eps, eps, &times)?;
    let gauss = vanishing_order_gaussian(&samples)?;
    let trace = trace_trajectory(traj, x_eps, eps, 2.0, trace_samples.max(49))?;
    let lm = limit_mode(&trace)?;
    Ok(VanishingReport {
        d_cyl: cyl.order,
        m_gauss: gauss.order,
        m_freq: lm.mode,
        freq_stable: lm.stable,
        bound: exps.big_m,
        cyl_residual: cyl.residual,
        gauss_residual: gauss.residual,
        qbar_final: trace.samples().last().map(|s| s.qbar).unwrap_or(f64::NAN),
        at_resolution_limit: cyl.at_resolution_limit,
    })
}

/// Verdict of max(d_cyl, m_gauss, m_freq) <= c_fit (M0^a + M1^b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderBoundVerdict {
    pub max_estimate: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Checks the order bound with a suite-level fitted constant.
pub fn verify_order_bound(
    report: &VanishingReport,
    exps: &ExponentSet,
    c_fit: f64,
) -> OrderBoundVerdict {
    let max_estimate = report
        .d_cyl
        .max(report.m_gauss)
        .max(report.m_freq as f64);
    let bound = c_fit * exps.big_m;
    let margin = bound - max_estimate;
    OrderBoundVerdict {
        max_estimate,
        bound,
        margin,
        pass: margin >= 0.0,
    }
}
