//! Similarity-variable machinery: the derived exponent set, the shifted
//! harmonic oscillator H = -Delta + |y|^2/16 - n/4 on a truncated y-box, the
//! frequency and modified frequency functions in both the similarity and the
//! physical (backward-Gaussian) representation, spectrum distances, and
//! limit-mode extraction from traces.

use crate::caloric::{CaloricPolynomial, HermiteFunction};
use crate::error::{LabError, Result};
use crate::field::{fft_nd_raw, ScalarField, TrigInterpolant};
use crate::gaussian::{
    gaussian_quadrature, weighted_first_moment_spectral, weighted_integral,
    weighted_integral_spectral, BackwardGaussian, LatticeQuadrature,
};
use crate::solver::Trajectory;
use rustfft::num_complex::Complex;
use std::f64::consts::PI;

/// Derived scalars of the quantitative-uniqueness estimates.
///
/// alpha = n/2p, beta = n/2q + 1/2; a = 2/(3 - 2/p2 - 4 alpha) and
/// b = 2/(3 - 2/q2 - 4 beta) (the temporal terms vanish for
/// p2 = q2 = infinity); M = M0^a + M1^b; epsilon = 1/(2M);
/// tau0 = log(1/epsilon).
///
/// Validity gates are the theorem hypotheses p > 2n/3, q > 2n and, when
/// temporal exponents are present, p2 > max{2/(3-4 alpha), 2/(1-alpha)} and
/// the q2 analogue. (For n = 1 the paper additionally suggests p >= 2 and
/// q >= 4; the lab documents but does not enforce that remark.)
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentSet {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub p2: Option<f64>,
    pub q2: Option<f64>,
    pub m0: f64,
    pub m1: f64,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    /// M = M0^a + M1^b.
    pub big_m: f64,
    pub epsilon: f64,
    pub tau0: f64,
}

/// Computes the exponent set, rejecting gate violations with the violated
/// inequality spelled out.
pub fn exponents(
    n: usize,
    p: f64,
    q: f64,
    m0: f64,
    m1: f64,
    p2: Option<f64>,
    q2: Option<f64>,
) -> Result<ExponentSet> {
    if !(1..=3).contains(&n) {
        return Err(LabError::GateViolation(format!(
            "dimension n in {{1,2,3}} violated (n = {n})"
        )));
    }
    let nf = n as f64;
    if !(p > 2.0 * nf / 3.0) {
        return Err(LabError::GateViolation(format!(
            "p > 2n/3 violated (p = {p}, 2n/3 = {})",
            2.0 * nf / 3.0
        )));
    }
    if !(q > 2.0 * nf) {
        return Err(LabError::GateViolation(format!(
            "q > 2n violated (q = {q}, 2n = {})",
            2.0 * nf
        )));
    }
    if !(m0 >= 1.0) {
        return Err(LabError::GateViolation(format!(
            "M0 >= 1 violated (M0 = {m0})"
        )));
    }
    if !(m1 >= 1.0) {
        return Err(LabError::GateViolation(format!(
            "M1 >= 1 violated (M1 = {m1})"
        )));
    }
    let alpha = nf / (2.0 * p);
    let beta = nf / (2.0 * q) + 0.5;
    let inv_p2 = match p2 {
        Some(v) if v.is_finite() => {
            let gate = (2.0 / (3.0 - 4.0 * alpha)).max(2.0 / (1.0 - alpha));
            if !(v > gate) {
                return Err(LabError::GateViolation(format!(
                    "p2 > max{{2/(3-4 alpha), 2/(1-alpha)}} violated (p2 = {v}, gate = {gate})"
                )));
            }
            1.0 / v
        }
        _ => 0.0,
    };
    let inv_q2 = match q2 {
        Some(v) if v.is_finite() => {
            let gate = (2.0 / (3.0 - 4.0 * beta)).max(2.0 / (1.0 - beta));
            if !(v > gate) {
                return Err(LabError::GateViolation(format!(
                    "q2 > max{{2/(3-4 beta), 2/(1-beta)}} violated (q2 = {v}, gate = {gate})"
                )));
            }
            1.0 / v
        }
        _ => 0.0,
    };
    let a = 2.0 / (3.0 - 2.0 * inv_p2 - 4.0 * alpha);
    let b = 2.0 / (3.0 - 2.0 * inv_q2 - 4.0 * beta);
    let big_m = m0.powf(a) + m1.powf(b);
    let epsilon = 1.0 / (2.0 * big_m);
    debug_assert!(epsilon > 0.0 && epsilon <= 0.5);
    Ok(ExponentSet {
        n,
        p,
        q,
        p2,
        q2,
        m0,
        m1,
        alpha,
        beta,
        a,
        b,
        big_m,
        epsilon,
        tau0: (1.0 / epsilon).ln(),
    })
}

/// Default half-width of the truncated y-box. At L = 18 the supported
/// Hermite modes decay to ~1e-11 relative at the box edge, keeping spectral
/// eigen-residuals below 1e-9.
pub const Y_BOX_HALF_WIDTH: f64 = 18.0;
/// Default nodes per axis of the y-box.
pub const Y_BOX_POINTS: usize = 384;

/// Uniform grid on the box [-L, L)^n carrying similarity-variable states.
#[derive(Debug, Clone, PartialEq)]
pub struct YGrid {
    n: usize,
    half_width: f64,
    points: usize,
}

impl YGrid {
    pub fn new(n: usize, half_width: f64, points: usize) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(LabError::InvalidGrid(format!(
                "y-grid supports n = 1, 2 (got {n})"
            )));
        }
        if points < 32 || half_width <= 0.0 {
            return Err(LabError::InvalidGrid(format!(
                "y-grid needs >= 32 points and positive half-width (got {points}, {half_width})"
            )));
        }
        Ok(YGrid {
            n,
            half_width,
            points,
        })
    }

    pub fn default_for(n: usize) -> Result<Self> {
        let points = if n == 1 { Y_BOX_POINTS } else { 192 };
        YGrid::new(n, Y_BOX_HALF_WIDTH, points)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn node_count(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    pub fn axis_coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn node_coords(&self, mut flat: usize, out: &mut [f64]) {
        for a in (0..self.n).rev() {
            out[a] = self.axis_coord(flat % self.points);
            flat /= self.points;
        }
    }

    fn bin_freq(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// True if the flat node index lies on the boundary shell of the box.
    fn on_boundary(&self, mut flat: usize) -> bool {
        for _ in 0..self.n {
            let i = flat % self.points;
            if i == 0 || i == self.points - 1 {
                return true;
            }
            flat /= self.points;
        }
        false
    }
}

/// U(., tau) on a y-grid, together with the drift vector a = -x_eps/eps of
/// the translated equation (zero when no translation was applied).
#[derive(Debug, Clone)]
pub struct SimilarityState {
    grid: YGrid,
    tau: f64,
    values: Vec<f64>,
    drift: Vec<f64>,
}

impl SimilarityState {
    pub fn new(grid: YGrid, tau: f64, values: Vec<f64>, drift: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(LabError::InvalidField(format!(
                "expected {} values, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        if drift.len() != grid.dim() {
            return Err(LabError::DimensionMismatch(format!(
                "drift has {} components in dimension {}",
                drift.len(),
                grid.dim()
            )));
        }
        Ok(SimilarityState {
            grid,
            tau,
            values,
            drift,
        })
    }

    pub fn grid(&self) -> &YGrid {
        &self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    /// ||U||^2 by the box quadrature.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()
    }

    fn inner(&self, other: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(other)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.cell_volume()
    }
}

/// U(y, tau) = e^{-|y|^2/8} u(y e^{-tau/2}, -e^{-tau}) for a closed-form
/// caloric polynomial (zero drift).
pub fn similarity_from_caloric(
    p: &CaloricPolynomial,
    tau: f64,
    grid: &YGrid,
) -> Result<SimilarityState> {
    if p.dim() != grid.dim() {
        return Err(LabError::DimensionMismatch(format!(
            "polynomial dimension {} vs y-grid dimension {}",
            p.dim(),
            grid.dim()
        )));
    }
    let t = -(-tau).exp();
    let root = (-t).sqrt();
    let mut y = vec![0.0; grid.dim()];
    let mut x = vec![0.0; grid.dim()];
    let values = (0..grid.node_count())
        .map(|i| {
            grid.node_coords(i, &mut y);
            let y2: f64 = y.iter().map(|v| v * v).sum();
            for a in 0..x.len() {
                x[a] = y[a] * root;
            }
            (-y2 / 8.0).exp() * p.eval(&x, t)
        })
        .collect();
    SimilarityState::new(grid.clone(), tau, values, vec![0.0; grid.dim()])
}

/// A Hermite eigenfunction placed on the y-grid (tau is only a label).
pub fn similarity_from_hermite(
    h: &HermiteFunction,
    tau: f64,
    grid: &YGrid,
) -> Result<SimilarityState> {
    if h.dim() != grid.dim() {
        return Err(LabError::DimensionMismatch(format!(
            "eigenfunction dimension {} vs y-grid dimension {}",
            h.dim(),
            grid.dim()
        )));
    }
    let mut y = vec![0.0; grid.dim()];
    let values = (0..grid.node_count())
        .map(|i| {
            grid.node_coords(i, &mut y);
            h.eval(&y)
        })
        .collect();
    SimilarityState::new(grid.clone(), tau, values, vec![0.0; grid.dim()])
}

/// Similarity state of a periodic field u(., t), t = -e^{-tau}, for the
/// translated equation started at (x_eps, -eps): the field is evaluated via
/// its trigonometric interpolant at y e^{-tau/2} + c(t), where
/// c(t) = x_eps |t|/eps is the drifted Gaussian center, and the drift vector
/// a = -x_eps/eps is recorded for the modified frequency.
pub fn similarity_from_field(
    interp: &TrigInterpolant,
    tau: f64,
    x_eps: &[f64],
    eps: f64,
    grid: &YGrid,
) -> Result<SimilarityState> {
    let n = grid.dim();
    if interp.spec().dim() != n || x_eps.len() != n {
        return Err(LabError::DimensionMismatch(
            "field, start point, and y-grid dimensions differ".into(),
        ));
    }
    let t = -(-tau).exp();
    let root = (-t).sqrt();
    let center: Vec<f64> = x_eps.iter().map(|&c| c * (-t) / eps).collect();
    let mut y = vec![0.0; n];
    let mut x = vec![0.0; n];
    let values: Vec<f64> = (0..grid.node_count())
        .map(|i| {
            grid.node_coords(i, &mut y);
            let y2: f64 = y.iter().map(|v| v * v).sum();
            for a in 0..n {
                x[a] = y[a] * root + center[a];
            }
            (-y2 / 8.0).exp() * interp.eval(&x)
        })
        .collect();
    let drift = x_eps.iter().map(|&c| -c / eps).collect();
    SimilarityState::new(grid.clone(), tau, values, drift)
}

/// H U = -Delta U + (|y|^2/16 - n/4) U on the truncated box, with a spectral
/// Laplacian. Requires the state to have decayed at the box edge (boundary
/// values below 1e-8 of the max), otherwise the truncation is unreliable and
/// the call reports it.
pub fn apply_h(state: &SimilarityState) -> Result<Vec<f64>> {
    apply_h_with_shift(state, state.grid.dim() as f64 / 4.0)
}

/// Internal form with an explicit zeroth-order shift (n/4 in production;
/// exposed for mutation testing of the self-test fixtures).
pub fn apply_h_with_shift(state: &SimilarityState, shift: f64) -> Result<Vec<f64>> {
    let grid = &state.grid;
    let max = state.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max > 0.0 {
        let boundary_max = state
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| grid.on_boundary(*i))
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        if boundary_max > 1e-8 * max {
            return Err(LabError::SimilarityResolution(format!(
                "boundary magnitude {boundary_max:.3e} exceeds 1e-8 of max {max:.3e}; \
                 enlarge the y-box"
            )));
        }
    }
    let n = grid.points;
    let dim = grid.dim();
    let mut data: Vec<Complex<f64>> = state
        .values
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    fft_nd_raw(n, dim, &mut data, false);
    let scale = 1.0 / grid.node_count() as f64;
    // wavenumber pi k / L on the periodic extension of the box
    let base = PI / grid.half_width;
    for (i, c) in data.iter_mut().enumerate() {
        let mut flat = i;
        let mut k2 = 0.0;
        for _ in 0..dim {
            let k = grid.bin_freq(flat % n) as f64;
            k2 += k * k;
            flat /= n;
        }
        *c *= k2 * base * base * scale;
    }
    fft_nd_raw(n, dim, &mut data, true);
    let mut y = vec![0.0; dim];
    let out = data
        .iter()
        .enumerate()
        .map(|(i, lap)| {
            grid.node_coords(i, &mut y);
            let y2: f64 = y.iter().map(|v| v * v).sum();
            lap.re + (y2 / 16.0 - shift) * state.values[i]
        })
        .collect();
    Ok(out)
}

/// Rayleigh quotient (HU, U)/||U||^2.
pub fn frequency_similarity(state: &SimilarityState) -> Result<f64> {
    let norm_sq = state.norm_sq();
    if norm_sq == 0.0 {
        return Err(LabError::ZeroField);
    }
    let hu = apply_h(state)?;
    Ok(state.inner(&hu) / norm_sq)
}

/// Modified frequency Qbar = Q - e^{-tau/2} a_j int y_j U^2 / ||U||^2.
pub fn modified_frequency(state: &SimilarityState) -> Result<f64> {
    let norm_sq = state.norm_sq();
    if norm_sq == 0.0 {
        return Err(LabError::ZeroField);
    }
    let q = frequency_similarity(state)?;
    if state.drift.iter().all(|&a| a == 0.0) {
        return Ok(q);
    }
    let grid = &state.grid;
    let mut y = vec![0.0; grid.dim()];
    let mut first_moments = vec![0.0; grid.dim()];
    for (i, v) in state.values.iter().enumerate() {
        grid.node_coords(i, &mut y);
        let u2 = v * v;
        for a in 0..grid.dim() {
            first_moments[a] += y[a] * u2;
        }
    }
    let cell = grid.cell_volume();
    let factor = (-state.tau / 2.0).exp();
    let correction: f64 = state
        .drift
        .iter()
        .zip(&first_moments)
        .map(|(&a, &m)| factor * a * m * cell / norm_sq)
        .sum();
    Ok(q - correction)
}

/// Physical-variable frequency Q = |t| int |grad u|^2 G / int u^2 G with the
/// lattice-periodized quadrature.
pub fn frequency_physical(u: &ScalarField, t: f64, x0: &[f64]) -> Result<f64> {
    let g = BackwardGaussian::new(x0.to_vec(), t)?;
    let quad = LatticeQuadrature::auto(t, 1e-10)?;
    let grad_sq = u.gradient().magnitude_squared();
    let u_sq = u.product(u);
    let den = weighted_integral(&u_sq, &g, &quad)?;
    if den <= 0.0 {
        return Err(LabError::NonPositiveIntegral { t, value: den });
    }
    let num = weighted_integral(&grad_sq, &g, &quad)?;
    Ok(-t * num / den)
}

/// Same ratio via the exact spectral route (stays accurate for |t| below the
/// lattice resolution threshold).
pub fn frequency_physical_spectral(u: &ScalarField, t: f64, x0: &[f64]) -> Result<f64> {
    let g = BackwardGaussian::new(x0.to_vec(), t)?;
    let grad_sq = u.gradient().magnitude_squared();
    let u_sq = u.product(u);
    let den = weighted_integral_spectral(&u_sq, &g)?;
    if den <= 0.0 {
        return Err(LabError::NonPositiveIntegral { t, value: den });
    }
    let num = weighted_integral_spectral(&grad_sq, &g)?;
    Ok(-t * num / den)
}

/// Physical frequency of a caloric polynomial at the origin, by scaled
/// Gauss-Hermite quadrature (exact for polynomials).
pub fn frequency_physical_caloric(p: &CaloricPolynomial, t: f64) -> Result<f64> {
    let n = p.dim();
    let center = vec![0.0; n];
    let den = gaussian_quadrature(|x| p.eval(x, t).powi(2), &center, t, 24)?;
    if den <= 0.0 {
        return Err(LabError::NonPositiveIntegral { t, value: den });
    }
    let num = gaussian_quadrature(|x| p.grad_sq(x, t), &center, t, 24)?;
    Ok(-t * num / den)
}

/// Distance from a modified-frequency value to sp(H) = {m/2 : m in N_0},
/// clamped to |qbar| for negative values.
pub fn spectrum_distance(qbar: f64) -> f64 {
    if qbar < 0.0 {
        -qbar
    } else {
        (qbar - (2.0 * qbar).round() / 2.0).abs()
    }
}

/// One row of a frequency trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub tau: f64,
    pub t: f64,
    /// ||U||^2 = int u^2 G dx.
    pub norm_sq: f64,
    pub q: f64,
    pub qbar: f64,
    pub dist: f64,
}

/// Samples of (tau, ||U||^2, Q, Qbar, dist(Qbar, sp(H))) along a run,
/// strictly increasing in tau.
#[derive(Debug, Clone, Default)]
pub struct FrequencyTrace {
    samples: Vec<TraceSample>,
}

impl FrequencyTrace {
    pub fn new(samples: Vec<TraceSample>) -> Result<Self> {
        if samples.windows(2).any(|w| w[1].tau <= w[0].tau) {
            return Err(LabError::InvalidField(
                "trace taus must be strictly increasing".into(),
            ));
        }
        Ok(FrequencyTrace { samples })
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sup_qbar(&self) -> f64 {
        self.samples
            .iter()
            .fold(f64::NEG_INFINITY, |m, s| m.max(s.qbar))
    }

    pub fn span(&self) -> f64 {
        if self.samples.len() < 2 {
            0.0
        } else {
            self.samples.last().unwrap().tau - self.samples[0].tau
        }
    }
}

/// Outcome of limit-mode extraction over the trailing window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitMode {
    /// m = round(2 Qbar) over the trailing window (clamped at 0).
    pub mode: i64,
    /// True when the window's rounded mode is constant and its spectrum
    /// distance stays below the threshold.
    pub stable: bool,
    pub max_distance: f64,
    pub window_len: usize,
}

/// Trailing-window length in tau used by [`limit_mode`].
pub const LIMIT_WINDOW: f64 = 1.0;
/// Minimum samples in the trailing window.
pub const LIMIT_WINDOW_MIN_SAMPLES: usize = 20;
/// Stability threshold on the spectrum distance (half-integer gaps are 0.5).
pub const LIMIT_STABILITY_THRESHOLD: f64 = 0.1;

/// Extracts m with Qbar -> m/2 from the trailing window of a trace.
pub fn limit_mode(trace: &FrequencyTrace) -> Result<LimitMode> {
    let span = trace.span();
    if span < 2.0 {
        return Err(LabError::TraceTooShort { span, needed: 2.0 });
    }
    let last_tau = trace.samples.last().unwrap().tau;
    let window: Vec<&TraceSample> = trace
        .samples
        .iter()
        .filter(|s| s.tau >= last_tau - LIMIT_WINDOW)
        .collect();
    if window.len() < LIMIT_WINDOW_MIN_SAMPLES {
        return Err(LabError::TooFewSamples {
            needed: LIMIT_WINDOW_MIN_SAMPLES,
            got: window.len(),
        });
    }
    let modes: Vec<i64> = window
        .iter()
        .map(|s| ((2.0 * s.qbar).round() as i64).max(0))
        .collect();
    let max_distance = window.iter().fold(0.0f64, |m, s| m.max(s.dist));
    let constant = modes.windows(2).all(|w| w[0] == w[1]);
    let mode = *modes.last().unwrap();
    Ok(LimitMode {
        mode,
        stable: constant && max_distance <= LIMIT_STABILITY_THRESHOLD,
        max_distance,
        window_len: window.len(),
    })
}

/// Trace of a caloric polynomial through the similarity path, zero
/// coefficients and zero drift: tau in [tau0, tau0 + span].
pub fn trace_caloric(
    p: &CaloricPolynomial,
    eps: f64,
    span: f64,
    samples: usize,
    grid: &YGrid,
) -> Result<FrequencyTrace> {
    if samples < 2 {
        return Err(LabError::TooFewSamples {
            needed: 2,
            got: samples,
        });
    }
    let tau0 = (1.0 / eps).ln();
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let tau = tau0 + span * i as f64 / (samples - 1) as f64;
        let state = similarity_from_caloric(p, tau, grid)?;
        let qbar = modified_frequency(&state)?;
        rows.push(TraceSample {
            tau,
            t: -(-tau).exp(),
            norm_sq: state.norm_sq(),
            q: qbar,
            qbar,
            dist: spectrum_distance(qbar),
        });
    }
    FrequencyTrace::new(rows)
}

/// Trace of a solved trajectory through the physical representation: at each
/// tau the weighted integrals of u^2, |grad u|^2, and (x - c)_j u^2 are taken
/// against the Gaussian drifting along c(t) = x_eps |t|/eps (exact spectral
/// route), and Qbar = Q - a_j M1_j / M0 with a = -x_eps/eps.
pub fn trace_trajectory(
    traj: &Trajectory,
    x_eps: &[f64],
    eps: f64,
    span: f64,
    samples: usize,
) -> Result<FrequencyTrace> {
    if samples < 2 {
        return Err(LabError::TooFewSamples {
            needed: 2,
            got: samples,
        });
    }
    let n = traj.spec().dim();
    if x_eps.len() != n {
        return Err(LabError::DimensionMismatch(
            "start point dimension mismatch".into(),
        ));
    }
    let tau0 = (1.0 / eps).ln();
    let drift: Vec<f64> = x_eps.iter().map(|&c| -c / eps).collect();
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let tau = tau0 + span * i as f64 / (samples - 1) as f64;
        let t = -(-tau).exp();
        let u = traj.field_at(t)?;
        let center: Vec<f64> = x_eps.iter().map(|&c| c * (-t) / eps).collect();
        let g = BackwardGaussian::new(center, t)?;
        let u_sq = u.product(&u);
        let m0 = weighted_integral_spectral(&u_sq, &g)?;
        if m0 <= 0.0 {
            return Err(LabError::NonPositiveIntegral { t, value: m0 });
        }
        let grad_sq = u.gradient().magnitude_squared();
        let dirichlet = weighted_integral_spectral(&grad_sq, &g)?;
        let q = -t * dirichlet / m0;
        let mut correction = 0.0;
        for (a, &aj) in drift.iter().enumerate() {
            if aj != 0.0 {
                let m1 = weighted_first_moment_spectral(&u_sq, &g, a)?;
                correction += aj * m1 / m0;
            }
        }
        let qbar = q - correction;
        rows.push(TraceSample {
            tau,
            t,
            norm_sq: m0,
            q,
            qbar,
            dist: spectrum_distance(qbar),
        });
    }
    FrequencyTrace::new(rows)
}

/// Relative discrepancy between the similarity and physical representations:
/// max of |Q_sim - Q_phys| / max(1, |Q_phys|) and the norm identity
/// ||U||^2 = int u^2 G dx (relative). Both routes must be computable.
pub fn norm_identity_residual(
    state: &SimilarityState,
    u: &ScalarField,
    t: f64,
    x0: &[f64],
) -> Result<f64> {
    let q_sim = frequency_similarity(state)?;
    let norm_y = state.norm_sq();
    let g = BackwardGaussian::new(x0.to_vec(), t)?;
    let u_sq = u.product(u);
    let m0 = weighted_integral_spectral(&u_sq, &g)?;
    if m0 <= 0.0 {
        return Err(LabError::NonPositiveIntegral { t, value: m0 });
    }
    let grad_sq = u.gradient().magnitude_squared();
    let q_phys = -t * weighted_integral_spectral(&grad_sq, &g)? / m0;
    let dq = (q_sim - q_phys).abs() / q_phys.abs().max(1.0);
    let dn = (norm_y - m0).abs() / m0;
    Ok(dq.max(dn))
}

/// Caloric version of the cross-representation check: similarity path on the
/// y-grid against exact Gaussian quadrature in physical variables.
pub fn norm_identity_residual_caloric(
    p: &CaloricPolynomial,
    tau: f64,
    grid: &YGrid,
) -> Result<f64> {
    let state = similarity_from_caloric(p, tau, grid)?;
    let t = -(-tau).exp();
    let q_sim = frequency_similarity(&state)?;
    let q_phys = frequency_physical_caloric(p, t)?;
    let center = vec![0.0; p.dim()];
    let mass = gaussian_quadrature(|x| p.eval(x, t).powi(2), &center, t, 24)?;
    let dq = (q_sim - q_phys).abs() / q_phys.abs().max(1.0);
    let dn = (state.norm_sq() - mass).abs() / mass;
    Ok(dq.max(dn))
}
