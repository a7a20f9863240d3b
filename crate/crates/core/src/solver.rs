//! Time integration of u_t - Delta u = w . grad u + v u on the torus.
//!
//! Diffusion is advanced exactly in spectral space (multiplier
//! e^{-4 pi^2 |k|^2 dt}), so the step size is set by the mild lower-order
//! terms alone; those are advanced with an explicit midpoint (RK2) stage
//! inside either Lie or Strang splitting.

use crate::error::{LabError, Result};
use crate::field::{fft_nd, GridSpec, ScalarField, VectorField};
use crate::rng::seeded_rng;
use rand::Rng;
use rustfft::num_complex::Complex;
use std::f64::consts::PI;

/// Node magnitude beyond which a run is declared blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Lie splitting: explicit RK2 on the lower-order term, then exact diffusion.
    ImexEuler,
    /// Strang splitting: half diffusion, RK2, half diffusion.
    Strang,
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub grid: GridSpec,
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    pub scheme: Scheme,
}

/// A band-limited random field pair rotated in time and rescaled per time
/// slice so its L^p norm is exactly the target.
#[derive(Debug, Clone)]
pub struct RotatingTrig {
    g0: ScalarField,
    g1: ScalarField,
    rate: f64,
    target: f64,
    p: f64,
}

impl RotatingTrig {
    fn sample(&self, t: f64) -> ScalarField {
        let raw = if self.rate == 0.0 {
            self.g0.clone()
        } else {
            let (s, c) = (self.rate * t).sin_cos();
            self.g0.lin_comb(c, &self.g1, s)
        };
        let norm = raw.lp_norm(self.p).expect("valid exponent");
        raw.scaled(self.target / norm.max(1e-300))
    }
}

/// Same construction for a vector field, normalized by the L^q norm of the
/// pointwise magnitude.
#[derive(Debug, Clone)]
pub struct RotatingTrigVec {
    g0: VectorField,
    g1: VectorField,
    rate: f64,
    target: f64,
    q: f64,
}

impl RotatingTrigVec {
    fn sample(&self, t: f64) -> VectorField {
        let n = self.g0.spec().dim();
        let comps: Vec<ScalarField> = if self.rate == 0.0 {
            self.g0.components().to_vec()
        } else {
            let (s, c) = (self.rate * t).sin_cos();
            (0..n)
                .map(|a| self.g0.component(a).lin_comb(c, self.g1.component(a), s))
                .collect()
        };
        let raw = VectorField::new(comps).expect("consistent components");
        let norm = raw.lp_norm(self.q).expect("valid exponent");
        let scale = self.target / norm.max(1e-300);
        VectorField::new(raw.components().iter().map(|c| c.scaled(scale)).collect())
            .expect("consistent components")
    }
}

/// Time-indexed sampler for the zeroth-order coefficient v.
#[derive(Debug, Clone)]
pub enum ScalarSampler {
    Zero,
    Constant(f64),
    RandomTrig(RotatingTrig),
}

impl ScalarSampler {
    pub fn is_zero(&self) -> bool {
        matches!(self, ScalarSampler::Zero)
            || matches!(self, ScalarSampler::Constant(c) if *c == 0.0)
    }

    pub fn sample(&self, grid: &GridSpec, t: f64) -> ScalarField {
        match self {
            ScalarSampler::Zero => ScalarField::zeros(grid),
            ScalarSampler::Constant(c) => ScalarField::constant(grid, *c),
            ScalarSampler::RandomTrig(r) => r.sample(t),
        }
    }
}

/// Time-indexed sampler for the first-order coefficient w.
#[derive(Debug, Clone)]
pub enum VectorSampler {
    Zero,
    Constant(Vec<f64>),
    RandomTrig(RotatingTrigVec),
}

impl VectorSampler {
    pub fn is_zero(&self) -> bool {
        match self {
            VectorSampler::Zero => true,
            VectorSampler::Constant(c) => c.iter().all(|x| *x == 0.0),
            VectorSampler::RandomTrig(_) => false,
        }
    }

    pub fn sample(&self, grid: &GridSpec, t: f64) -> VectorField {
        match self {
            VectorSampler::Zero => VectorField::zeros(grid),
            VectorSampler::Constant(c) => VectorField::new(
                c.iter().map(|&v| ScalarField::constant(grid, v)).collect(),
            )
            .expect("constant vector"),
            VectorSampler::RandomTrig(r) => r.sample(t),
        }
    }
}

/// Lower-order coefficients of the equation together with their Lebesgue
/// exponents and norm bounds M0, M1 (clamped to >= 1, matching the regime
/// the estimates address).
#[derive(Debug, Clone)]
pub struct Coefficients {
    pub v: ScalarSampler,
    pub w: VectorSampler,
    pub p: f64,
    pub q: f64,
    pub p2: Option<f64>,
    pub q2: Option<f64>,
    pub m0: f64,
    pub m1: f64,
}

impl Coefficients {
    pub fn zero(p: f64, q: f64) -> Self {
        Coefficients {
            v: ScalarSampler::Zero,
            w: VectorSampler::Zero,
            p,
            q,
            p2: None,
            q2: None,
            m0: 1.0,
            m1: 1.0,
        }
    }

    pub fn constant_v(lambda: f64, p: f64, q: f64) -> Self {
        Coefficients {
            v: ScalarSampler::Constant(lambda),
            w: VectorSampler::Zero,
            p,
            q,
            p2: None,
            q2: None,
            m0: lambda.abs().max(1.0),
            m1: 1.0,
        }
    }

    /// Seeded random band-limited coefficients with exact per-slice norms
    /// ||v(., t)||_p = m0_target and ||w(., t)||_q = m1_target.
    #[allow(clippy::too_many_arguments)]
    pub fn random(
        grid: &GridSpec,
        seed: u64,
        mode_cap: usize,
        m0_target: f64,
        m1_target: f64,
        p: f64,
        q: f64,
        rotation_rate: f64,
    ) -> Self {
        let n = grid.dim();
        let mut stream = 0u64;
        let mut next_field = || {
            let f = random_trig_field(grid, seed, stream, mode_cap);
            stream += 1;
            f
        };
        let v = ScalarSampler::RandomTrig(RotatingTrig {
            g0: next_field(),
            g1: next_field(),
            rate: rotation_rate,
            target: m0_target,
            p,
        });
        let w0 = VectorField::new((0..n).map(|_| next_field()).collect()).unwrap();
        let w1 = VectorField::new((0..n).map(|_| next_field()).collect()).unwrap();
        let w = VectorSampler::RandomTrig(RotatingTrigVec {
            g0: w0,
            g1: w1,
            rate: rotation_rate,
            target: m1_target,
            q,
        });
        Coefficients {
            v,
            w,
            p,
            q,
            p2: None,
            q2: None,
            m0: m0_target.max(1.0),
            m1: m1_target.max(1.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero() && self.w.is_zero()
    }

    /// Recomputes the norm bounds from samples over `times`: the sup in time
    /// of the spatial norm, or the L^{p2}/L^{q2}-in-time composite when
    /// temporal exponents are present. Clamps to >= 1.
    pub fn measure(&mut self, grid: &GridSpec, times: &[f64]) -> Result<()> {
        if times.is_empty() {
            return Err(LabError::Config("measure needs sample times".into()));
        }
        let v_norms: Vec<f64> = times
            .iter()
            .map(|&t| self.v.sample(grid, t).lp_norm(self.p))
            .collect::<Result<_>>()?;
        let w_norms: Vec<f64> = times
            .iter()
            .map(|&t| self.w.sample(grid, t).lp_norm(self.q))
            .collect::<Result<_>>()?;
        self.m0 = composite_time_norm(&v_norms, times, self.p2).max(1.0);
        self.m1 = composite_time_norm(&w_norms, times, self.q2).max(1.0);
        Ok(())
    }
}

fn composite_time_norm(norms: &[f64], times: &[f64], temporal: Option<f64>) -> f64 {
    match temporal {
        None => norms.iter().fold(0.0f64, |m, &v| m.max(v)),
        Some(pt) if pt.is_infinite() => norms.iter().fold(0.0f64, |m, &v| m.max(v)),
        Some(pt) => {
            // trapezoid in t of ||.||^pt
            let mut acc = 0.0;
            for i in 1..times.len() {
                let dt = times[i] - times[i - 1];
                acc += 0.5 * dt * (norms[i].powf(pt) + norms[i - 1].powf(pt));
            }
            acc.powf(1.0 / pt)
        }
    }
}

/// Zero-mean random trigonometric polynomial with modes 0 < |k|_inf <= cap,
/// deterministic in (seed, stream).
pub fn random_trig_field(grid: &GridSpec, seed: u64, stream: u64, cap: usize) -> ScalarField {
    let mut rng = seeded_rng(seed, stream);
    let n = grid.dim();
    let points = grid.points();
    let mut spectrum = vec![Complex::new(0.0, 0.0); grid.node_count()];
    let cap = cap.min(points / 2 - 1) as i64;
    // enumerate half-space modes (first nonzero component positive)
    let mut k = vec![0i64; n];
    enumerate_modes(&mut k, 0, cap, &mut |k| {
        if k.iter().all(|&c| c == 0) || !half_space(k) {
            return;
        }
        let a: f64 = rng.random_range(-1.0..1.0);
        let b: f64 = rng.random_range(-1.0..1.0);
        // a cos(2 pi k.x) + b sin(2 pi k.x): c_k = (a - i b)/2, c_{-k} = conj
        let c = Complex::new(a / 2.0, -b / 2.0);
        let idx = mode_index(grid, k);
        let neg: Vec<i64> = k.iter().map(|&c| -c).collect();
        let idx_neg = mode_index(grid, &neg);
        spectrum[idx] = c;
        spectrum[idx_neg] = c.conj();
    });
    let mut data = spectrum;
    fft_nd(grid, &mut data, true);
    let values = data.iter().map(|c| c.re).collect();
    ScalarField::from_values(grid, values).expect("finite synthesis")
}

fn enumerate_modes(k: &mut Vec<i64>, axis: usize, cap: i64, f: &mut impl FnMut(&[i64])) {
    if axis == k.len() {
        f(k);
        return;
    }
    for c in -cap..=cap {
        k[axis] = c;
        enumerate_modes(k, axis + 1, cap, f);
    }
}

fn half_space(k: &[i64]) -> bool {
    for &c in k {
        if c > 0 {
            return true;
        }
        if c < 0 {
            return false;
        }
    }
    false
}

fn mode_index(grid: &GridSpec, k: &[i64]) -> usize {
    let n = grid.points() as i64;
    let mut idx = 0usize;
    for &c in k {
        let bin = if c >= 0 { c } else { c + n };
        idx = idx * grid.points() + bin as usize;
    }
    idx
}

/// Advances diffusion exactly: multiplies mode k by e^{-4 pi^2 |k|^2 dt}.
fn diffuse_exact(u: &ScalarField, dt: f64) -> ScalarField {
    let spec = u.spec();
    let mut data: Vec<Complex<f64>> = u.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_nd(spec, &mut data, false);
    let scale = 1.0 / spec.node_count() as f64;
    let mut freqs = vec![0i64; spec.dim()];
    for (i, c) in data.iter_mut().enumerate() {
        spec.mode_freqs(i, &mut freqs);
        let k2: f64 = freqs.iter().map(|&k| (k * k) as f64).sum();
        *c *= (-4.0 * PI * PI * k2 * dt).exp() * scale;
    }
    fft_nd(spec, &mut data, true);
    ScalarField::from_values(spec, data.iter().map(|c| c.re).collect())
        .expect("diffusion keeps values finite")
}

/// w . grad u + v u at time t.
fn lower_order(u: &ScalarField, t: f64, coeffs: &Coefficients) -> ScalarField {
    let grid = u.spec();
    let mut out = ScalarField::zeros(grid);
    if !coeffs.w.is_zero() {
        let w = coeffs.w.sample(grid, t);
        let grad = u.gradient();
        for a in 0..grid.dim() {
            let prod = w.component(a).product(grad.component(a));
            out = out.lin_comb(1.0, &prod, 1.0);
        }
    }
    if !coeffs.v.is_zero() {
        let v = coeffs.v.sample(grid, t);
        out = out.lin_comb(1.0, &v.product(u), 1.0);
    }
    out
}

/// Explicit midpoint stage for the lower-order term over [t, t + dt].
fn rk2_lower_order(u: &ScalarField, t: f64, dt: f64, coeffs: &Coefficients) -> ScalarField {
    if coeffs.is_zero() {
        return u.clone();
    }
    let k1 = lower_order(u, t, coeffs);
    let mid = u.lin_comb(1.0, &k1, dt / 2.0);
    let k2 = lower_order(&mid, t + dt / 2.0, coeffs);
    u.lin_comb(1.0, &k2, dt)
}

fn check_finite(u: &ScalarField, t: f64) -> Result<()> {
    let m = u.max_abs();
    if !m.is_finite() || m > BLOWUP_THRESHOLD {
        return Err(LabError::BlowUp { t, magnitude: m });
    }
    Ok(())
}

/// One IMEX step from (u, t) to t + dt.
pub fn step(
    u: &ScalarField,
    t: f64,
    dt: f64,
    coeffs: &Coefficients,
    scheme: Scheme,
) -> Result<ScalarField> {
    if !(dt > 0.0) {
        return Err(LabError::InvalidTimeStep(dt));
    }
    let next = match scheme {
        Scheme::ImexEuler => {
            let explicit = rk2_lower_order(u, t, dt, coeffs);
            diffuse_exact(&explicit, dt)
        }
        Scheme::Strang => {
            let half = diffuse_exact(u, dt / 2.0);
            let explicit = rk2_lower_order(&half, t, dt, coeffs);
            diffuse_exact(&explicit, dt / 2.0)
        }
    };
    check_finite(&next, t + dt)?;
    Ok(next)
}

/// Ordered (t, field) samples of a solve.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<ScalarField>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn field(&self, i: usize) -> &ScalarField {
        &self.fields[i]
    }

    pub fn first_time(&self) -> f64 {
        self.times[0]
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn last_field(&self) -> &ScalarField {
        self.fields.last().unwrap()
    }

    pub fn spec(&self) -> &GridSpec {
        self.fields[0].spec()
    }

    /// Field at time t by linear interpolation between stored steps.
    pub fn field_at(&self, t: f64) -> Result<ScalarField> {
        let t0 = self.first_time();
        let t1 = self.last_time();
        let slack = 1e-9 * (t1 - t0).max(1e-12);
        if t < t0 - slack || t > t1 + slack {
            return Err(LabError::Config(format!(
                "time {t} outside trajectory range [{t0}, {t1}]"
            )));
        }
        let t = t.clamp(t0, t1);
        let i = match self.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return Ok(self.fields[i].clone()),
            Err(i) => i,
        };
        let (lo, hi) = (i - 1, i);
        let blend = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        Ok(self.fields[lo].lin_comb(1.0 - blend, &self.fields[hi], blend))
    }
}

/// Integrates the equation from cfg.t_start to cfg.t_end; deterministic
/// given its inputs. The final step is shortened to land exactly on t_end.
pub fn solve(cfg: &SimulationConfig, u0: &ScalarField, coeffs: &Coefficients) -> Result<Trajectory> {
    if u0.spec() != &cfg.grid {
        return Err(LabError::DimensionMismatch(
            "initial field not on the configured grid".into(),
        ));
    }
    if !(cfg.dt > 0.0) {
        return Err(LabError::InvalidTimeStep(cfg.dt));
    }
    if !(cfg.t_end > cfg.t_start) {
        return Err(LabError::Config(format!(
            "empty time interval [{}, {}]",
            cfg.t_start, cfg.t_end
        )));
    }
    check_finite(u0, cfg.t_start)?;
    let span = cfg.t_end - cfg.t_start;
    let steps = (span / cfg.dt - 1e-12).ceil().max(1.0) as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut fields = Vec::with_capacity(steps + 1);
    times.push(cfg.t_start);
    fields.push(u0.clone());
    let mut u = u0.clone();
    let mut t = cfg.t_start;
    for i in 0..steps {
        let target = if i + 1 == steps {
            cfg.t_end
        } else {
            cfg.t_start + (i + 1) as f64 * cfg.dt
        };
        let dt = target - t;
        u = step(&u, t, dt, coeffs, cfg.scheme)?;
        t = target;
        times.push(t);
        fields.push(u.clone());
    }
    Ok(Trajectory { times, fields })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TAU: f64 = 2.0 * PI;

    fn mode_field(grid: &GridSpec) -> ScalarField {
        ScalarField::from_fn(grid, |x| (TAU * x[0]).cos())
    }

    #[test]
    fn pure_heat_single_step_decay() {
        let grid = GridSpec::new(1, 64).unwrap();
        let u = mode_field(&grid);
        let dt = 1e-3;
        let coeffs = Coefficients::zero(f64::INFINITY, f64::INFINITY);
        for scheme in [Scheme::ImexEuler, Scheme::Strang] {
            let next = step(&u, 0.0, dt, &coeffs, scheme).unwrap();
            let factor = (-4.0 * PI * PI * dt).exp();
            for (a, b) in next.values().iter().zip(u.values()) {
                assert_relative_eq!(*a, factor * b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn zero_field_stays_zero() {
        let grid = GridSpec::new(1, 32).unwrap();
        let u = ScalarField::zeros(&grid);
        let coeffs = Coefficients::zero(f64::INFINITY, f64::INFINITY);
        let next = step(&u, 0.0, 1e-2, &coeffs, Scheme::Strang).unwrap();
        assert_eq!(next.max_abs(), 0.0);
    }

    #[test]
    fn constant_initial_data_is_invariant() {
        let grid = GridSpec::new(2, 16).unwrap();
        let u0 = ScalarField::constant(&grid, 1.0);
        let cfg = SimulationConfig {
            grid: grid.clone(),
            t_start: 0.0,
            t_end: 0.05,
            dt: 1e-3,
            scheme: Scheme::Strang,
        };
        let coeffs = Coefficients::zero(f64::INFINITY, f64::INFINITY);
        let traj = solve(&cfg, &u0, &coeffs).unwrap();
        for i in 0..traj.len() {
            assert_relative_eq!(traj.field(i).mean(), 1.0, max_relative = 1e-13);
            assert!((traj.field(i).max_abs() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn solve_matches_analytic_mode_decay() {
        let grid = GridSpec::new(1, 128).unwrap();
        let u0 = mode_field(&grid);
        let cfg = SimulationConfig {
            grid: grid.clone(),
            t_start: 0.0,
            t_end: 0.1,
            dt: 1e-4,
            scheme: Scheme::Strang,
        };
        let coeffs = Coefficients::zero(f64::INFINITY, f64::INFINITY);
        let traj = solve(&cfg, &u0, &coeffs).unwrap();
        let factor = (-0.4 * PI * PI).exp();
        let last = traj.last_field();
        for (a, b) in last.values().iter().zip(u0.values()) {
            assert!((a - factor * b).abs() <= 1e-8 * factor);
        }
    }

    #[test]
    fn constant_potential_integrating_factor() {
        let grid = GridSpec::new(1, 64).unwrap();
        let u0 = mode_field(&grid);
        let lambda = 1.5;
        let cfg = SimulationConfig {
            grid: grid.clone(),
            t_start: 0.0,
            t_end: 0.1,
            dt: 1e-4,
            scheme: Scheme::Strang,
        };
        let coeffs = Coefficients::constant_v(lambda, f64::INFINITY, f64::INFINITY);
        let traj = solve(&cfg, &u0, &coeffs).unwrap();
        let factor = ((lambda - 4.0 * PI * PI) * 0.1).exp();
        let last = traj.last_field();
        for (a, b) in last.values().iter().zip(u0.values()) {
            assert!((a - factor * b).abs() <= 1e-6 * factor.abs().max(1e-30));
        }
    }

    #[test]
    fn strang_is_second_order_on_integrating_factor() {
        let grid = GridSpec::new(1, 32).unwrap();
        let u0 = mode_field(&grid);
        let lambda = 2.0;
        let coeffs = Coefficients::constant_v(lambda, f64::INFINITY, f64::INFINITY);
        let exact = ((lambda - 4.0 * PI * PI) * 0.08).exp();
        let mut errs = Vec::new();
        for dt in [4e-3, 2e-3] {
            let cfg = SimulationConfig {
                grid: grid.clone(),
                t_start: 0.0,
                t_end: 0.08,
                dt,
                scheme: Scheme::Strang,
            };
            let traj = solve(&cfg, &u0, &coeffs).unwrap();
            let err = traj
                .last_field()
                .values()
                .iter()
                .zip(u0.values())
                .map(|(a, b)| (a - exact * b).abs())
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 1.9, "observed order {order}");
    }

    #[test]
    fn mass_conserved_and_l2_decays_for_pure_heat() {
        let grid = GridSpec::new(1, 64).unwrap();
        let u0 = ScalarField::from_fn(&grid, |x| {
            0.3 + (TAU * x[0]).cos() + 0.5 * (3.0 * TAU * x[0]).sin()
        });
        let cfg = SimulationConfig {
            grid: grid.clone(),
            t_start: 0.0,
            t_end: 0.05,
            dt: 5e-4,
            scheme: Scheme::ImexEuler,
        };
        let coeffs = Coefficients::zero(f64::INFINITY, f64::INFINITY);
        let traj = solve(&cfg, &u0, &coeffs).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..traj.len() {
            assert_relative_eq!(traj.field(i).mean(), 0.3, max_relative = 1e-12);
            let l2 = traj.field(i).lp_norm(2.0).unwrap();
            assert!(l2 <= prev * (1.0 + 1e-13));
            prev = l2;
        }
    }

    #[test]
    fn blow_up_is_reported_with_time() {
        let grid = GridSpec::new(1, 32).unwrap();
        let u0 = ScalarField::constant(&grid, 1.0);
        let cfg = SimulationConfig {
            grid: grid.clone(),
            t_start: 0.0,
            t_end: 1.0,
            dt: 1e-2,
            scheme: Scheme::ImexEuler,
        };
        let coeffs = Coefficients::constant_v(4000.0, f64::INFINITY, f64::INFINITY);
        match solve(&cfg, &u0, &coeffs) {
            Err(LabError::BlowUp { t, .. }) => assert!(t > 0.0 && t < 1.0),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn random_coefficients_have_exact_norms() {
        let grid = GridSpec::new(2, 32).unwrap();
        let coeffs = Coefficients::random(&grid, 7, 4, 3.0, 2.0, 4.0, 6.0, 1.0);
        for t in [-0.9, -0.25, -0.01] {
            let v = coeffs.v.sample(&grid, t);
            assert_relative_eq!(v.lp_norm(4.0).unwrap(), 3.0, max_relative = 1e-12);
            let w = coeffs.w.sample(&grid, t);
            assert_relative_eq!(w.lp_norm(6.0).unwrap(), 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn random_fields_are_deterministic_in_seed() {
        let grid = GridSpec::new(1, 64).unwrap();
        let a = random_trig_field(&grid, 42, 0, 8);
        let b = random_trig_field(&grid, 42, 0, 8);
        assert_eq!(a.values(), b.values());
        let c = random_trig_field(&grid, 43, 0, 8);
        assert!(a.values() != c.values());
    }

    #[test]
    fn trajectory_interpolation_is_linear_in_time() {
        let grid = GridSpec::new(1, 32).unwrap();
        let u0 = mode_field(&grid);
        let cfg = SimulationConfig {
            grid: grid.clone(),
            t_start: 0.0,
            t_end: 0.02,
            dt: 1e-3,
            scheme: Scheme::Strang,
        };
        let coeffs = Coefficients::zero(f64::INFINITY, f64::INFINITY);
        let traj = solve(&cfg, &u0, &coeffs).unwrap();
        let mid = traj.field_at(0.0105).unwrap();
        let a = traj.field_at(0.010).unwrap();
        let b = traj.field_at(0.011).unwrap();
        for ((m, x), y) in mid.values().iter().zip(a.values()).zip(b.values()) {
            assert_relative_eq!(*m, 0.5 * (x + y), epsilon = 1e-14);
        }
    }
}
