//! Periodic grids and scalar/vector fields on the torus [-1/2, 1/2]^n,
//! with spectral differentiation and the L^p / ball / Dirichlet calculus.
//!
//! Fields are node samples on a uniform lattice x_i = -1/2 + i/N. All
//! differential operators act on the trigonometric interpolant, so they are
//! exact for band-limited fields. L^p norms for finite p use the midpoint
//! rule, which on a periodic lattice is the trapezoid rule and spectrally
//! accurate for smooth integrands.

use crate::error::{LabError, Result};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Uniform periodic grid on Omega = [-1/2, 1/2]^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    n: usize,
    points: usize,
}

impl GridSpec {
    /// `n` is the spatial dimension (1, 2, or 3); `points` the nodes per axis
    /// (a power of two, at least 16).
    pub fn new(n: usize, points: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(LabError::InvalidGrid(format!(
                "dimension must be 1, 2, or 3 (got {n})"
            )));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(LabError::InvalidGrid(format!(
                "points per axis must be a power of two >= 16 (got {points})"
            )));
        }
        Ok(GridSpec { n, points })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Grid spacing h = 1/N.
    pub fn spacing(&self) -> f64 {
        1.0 / self.points as f64
    }

    /// Total number of nodes N^n.
    pub fn node_count(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    /// Volume h^n of one lattice cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// Coordinate of node index i along one axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        -0.5 + i as f64 * self.spacing()
    }

    /// Writes the coordinates of the node with flat index `flat` into `out`.
    pub fn node_coords(&self, mut flat: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        for a in (0..self.n).rev() {
            out[a] = self.axis_coord(flat % self.points);
            flat /= self.points;
        }
    }

    /// Integer frequency of FFT bin `i` along one axis, in [-N/2+1, N/2].
    fn bin_freq(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Frequencies (k_1, ..., k_n) of the mode with flat index `flat`.
    pub fn mode_freqs(&self, mut flat: usize, out: &mut [i64]) {
        for a in (0..self.n).rev() {
            out[a] = self.bin_freq(flat % self.points);
            flat /= self.points;
        }
    }
}

/// Real-valued field sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    spec: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(spec: &GridSpec) -> Self {
        ScalarField {
            spec: spec.clone(),
            values: vec![0.0; spec.node_count()],
        }
    }

    pub fn constant(spec: &GridSpec, c: f64) -> Self {
        ScalarField {
            spec: spec.clone(),
            values: vec![c; spec.node_count()],
        }
    }

    /// Samples `f` at every grid node.
    pub fn from_fn(spec: &GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let mut x = vec![0.0; spec.dim()];
        let values = (0..spec.node_count())
            .map(|i| {
                spec.node_coords(i, &mut x);
                f(&x)
            })
            .collect();
        ScalarField {
            spec: spec.clone(),
            values,
        }
    }

    /// Wraps raw node values; rejects wrong length or non-finite entries.
    pub fn from_values(spec: &GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.node_count() {
            return Err(LabError::InvalidField(format!(
                "expected {} values, got {}",
                spec.node_count(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(LabError::InvalidField(format!("non-finite value {bad}")));
        }
        Ok(ScalarField {
            spec: spec.clone(),
            values,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Mean value over the torus.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn scaled(&self, c: f64) -> Self {
        ScalarField {
            spec: self.spec.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Nodewise a*self + b*other.
    pub fn lin_comb(&self, a: f64, other: &ScalarField, b: f64) -> Self {
        debug_assert_eq!(self.spec, other.spec);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        ScalarField {
            spec: self.spec.clone(),
            values,
        }
    }

    /// Nodewise product.
    pub fn product(&self, other: &ScalarField) -> Self {
        debug_assert_eq!(self.spec, other.spec);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x * y)
            .collect();
        ScalarField {
            spec: self.spec.clone(),
            values,
        }
    }

    /// L^p(Omega) norm; `p = f64::INFINITY` gives the max norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_infinite() && p > 0.0 {
            return Ok(self.max_abs());
        }
        if !(p >= 1.0) {
            return Err(LabError::InvalidExponent(p));
        }
        let cell = self.spec.cell_volume();
        if p == 2.0 {
            let s: f64 = self.values.iter().map(|v| v * v).sum();
            return Ok((s * cell).sqrt());
        }
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        Ok((s * cell).powf(1.0 / p))
    }

    /// L^2 norm restricted to the periodic ball B_delta(x0); node-membership
    /// quadrature with the shortest torus distance.
    pub fn ball_l2_norm(&self, x0: &[f64], delta: f64) -> Result<f64> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(LabError::InvalidBallRadius(delta));
        }
        if x0.len() != self.spec.dim() {
            return Err(LabError::DimensionMismatch(format!(
                "center has {} coordinates, field dimension is {}",
                x0.len(),
                self.spec.dim()
            )));
        }
        let mut x = vec![0.0; self.spec.dim()];
        let d2 = delta * delta;
        let mut sum = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            self.spec.node_coords(i, &mut x);
            let mut r2 = 0.0;
            for a in 0..x.len() {
                let mut dx = (x[a] - x0[a]).abs() % 1.0;
                if dx > 0.5 {
                    dx = 1.0 - dx;
                }
                r2 += dx * dx;
            }
            if r2 < d2 {
                sum += v * v;
            }
        }
        Ok((sum * self.spec.cell_volume()).sqrt())
    }

    /// Dirichlet quotient ||grad f||^2 / ||f||^2.
    pub fn dirichlet_quotient(&self) -> Result<f64> {
        let l2 = self.lp_norm(2.0)?;
        if l2 == 0.0 {
            return Err(LabError::ZeroField);
        }
        let g = self.gradient();
        let mut num = 0.0;
        for c in g.components() {
            let n = c.lp_norm(2.0)?;
            num += n * n;
        }
        Ok(num / (l2 * l2))
    }

    /// Complex spectral coefficients c_k with f(x) = sum_k c_k e^{2 pi i k.x}
    /// in physical coordinates. Nodes start at x = -1/2, so each FFT bin
    /// carries the parity factor (-1)^{sum_a k_a}.
    pub fn spectral_coefficients(&self) -> Vec<Complex<f64>> {
        let mut data: Vec<Complex<f64>> = self
            .values
            .iter()
            .map(|&v| Complex::new(v, 0.0))
            .collect();
        fft_nd(&self.spec, &mut data, false);
        let scale = 1.0 / self.spec.node_count() as f64;
        let mut freqs = vec![0i64; self.spec.dim()];
        for (i, c) in data.iter_mut().enumerate() {
            self.spec.mode_freqs(i, &mut freqs);
            let parity: i64 = freqs.iter().sum();
            let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
            *c *= sign * scale;
        }
        data
    }

    /// Exact gradient of the trigonometric interpolant.
    pub fn gradient(&self) -> VectorField {
        let spec = &self.spec;
        let mut spectrum: Vec<Complex<f64>> = self
            .values
            .iter()
            .map(|&v| Complex::new(v, 0.0))
            .collect();
        fft_nd(spec, &mut spectrum, false);
        let scale = 1.0 / spec.node_count() as f64;
        let nyquist = (spec.points / 2) as i64;
        let mut freqs = vec![0i64; spec.dim()];
        let mut components = Vec::with_capacity(spec.dim());
        for axis in 0..spec.dim() {
            let mut axis_spec = spectrum.clone();
            for (i, c) in axis_spec.iter_mut().enumerate() {
                spec.mode_freqs(i, &mut freqs);
                let k = freqs[axis];
                // the Nyquist mode has no well-defined odd derivative
                let mult = if k == nyquist {
                    Complex::new(0.0, 0.0)
                } else {
                    Complex::new(0.0, 2.0 * std::f64::consts::PI * k as f64)
                };
                *c *= mult * scale;
            }
            fft_nd(spec, &mut axis_spec, true);
            let values = axis_spec.iter().map(|c| c.re).collect();
            components.push(ScalarField {
                spec: spec.clone(),
                values,
            });
        }
        VectorField { components }
    }

    /// Exact Laplacian of the trigonometric interpolant
    /// (multiplier -4 pi^2 |k|^2 per mode).
    pub fn laplacian(&self) -> ScalarField {
        let spec = &self.spec;
        let mut spectrum: Vec<Complex<f64>> = self
            .values
            .iter()
            .map(|&v| Complex::new(v, 0.0))
            .collect();
        fft_nd(spec, &mut spectrum, false);
        let scale = 1.0 / spec.node_count() as f64;
        let mut freqs = vec![0i64; spec.dim()];
        for (i, c) in spectrum.iter_mut().enumerate() {
            spec.mode_freqs(i, &mut freqs);
            let k2: f64 = freqs.iter().map(|&k| (k * k) as f64).sum();
            *c *= -4.0 * std::f64::consts::PI * std::f64::consts::PI * k2 * scale;
        }
        fft_nd(spec, &mut spectrum, true);
        ScalarField {
            spec: spec.clone(),
            values: spectrum.iter().map(|c| c.re).collect(),
        }
    }

    /// Trigonometric interpolant for off-lattice evaluation.
    pub fn interpolant(&self) -> TrigInterpolant {
        TrigInterpolant::new(self)
    }
}

/// n-component vector field on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        if components.is_empty() {
            return Err(LabError::InvalidField("vector field needs components".into()));
        }
        let spec = components[0].spec().clone();
        if components.len() != spec.dim() {
            return Err(LabError::DimensionMismatch(format!(
                "{} components for dimension {}",
                components.len(),
                spec.dim()
            )));
        }
        if components.iter().any(|c| *c.spec() != spec) {
            return Err(LabError::DimensionMismatch(
                "components on different grids".into(),
            ));
        }
        Ok(VectorField { components })
    }

    pub fn zeros(spec: &GridSpec) -> Self {
        VectorField {
            components: (0..spec.dim()).map(|_| ScalarField::zeros(spec)).collect(),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        self.components[0].spec()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &ScalarField {
        &self.components[axis]
    }

    /// Pointwise Euclidean magnitude |w|.
    pub fn magnitude(&self) -> ScalarField {
        let spec = self.spec().clone();
        let mut values = vec![0.0; spec.node_count()];
        for c in &self.components {
            for (v, w) in values.iter_mut().zip(c.values()) {
                *v += w * w;
            }
        }
        for v in &mut values {
            *v = v.sqrt();
        }
        ScalarField { spec, values }
    }

    /// Pointwise squared magnitude |w|^2.
    pub fn magnitude_squared(&self) -> ScalarField {
        let spec = self.spec().clone();
        let mut values = vec![0.0; spec.node_count()];
        for c in &self.components {
            for (v, w) in values.iter_mut().zip(c.values()) {
                *v += w * w;
            }
        }
        ScalarField { spec, values }
    }

    /// L^p norm of the pointwise magnitude.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.magnitude().lp_norm(p)
    }

    pub fn divergence(&self) -> ScalarField {
        let spec = self.spec().clone();
        let mut out = ScalarField::zeros(&spec);
        for (axis, c) in self.components.iter().enumerate() {
            let d = c.gradient();
            for (o, v) in out.values.iter_mut().zip(d.component(axis).values()) {
                *o += v;
            }
        }
        out
    }
}

/// Precomputed spectrum of a field for evaluating the trigonometric
/// interpolant at arbitrary points (periodically extended).
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    spec: GridSpec,
    coeffs: Arc<Vec<Complex<f64>>>,
}

impl TrigInterpolant {
    pub fn new(field: &ScalarField) -> Self {
        TrigInterpolant {
            spec: field.spec().clone(),
            coeffs: Arc::new(field.spectral_coefficients()),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Evaluates the interpolant at `x` (any point in R^n; the field is
    /// periodic). Separable phase tables keep the cost at O(n N) setup plus
    /// O(N^n) accumulation per point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.spec.dim());
        let n = self.spec.points;
        let dim = self.spec.dim();
        // per-axis phase table: e^{2 pi i k_a x_a} indexed by FFT bin
        let mut tables: Vec<Vec<Complex<f64>>> = Vec::with_capacity(dim);
        for a in 0..dim {
            let mut table = Vec::with_capacity(n);
            for i in 0..n {
                let k = self.spec.bin_freq(i) as f64;
                let phase = 2.0 * std::f64::consts::PI * k * x[a];
                table.push(Complex::new(phase.cos(), phase.sin()));
            }
            tables.push(table);
        }
        match dim {
            1 => {
                let mut acc = Complex::new(0.0, 0.0);
                for i in 0..n {
                    acc += self.coeffs[i] * tables[0][i];
                }
                acc.re
            }
            2 => {
                let mut acc = Complex::new(0.0, 0.0);
                for i0 in 0..n {
                    let mut row = Complex::new(0.0, 0.0);
                    let base = i0 * n;
                    for i1 in 0..n {
                        row += self.coeffs[base + i1] * tables[1][i1];
                    }
                    acc += row * tables[0][i0];
                }
                acc.re
            }
            _ => {
                let mut acc = Complex::new(0.0, 0.0);
                for i0 in 0..n {
                    let mut plane = Complex::new(0.0, 0.0);
                    for i1 in 0..n {
                        let mut row = Complex::new(0.0, 0.0);
                        let base = (i0 * n + i1) * n;
                        for i2 in 0..n {
                            row += self.coeffs[base + i2] * tables[2][i2];
                        }
                        plane += row * tables[1][i1];
                    }
                    acc += plane * tables[0][i0];
                }
                acc.re
            }
        }
    }
}

/// In-place n-dimensional FFT (row-major layout, last axis contiguous).
/// `inverse = true` applies the unnormalized inverse transform.
pub(crate) fn fft_nd(spec: &GridSpec, data: &mut [Complex<f64>], inverse: bool) {
    fft_nd_raw(spec.points, spec.dim(), data, inverse);
}

/// Same transform for an arbitrary cube of `points`^`dim` samples.
pub(crate) fn fft_nd_raw(n: usize, dim: usize, data: &mut [Complex<f64>], inverse: bool) {
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    PLANNER.with(|planner| {
        let fft = if inverse {
            planner.borrow_mut().plan_fft_inverse(n)
        } else {
            planner.borrow_mut().plan_fft_forward(n)
        };
        let mut line = vec![Complex::new(0.0, 0.0); n];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            let lines = data.len() / n;
            for l in 0..lines {
                // base index of line l along `axis`
                let block = stride * n;
                let outer = l / stride;
                let inner = l % stride;
                let base = outer * block + inner;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                fft.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    fn grid1(n: usize) -> GridSpec {
        GridSpec::new(1, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0, 64).is_err());
        assert!(GridSpec::new(4, 64).is_err());
        assert!(GridSpec::new(1, 48).is_err());
        assert!(GridSpec::new(1, 8).is_err());
        assert!(GridSpec::new(3, 16).is_ok());
    }

    #[test]
    fn lp_norm_of_constant_is_abs() {
        let g = grid1(32);
        let f = ScalarField::constant(&g, -3.5);
        for p in [1.0, 2.0, 3.7, f64::INFINITY] {
            assert_relative_eq!(f.lp_norm(p).unwrap(), 3.5, max_relative = 1e-14);
        }
    }

    #[test]
    fn lp_norm_of_cosine() {
        let g = grid1(64);
        let f = ScalarField::from_fn(&g, |x| (TAU * x[0]).cos());
        assert_relative_eq!(f.lp_norm(2.0).unwrap(), 0.5f64.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(f.lp_norm(f64::INFINITY).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn lp_norm_rejects_p_below_one() {
        let g = grid1(16);
        let f = ScalarField::constant(&g, 1.0);
        assert!(matches!(f.lp_norm(0.5), Err(LabError::InvalidExponent(_))));
    }

    #[test]
    fn gradient_of_sine() {
        let g = GridSpec::new(2, 32).unwrap();
        let f = ScalarField::from_fn(&g, |x| (TAU * x[0]).sin());
        let grad = f.gradient();
        let mut xv = vec![0.0; 2];
        for i in 0..g.node_count() {
            g.node_coords(i, &mut xv);
            assert_relative_eq!(
                grad.component(0).values()[i],
                TAU * (TAU * xv[0]).cos(),
                epsilon = 1e-11
            );
            assert_relative_eq!(grad.component(1).values()[i], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gradient_annihilates_constants() {
        let g = GridSpec::new(2, 16).unwrap();
        let f = ScalarField::constant(&g, 4.2);
        let grad = f.gradient();
        assert!(grad.component(0).max_abs() < 1e-13);
        assert!(grad.component(1).max_abs() < 1e-13);
        assert!(f.laplacian().max_abs() < 1e-12);
    }

    #[test]
    fn laplacian_of_cosine_mode() {
        let g = grid1(64);
        let f = ScalarField::from_fn(&g, |x| (TAU * x[0]).cos());
        let lap = f.laplacian();
        for (l, v) in lap.values().iter().zip(f.values()) {
            assert_relative_eq!(*l, -4.0 * PI * PI * v, epsilon = 1e-9);
        }
    }

    #[test]
    fn laplacian_equals_divergence_of_gradient() {
        let g = GridSpec::new(2, 32).unwrap();
        let f = ScalarField::from_fn(&g, |x| {
            (TAU * x[0]).cos() * (2.0 * TAU * x[1]).sin() + 0.3 * (TAU * x[1]).cos()
        });
        let lap = f.laplacian();
        let div = f.gradient().divergence();
        for (a, b) in lap.values().iter().zip(div.values()) {
            assert_relative_eq!(a, b, epsilon = 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn ball_norm_constant_interval() {
        let g = grid1(128);
        let f = ScalarField::constant(&g, 1.0);
        // interval of length 2*delta
        let v = f.ball_l2_norm(&[0.0], 0.25).unwrap();
        assert_relative_eq!(v, 0.5f64.sqrt(), max_relative = 2.0 / 128.0);
    }

    #[test]
    fn ball_norm_covers_torus_at_half() {
        let g = grid1(64);
        let f = ScalarField::from_fn(&g, |x| (TAU * x[0]).cos() + 0.2);
        let full = f.lp_norm(2.0).unwrap();
        let ball = f.ball_l2_norm(&[0.0], 0.5).unwrap();
        assert!((full - ball).abs() <= full * 2.0 / 64.0);
    }

    #[test]
    fn ball_norm_of_field_supported_outside_is_zero() {
        let g = grid1(64);
        let mut f = ScalarField::constant(&g, 1.0);
        let mut x = vec![0.0];
        for i in 0..g.node_count() {
            g.node_coords(i, &mut x);
            if x[0].abs() < 0.25 {
                f.values_mut()[i] = 0.0;
            }
        }
        assert_eq!(f.ball_l2_norm(&[0.0], 0.2).unwrap(), 0.0);
    }

    #[test]
    fn ball_norm_rejects_bad_radius() {
        let g = grid1(16);
        let f = ScalarField::constant(&g, 1.0);
        assert!(f.ball_l2_norm(&[0.0], 0.0).is_err());
        assert!(f.ball_l2_norm(&[0.0], 0.6).is_err());
    }

    #[test]
    fn dirichlet_quotient_of_eigenfunctions() {
        let g = grid1(64);
        let f = ScalarField::from_fn(&g, |x| (TAU * x[0]).cos());
        assert_relative_eq!(f.dirichlet_quotient().unwrap(), 4.0 * PI * PI, max_relative = 1e-11);
        let c = ScalarField::constant(&g, 2.0);
        assert!(c.dirichlet_quotient().unwrap() < 1e-20);
        // mixed modes, by Parseval: (4pi^2/2 + 16pi^2/2) / 1 = 10 pi^2
        let m = ScalarField::from_fn(&g, |x| (TAU * x[0]).cos() + (2.0 * TAU * x[0]).cos());
        assert_relative_eq!(m.dirichlet_quotient().unwrap(), 10.0 * PI * PI, max_relative = 1e-11);
    }

    #[test]
    fn dirichlet_quotient_rejects_zero_field() {
        let g = grid1(16);
        let f = ScalarField::zeros(&g);
        assert!(matches!(f.dirichlet_quotient(), Err(LabError::ZeroField)));
    }

    #[test]
    fn interpolant_reproduces_nodes_and_off_lattice() {
        let g = GridSpec::new(2, 32).unwrap();
        // mix of odd and even total frequencies to exercise the node-offset parity
        let f = ScalarField::from_fn(&g, |x| {
            (TAU * x[0]).cos() * (TAU * x[1]).sin()
                + 0.5 * (2.0 * TAU * x[0]).sin()
                + 0.25 * (TAU * x[1]).cos()
        });
        let interp = f.interpolant();
        let mut x = vec![0.0; 2];
        for i in (0..g.node_count()).step_by(37) {
            g.node_coords(i, &mut x);
            assert_relative_eq!(interp.eval(&x), f.values()[i], epsilon = 1e-12);
        }
        // off-lattice, against the analytic formula (band-limited: exact)
        let x = [0.1234, -0.3971];
        let expect = (TAU * x[0]).cos() * (TAU * x[1]).sin()
            + 0.5 * (2.0 * TAU * x[0]).sin()
            + 0.25 * (TAU * x[1]).cos();
        assert_relative_eq!(interp.eval(&x), expect, epsilon = 1e-12);
        // periodic extension
        let shifted = [x[0] + 2.0, x[1] - 1.0];
        assert_relative_eq!(interp.eval(&shifted), expect, epsilon = 1e-11);
    }

    #[test]
    fn parseval_identity() {
        let g = GridSpec::new(2, 16).unwrap();
        let f = ScalarField::from_fn(&g, |x| {
            (TAU * x[0]).cos() + 0.7 * (TAU * (x[0] + 2.0 * x[1])).sin() - 0.1
        });
        let l2 = f.lp_norm(2.0).unwrap();
        let spectral: f64 = f.spectral_coefficients().iter().map(|c| c.norm_sqr()).sum();
        assert_relative_eq!(l2 * l2, spectral, max_relative = 1e-12);
    }
}
