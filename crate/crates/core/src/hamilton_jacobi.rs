//! The phase `S_h` by the method of characteristics.
//!
//! Bicharacteristics solve `Ẋ = -∇ξ q`, `Ξ̇ = ∇x q` with `q = ψ(p_{m̃,h})`,
//! which is the sign convention reproducing the flat closed form
//! `S = x·ξ + t√(|ξ|² + h²m̃²)`. The phase at `(t, x, ξ)` is the action of
//! the characteristic that lands on `x` at time `t`.

use crate::error::{LabError, Result};
use crate::fit::fit_line;
use crate::geometry::Symbol;
use crate::linalg::{inverse, spectral_norm, Matrix, Vector};
use crate::wkb::LowerOrderSymbols;
use num_complex::Complex64;

/// Which variational equations to carry along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TangentMode {
    None,
    /// Derivatives with respect to the initial point only.
    Position,
    /// Derivatives with respect to the initial point and the covector.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    /// Largest admissible RK4 step.
    pub max_step: f64,
    /// Fewest steps per trajectory.
    pub min_steps: usize,
    /// Hamiltonian drift tolerance.
    pub drift_tol: f64,
}

impl Default for FlowOptions {
    /// Step `min(1e-3, t/64)`.
    fn default() -> Self {
        FlowOptions { max_step: 1e-3, min_steps: 64, drift_tol: 1e-8 }
    }
}

impl FlowOptions {
    /// Coarser stepping for large sweeps; the RK4 error at step 1/128 is far
    /// below the tolerances of the decay experiments.
    pub fn sweep() -> Self {
        FlowOptions { max_step: 1.0 / 128.0, min_steps: 32, drift_tol: 1e-8 }
    }

    pub fn steps_for(&self, t: f64) -> usize {
        let n = (t.abs() / self.max_step).ceil() as usize;
        let n = n.max(self.min_steps);
        n + n % 2
    }
}

/// Jacobians of `(X, Ξ)` with respect to the initial data `(y, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangent<const D: usize> {
    pub x_y: Matrix<D>,
    pub x_xi: Matrix<D>,
    pub xi_y: Matrix<D>,
    pub xi_xi: Matrix<D>,
}

impl<const D: usize> Tangent<D> {
    fn initial() -> Self {
        Tangent {
            x_y: Matrix::identity(),
            x_xi: Matrix::zeros(),
            xi_y: Matrix::zeros(),
            xi_xi: Matrix::identity(),
        }
    }

    /// `∇²x S = (∂Ξ/∂y)(∂X/∂y)^{-1}` at the current point.
    pub fn phase_hessian(&self) -> Option<Matrix<D>> {
        inverse(&self.x_y).map(|inv| self.xi_y * inv)
    }

    /// `∇x∇ξ S = ∂Ξ/∂ξ - (∂Ξ/∂y)(∂X/∂y)^{-1}(∂X/∂ξ)`.
    pub fn mixed_hessian(&self) -> Option<Matrix<D>> {
        inverse(&self.x_y).map(|inv| self.xi_xi - self.xi_y * inv * self.x_xi)
    }
}

/// A point on a bicharacteristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState<const D: usize> {
    pub x: Vector<D>,
    pub xi: Vector<D>,
    /// `y·ξ` at the start.
    pub initial_pairing: f64,
    /// `∫ (Ξ·Ẋ + q) ds`.
    pub integral: f64,
    /// `∫ f_h ds`, only accumulated when transport is requested.
    pub transport: Complex64,
    pub tangent: Tangent<D>,
}

impl<const D: usize> FlowState<D> {
    pub fn start(y: Vector<D>, xi: Vector<D>) -> Self {
        FlowState {
            x: y,
            xi,
            initial_pairing: y.dot(&xi),
            integral: 0.0,
            transport: Complex64::new(0.0, 0.0),
            tangent: Tangent::initial(),
        }
    }

    /// `y·ξ + ∫ (Ξ·Ẋ + q) ds`.
    pub fn action(&self) -> f64 {
        self.initial_pairing + self.integral
    }

    fn axpy(&self, k: &Self, a: f64, mode: TangentMode, transport: bool) -> Self {
        let mut s = *self;
        s.x += k.x * a;
        s.xi += k.xi * a;
        s.integral += k.integral * a;
        if transport {
            s.transport += k.transport * a;
        }
        if mode >= TangentMode::Position {
            s.tangent.x_y += k.tangent.x_y * a;
            s.tangent.xi_y += k.tangent.xi_y * a;
        }
        if mode == TangentMode::Full {
            s.tangent.x_xi += k.tangent.x_xi * a;
            s.tangent.xi_xi += k.tangent.xi_xi * a;
        }
        s
    }
}

/// Trajectory integrator for one symbol.
#[derive(Clone)]
pub struct Flow<'a, const D: usize> {
    pub symbol: &'a Symbol<D>,
    pub lower: &'a LowerOrderSymbols<D>,
    pub options: FlowOptions,
    pub mode: TangentMode,
    pub transport: bool,
}

impl<'a, const D: usize> Flow<'a, D> {
    pub fn new(symbol: &'a Symbol<D>, lower: &'a LowerOrderSymbols<D>, options: FlowOptions) -> Self {
        Flow { symbol, lower, options, mode: TangentMode::None, transport: false }
    }

    pub fn with_mode(mut self, mode: TangentMode) -> Self {
        self.mode = mode;
        self
    }

    /// Also accumulate `∫ f_h`; needs position tangents.
    pub fn with_transport(mut self) -> Self {
        self.transport = true;
        if self.mode == TangentMode::None {
            self.mode = TangentMode::Position;
        }
        self
    }

    fn rhs(&self, s: &FlowState<D>) -> FlowState<D> {
        let d = self.symbol.flow_derivs(&s.x, &s.xi);
        let xdot = -d.grad_xi;
        let mut k = FlowState {
            x: xdot,
            xi: d.grad_x,
            initial_pairing: 0.0,
            integral: s.xi.dot(&xdot) + d.q,
            transport: Complex64::new(0.0, 0.0),
            tangent: Tangent {
                x_y: Matrix::zeros(),
                x_xi: Matrix::zeros(),
                xi_y: Matrix::zeros(),
                xi_xi: Matrix::zeros(),
            },
        };
        let hxix = d.hxxi.transpose();
        if self.mode >= TangentMode::Position {
            let t = &s.tangent;
            k.tangent.x_y = -(hxix * t.x_y + d.hxixi * t.xi_y);
            k.tangent.xi_y = d.hxx * t.x_y + d.hxxi * t.xi_y;
        }
        if self.mode == TangentMode::Full {
            let t = &s.tangent;
            k.tangent.x_xi = -(hxix * t.x_xi + d.hxixi * t.xi_xi);
            k.tangent.xi_xi = d.hxx * t.x_xi + d.hxxi * t.xi_xi;
        }
        if self.transport {
            let hess = s.tangent.phase_hessian().unwrap_or_else(|| Matrix::from_element(f64::NAN));
            let re = 0.5 * (d.hxixi * hess).trace();
            k.transport = Complex64::new(re, 0.0) + Complex64::i() * self.lower.eval(&s.x, &s.xi);
        }
        k
    }

    fn step(&self, s: &FlowState<D>, dt: f64) -> FlowState<D> {
        let (m, tr) = (self.mode, self.transport);
        let k1 = self.rhs(s);
        let k2 = self.rhs(&s.axpy(&k1, 0.5 * dt, m, tr));
        let k3 = self.rhs(&s.axpy(&k2, 0.5 * dt, m, tr));
        let k4 = self.rhs(&s.axpy(&k3, dt, m, tr));
        s.axpy(&k1, dt / 6.0, m, tr)
            .axpy(&k2, dt / 3.0, m, tr)
            .axpy(&k3, dt / 3.0, m, tr)
            .axpy(&k4, dt / 6.0, m, tr)
    }

    fn check_drift(&self, start: &FlowState<D>, end: &FlowState<D>) -> Result<()> {
        let q0 = self.symbol.q(&start.x, &start.xi);
        let q1 = self.symbol.q(&end.x, &end.xi);
        let drift = (q1 - q0).abs();
        if !(drift <= self.options.drift_tol) {
            return Err(LabError::StepRejected { drift, tolerance: self.options.drift_tol });
        }
        Ok(())
    }

    /// State at time `t` of the bicharacteristic through `(y, ξ)`. A step
    /// count whose Hamiltonian drift exceeds the tolerance is doubled, up to
    /// six times.
    pub fn run(&self, t: f64, y: &Vector<D>, xi: &Vector<D>) -> Result<FlowState<D>> {
        let start = FlowState::start(*y, *xi);
        if t == 0.0 {
            return Ok(start);
        }
        self.refine(t, |n| {
            let dt = t / n as f64;
            let mut s = start;
            for _ in 0..n {
                s = self.step(&s, dt);
            }
            self.check_drift(&start, &s)?;
            Ok(s)
        })
    }

    /// All states on the uniform step grid `0, t/n, ..., t` (n even).
    pub fn record(&self, t: f64, y: &Vector<D>, xi: &Vector<D>) -> Result<Vec<FlowState<D>>> {
        self.refine(t, |n| {
            let out = self.record_steps(t, y, xi, n)?;
            self.check_drift(&out[0], &out[n])?;
            Ok(out)
        })
    }

    /// As [`Flow::record`] with a fixed step count and no drift check.
    pub fn record_steps(&self, t: f64, y: &Vector<D>, xi: &Vector<D>, n: usize) -> Result<Vec<FlowState<D>>> {
        let start = FlowState::start(*y, *xi);
        let dt = t / n as f64;
        let mut out = Vec::with_capacity(n + 1);
        out.push(start);
        for i in 0..n {
            let next = self.step(&out[i], dt);
            out.push(next);
        }
        Ok(out)
    }

    fn refine<T>(&self, t: f64, mut attempt: impl FnMut(usize) -> Result<T>) -> Result<T> {
        let n = self.options.steps_for(t);
        let mut last = None;
        for k in 0..7 {
            match attempt(n << k) {
                Err(e @ LabError::StepRejected { .. }) => last = Some(e),
                other => return other,
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

/// Integrates the bicharacteristic through `(y, ξ)`; on drift rejection the
/// step is halved up to six times.
pub fn hamiltonian_flow<const D: usize>(
    symbol: &Symbol<D>,
    lower: &LowerOrderSymbols<D>,
    options: FlowOptions,
    t: f64,
    y: &Vector<D>,
    xi: &Vector<D>,
) -> Result<FlowState<D>> {
    Flow::new(symbol, lower, options).run(t, y, xi)
}

/// Result of [`phase_eval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseValue<const D: usize> {
    /// `S_h(t, x, ξ)`.
    pub s: f64,
    /// `S_h - x·ξ`, computed without cancellation.
    pub s_minus_linear: f64,
    pub grad_x: Vector<D>,
    pub hess_x: Matrix<D>,
    /// `∇x∇ξ S_h`.
    pub mixed: Matrix<D>,
    /// The initial point `y` of the characteristic landing on `x`; equals `∇ξ S_h`.
    pub source: Vector<D>,
    pub end: FlowState<D>,
}

/// The Hamilton-Jacobi phase for one `(chart, mass, cutoffs, h)`.
#[derive(Clone)]
pub struct PhaseField<const D: usize> {
    pub symbol: Symbol<D>,
    pub lower: LowerOrderSymbols<D>,
    pub t_max: f64,
    pub options: FlowOptions,
}

const NEWTON_ITERATIONS: usize = 25;

impl<const D: usize> PhaseField<D> {
    pub fn new(symbol: Symbol<D>, t_max: f64) -> Self {
        PhaseField { symbol, lower: LowerOrderSymbols::Zero, t_max, options: FlowOptions::default() }
    }

    pub fn with_options(mut self, options: FlowOptions) -> Self {
        self.options = options;
        self
    }

    pub fn with_lower(mut self, lower: LowerOrderSymbols<D>) -> Self {
        self.lower = lower;
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn h(&self) -> f64 {
        self.symbol.h
    }

    pub fn flow(&self) -> Flow<'_, D> {
        Flow::new(&self.symbol, &self.lower, self.options)
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if !(t.abs() <= self.t_max * (1.0 + 1e-12)) {
            return Err(LabError::Precondition(format!("|t| = {} exceeds t0 = {}", t.abs(), self.t_max)));
        }
        Ok(())
    }

    /// Finds `y` with `X(t; y, ξ) = x` by damped Newton started from the
    /// predictor `y = x + t∇ξq(x, ξ)`; returns `y` and the end state.
    pub fn invert(&self, t: f64, x: &Vector<D>, xi: &Vector<D>, mode: TangentMode) -> Result<(Vector<D>, FlowState<D>)> {
        let flow = self.flow().with_mode(mode.max(TangentMode::Position));
        if t == 0.0 {
            return Ok((*x, flow.run(0.0, x, xi)?));
        }
        let tol = 1e-13 * (1.0 + x.norm());
        let mut y = x + self.symbol.flow_derivs(x, xi).grad_xi * t;
        let mut state = flow.run(t, &y, xi)?;
        let mut res = state.x - x;
        for _ in 0..NEWTON_ITERATIONS {
            if res.norm() <= tol {
                return Ok((y, state));
            }
            let step = match inverse(&state.tangent.x_y) {
                Some(inv) => inv * res,
                None => break,
            };
            let mut lambda = 1.0;
            loop {
                let y_new = y - step * lambda;
                let s_new = flow.run(t, &y_new, xi)?;
                let r_new = s_new.x - x;
                if r_new.norm() < res.norm() || lambda < 1.0 / 64.0 {
                    y = y_new;
                    state = s_new;
                    res = r_new;
                    break;
                }
                lambda *= 0.5;
            }
        }
        if res.norm() <= tol {
            return Ok((y, state));
        }
        Err(LabError::InversionFailed { t, iterations: NEWTON_ITERATIONS })
    }
}

/// `(S, ∇x S, ∇²x S, ∇x∇ξ S)` at `(t, x, ξ)`.
pub fn phase_eval<const D: usize>(field: &PhaseField<D>, t: f64, x: &Vector<D>, xi: &Vector<D>) -> Result<PhaseValue<D>> {
    field.check_time(t)?;
    let (y, end) = field.invert(t, x, xi, TangentMode::Full)?;
    let singular = || LabError::Domain(format!("singular characteristic map at t = {t}"));
    let hess_x = end.tangent.phase_hessian().ok_or_else(singular)?;
    let mixed = end.tangent.mixed_hessian().ok_or_else(singular)?;
    Ok(PhaseValue {
        s: end.action(),
        s_minus_linear: (y - x).dot(xi) + end.integral,
        grad_x: end.xi,
        hess_x,
        mixed,
        source: y,
        end,
    })
}

/// `Z_h(s, t, x, ξ)`: the bicharacteristic landing on `x` at time `t`,
/// read off at time `s`.
pub fn transport_flow<const D: usize>(field: &PhaseField<D>, s: f64, t: f64, x: &Vector<D>, xi: &Vector<D>) -> Result<Vector<D>> {
    field.check_time(t)?;
    field.check_time(s)?;
    if s == t {
        return Ok(*x);
    }
    let (y, _) = field.invert(t, x, xi, TangentMode::Position)?;
    Ok(field.flow().run(s, &y, xi)?.x)
}

/// `Z_h(s, t, x, ξ)` by integrating `∂σ Z = -V_h(σ, Z)` with
/// `V_h(σ, z) = ∇ξ q(z, ∇x S_h(σ, z, ξ))`, each velocity evaluation going
/// through [`phase_eval`]. Slow; serves as an independent check.
pub fn transport_flow_direct<const D: usize>(
    field: &PhaseField<D>,
    s: f64,
    t: f64,
    x: &Vector<D>,
    xi: &Vector<D>,
    steps: usize,
) -> Result<Vector<D>> {
    field.check_time(t)?;
    field.check_time(s)?;
    let velocity = |sigma: f64, z: &Vector<D>| -> Result<Vector<D>> {
        let (_, end) = field.invert(sigma, z, xi, TangentMode::Position)?;
        Ok(field.symbol.flow_derivs(z, &end.xi).grad_xi)
    };
    let n = steps.max(1);
    let ds = (s - t) / n as f64;
    let mut z = *x;
    let mut sigma = t;
    for _ in 0..n {
        let k1 = -velocity(sigma, &z)?;
        let k2 = -velocity(sigma + 0.5 * ds, &(z + k1 * (0.5 * ds)))?;
        let k3 = -velocity(sigma + 0.5 * ds, &(z + k2 * (0.5 * ds)))?;
        let k4 = -velocity(sigma + ds, &(z + k3 * ds))?;
        z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (ds / 6.0);
        sigma += ds;
    }
    Ok(z)
}

/// Outcome of [`remainder_bound_check`] for one value of `h`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum RemainderFit {
    /// All residuals below `1e-14`.
    Exact,
    Fit {
        slope: f64,
        /// `exp(intercept)` of the log-log fit.
        intercept_constant: f64,
        /// `max_t sup|S - x·ξ - tψ(p)| / t²`.
        constant: f64,
    },
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RemainderReport {
    pub h: Vec<f64>,
    pub fits: Vec<RemainderFit>,
    /// `sup` residual per `(h, t)`.
    pub residuals: Vec<Vec<f64>>,
}

impl RemainderReport {
    /// Ratio of the largest to the smallest `t²`-constant across `h`.
    pub fn constant_spread(&self) -> Option<f64> {
        let cs: Vec<f64> = self
            .fits
            .iter()
            .filter_map(|f| match f {
                RemainderFit::Fit { constant, .. } => Some(*constant),
                RemainderFit::Exact => None,
            })
            .collect();
        if cs.is_empty() {
            return None;
        }
        let hi = cs.iter().copied().fold(f64::MIN, f64::max);
        let lo = cs.iter().copied().fold(f64::MAX, f64::min);
        Some(hi / lo)
    }
}

/// Fits `log sup_{x,ξ} |S_h - x·ξ - tψ(p)|` against `log t` for every field.
pub fn remainder_bound_check<const D: usize>(
    fields: &[PhaseField<D>],
    ts: &[f64],
    points: &[(Vector<D>, Vector<D>)],
) -> Result<RemainderReport> {
    if ts.len() < 2 {
        return Err(LabError::Underdetermined("remainder fit needs at least two times".into()));
    }
    let lo = ts.iter().copied().fold(f64::MAX, f64::min);
    let hi = ts.iter().copied().fold(f64::MIN, f64::max);
    if !(lo > 0.0 && hi >= 10.0 * lo * (1.0 - 1e-12)) {
        return Err(LabError::Precondition("times must be positive and span a decade".into()));
    }
    let mut report = RemainderReport { h: Vec::new(), fits: Vec::new(), residuals: Vec::new() };
    for field in fields {
        let mut sups = Vec::with_capacity(ts.len());
        for &t in ts {
            let mut sup: f64 = 0.0;
            for (x, xi) in points {
                let v = phase_eval(field, t, x, xi)?;
                let r = v.s_minus_linear - t * field.symbol.q(x, xi);
                sup = sup.max(r.abs());
            }
            sups.push(sup);
        }
        let fit = if sups.iter().all(|r| *r < 1e-14) {
            RemainderFit::Exact
        } else {
            let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
            let ly: Vec<f64> = sups.iter().map(|r| r.max(1e-300).ln()).collect();
            let line = fit_line(&lx, &ly)?;
            let constant = ts.iter().zip(&sups).map(|(t, r)| r / (t * t)).fold(0.0, f64::max);
            RemainderFit::Fit { slope: line.slope, intercept_constant: line.intercept.exp(), constant }
        };
        report.h.push(field.h());
        report.fits.push(fit);
        report.residuals.push(sups);
    }
    Ok(report)
}

/// Largest dyadic `t = 2^{-j} <= 1` with `‖∇x∇ξ S - I‖₂ <= 1/2` at every sample.
pub fn certify_t0<const D: usize>(field: &PhaseField<D>, samples: &[(Vector<D>, Vector<D>)]) -> Result<f64> {
    let probe = field.clone().with_t_max(1.0);
    for j in 0..=12 {
        let t = 0.5f64.powi(j);
        let ok = samples.iter().all(|(x, xi)| match phase_eval(&probe, t, x, xi) {
            Ok(v) => spectral_norm(&(v.mixed - Matrix::<D>::identity())) <= 0.5,
            Err(_) => false,
        });
        if ok {
            return Ok(t);
        }
    }
    Err(LabError::Domain("no dyadic t0 >= 2^-12 passes the inversion criterion".into()))
}

/// `∂t S_h - ψ(p)(x, ∇x S_h)` with `∂t S_h` by centred differences.
pub fn hj_residual<const D: usize>(field: &PhaseField<D>, t: f64, x: &Vector<D>, xi: &Vector<D>, dt: f64) -> Result<f64> {
    let plus = phase_eval(field, t + dt, x, xi)?;
    let minus = phase_eval(field, t - dt, x, xi)?;
    let mid = phase_eval(field, t, x, xi)?;
    let dsdt = (plus.s_minus_linear - minus.s_minus_linear) / (2.0 * dt);
    Ok(dsdt - field.symbol.q(x, &mid.grad_x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::CutoffLibrary;
    use crate::geometry::{MassParam, MetricChart};
    use nalgebra::vector;

    fn field(chart: MetricChart<2>, m: f64, h: f64) -> PhaseField<2> {
        let mass = MassParam::new(m).unwrap();
        let sym = Symbol::new(chart, mass, CutoffLibrary::standard(mass), h).unwrap();
        PhaseField::new(sym, 0.25)
    }

    fn samples() -> Vec<(Vector<2>, Vector<2>)> {
        let mut v = Vec::new();
        for x in [vector![0.0, 0.0], vector![0.3, -0.4], vector![-0.6, 0.2]] {
            for xi in [vector![1.0, 0.0], vector![0.5, 1.2], vector![-0.9, -0.7]] {
                v.push((x, xi));
            }
        }
        v
    }

    #[test]
    fn flat_massless_branch_moves_in_straight_lines() {
        let f = field(MetricChart::flat(), 0.0, 0.5);
        let (y, xi) = (vector![0.2, 0.1], vector![1.0, 1.0]);
        let s = hamiltonian_flow(&f.symbol, &f.lower, f.options, 0.2, &y, &xi).unwrap();
        // m = 0 is regularized with m̃ = 1, so the speed is |ξ|/√(|ξ|²+h²).
        let expect = y - xi * (0.2 / (2.0f64 + 0.25).sqrt());
        assert!((s.x - expect).norm() < 1e-13);
        assert_eq!(s.xi, xi);
    }

    #[test]
    fn flat_massive_action_is_the_closed_form_phase_at_the_endpoint() {
        let (m, h, t) = (1.0, 0.25, 0.2);
        let f = field(MetricChart::flat(), m, h);
        let (y, xi) = (vector![0.2, -0.5], vector![0.6, -1.1]);
        let s = hamiltonian_flow(&f.symbol, &f.lower, f.options, t, &y, &xi).unwrap();
        let root = (h * h * m * m + xi.norm_squared()).sqrt();
        assert_eq!(s.xi, xi);
        assert!((s.action() - (s.x.dot(&xi) + t * root)).abs() < 1e-12);
        assert!((s.action() - (y.dot(&xi) + t * h * h * m * m / root)).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_is_conserved_on_the_perturbed_chart() {
        let f = field(MetricChart::perturbed_default(), 1.0, 0.25);
        for (y, xi) in samples() {
            let q0 = f.symbol.q(&y, &xi);
            for t in [0.025, 0.05, 0.1] {
                let s = hamiltonian_flow(&f.symbol, &f.lower, f.options, t, &y, &xi).unwrap();
                assert!((f.symbol.q(&s.x, &s.xi) - q0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn flat_phase_matches_closed_form() {
        for h in [1.0, 0.25, 1.0 / 16.0] {
            let f = field(MetricChart::flat(), 1.0, h);
            for (x, xi) in samples() {
                for t in [0.0, 0.1, -0.2, 0.25] {
                    let v = phase_eval(&f, t, &x, &xi).unwrap();
                    let exact = x.dot(&xi) + t * (h * h + xi.norm_squared()).sqrt();
                    assert!((v.s - exact).abs() < 1e-10, "h={h} t={t}");
                    assert!((v.grad_x - xi).norm() < 1e-14);
                    assert!(v.hess_x.amax() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn phase_at_time_zero_is_linear() {
        let f = field(MetricChart::perturbed_default(), 0.0, 0.5);
        for (x, xi) in samples() {
            let v = phase_eval(&f, 0.0, &x, &xi).unwrap();
            assert_eq!(v.s, x.dot(&xi));
            assert_eq!(v.grad_x, xi);
            assert_eq!(v.mixed, Matrix::<2>::identity());
        }
    }

    #[test]
    fn perturbed_phase_solves_hamilton_jacobi() {
        let f = field(MetricChart::perturbed_default(), 1.0, 0.25);
        for (x, xi) in samples() {
            for t in [0.05, 0.15] {
                let r = hj_residual(&f, t, &x, &xi, 1e-3).unwrap();
                assert!(r.abs() < 1e-6, "residual {r}");
            }
        }
    }

    #[test]
    fn phase_derivatives_match_finite_differences() {
        let f = field(MetricChart::perturbed_default(), 1.0, 0.25);
        let t = 0.2;
        let e = 1e-4;
        for (x, xi) in samples() {
            let v = phase_eval(&f, t, &x, &xi).unwrap();
            for i in 0..2 {
                let mut xp = x;
                xp[i] += e;
                let mut xm = x;
                xm[i] -= e;
                let (p, m) = (phase_eval(&f, t, &xp, &xi).unwrap(), phase_eval(&f, t, &xm, &xi).unwrap());
                let fd = (p.s - m.s) / (2.0 * e);
                assert!((fd - v.grad_x[i]).abs() < 1e-6 * (1.0 + fd.abs()));
                let fd2 = (p.grad_x - m.grad_x) / (2.0 * e);
                assert!((fd2 - v.hess_x.column(i)).amax() < 1e-6);
                let mut kp = xi;
                kp[i] += e;
                let mut km = xi;
                km[i] -= e;
                let (p, m) = (phase_eval(&f, t, &x, &kp).unwrap(), phase_eval(&f, t, &x, &km).unwrap());
                let fdm = (p.grad_x - m.grad_x) / (2.0 * e);
                assert!((fdm - v.mixed.column(i)).amax() < 1e-6);
                // ∇ξ S equals the source point.
                assert!(((p.s - m.s) / (2.0 * e) - v.source[i]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn transport_flow_identities() {
        let flat = field(MetricChart::flat(), 1.0, 0.5);
        let (x, xi) = (vector![0.1, 0.2], vector![1.0, -0.5]);
        assert_eq!(transport_flow(&flat, 0.2, 0.2, &x, &xi).unwrap(), x);
        let z = transport_flow(&flat, 0.0, 0.2, &x, &xi).unwrap();
        let expect = x + xi * (0.2 / (0.25 + xi.norm_squared()).sqrt());
        assert!((z - expect).norm() < 1e-13);

        let f = field(MetricChart::perturbed_default(), 1.0, 0.25);
        for (x, xi) in samples().into_iter().take(4) {
            let (s, u, t) = (0.03, 0.12, 0.2);
            let direct = transport_flow(&f, s, t, &x, &xi).unwrap();
            let composed = transport_flow(&f, s, u, &transport_flow(&f, u, t, &x, &xi).unwrap(), &xi).unwrap();
            assert!((direct - composed).norm() < 1e-10);
            let literal = transport_flow_direct(&f, s, t, &x, &xi, 16).unwrap();
            assert!((direct - literal).norm() < 1e-8, "{}", (direct - literal).norm());
            let speed = f.symbol.flow_derivs(&x, &xi).grad_xi.norm() * 1.5 + 1.0;
            assert!((direct - x).norm() <= speed * (t - s));
        }
    }

    #[test]
    fn flat_remainder_is_exact_and_curved_is_quadratic() {
        let ts = [0.00625, 0.0125, 0.025, 0.05, 0.1];
        let flat = remainder_bound_check(&[field(MetricChart::flat(), 1.0, 0.25)], &ts, &samples()).unwrap();
        assert_eq!(flat.fits[0], RemainderFit::Exact);
        let fields: Vec<_> = [1.0, 0.25].iter().map(|h| field(MetricChart::perturbed_default(), 1.0, *h)).collect();
        let rep = remainder_bound_check(&fields, &ts, &samples()).unwrap();
        for fit in &rep.fits {
            match fit {
                RemainderFit::Fit { slope, .. } => assert!((1.9..=2.5).contains(slope), "slope {slope}"),
                RemainderFit::Exact => panic!("curved chart cannot be exact"),
            }
        }
        assert!(rep.constant_spread().unwrap() < 2.0);
        assert!(remainder_bound_check(&fields, &[0.05, 0.1], &samples()).is_err());
    }

    #[test]
    fn mixed_hessian_deviation_grows_linearly() {
        let f = field(MetricChart::perturbed_default(), 1.0, 0.25);
        for (x, xi) in samples() {
            let mut ratios = Vec::new();
            for t in [0.02, 0.04, 0.08] {
                let v = phase_eval(&f, t, &x, &xi).unwrap();
                ratios.push(spectral_norm(&(v.mixed - Matrix::<2>::identity())) / t);
            }
            assert!(ratios.iter().all(|r| *r < 4.0));
        }
    }

    #[test]
    fn t0_certification() {
        let f = field(MetricChart::flat(), 1.0, 0.25);
        let pts: Vec<_> = [vector![0.5, 0.0], vector![0.0, 2.0]].iter().map(|xi| (vector![0.0, 0.0], *xi)).collect();
        // flat: ∇x∇ξ S = I exactly, only curvature limits t0
        assert_eq!(certify_t0(&f, &pts).unwrap(), 1.0);
        assert!(matches!(phase_eval(&f, 0.5, &pts[0].0, &pts[0].1), Err(LabError::Precondition(_))));
        let p = field(MetricChart::perturbed_default(), 1.0, 0.25).with_options(FlowOptions::sweep());
        let curved: Vec<_> = samples().into_iter().map(|(x, xi)| (x + vector![-0.8, 0.1], xi)).collect();
        let t0 = certify_t0(&p, &curved).unwrap();
        eprintln!("perturbed t0 = {t0}");
        assert!(t0 <= 1.0 && t0 >= 1.0 / 16.0);
        let probe = p.with_t_max(t0);
        for (x, xi) in &curved {
            let v = phase_eval(&probe, t0, x, xi).unwrap();
            assert!(spectral_norm(&(v.mixed - Matrix::<2>::identity())) <= 0.5);
        }
    }
}
