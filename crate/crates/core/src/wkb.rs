//! Transport amplitudes `a_{0,h}` and `a_{1,h}` along the characteristics.
//!
//! `a_0` is the initial amplitude transported with the weight `exp(∫ f_h)`;
//! `a_1` is the Duhamel integral of the second-order source built from the
//! brackets `(ψ ◁ a_0)_2` and `(q_1 ◁ a_0)_1`. Spatial derivatives of `a_0`
//! and third derivatives of the phase come from a stencil of neighbouring
//! characteristics, differentiated in the initial point and pulled back
//! through `∂X/∂y`.

use crate::cutoff::AnnulusBump;
use crate::error::{LabError, Result};
use crate::hamilton_jacobi::{phase_eval, PhaseField, TangentMode};
use crate::linalg::{inverse, Matrix, Vector};
use crate::quadrature::simpson;
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

pub type SymbolFn<const D: usize> = Arc<dyn Fn(&Vector<D>, &Vector<D>) -> Complex64 + Send + Sync>;

/// The subprincipal symbol `q_1`; higher orders are not represented.
#[derive(Clone, Default)]
pub enum LowerOrderSymbols<const D: usize> {
    #[default]
    Zero,
    Custom(SymbolFn<D>),
}

impl<const D: usize> fmt::Debug for LowerOrderSymbols<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowerOrderSymbols::Zero => write!(f, "LowerOrderSymbols::Zero"),
            LowerOrderSymbols::Custom(_) => write!(f, "LowerOrderSymbols::Custom(..)"),
        }
    }
}

const SYMBOL_FD_STEP: f64 = 1e-4;

impl<const D: usize> LowerOrderSymbols<D> {
    pub fn is_zero(&self) -> bool {
        matches!(self, LowerOrderSymbols::Zero)
    }

    pub fn eval(&self, x: &Vector<D>, eta: &Vector<D>) -> Complex64 {
        match self {
            LowerOrderSymbols::Zero => Complex64::new(0.0, 0.0),
            LowerOrderSymbols::Custom(q) => q(x, eta),
        }
    }

    /// `∇η q_1` and `∇²η q_1` by centred differences.
    fn eta_derivatives(&self, x: &Vector<D>, eta: &Vector<D>) -> ([Complex64; D], [[Complex64; D]; D]) {
        let zero = Complex64::new(0.0, 0.0);
        let mut g = [zero; D];
        let mut hm = [[zero; D]; D];
        if self.is_zero() {
            return (g, hm);
        }
        let e = SYMBOL_FD_STEP;
        let at = |di: Option<(usize, f64)>, dj: Option<(usize, f64)>| {
            let mut k = *eta;
            if let Some((i, s)) = di {
                k[i] += s;
            }
            if let Some((j, s)) = dj {
                k[j] += s;
            }
            self.eval(x, &k)
        };
        let c = self.eval(x, eta);
        for i in 0..D {
            g[i] = (at(Some((i, e)), None) - at(Some((i, -e)), None)) / (2.0 * e);
            hm[i][i] = (at(Some((i, e)), None) - c * 2.0 + at(Some((i, -e)), None)) / (e * e);
            for j in 0..i {
                let v = (at(Some((i, e)), Some((j, e))) - at(Some((i, e)), Some((j, -e))) - at(Some((i, -e)), Some((j, e)))
                    + at(Some((i, -e)), Some((j, -e))))
                    / (4.0 * e * e);
                hm[i][j] = v;
                hm[j][i] = v;
            }
        }
        (g, hm)
    }
}

/// Initial amplitude `a(x, ξ)`.
pub type AmplitudeFn<const D: usize> = Arc<dyn Fn(&Vector<D>, &Vector<D>) -> f64 + Send + Sync>;

/// `a(x, ξ) = phi(ξᵀ G(x) ξ)` for the field's chart and cutoffs.
pub fn phi_of_symbol<const D: usize>(field: &PhaseField<D>) -> AmplitudeFn<D> {
    let chart = field.symbol.chart.clone();
    let phi = field.symbol.lib.phi;
    Arc::new(move |x, xi| phi.eval(xi.dot(&(chart.metric_inverse(x) * xi))))
}

/// `f_h = ½ tr(∇²ξ ψ(p)(x, ∇x S) ∇²x S) + i q_1(x, ∇x S)`.
pub fn f_coefficient<const D: usize>(field: &PhaseField<D>, t: f64, x: &Vector<D>, xi: &Vector<D>) -> Result<Complex64> {
    let v = phase_eval(field, t, x, xi)?;
    let d = field.symbol.flow_derivs(x, &v.grad_x);
    Ok(Complex64::new(0.5 * (d.hxixi * v.hess_x).trace(), 0.0) + Complex64::i() * field.lower.eval(x, &v.grad_x))
}

/// `a(Z_h(0, t, x, ξ), ξ) exp(∫_0^t f_h(s, Z_h(s, t, x, ξ), ξ) ds)`.
///
/// The exponent is accumulated as an extra component of the RK4 system,
/// which on each step is Simpson's rule on the step and its midpoint; the
/// default step count gives well over 33 nodes.
pub fn leading_amplitude<const D: usize>(
    field: &PhaseField<D>,
    initial: &AmplitudeFn<D>,
    t: f64,
    x: &Vector<D>,
    xi: &Vector<D>,
) -> Result<Complex64> {
    field.check_time(t)?;
    let (y, _) = field.invert(t, x, xi, TangentMode::Position)?;
    let end = field.flow().with_transport().run(t, &y, xi)?;
    Ok(initial(&y, xi) * end.transport.exp())
}

/// `a_{1,h}(t, x, ξ)`.
pub fn first_corrector<const D: usize>(
    field: &PhaseField<D>,
    initial: &AmplitudeFn<D>,
    t: f64,
    x: &Vector<D>,
    xi: &Vector<D>,
) -> Result<Complex64> {
    Ok(amplitudes(field, initial, t, x, xi, true)?.a1)
}

/// Everything the kernel needs at one `(t, x, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSample<const D: usize> {
    /// `S_h - x·ξ`.
    pub phase_offset: f64,
    /// `Z_h(0, t, x, ξ)`.
    pub source: Vector<D>,
    /// `∫_0^t f_h` along the characteristic.
    pub transport: Complex64,
    pub a0: Complex64,
    pub a1: Complex64,
    /// The corrector source `g_{1,h}(t, x, ξ)`.
    pub g1: Complex64,
}

/// Integer offsets `0, ±e_i, ±e_i±e_j (i < j)`.
fn stencil_offsets<const D: usize>() -> Vec<Vector<D>> {
    let mut v = vec![Vector::<D>::zeros()];
    for i in 0..D {
        for s in [1.0, -1.0] {
            let mut o = Vector::<D>::zeros();
            o[i] = s;
            v.push(o);
        }
    }
    for i in 0..D {
        for j in i + 1..D {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut o = Vector::<D>::zeros();
                o[i] = si;
                o[j] = sj;
                v.push(o);
            }
        }
    }
    v
}

fn offset_index<const D: usize>(offsets: &[Vector<D>], target: &Vector<D>) -> usize {
    offsets.iter().position(|o| o == target).expect("offset in stencil")
}

struct Stencil<const D: usize> {
    delta: f64,
    center: usize,
    plus: [usize; D],
    minus: [usize; D],
    /// `[i][j]` for `i < j`: indices of `(++, +-, -+, --)`.
    cross: Vec<Vec<[usize; 4]>>,
}

impl<const D: usize> Stencil<D> {
    fn new(offsets: &[Vector<D>], delta: f64) -> Self {
        let unit = |i: usize, s: f64| {
            let mut o = Vector::<D>::zeros();
            o[i] = s;
            o
        };
        let mut plus = [0; D];
        let mut minus = [0; D];
        for i in 0..D {
            plus[i] = offset_index(offsets, &unit(i, 1.0));
            minus[i] = offset_index(offsets, &unit(i, -1.0));
        }
        let mut cross = vec![vec![[0; 4]; D]; D];
        for i in 0..D {
            for j in i + 1..D {
                let idx = |si: f64, sj: f64| offset_index(offsets, &(unit(i, si) + unit(j, sj)));
                cross[i][j] = [idx(1.0, 1.0), idx(1.0, -1.0), idx(-1.0, 1.0), idx(-1.0, -1.0)];
            }
        }
        Stencil { delta, center: 0, plus, minus, cross }
    }

    fn first<T>(&self, v: &[T], i: usize) -> T
    where
        T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        (v[self.plus[i]] - v[self.minus[i]]) * (0.5 / self.delta)
    }

    fn second<T>(&self, v: &[T], i: usize, j: usize) -> T
    where
        T: Copy + std::ops::Sub<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let d2 = self.delta * self.delta;
        if i == j {
            return (v[self.plus[i]] - v[self.center] * 2.0 + v[self.minus[i]]) * (1.0 / d2);
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let c = self.cross[a][b];
        (v[c[0]] - v[c[1]] - v[c[2]] + v[c[3]]) * (0.25 / d2)
    }
}

/// Phase offset, transported `a_0`, and optionally `a_1` at `(t, x, ξ)`.
pub fn amplitudes<const D: usize>(
    field: &PhaseField<D>,
    initial: &AmplitudeFn<D>,
    t: f64,
    x: &Vector<D>,
    xi: &Vector<D>,
    with_corrector: bool,
) -> Result<AmplitudeSample<D>> {
    field.check_time(t)?;
    let (y, end) = field.invert(t, x, xi, TangentMode::Position)?;
    let phase_offset = (y - x).dot(xi) + end.integral;
    let flow = field.flow().with_transport();
    if !with_corrector || t == 0.0 {
        let e = flow.run(t, &y, xi)?;
        let a0 = initial(&y, xi) * e.transport.exp();
        return Ok(AmplitudeSample { phase_offset, source: y, transport: e.transport, a0, a1: Complex64::new(0.0, 0.0), g1: Complex64::new(0.0, 0.0) });
    }
    let offsets = stencil_offsets::<D>();
    let delta = 1e-4 * (1.0 + y.norm());
    let stencil = Stencil::<D>::new(&offsets, delta);
    // neighbours share the centre's step count so differences stay smooth
    let center = flow.record(t, &y, xi)?;
    let steps = center.len() - 1;
    let mut paths = vec![center];
    for o in &offsets[1..] {
        paths.push(flow.record_steps(t, &(y + o * delta), xi, steps)?);
    }
    let a_init: Vec<f64> = offsets.iter().map(|o| initial(&(y + o * delta), xi)).collect();
    let n = paths[0].len() - 1;
    let big_f = paths[0][n].transport;
    let b_lower = !field.lower.is_zero();
    let mut integrand = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let center = &paths[0][k];
        let jinv = inverse(&center.tangent.x_y)
            .ok_or_else(|| LabError::Domain(format!("singular characteristic map at s = {}", t * k as f64 / n as f64)))?;
        let amps: Vec<Complex64> = paths.iter().zip(&a_init).map(|(p, a)| p[k].transport.exp() * *a).collect();
        let xs: Vec<Vector<D>> = paths.iter().map(|p| p[k].x).collect();
        let hs: Vec<Matrix<D>> = paths
            .iter()
            .map(|p| p[k].tangent.phase_hessian().unwrap_or_else(|| Matrix::from_element(f64::NAN)))
            .collect();
        let c = amps[0];
        // ∂y A, then ∇x a = J^{-T} ∂y A.
        let mut dya = [Complex64::new(0.0, 0.0); D];
        for (i, v) in dya.iter_mut().enumerate() {
            *v = stencil.first(&amps, i);
        }
        let mut grad = [Complex64::new(0.0, 0.0); D];
        for (l, g) in grad.iter_mut().enumerate() {
            for (m, d) in dya.iter().enumerate() {
                *g += *d * jinv[(m, l)];
            }
        }
        // ∇²x a = J^{-T} [∂²y A - Σ_l (∇x a)_l ∂²y X_l] J^{-1}.
        let mut inner = [[Complex64::new(0.0, 0.0); D]; D];
        for i in 0..D {
            for j in 0..D {
                let ddx = stencil.second(&xs, i, j);
                let mut v = stencil.second(&amps, i, j);
                for l in 0..D {
                    v -= grad[l] * ddx[l];
                }
                inner[i][j] = v;
            }
        }
        let mut hess = [[Complex64::new(0.0, 0.0); D]; D];
        for a in 0..D {
            for b in 0..D {
                let mut v = Complex64::new(0.0, 0.0);
                for i in 0..D {
                    for j in 0..D {
                        v += inner[i][j] * (jinv[(i, a)] * jinv[(j, b)]);
                    }
                }
                hess[a][b] = v;
            }
        }
        // S_ijm = Σ_k (∂y_k H_ij) J^{-1}_{km}.
        let dh: Vec<Matrix<D>> = (0..D).map(|kk| stencil.first(&hs, kk)).collect();
        let mut s3 = [Matrix::<D>::zeros(); D];
        for (m, s3m) in s3.iter_mut().enumerate() {
            for (kk, dhk) in dh.iter().enumerate() {
                *s3m += dhk * jinv[(kk, m)];
            }
        }
        let s2 = hs[0];
        let b = field.symbol.xi_derivs(&center.x, &center.xi);
        // (ψ ◁ c)_2
        let mut t_cc = Complex64::new(0.0, 0.0);
        let mut t_s3 = 0.0;
        let mut t_s2c = Complex64::new(0.0, 0.0);
        let mut t_ss = 0.0;
        for i in 0..D {
            for j in 0..D {
                t_cc += hess[i][j] * b.d2[(i, j)];
                for kk in 0..D {
                    t_s3 += b.d3[kk][(i, j)] * s3[kk][(i, j)];
                    t_s2c += grad[kk] * (b.d3[kk][(i, j)] * s2[(i, j)]);
                    for l in 0..D {
                        t_ss += b.d4[kk][l][(i, j)] * s2[(i, j)] * s2[(kk, l)];
                    }
                }
            }
        }
        let psi2 = -(t_cc * 0.5 + c * (t_s3 / 6.0) + t_s2c * 0.5 + c * (t_ss / 8.0));
        let mut g = Complex64::i() * psi2;
        if b_lower {
            let (dq, ddq) = field.lower.eta_derivatives(&center.x, &center.xi);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..D {
                acc += dq[i] * grad[i];
                for j in 0..D {
                    acc += ddq[i][j] * s2[(i, j)] * c * 0.5;
                }
            }
            // i (q_1 ◁ c)_1 = i (-i) [...] = [...]
            g += acc;
        }
        integrand.push(g * (big_f - center.transport).exp());
    }
    let a1 = simpson(&integrand, t / n as f64);
    let a0 = a_init[0] * big_f.exp();
    Ok(AmplitudeSample { phase_offset, source: y, transport: big_f, a0, a1, g1: integrand[n] })
}

/// A transported amplitude of order 0 or 1.
#[derive(Clone)]
pub struct Amplitude<const D: usize> {
    pub order: usize,
    pub field: PhaseField<D>,
    pub initial: AmplitudeFn<D>,
    /// Support of the initial data in `λ = ξᵀGξ`.
    pub support: AnnulusBump,
}

impl<const D: usize> Amplitude<D> {
    pub fn new(order: usize, field: PhaseField<D>, initial: AmplitudeFn<D>) -> Result<Self> {
        if order > 1 {
            return Err(LabError::InvalidParameter(format!("amplitude order {order} not implemented (0 or 1)")));
        }
        let support = field.symbol.lib.phi;
        Ok(Amplitude { order, field, initial, support })
    }

    pub fn eval(&self, t: f64, x: &Vector<D>, xi: &Vector<D>) -> Result<Complex64> {
        match self.order {
            0 => leading_amplitude(&self.field, &self.initial, t, x, xi),
            _ => first_corrector(&self.field, &self.initial, t, x, xi),
        }
    }
}

/// Outcome of [`support_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct SupportReport<const D: usize> {
    pub holds: bool,
    /// `(t, x, ξ, |a|)` of the largest value found outside `K`.
    pub worst: Option<(f64, Vector<D>, Vector<D>, f64)>,
}

/// Whether `|a| <= 1e-10` wherever `ξᵀG(x)ξ` lies outside `K = [a/κ, κ b]`.
pub fn support_check<const D: usize>(
    amplitude: &Amplitude<D>,
    ts: &[f64],
    samples: &[(Vector<D>, Vector<D>)],
    enlargement: f64,
) -> Result<SupportReport<D>> {
    let lo = amplitude.support.a / enlargement;
    let hi = amplitude.support.b * enlargement;
    let chart = &amplitude.field.symbol.chart;
    let mut worst: Option<(f64, Vector<D>, Vector<D>, f64)> = None;
    for &t in ts {
        for (x, xi) in samples {
            let lambda = xi.dot(&(chart.metric_inverse(x) * xi));
            if lambda >= lo && lambda <= hi {
                continue;
            }
            let v = amplitude.eval(t, x, xi)?.norm();
            if v > 1e-10 && worst.as_ref().is_none_or(|w| v > w.3) {
                worst = Some((t, *x, *xi, v));
            }
        }
    }
    Ok(SupportReport { holds: worst.is_none(), worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::CutoffLibrary;
    use crate::fit::fit_line;
    use crate::geometry::{MassParam, MetricChart, Symbol};
    use nalgebra::vector;

    fn field(chart: MetricChart<2>, h: f64) -> PhaseField<2> {
        let mass = MassParam::new(1.0).unwrap();
        let sym = Symbol::new(chart, mass, CutoffLibrary::standard(mass), h).unwrap();
        PhaseField::new(sym, 0.25)
    }

    fn samples() -> Vec<(Vector<2>, Vector<2>)> {
        let mut v = Vec::new();
        for x in [vector![0.1, 0.0], vector![0.3, -0.4], vector![-0.6, 0.2]] {
            for xi in [vector![1.0, 0.0], vector![0.5, 1.2], vector![-0.9, -0.7]] {
                v.push((x, xi));
            }
        }
        v
    }

    #[test]
    fn flat_amplitudes_are_exact() {
        for h in [1.0, 0.25, 1.0 / 64.0] {
            let f = field(MetricChart::flat(), h);
            let a = phi_of_symbol(&f);
            for (x, xi) in samples() {
                let phi = f.symbol.lib.phi.eval(xi.norm_squared());
                for t in [0.0, 0.1, 0.25] {
                    assert_eq!(f_coefficient(&f, t, &x, &xi).unwrap(), Complex64::new(0.0, 0.0));
                    let s = amplitudes(&f, &a, t, &x, &xi, true).unwrap();
                    assert!((s.a0 - phi).norm() < 1e-10);
                    assert!(s.a1.norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn initial_conditions() {
        let f = field(MetricChart::perturbed_default(), 0.5);
        let a = phi_of_symbol(&f);
        for (x, xi) in samples() {
            assert_eq!(leading_amplitude(&f, &a, 0.0, &x, &xi).unwrap(), Complex64::new(a(&x, &xi), 0.0));
            assert_eq!(first_corrector(&f, &a, 0.0, &x, &xi).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn f_vanishes_away_from_the_bump() {
        let f = field(MetricChart::perturbed_default(), 0.25);
        let x = vector![1.6, -0.9];
        for xi in [vector![1.0, 0.0], vector![0.3, 1.4]] {
            assert!(f_coefficient(&f, 0.05, &x, &xi).unwrap().norm() <= 1e-8);
        }
    }

    #[test]
    fn f_is_bounded_uniformly_in_h() {
        let mut sup: Vec<f64> = Vec::new();
        for k in 0..=6 {
            let f = field(MetricChart::perturbed_default(), 0.5f64.powi(k));
            let m = samples().iter().map(|(x, xi)| f_coefficient(&f, 0.2, x, xi).unwrap().norm()).fold(0.0, f64::max);
            sup.push(m);
        }
        let hi = sup.iter().copied().fold(0.0, f64::max);
        let lo = sup.iter().copied().fold(f64::MAX, f64::min);
        assert!(hi < 10.0 && hi / lo < 2.0, "{sup:?}");
    }

    fn transport_residual(f: &PhaseField<2>, a: &AmplitudeFn<2>, t: f64, x: &Vector<2>, xi: &Vector<2>, order: usize) -> f64 {
        let e = 1e-3;
        let val = |t: f64, x: &Vector<2>| {
            let s = amplitudes(f, a, t, x, xi, order == 1).unwrap();
            if order == 0 { s.a0 } else { s.a1 }
        };
        let dt = (val(t + e, x) - val(t - e, x)) / (2.0 * e);
        let v = phase_eval(f, t, x, xi).unwrap();
        let vel = f.symbol.flow_derivs(x, &v.grad_x).grad_xi;
        let mut adv = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            let mut xp = *x;
            xp[i] += e;
            let mut xm = *x;
            xm[i] -= e;
            adv += (val(t, &xp) - val(t, &xm)) / (2.0 * e) * vel[i];
        }
        let here = amplitudes(f, a, t, x, xi, order == 1).unwrap();
        let fc = f_coefficient(f, t, x, xi).unwrap();
        let source = if order == 0 { Complex64::new(0.0, 0.0) } else { here.g1 };
        let c = if order == 0 { here.a0 } else { here.a1 };
        (dt - adv - fc * c - source).norm()
    }

    #[test]
    fn perturbed_leading_amplitude_solves_transport() {
        for h in [1.0, 1.0 / 16.0] {
            let f = field(MetricChart::perturbed_default(), h);
            let a: AmplitudeFn<2> = Arc::new(|x: &Vector<2>, _: &Vector<2>| (-x.norm_squared()).exp());
            for (x, xi) in samples().into_iter().step_by(2) {
                assert!(transport_residual(&f, &a, 0.15, &x, &xi, 0) < 1e-5);
            }
        }
    }

    #[test]
    fn perturbed_corrector_solves_its_transport_equation() {
        let f = field(MetricChart::perturbed_default(), 0.25);
        let a: AmplitudeFn<2> = Arc::new(|x: &Vector<2>, _: &Vector<2>| (-x.norm_squared()).exp());
        for (x, xi) in samples().into_iter().step_by(3) {
            let r = transport_residual(&f, &a, 0.15, &x, &xi, 1);
            assert!(r < 1e-5, "residual {r}");
        }
    }

    #[test]
    fn flat_corrector_matches_the_heat_like_formula() {
        // Flat chart, x-dependent data: a_1 = -(it/2) ψ_ij(ξ) ∂_ij a(x + t∇ψ(ξ)).
        let f = field(MetricChart::flat(), 0.5);
        let a: AmplitudeFn<2> = Arc::new(|x: &Vector<2>, _: &Vector<2>| (-x.norm_squared()).exp());
        let t = 0.2;
        for (x, xi) in samples() {
            let b = f.symbol.xi_derivs(&x, &xi);
            let z = x + b.d1 * t;
            let g = (-z.norm_squared()).exp();
            let mut lap = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    let d = if i == j { 1.0 } else { 0.0 };
                    lap += b.d2[(i, j)] * (4.0 * z[i] * z[j] - 2.0 * d) * g;
                }
            }
            let expect = Complex64::new(0.0, -0.5 * t * lap);
            let got = first_corrector(&f, &a, t, &x, &xi).unwrap();
            assert!((got - expect).norm() < 1e-6, "{got} vs {expect}");
        }
    }

    #[test]
    fn corrector_grows_linearly_in_time() {
        let f = field(MetricChart::perturbed_default(), 0.25);
        let a = phi_of_symbol(&f);
        let (x, xi) = (vector![0.3, -0.2], vector![1.0, 0.4]);
        let ts = [0.01, 0.02, 0.04, 0.08];
        let vals: Vec<f64> = ts.iter().map(|t| first_corrector(&f, &a, *t, &x, &xi).unwrap().norm().ln()).collect();
        let lt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
        assert!(fit_line(&lt, &vals).unwrap().slope >= 0.9);
    }

    #[test]
    fn support_check_examples() {
        let flat = field(MetricChart::flat(), 0.25);
        let amp = Amplitude::new(0, flat.clone(), phi_of_symbol(&flat)).unwrap();
        let mut pts = Vec::new();
        for x in [vector![0.0, 0.0], vector![0.4, 0.3]] {
            for r in [0.2, 0.45, 0.49, 0.51, 1.0, 1.99, 2.01, 2.3] {
                for th in [0.0f64, 1.0, 2.5] {
                    pts.push((x, vector![r * th.cos(), r * th.sin()]));
                }
            }
        }
        assert!(support_check(&amp, &[0.0, 0.2], &pts, 1.0).unwrap().holds);
        let strong = MetricChart::perturbed_flat(0.5, Vector::zeros(), 1.0).unwrap();
        let curved = field(strong, 0.25);
        let amp = Amplitude::new(0, curved.clone(), phi_of_symbol(&curved)).unwrap();
        let mut edge = Vec::new();
        for x in [vector![0.5, 0.0], vector![0.0, 0.5], vector![-0.4, 0.3]] {
            for k in 0..8 {
                let th = k as f64 * std::f64::consts::PI / 4.0;
                for i in 0..=30 {
                    let r = 1.6 + 0.03 * i as f64;
                    edge.push((x, vector![r * th.cos(), r * th.sin()]));
                }
            }
        }
        assert!(support_check(&amp, &[0.1, 0.25], &edge, 1.5).unwrap().holds);
        let tight = support_check(&amp, &[0.1, 0.25], &edge, 1.0).unwrap();
        assert!(!tight.holds && tight.worst.is_some());
        assert!(Amplitude::new(2, curved.clone(), phi_of_symbol(&curved)).is_err());
    }
}
