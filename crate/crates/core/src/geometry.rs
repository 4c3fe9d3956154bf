//! Model manifolds as coordinate charts, and the h-dependent symbol.

use crate::cutoff::{unit_radial_bump_jet, CutoffLibrary};
use crate::error::{LabError, Result};
use crate::jet::Jet;
use crate::linalg::{determinant, inverse, symmetric_eigenvalues, Matrix, Vector};

/// Mass `m >= 0` and its regularization `m̃` (equal to `m`, or 1 when `m = 0`).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MassParam {
    pub m: f64,
    pub m_tilde: f64,
}

impl MassParam {
    pub fn new(m: f64) -> Result<Self> {
        if !(m.is_finite() && m >= 0.0) {
            return Err(LabError::InvalidParameter(format!("mass must be finite and >= 0, got {m}")));
        }
        let m_tilde = if m > 0.0 { m } else { 1.0 };
        Ok(MassParam { m, m_tilde })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChartKind<const D: usize> {
    Flat,
    /// `G(x) = I + epsilon * b(|x - center|^2 / radius^2) * M`.
    PerturbedFlat { epsilon: f64, center: Vector<D>, radius: f64 },
    /// Geodesic polar coordinates `(θ_1, ..., θ_D)` on the unit sphere minus poles.
    SpherePolar,
}

/// `G`, its first and second partial derivatives at a point.
#[derive(Debug, Clone, Copy)]
pub struct MetricJet<const D: usize> {
    pub g_inv: Matrix<D>,
    pub d: [Matrix<D>; D],
    pub dd: [[Matrix<D>; D]; D],
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricChart<const D: usize> {
    kind: ChartKind<D>,
    pattern: Matrix<D>,
}

/// Trace-free symmetric pattern with eigenvalues ±1 (or `[-1]` in one dimension).
fn default_pattern<const D: usize>() -> Matrix<D> {
    let mut m = Matrix::<D>::zeros();
    if D == 1 {
        m[(0, 0)] = -1.0;
    } else {
        m[(0, 0)] = 0.6;
        m[(0, 1)] = 0.8;
        m[(1, 0)] = 0.8;
        m[(1, 1)] = -0.6;
    }
    m
}

impl<const D: usize> MetricChart<D> {
    pub fn flat() -> Self {
        MetricChart { kind: ChartKind::Flat, pattern: Matrix::zeros() }
    }

    pub fn perturbed_flat(epsilon: f64, center: Vector<D>, radius: f64) -> Result<Self> {
        if !(epsilon.is_finite() && radius.is_finite() && radius > 0.0) {
            return Err(LabError::InvalidParameter(format!(
                "perturbed_flat needs finite epsilon and radius > 0, got ({epsilon}, {radius})"
            )));
        }
        Ok(MetricChart {
            kind: ChartKind::PerturbedFlat { epsilon, center, radius },
            pattern: default_pattern(),
        })
    }

    /// `epsilon = 0.15`, bump of radius 1 centred at the origin.
    pub fn perturbed_default() -> Self {
        Self::perturbed_flat(0.15, Vector::zeros(), 1.0).expect("static parameters")
    }

    pub fn sphere_polar() -> Self {
        MetricChart { kind: ChartKind::SpherePolar, pattern: Matrix::zeros() }
    }

    pub fn dim(&self) -> usize {
        D
    }

    pub fn kind(&self) -> &ChartKind<D> {
        &self.kind
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.kind, ChartKind::Flat)
    }

    /// Whether `G` equals the identity on a neighbourhood of `x`.
    pub fn is_locally_flat(&self, x: &Vector<D>) -> bool {
        match &self.kind {
            ChartKind::Flat => true,
            ChartKind::PerturbedFlat { epsilon, center, radius } => {
                *epsilon == 0.0 || (x - center).norm() >= *radius
            }
            ChartKind::SpherePolar => false,
        }
    }

    /// A bound `C` with the spectrum of `G(x)` in `[1/C, C]` for every `x`, when one exists.
    pub fn global_ellipticity(&self) -> Option<f64> {
        match &self.kind {
            ChartKind::Flat => Some(1.0),
            ChartKind::PerturbedFlat { epsilon, .. } => {
                let e = epsilon.abs() * self.pattern.amax().max(1.0);
                (e < 1.0).then(|| (1.0 + e).max(1.0 / (1.0 - e)))
            }
            ChartKind::SpherePolar => None,
        }
    }

    pub fn metric_inverse(&self, x: &Vector<D>) -> Matrix<D> {
        match &self.kind {
            ChartKind::Flat => Matrix::identity(),
            ChartKind::PerturbedFlat { epsilon, center, radius } => {
                let s = (x - center).norm_squared() / (radius * radius);
                let b = unit_radial_bump_jet(Jet::constant(s)).value();
                Matrix::identity() + self.pattern * (epsilon * b)
            }
            ChartKind::SpherePolar => {
                let w = sphere_weights(x);
                Matrix::from_diagonal(&w.map(|v| 1.0 / v))
            }
        }
    }

    /// `G` with analytic first and second derivatives.
    pub fn metric_jet(&self, x: &Vector<D>) -> MetricJet<D> {
        let zero = Matrix::<D>::zeros();
        match &self.kind {
            ChartKind::Flat => MetricJet { g_inv: Matrix::identity(), d: [zero; D], dd: [[zero; D]; D] },
            ChartKind::PerturbedFlat { epsilon, center, radius } => {
                let u = x - center;
                let r2 = radius * radius;
                let s = u.norm_squared() / r2;
                let b = unit_radial_bump_jet(Jet::variable(s));
                let (b0, b1, b2) = (b.value(), b.derivative(1), b.derivative(2));
                let mut d = [zero; D];
                let mut dd = [[zero; D]; D];
                if b0 != 0.0 || b1 != 0.0 {
                    for i in 0..D {
                        let si = 2.0 * u[i] / r2;
                        d[i] = self.pattern * (epsilon * b1 * si);
                        for j in 0..D {
                            let sj = 2.0 * u[j] / r2;
                            let sij = if i == j { 2.0 / r2 } else { 0.0 };
                            dd[i][j] = self.pattern * (epsilon * (b2 * si * sj + b1 * sij));
                        }
                    }
                }
                MetricJet { g_inv: Matrix::identity() + self.pattern * (epsilon * b0), d, dd }
            }
            ChartKind::SpherePolar => {
                let w = sphere_weights(x);
                let gi = w.map(|v| 1.0 / v);
                let mut d = [zero; D];
                let mut dd = [[zero; D]; D];
                let cot: Vec<f64> = (0..D).map(|k| x[k].cos() / x[k].sin()).collect();
                for i in 0..D {
                    // G_ii = prod_{k<i} sin^{-2} θ_k
                    for k in 0..i {
                        d[k][(i, i)] = gi[i] * (-2.0 * cot[k]);
                        for l in 0..i {
                            dd[k][l][(i, i)] = if k == l {
                                gi[i] * (6.0 * cot[k] * cot[k] + 2.0)
                            } else {
                                gi[i] * 4.0 * cot[k] * cot[l]
                            };
                        }
                    }
                }
                MetricJet { g_inv: Matrix::from_diagonal(&gi), d, dd }
            }
        }
    }

    /// `g = G^{-1}`.
    pub fn metric(&self, x: &Vector<D>) -> Matrix<D> {
        inverse(&self.metric_inverse(x)).unwrap_or_else(|| Matrix::from_element(f64::NAN))
    }

    pub fn sqrt_det(&self, x: &Vector<D>) -> f64 {
        (1.0 / determinant(&self.metric_inverse(x))).sqrt()
    }

    /// `Γ^i_{jk}` as `gamma[i][(j, k)]`, from analytic derivatives of the metric.
    pub fn christoffel(&self, x: &Vector<D>) -> [Matrix<D>; D] {
        let jet = self.metric_jet(x);
        let g = inverse(&jet.g_inv).unwrap_or_else(|| Matrix::from_element(f64::NAN));
        // ∂_a g = -g (∂_a G) g
        let dg: Vec<Matrix<D>> = jet.d.iter().map(|dgi| -(g * dgi * g)).collect();
        let mut gamma = [Matrix::<D>::zeros(); D];
        for (i, gamma_i) in gamma.iter_mut().enumerate() {
            for j in 0..D {
                for k in 0..D {
                    let mut acc = 0.0;
                    for l in 0..D {
                        acc += jet.g_inv[(i, l)] * (dg[j][(l, k)] + dg[k][(j, l)] - dg[l][(j, k)]);
                    }
                    gamma_i[(j, k)] = 0.5 * acc;
                }
            }
        }
        gamma
    }
}

/// Diagonal of the round metric in nested polar coordinates.
fn sphere_weights<const D: usize>(x: &Vector<D>) -> Vector<D> {
    let mut w = Vector::<D>::zeros();
    let mut acc = 1.0;
    for i in 0..D {
        w[i] = acc;
        let s = x[i].sin();
        acc *= s * s;
    }
    w
}

/// Smallest `C >= 1` with the spectrum of `G(x)` inside `[1/C, C]` over the grid.
pub fn ellipticity_bounds<const D: usize>(chart: &MetricChart<D>, grid: &[Vector<D>]) -> Result<f64> {
    if grid.is_empty() {
        return Err(LabError::InvalidParameter("ellipticity grid is empty".into()));
    }
    let mut c: f64 = 1.0;
    for x in grid {
        let ev = symmetric_eigenvalues(&chart.metric_inverse(x));
        let (lo, hi) = (ev[0], ev[D - 1]);
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(LabError::NotPositiveDefinite { point: x.iter().copied().collect(), min_eigenvalue: lo });
        }
        c = c.max(hi).max(1.0 / lo);
    }
    Ok(c)
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(LabError::InvalidParameter(format!("h must lie in (0, 1], got {h}")));
    }
    Ok(())
}

/// `p_{m̃,h}(x, ξ) = ξᵀ G(x) ξ + h² m̃²`.
pub fn principal_symbol<const D: usize>(
    chart: &MetricChart<D>,
    mass: MassParam,
    h: f64,
    x: &Vector<D>,
    xi: &Vector<D>,
) -> Result<f64> {
    check_h(h)?;
    Ok(xi.dot(&(chart.metric_inverse(x) * xi)) + h * h * mass.m_tilde * mass.m_tilde)
}

/// `ψ(p)`; exactly `√p` wherever `psi_tilde(p) = 1`.
pub fn symbol_sqrt<const D: usize>(
    lib: &CutoffLibrary,
    chart: &MetricChart<D>,
    mass: MassParam,
    h: f64,
    x: &Vector<D>,
    xi: &Vector<D>,
) -> Result<f64> {
    Ok(lib.psi(principal_symbol(chart, mass, h, x, xi)?))
}

/// Values and derivatives of `q = ψ(p)` needed by the Hamiltonian flow.
#[derive(Debug, Clone, Copy)]
pub struct FlowDerivs<const D: usize> {
    pub q: f64,
    pub grad_x: Vector<D>,
    pub grad_xi: Vector<D>,
    pub hxx: Matrix<D>,
    /// `(i, j) = ∂x_i ∂ξ_j q`.
    pub hxxi: Matrix<D>,
    pub hxixi: Matrix<D>,
}

/// ξ-derivatives of `q` up to order four at fixed `x`.
#[derive(Debug, Clone, Copy)]
pub struct XiDerivs<const D: usize> {
    pub q: f64,
    pub d1: Vector<D>,
    pub d2: Matrix<D>,
    /// `d3[k][(i, j)] = ∂ξ_i ∂ξ_j ∂ξ_k q`.
    pub d3: [Matrix<D>; D],
    pub d4: [[Matrix<D>; D]; D],
}

/// The full h-dependent symbol `q = ψ(ξᵀGξ + h²m̃²)` on a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol<const D: usize> {
    pub chart: MetricChart<D>,
    pub mass: MassParam,
    pub lib: CutoffLibrary,
    pub h: f64,
}

impl<const D: usize> Symbol<D> {
    pub fn new(chart: MetricChart<D>, mass: MassParam, lib: CutoffLibrary, h: f64) -> Result<Self> {
        check_h(h)?;
        Ok(Symbol { chart, mass, lib, h })
    }

    pub fn mass_term(&self) -> f64 {
        self.h * self.h * self.mass.m_tilde * self.mass.m_tilde
    }

    pub fn p(&self, x: &Vector<D>, xi: &Vector<D>) -> f64 {
        xi.dot(&(self.chart.metric_inverse(x) * xi)) + self.mass_term()
    }

    pub fn q(&self, x: &Vector<D>, xi: &Vector<D>) -> f64 {
        self.lib.psi(self.p(x, xi))
    }

    pub fn flow_derivs(&self, x: &Vector<D>, xi: &Vector<D>) -> FlowDerivs<D> {
        let jet = self.chart.metric_jet(x);
        let gxi = jet.g_inv * xi;
        let p = xi.dot(&gxi) + self.mass_term();
        let psi = self.lib.psi_jet(p).derivatives();
        let pg = gxi * 2.0;
        let mut px = Vector::<D>::zeros();
        let mut pxx = Matrix::<D>::zeros();
        let mut pxxi = Matrix::<D>::zeros();
        for i in 0..D {
            let dgi_xi = jet.d[i] * xi;
            px[i] = xi.dot(&dgi_xi);
            for j in 0..D {
                pxx[(i, j)] = xi.dot(&(jet.dd[i][j] * xi));
                pxxi[(i, j)] = 2.0 * dgi_xi[j];
            }
        }
        FlowDerivs {
            q: psi[0],
            grad_x: px * psi[1],
            grad_xi: pg * psi[1],
            hxx: px * px.transpose() * psi[2] + pxx * psi[1],
            hxxi: px * pg.transpose() * psi[2] + pxxi * psi[1],
            hxixi: pg * pg.transpose() * psi[2] + jet.g_inv * (2.0 * psi[1]),
        }
    }

    /// Faà di Bruno for `ψ(p)` with `∂ξ p = 2Gξ`, `∂²ξ p = 2G` and higher derivatives zero.
    pub fn xi_derivs(&self, x: &Vector<D>, eta: &Vector<D>) -> XiDerivs<D> {
        let g = self.chart.metric_inverse(x);
        let pv = g * eta * 2.0;
        let pm = g * 2.0;
        let p = eta.dot(&(g * eta)) + self.mass_term();
        let s = self.lib.psi_jet(p).derivatives();
        let zero = Matrix::<D>::zeros();
        let mut d3 = [zero; D];
        let mut d4 = [[zero; D]; D];
        for k in 0..D {
            for i in 0..D {
                for j in 0..D {
                    d3[k][(i, j)] = s[3] * pv[i] * pv[j] * pv[k]
                        + s[2] * (pm[(i, j)] * pv[k] + pm[(i, k)] * pv[j] + pm[(j, k)] * pv[i]);
                }
            }
        }
        for k in 0..D {
            for l in 0..D {
                for i in 0..D {
                    for j in 0..D {
                        let pairs6 = pm[(i, j)] * pv[k] * pv[l]
                            + pm[(i, k)] * pv[j] * pv[l]
                            + pm[(i, l)] * pv[j] * pv[k]
                            + pm[(j, k)] * pv[i] * pv[l]
                            + pm[(j, l)] * pv[i] * pv[k]
                            + pm[(k, l)] * pv[i] * pv[j];
                        let pairs3 = pm[(i, j)] * pm[(k, l)] + pm[(i, k)] * pm[(j, l)] + pm[(i, l)] * pm[(j, k)];
                        d4[k][l][(i, j)] = s[4] * pv[i] * pv[j] * pv[k] * pv[l] + s[3] * pairs6 + s[2] * pairs3;
                    }
                }
            }
        }
        XiDerivs {
            q: s[0],
            d1: pv * s[1],
            d2: pv * pv.transpose() * s[2] + pm * s[1],
            d3,
            d4,
        }
    }
}
