//! Direct quadrature of the semiclassical kernel
//! `L_h(t,x,y) = (2πh)^{-d} ∫ e^{i(S_h(t,x,ξ) - y·ξ)/h} (a_0 + h a_1)(t,x,ξ) dξ`.
//!
//! For a fixed `(t, x)` the integrand is tabulated once on a tensor
//! Gauss-Legendre grid over the bounding box of the amplitude support
//! (a [`KernelSlice`]); the factor `e^{-iy·ξ/h}` splits across axes, so each
//! `y` costs one contraction of the table.
//!
//! On curved charts the characteristic data (phase offset, source point,
//! transport exponent, corrector) is smooth in `ξ`; it is computed on a coarse
//! uniform grid and carried to the quadrature nodes by 6-point Lagrange
//! interpolation per axis. The cutoff `a(y, ξ)` itself is evaluated at the
//! nodes, never interpolated.

use crate::error::{LabError, Result};
use crate::hamilton_jacobi::PhaseField;
use crate::linalg::Vector;
use crate::quadrature::{pairwise_sum_complex, GaussLegendre};
use crate::wkb::{amplitudes, phi_of_symbol, AmplitudeFn};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Time window of a kernel request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Window {
    /// `|t| <= t0`.
    Wave,
    /// `|t| <= √h t0`.
    Kg,
}

impl Window {
    pub fn limit(&self, h: f64, t0: f64) -> f64 {
        match self {
            Window::Wave => t0,
            Window::Kg => h.sqrt() * t0,
        }
    }

    pub fn check(&self, h: f64, t0: f64, t: f64) -> Result<()> {
        let lim = self.limit(h, t0);
        if !(t.abs() <= lim * (1.0 + 1e-12)) {
            return Err(LabError::Precondition(format!("|t| = {} outside the {:?} window |t| <= {lim}", t.abs(), self)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    /// Floor on nodes per axis. The support cutoff has steep flanks; 256 nodes
    /// resolve it to about 1e-7 relative even when the phase barely oscillates.
    pub min_nodes: usize,
    /// Nodes per `2π` of phase variation per axis.
    pub nodes_per_period: f64,
    /// Largest admissible total node count.
    pub budget: u64,
    /// Coarse field spacing as a fraction of the outer support radius.
    pub coarse_fraction: f64,
    /// Include `h a_1`.
    pub include_corrector: bool,
    /// Interpolate characteristic data (otherwise solve at every node; slow).
    pub interpolate: bool,
    /// Multiplies the node count; used by refinement checks.
    pub node_scale: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            min_nodes: 256,
            nodes_per_period: 10.0,
            budget: 100_000_000,
            coarse_fraction: 1.0 / 48.0,
            include_corrector: true,
            interpolate: true,
            node_scale: 1.0,
        }
    }
}

/// How the integrand was tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Route {
    /// Flat chart: `S = x·ξ + tψ(|ξ|² + h²m̃²)`, `a_0 = phi`, `a_1 = 0`, valid for all t.
    FlatExact,
    Characteristics,
}

/// The integrand of `L_h(t, x, ·)` on a tensor grid.
#[derive(Debug, Clone)]
pub struct KernelSlice<const D: usize> {
    pub t: f64,
    pub x: Vector<D>,
    pub h: f64,
    pub route: Route,
    /// Quadrature nodes, shared by all axes.
    pub nodes: Vec<f64>,
    /// `w ⊗ ... ⊗ w · amplitude · e^{i(S - x·ξ)/h}`, row-major.
    pub values: Vec<Complex64>,
    /// `max |∇ξ S - x|` over the support.
    pub max_source_offset: f64,
    /// Largest `|y - x|` the node count was sized for.
    pub reach: f64,
}

/// Support radii `[ρ_min, ρ_max]` of `ξ ↦ a(t, x, ξ)`.
pub fn support_radii<const D: usize>(field: &PhaseField<D>) -> Result<(f64, f64)> {
    let c = field
        .symbol
        .chart
        .global_ellipticity()
        .ok_or_else(|| LabError::InvalidParameter("kernel quadrature needs a globally elliptic chart".into()))?;
    let phi = field.symbol.lib.phi;
    Ok(((phi.a / c).sqrt(), (phi.b * c).sqrt()))
}

/// Per-axis 6-point Lagrange stencil on a uniform grid.
fn lagrange6(origin: f64, spacing: f64, n: usize, u: f64) -> (usize, [f64; 6]) {
    let pos = (u - origin) / spacing;
    let base = (pos.floor() as isize - 2).clamp(0, n as isize - 6) as usize;
    let mut w = [1.0; 6];
    for (k, wk) in w.iter_mut().enumerate() {
        for m in 0..6 {
            if m != k {
                *wk *= (pos - (base + m) as f64) / (k as f64 - m as f64);
            }
        }
    }
    (base, w)
}

struct Coarse<const D: usize> {
    origin: f64,
    spacing: f64,
    n: usize,
    stride: usize,
    data: Vec<f64>,
}

impl<const D: usize> Coarse<D> {
    fn index(&self, idx: &[usize; D]) -> usize {
        idx.iter().fold(0, |acc, i| acc * self.n + i)
    }

    fn interpolate(&self, stencils: &[(usize, [f64; 6]); D], out: &mut [f64]) -> bool {
        out.iter_mut().for_each(|v| *v = 0.0);
        let total = 6usize.pow(D as u32);
        for combo in 0..total {
            let mut idx = [0usize; D];
            let mut w = 1.0;
            let mut c = combo;
            for a in (0..D).rev() {
                let k = c % 6;
                c /= 6;
                idx[a] = stencils[a].0 + k;
                w *= stencils[a].1[k];
            }
            let base = self.index(&idx) * self.stride;
            let row = &self.data[base..base + self.stride];
            if row[0].is_nan() {
                return false;
            }
            for (o, v) in out.iter_mut().zip(row) {
                *o += w * v;
            }
        }
        true
    }
}

fn multi_index<const D: usize>(mut k: usize, n: usize) -> [usize; D] {
    let mut idx = [0usize; D];
    for a in (0..D).rev() {
        idx[a] = k % n;
        k /= n;
    }
    idx
}

/// Tabulates the integrand of `L_h(t, x, ·)` for all `|y - x| <= reach`.
/// `initial = None` means the default `a(x, ξ) = phi(ξᵀG(x)ξ)`.
pub fn prepare_slice<const D: usize>(
    field: &PhaseField<D>,
    initial: Option<&AmplitudeFn<D>>,
    t: f64,
    x: &Vector<D>,
    reach: f64,
    opts: &KernelOptions,
) -> Result<KernelSlice<D>> {
    let h = field.h();
    let (rho_min, rho_max) = support_radii(field)?;
    let default_initial = phi_of_symbol(field);
    let init = initial.unwrap_or(&default_initial);
    let flat_exact = field.symbol.chart.is_flat() && field.lower.is_zero() && initial.is_none();
    if !flat_exact {
        field.check_time(t)?;
    }
    let sym = &field.symbol;

    // Characteristic data on the coarse grid.
    let coarse = if flat_exact || !opts.interpolate {
        None
    } else {
        let spacing = opts.coarse_fraction * rho_max;
        let half = rho_max + 4.0 * spacing;
        let n = (2.0 * half / spacing).ceil() as usize + 1;
        let origin = -half;
        let stride = 1 + D + 4;
        let (lo, hi) = ((rho_min - 5.0 * spacing).max(0.0), rho_max + 5.0 * spacing);
        let total = n.pow(D as u32);
        let needed: Vec<usize> = (0..total)
            .filter(|k| {
                let idx = multi_index::<D>(*k, n);
                let r = idx.iter().map(|i| (origin + *i as f64 * spacing).powi(2)).sum::<f64>().sqrt();
                r >= lo && r <= hi
            })
            .collect();
        let rows: Vec<Result<Vec<f64>>> = needed
            .par_iter()
            .map(|k| {
                let idx = multi_index::<D>(*k, n);
                let xi = Vector::<D>::from_fn(|a, _| origin + idx[a] as f64 * spacing);
                let s = amplitudes(field, init, t, x, &xi, opts.include_corrector)?;
                let mut row = Vec::with_capacity(stride);
                row.push(s.phase_offset - t * sym.q(x, &xi));
                row.extend((s.source - x).iter());
                row.extend([s.transport.re, s.transport.im, s.a1.re, s.a1.im]);
                Ok(row)
            })
            .collect();
        let mut data = vec![f64::NAN; total * stride];
        for (k, row) in needed.iter().zip(rows) {
            data[k * stride..(k + 1) * stride].copy_from_slice(&row?);
        }
        Some(Coarse::<D> { origin, spacing, n, stride, data })
    };

    // |∇_ξ S - x| <= |t| sup|∇_ξ q| <= |t| √C
    let max_source_offset = t.abs() * sym.chart.global_ellipticity().unwrap_or(1.0).sqrt();

    let diam = 2.0 * rho_max;
    let want = opts.nodes_per_period * diam * (max_source_offset + reach) / (2.0 * PI * h);
    let n = ((want.ceil() as usize).max(opts.min_nodes) as f64 * opts.node_scale).ceil() as usize;
    let required = (n as u64).saturating_pow(D as u32);
    if required > opts.budget {
        return Err(LabError::ResolutionBudget { required, budget: opts.budget });
    }
    let gl = GaussLegendre::new(n);
    let (nodes, weights) = gl.on_interval(-rho_max, rho_max);
    let stencils: Vec<(usize, [f64; 6])> = match &coarse {
        Some(c) => nodes.iter().map(|u| lagrange6(c.origin, c.spacing, c.n, *u)).collect(),
        None => Vec::new(),
    };
    let inner = n.pow(D as u32 - 1);
    let (r2_lo, r2_hi) = (rho_min * rho_min, rho_max * rho_max);
    let mut values = vec![Complex64::new(0.0, 0.0); n * inner];
    let fill = |first: usize, chunk: &mut [Complex64]| -> Result<()> {
        let mut buf = vec![0.0; 1 + D + 4];
        for (k, slot) in chunk.iter_mut().enumerate() {
            let idx = multi_index::<D>(first * inner + k, n);
            let xi = Vector::<D>::from_fn(|a, _| nodes[idx[a]]);
            let r2 = xi.norm_squared();
            if r2 <= r2_lo || r2 >= r2_hi {
                continue;
            }
            let w: f64 = idx.iter().map(|i| weights[*i]).product();
            let (phase, amp) = if flat_exact {
                (t * sym.q(x, &xi), Complex64::new(init(x, &xi), 0.0))
            } else if let Some(c) = &coarse {
                let mut st = [(0usize, [0.0; 6]); D];
                for a in 0..D {
                    st[a] = stencils[idx[a]];
                }
                if !c.interpolate(&st, &mut buf) {
                    return Err(LabError::Domain("coarse field stencil left the computed shell".into()));
                }
                let src = x + Vector::<D>::from_fn(|a, _| buf[1 + a]);
                let transport = Complex64::new(buf[1 + D], buf[2 + D]);
                let mut amp = transport.exp() * init(&src, &xi);
                if opts.include_corrector {
                    amp += Complex64::new(buf[3 + D], buf[4 + D]) * h;
                }
                (t * sym.q(x, &xi) + buf[0], amp)
            } else {
                let s = amplitudes(field, init, t, x, &xi, opts.include_corrector)?;
                let amp = if opts.include_corrector { s.a0 + s.a1 * h } else { s.a0 };
                (s.phase_offset, amp)
            };
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            *slot = amp * Complex64::from_polar(w, phase / h);
        }
        Ok(())
    };
    values
        .par_chunks_mut(inner)
        .enumerate()
        .map(|(i, chunk)| fill(i, chunk))
        .collect::<Result<Vec<()>>>()?;
    Ok(KernelSlice {
        t,
        x: *x,
        h,
        route: if flat_exact { Route::FlatExact } else { Route::Characteristics },
        nodes,
        values,
        max_source_offset,
        reach,
    })
}

impl<const D: usize> KernelSlice<D> {
    pub fn nodes_per_axis(&self) -> usize {
        self.nodes.len()
    }

    fn prefactor(&self) -> f64 {
        (2.0 * PI * self.h).powi(-(D as i32))
    }

    fn check_reach(&self, y: &Vector<D>) -> Result<()> {
        let d = (y - self.x).norm();
        if d > self.reach * (1.0 + 1e-12) + 1e-15 {
            return Err(LabError::Precondition(format!(
                "|y - x| = {d} exceeds the reach {} the slice was resolved for",
                self.reach
            )));
        }
        Ok(())
    }

    /// `L_h(t, x, y)`.
    pub fn eval(&self, y: &Vector<D>) -> Result<Complex64> {
        self.check_reach(y)?;
        let n = self.nodes.len();
        let mut cur = self.values.clone();
        for a in (0..D).rev() {
            let shift = self.x[a] - y[a];
            let e: Vec<Complex64> = self.nodes.iter().map(|u| Complex64::from_polar(1.0, shift * u / self.h)).collect();
            cur = cur
                .chunks(n)
                .map(|row| {
                    let terms: Vec<Complex64> = row.iter().zip(&e).map(|(v, w)| v * w).collect();
                    pairwise_sum_complex(&terms)
                })
                .collect();
        }
        Ok(cur[0] * self.prefactor())
    }

    /// `L_h(t, x, x + r e_axis)` for every `r` in `offsets`.
    pub fn axis_profile(&self, axis: usize, offsets: &[f64]) -> Result<Vec<Complex64>> {
        if axis >= D {
            return Err(LabError::InvalidParameter(format!("axis {axis} out of range")));
        }
        if let Some(r) = offsets.iter().find(|r| r.abs() > self.reach * (1.0 + 1e-12)) {
            return Err(LabError::Precondition(format!("offset {r} exceeds the reach {}", self.reach)));
        }
        let n = self.nodes.len();
        let mut marginal = vec![Complex64::new(0.0, 0.0); n];
        for (k, v) in self.values.iter().enumerate() {
            let idx = multi_index::<D>(k, n);
            marginal[idx[axis]] += v;
        }
        let pre = self.prefactor();
        Ok(offsets
            .par_iter()
            .map(|r| {
                let terms: Vec<Complex64> = marginal
                    .iter()
                    .zip(&self.nodes)
                    .map(|(m, u)| m * Complex64::from_polar(1.0, -r * u / self.h))
                    .collect();
                pairwise_sum_complex(&terms) * pre
            })
            .collect())
    }
}

/// A single kernel value.
#[derive(Clone)]
pub struct KernelRequest<const D: usize> {
    pub field: PhaseField<D>,
    pub t: f64,
    pub x: Vector<D>,
    pub y: Vector<D>,
    pub window: Window,
}

/// `L_h(t, x, y)` by direct quadrature.
pub fn kernel_eval<const D: usize>(
    req: &KernelRequest<D>,
    initial: Option<&AmplitudeFn<D>>,
    opts: &KernelOptions,
) -> Result<Complex64> {
    let flat = req.field.symbol.chart.is_flat() && initial.is_none() && req.field.lower.is_zero();
    if !flat {
        req.window.check(req.field.h(), req.field.t_max, req.t)?;
    }
    let reach = (req.y - req.x).norm();
    prepare_slice(&req.field, initial, req.t, &req.x, reach, opts)?.eval(&req.y)
}
