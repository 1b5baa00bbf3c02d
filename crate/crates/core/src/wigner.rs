//! Wigner quasiprobability on phase-space grids, with marginals and
//! negativity diagnostics.
//!
//! Convention: the axes carry the same units as the classical amplitudes
//! (vacuum variance 1/4), so the vacuum is `W(X,Y) = (2/π)·exp(−2(X²+Y²))`
//! and a coherent state `|γ⟩` peaks at `(Re γ, Im γ)` with value `2/π`.
//!
//! Evaluation sums `ρ_{mn}` against Fock-basis kernels organized by diagonal
//! offset `d = n − m`. For each offset the generalized-Laguerre factor is
//! computed by an upward recurrence in the scaled form
//! `g_m^d(u) = √(m!/(m+d)!)·u^{d/2}·e^{−u/2}·L_m^d(u)` with `u = 4|γ|²`;
//! these are displacement-operator matrix elements, bounded by 1, so the
//! recurrence cannot overflow. Prefactors start in log space and a running
//! scale exponent covers the deep-tail region where `e^{−u/2}` alone would
//! underflow; nothing overflows up to dimension 400. Hermitian pairs
//! `(m,n) + (n,m)` are combined analytically, so the result is exactly real.

use rayon::prelude::*;

use crate::observables::DensityMatrix;
use crate::{C64, Error, Result};

/// Real-valued Wigner samples on a rectangular grid.
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    /// Row-major `values[i * y_axis.len() + j] = W(x_axis[i], y_axis[j])`.
    pub values: Vec<f64>,
    pub cell_area: f64,
}

impl WignerGrid {
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.y_axis.len() + j]
    }

    /// `Σ W · cell_area`; 1 within grid truncation for an adequate grid.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Quadrature probability densities obtained by integrating the grid.
#[derive(Debug, Clone)]
pub struct Marginals {
    pub p_x: Vec<f64>,
    pub p_y: Vec<f64>,
}

/// Reusable Wigner evaluator for one density matrix.
pub struct WignerEvaluator {
    // diags[d][a] = (-1)^a * rho_{a, a+d}, doubled for d >= 1; offsets whose
    // whole diagonal is negligible are dropped.
    diags: Vec<(usize, Vec<C64>)>,
}

impl WignerEvaluator {
    pub fn new(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let mut diags = Vec::with_capacity(dim);
        for d in 0..dim {
            let mut weights = Vec::with_capacity(dim - d);
            let mut max_mag = 0.0_f64;
            for a in 0..dim - d {
                let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
                let factor = if d == 0 { 1.0 } else { 2.0 };
                let w = rho.entry(a, a + d) * sign * factor;
                max_mag = max_mag.max(w.norm());
                weights.push(w);
            }
            // a dropped diagonal changes W by at most dim * max_mag * (2/pi)
            if max_mag * dim as f64 > 1e-16 {
                diags.push((d, weights));
            }
        }
        WignerEvaluator { diags }
    }

    /// `W(x, y)` at a single phase-space point.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let r_sq = x * x + y * y;
        let u = 4.0 * r_sq;
        let phase = if r_sq > 0.0 {
            C64::new(x, y) / r_sq.sqrt()
        } else {
            C64::new(1.0, 0.0)
        };

        let mut total = 0.0;
        let mut ph_d = C64::new(1.0, 0.0);
        let mut ln_fact_d = 0.0;
        let mut prev_d = 0usize;
        for (d, weights) in &self.diags {
            let d = *d;
            for step in prev_d..d {
                ln_fact_d += ((step + 1) as f64).ln();
                ph_d *= phase;
            }
            prev_d = d;
            if u == 0.0 && d > 0 {
                break; // u^{d/2} kills every higher offset at the origin
            }
            let sum = diagonal_sum(d, weights, u, ln_fact_d);
            total += (ph_d * sum).re;
        }
        total * std::f64::consts::FRAC_2_PI
    }
}

// sum_a g_a^d(u) * weights[a] with the scaled upward recurrence
// g_{m+1} = [(2m + d + 1 - u) g_m - s_m g_{m-1}] / s_{m+1},
// s_m = sqrt(m (m + d)).
fn diagonal_sum(d: usize, weights: &[C64], u: f64, ln_fact_d: f64) -> C64 {
    let ln_g0 = if d == 0 {
        -u / 2.0
    } else {
        0.5 * (d as f64 * u.ln() - ln_fact_d) - u / 2.0
    };

    // true g = g_scaled * e^{scale}
    let (mut scale, g0) = if ln_g0 > -690.0 {
        (0.0, ln_g0.exp())
    } else {
        (ln_g0, 1.0)
    };
    let mut scale_factor = if scale == 0.0 { 1.0 } else { scale.exp() };

    let emit = |g: f64, scale: f64, scale_factor: f64| -> f64 {
        if scale_factor > 0.0 {
            g * scale_factor
        } else if g != 0.0 {
            g.signum() * (scale + g.abs().ln()).exp()
        } else {
            0.0
        }
    };

    let df = d as f64;
    let mut acc = weights[0] * emit(g0, scale, scale_factor);
    if weights.len() == 1 {
        return acc;
    }
    let mut g_prev = g0;
    let mut g_curr = g0 * (df + 1.0 - u) / (df + 1.0).sqrt();
    acc += weights[1] * emit(g_curr, scale, scale_factor);

    let mut s_curr = (df + 1.0).sqrt(); // s_1
    for (m, w) in weights.iter().enumerate().skip(2) {
        let mf = (m - 1) as f64; // recurrence index of g_curr
        let s_next = ((mf + 1.0) * (mf + 1.0 + df)).sqrt();
        let g_next = ((2.0 * mf + df + 1.0 - u) * g_curr - s_curr * g_prev) / s_next;
        g_prev = g_curr;
        g_curr = g_next;
        s_curr = s_next;
        if g_curr.abs() > 1e250 {
            g_prev *= 1e-250;
            g_curr *= 1e-250;
            scale += 250.0 * std::f64::consts::LN_10;
            scale_factor = if scale > -690.0 { scale.exp() } else { 0.0 };
        }
        acc += *w * emit(g_curr, scale, scale_factor);
    }
    acc
}

/// Evaluate the Wigner function on the cartesian product of the two axes.
/// Axes must be strictly increasing with uniform spacing.
pub fn wigner_grid(rho: &DensityMatrix, x_axis: &[f64], y_axis: &[f64]) -> Result<WignerGrid> {
    let dx = validate_axis(x_axis)?;
    let dy = validate_axis(y_axis)?;
    let evaluator = WignerEvaluator::new(rho);
    let ny = y_axis.len();
    let values: Vec<f64> = x_axis
        .par_iter()
        .flat_map_iter(|&x| y_axis.iter().map(move |&y| (x, y)))
        .map(|(x, y)| evaluator.eval(x, y))
        .collect();
    debug_assert_eq!(values.len(), x_axis.len() * ny);
    Ok(WignerGrid {
        x_axis: x_axis.to_vec(),
        y_axis: y_axis.to_vec(),
        values,
        cell_area: dx * dy,
    })
}

/// Default square grid: 401 points per axis spanning `±(√n̄ + 4)`, enough to
/// resolve interference fringes with spacing `~1/(2√n̄)`.
pub fn default_axes(mean_photon: f64) -> (Vec<f64>, Vec<f64>) {
    let half_span = mean_photon.max(0.0).sqrt() + 4.0;
    let axis = linear_axis(-half_span, half_span, 401);
    (axis.clone(), axis)
}

/// Uniformly spaced axis from `start` to `end` inclusive.
pub fn linear_axis(start: f64, end: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2);
    let step = (end - start) / (points - 1) as f64;
    (0..points).map(|i| start + i as f64 * step).collect()
}

fn validate_axis(axis: &[f64]) -> Result<f64> {
    if axis.len() < 2 {
        return Err(Error::NonUniformAxis);
    }
    let step = axis[1] - axis[0];
    if !(step > 0.0) {
        return Err(Error::NonUniformAxis);
    }
    for w in axis.windows(2) {
        let local = w[1] - w[0];
        if (local - step).abs() > 1e-9 * step.abs() {
            return Err(Error::NonUniformAxis);
        }
    }
    Ok(step)
}

/// Integrate the grid along each axis (trapezoidal end-correction):
/// `p_x(x) = ∫ W dy`, `p_y(y) = ∫ W dx`.
pub fn marginals(grid: &WignerGrid) -> Marginals {
    let nx = grid.x_axis.len();
    let ny = grid.y_axis.len();
    let dx = grid.x_axis[1] - grid.x_axis[0];
    let dy = grid.y_axis[1] - grid.y_axis[0];
    let weight = |idx: usize, len: usize| if idx == 0 || idx + 1 == len { 0.5 } else { 1.0 };

    let mut p_x = vec![0.0; nx];
    let mut p_y = vec![0.0; ny];
    for i in 0..nx {
        for j in 0..ny {
            let w = grid.value(i, j);
            p_x[i] += w * weight(j, ny) * dy;
            p_y[j] += w * weight(i, nx) * dx;
        }
    }
    Marginals { p_x, p_y }
}

/// `(min value, Σ|W|·cell_area over negative cells)`.
pub fn negativity(grid: &WignerGrid) -> (f64, f64) {
    let mut min_value = f64::INFINITY;
    let mut volume = 0.0;
    for &w in &grid.values {
        min_value = min_value.min(w);
        if w < 0.0 {
            volume += -w * grid.cell_area;
        }
    }
    (min_value, volume)
}

/// Number of 4-connected grid regions with `W > level`.
pub fn count_regions_above(grid: &WignerGrid, level: f64) -> usize {
    let nx = grid.x_axis.len();
    let ny = grid.y_axis.len();
    let mut seen = vec![false; nx * ny];
    let mut regions = 0;
    let mut stack = Vec::new();
    for start in 0..nx * ny {
        if seen[start] || grid.values[start] <= level {
            continue;
        }
        regions += 1;
        stack.push(start);
        seen[start] = true;
        while let Some(idx) = stack.pop() {
            let (i, j) = (idx / ny, idx % ny);
            let mut push = |ii: usize, jj: usize| {
                let nidx = ii * ny + jj;
                if !seen[nidx] && grid.values[nidx] > level {
                    seen[nidx] = true;
                    stack.push(nidx);
                }
            };
            if i > 0 {
                push(i - 1, j);
            }
            if i + 1 < nx {
                push(i + 1, j);
            }
            if j > 0 {
                push(i, j - 1);
            }
            if j + 1 < ny {
                push(i, j + 1);
            }
        }
    }
    regions
}

/// Phase-space overlap estimate of `Tr(ρ²)`: `π · Σ W² · cell_area`.
pub fn purity_from_grid(grid: &WignerGrid) -> f64 {
    grid.values.iter().map(|w| w * w).sum::<f64>() * grid.cell_area * std::f64::consts::PI
}
