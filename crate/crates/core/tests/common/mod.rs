//! Shared oracles for the integration suites. Everything here follows a
//! different computational route than the production code it checks.
// each integration target compiles this module separately and uses only a
// subset of it
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shg_core::hilbert::{Block, TwoModeState};
use shg_core::observables::DensityMatrix;
use shg_core::wigner::WignerGrid;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex matrix product (row-major).
pub fn matmul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![c(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Brute-force matrix exponential by scaling-and-squaring plus a Taylor
/// series; the reference for the eigensolver-based propagator.
pub fn expm(a: &[C64], n: usize) -> Vec<C64> {
    let norm: f64 = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 1.0 { norm.log2().ceil() as usize + 1 } else { 0 };
    let scale = 0.5_f64.powi(squarings as i32);
    let scaled: Vec<C64> = a.iter().map(|z| z * scale).collect();
    let mut result = vec![c(0.0, 0.0); n * n];
    for i in 0..n {
        result[i * n + i] = c(1.0, 0.0);
    }
    let mut term = result.clone();
    for k in 1..=30 {
        term = matmul(&term, &scaled, n);
        for t in term.iter_mut() {
            *t /= k as f64;
        }
        for (r, t) in result.iter_mut().zip(&term) {
            *r += t;
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result, n);
    }
    result
}

/// Wigner value by the displaced-parity series
/// `(2/π) Σ_k (−1)^k ⟨k|D†(γ) ρ D(γ)|k⟩` with `D` built by brute-force
/// matrix exponentiation. Only trustworthy when `dim` comfortably exceeds
/// the displaced support, hence the dim ≤ 10 + padding usage.
pub fn displaced_parity_w(rho: &DensityMatrix, gamma: C64, pad: usize) -> f64 {
    let dim = rho.dim() + pad;
    let mut rho_padded = vec![c(0.0, 0.0); dim * dim];
    for m in 0..rho.dim() {
        for n in 0..rho.dim() {
            rho_padded[m * dim + n] = rho.entry(m, n);
        }
    }
    let mut gen = vec![c(0.0, 0.0); dim * dim];
    for m in 1..dim {
        let s = (m as f64).sqrt();
        gen[m * dim + (m - 1)] += gamma * s;
        gen[(m - 1) * dim + m] -= gamma.conj() * s;
    }
    let d = expm(&gen, dim);
    let rho_d = matmul(&rho_padded, &d, dim);
    let mut acc = c(0.0, 0.0);
    for k in 0..dim {
        let mut diag = c(0.0, 0.0);
        for m in 0..dim {
            diag += d[m * dim + k].conj() * rho_d[m * dim + k];
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += diag * sign;
    }
    (acc * std::f64::consts::FRAC_2_PI).re
}

/// Partial trace over the harmonic mode through the naive dense
/// `|n₁⟩ ⊗ |n₂⟩` tensor representation.
pub fn dense_partial_trace(state: &TwoModeState, dim1: usize, dim2: usize) -> Vec<C64> {
    let mut psi = vec![c(0.0, 0.0); dim1 * dim2];
    for block in state.blocks() {
        for (k, amp) in block.amps.iter().enumerate() {
            let n1 = block.n_total - 2 * k;
            let n2 = k;
            if n1 < dim1 && n2 < dim2 {
                psi[n1 * dim2 + n2] = *amp;
            }
        }
    }
    let mut rho = vec![c(0.0, 0.0); dim1 * dim1];
    for m in 0..dim1 {
        for n in 0..dim1 {
            for k in 0..dim2 {
                rho[m * dim1 + n] += psi[m * dim2 + k] * psi[n * dim2 + k].conj();
            }
        }
    }
    rho
}

/// Random normalized two-mode state on blocks `N = 0 … max_n`.
pub fn random_state(rng: &mut ChaCha8Rng, max_n: usize) -> TwoModeState {
    let blocks: Vec<Block> = (0..=max_n)
        .map(|n| {
            let dim = n / 2 + 1;
            let amps = (0..dim)
                .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            Block { n_total: n, amps }
        })
        .collect();
    let norm: f64 = blocks
        .iter()
        .flat_map(|b| b.amps.iter())
        .map(|a| a.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let blocks = blocks
        .into_iter()
        .map(|b| Block {
            n_total: b.n_total,
            amps: b.amps.into_iter().map(|a| a / norm).collect(),
        })
        .collect();
    TwoModeState::from_blocks(blocks, 1e-12, c(0.0, 0.0)).unwrap()
}

/// Random mixed density matrix `G G† / Tr` with Gaussian-ish entries.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let g: Vec<C64> = (0..dim * dim)
        .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let mut rho = vec![c(0.0, 0.0); dim * dim];
    for m in 0..dim {
        for n in 0..dim {
            let mut acc = c(0.0, 0.0);
            for k in 0..dim {
                acc += g[m * dim + k] * g[n * dim + k].conj();
            }
            rho[m * dim + n] = acc;
        }
    }
    let trace: f64 = (0..dim).map(|i| rho[i * dim + i].re).sum();
    for e in rho.iter_mut() {
        *e /= trace;
    }
    DensityMatrix::from_elements(dim, rho).unwrap()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Box average of a Wigner grid over ±`radius` cells; suppresses
/// interference fringes so that coarse "zones" can be counted.
pub fn box_average(grid: &WignerGrid, radius: usize) -> WignerGrid {
    let nx = grid.x_axis.len();
    let ny = grid.y_axis.len();
    let mut values = vec![0.0; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            let ilo = i.saturating_sub(radius);
            let ihi = (i + radius).min(nx - 1);
            let jlo = j.saturating_sub(radius);
            let jhi = (j + radius).min(ny - 1);
            let mut acc = 0.0;
            for ii in ilo..=ihi {
                for jj in jlo..=jhi {
                    acc += grid.value(ii, jj);
                }
            }
            values[i * ny + j] = acc / ((ihi - ilo + 1) * (jhi - jlo + 1)) as f64;
        }
    }
    WignerGrid {
        x_axis: grid.x_axis.clone(),
        y_axis: grid.y_axis.clone(),
        values,
        cell_area: grid.cell_area,
    }
}
