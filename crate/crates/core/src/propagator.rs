//! Exact time evolution under the second-harmonic interaction, and the
//! single-mode Kerr propagator used as an analytic oracle.
//!
//! Each conserved-`N` block evolves under `U_N = exp(i·gt·T_N)` with `T_N`
//! the real symmetric tridiagonal coupling matrix of
//! [`hilbert::block_hamiltonian`]. The blocks are eigendecomposed once and
//! the phases `e^{iλ·gt}` are re-evaluated per requested time, so evolution
//! to any `gt` is exact to machine precision; there is no integrator error
//! budget on the quantum path.

use rayon::prelude::*;

use crate::hilbert::{block_hamiltonian, Block, Mode, TwoModeState};
use crate::linalg::{eig_sym_tridiag, Eigen};
use crate::{C64, Error, Result};

/// Mean-photon time series of an exact evolution, with optional state
/// snapshots.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    /// Dimensionless `gt` values, strictly increasing from 0.
    pub times: Vec<f64>,
    /// Snapshots at every time, kept only when requested.
    pub states: Option<Vec<TwoModeState>>,
    /// `⟨n₁⟩(gt)` of the pump mode.
    pub n1_series: Vec<f64>,
    /// `⟨n₂⟩(gt)` of the harmonic mode.
    pub n2_series: Vec<f64>,
}

// Eigendecomposition of one block plus the initial amplitudes rotated into
// the eigenbasis.
struct BlockEigen {
    n_total: usize,
    eigen: Eigen,
    // V^T psi(0)
    rotated: Vec<C64>,
}

impl BlockEigen {
    fn new(block: &Block) -> Self {
        let dim = block.amps.len();
        let ham = block_hamiltonian(block.n_total);
        let eigen = eig_sym_tridiag(&vec![0.0; dim], &ham.offdiag);
        let mut rotated = vec![C64::new(0.0, 0.0); dim];
        for (k, r) in rotated.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (i, amp) in block.amps.iter().enumerate() {
                acc += eigen.vector_entry(i, k) * amp;
            }
            *r = acc;
        }
        BlockEigen { n_total: block.n_total, eigen, rotated }
    }

    // psi(gt) = V · (e^{i λ gt} ∘ V^T psi(0))
    fn amps_at(&self, gt: f64) -> Vec<C64> {
        let dim = self.rotated.len();
        let phased: Vec<C64> = self
            .rotated
            .iter()
            .zip(&self.eigen.values)
            .map(|(w, &lambda)| w * C64::from_polar(1.0, lambda * gt))
            .collect();
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        for (i, amp) in amps.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (k, p) in phased.iter().enumerate() {
                acc += self.eigen.vector_entry(i, k) * p;
            }
            *amp = acc;
        }
        amps
    }

    // (sum (N-2k)|psi_k|^2, sum k |psi_k|^2) at time gt
    fn photon_sums_at(&self, gt: f64) -> (f64, f64) {
        let amps = self.amps_at(gt);
        let mut n1 = 0.0;
        let mut n2 = 0.0;
        for (k, a) in amps.iter().enumerate() {
            let p = a.norm_sqr();
            n1 += (self.n_total - 2 * k) as f64 * p;
            n2 += k as f64 * p;
        }
        (n1, n2)
    }
}

/// Reusable exact propagator for a fixed initial state.
///
/// Construction eigendecomposes every block (in parallel); queries at
/// different times share that work and are safe to issue concurrently.
pub struct BlockPropagator {
    blocks: Vec<BlockEigen>,
    cutoff_epsilon: f64,
    alpha0: C64,
}

impl BlockPropagator {
    pub fn new(state: &TwoModeState) -> Self {
        let blocks: Vec<BlockEigen> = state.blocks().par_iter().map(BlockEigen::new).collect();
        BlockPropagator {
            blocks,
            cutoff_epsilon: state.cutoff_epsilon(),
            alpha0: state.alpha0(),
        }
    }

    /// The evolved state at dimensionless time `gt`.
    pub fn state_at(&self, gt: f64) -> TwoModeState {
        let blocks: Vec<Block> = self
            .blocks
            .iter()
            .map(|b| Block { n_total: b.n_total, amps: b.amps_at(gt) })
            .collect();
        TwoModeState::from_blocks(blocks, self.cutoff_epsilon, self.alpha0)
            .expect("unitary evolution preserves block structure and norm")
    }

    /// `(⟨n₁⟩, ⟨n₂⟩)` at time `gt` without materializing the state.
    pub fn mean_photons_at(&self, gt: f64) -> (f64, f64) {
        self.blocks
            .iter()
            .map(|b| b.photon_sums_at(gt))
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y))
    }
}

/// Evolve `state` by `exp(i·gt·(a₁†²a₂ + a₁²a₂†))`.
///
/// Negative `gt` evolves backward. `gt = 0` returns the state unchanged.
pub fn evolve(state: &TwoModeState, gt: f64) -> Result<TwoModeState> {
    if !gt.is_finite() {
        return Err(Error::NonFiniteTime(gt));
    }
    if gt == 0.0 {
        return Ok(state.clone());
    }
    Ok(BlockPropagator::new(state).state_at(gt))
}

/// Evolve over a strictly increasing time grid starting at 0, collecting the
/// mean photon series (and snapshots when `keep_states` is set).
///
/// The per-block eigendecomposition is done once; distinct grid points are
/// evaluated concurrently.
pub fn evolve_series(
    state: &TwoModeState,
    gt_grid: &[f64],
    keep_states: bool,
) -> Result<EvolutionResult> {
    validate_grid(gt_grid)?;
    let prop = BlockPropagator::new(state);

    let states = if keep_states {
        Some(gt_grid.par_iter().map(|&gt| prop.state_at(gt)).collect::<Vec<_>>())
    } else {
        None
    };
    let (n1_series, n2_series) = match &states {
        Some(snapshots) => snapshots
            .iter()
            .map(|s| (s.mean_photon(Mode::Pump), s.mean_photon(Mode::Harmonic)))
            .unzip(),
        None => gt_grid
            .par_iter()
            .map(|&gt| prop.mean_photons_at(gt))
            .collect::<Vec<_>>()
            .into_iter()
            .unzip(),
    };
    Ok(EvolutionResult { times: gt_grid.to_vec(), states, n1_series, n2_series })
}

/// Uniform grid `0, step, 2·step, …` up to and including `gt_max` (within
/// one part in 10⁹ of a step).
pub fn uniform_grid(gt_max: f64, step: f64) -> Vec<f64> {
    let count = (gt_max / step + 1e-9).floor() as usize;
    (0..=count).map(|i| i as f64 * step).collect()
}

fn validate_grid(gt_grid: &[f64]) -> Result<()> {
    if gt_grid.is_empty() || gt_grid[0] != 0.0 {
        return Err(Error::BadTimeGrid);
    }
    if gt_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::BadTimeGrid);
    }
    if gt_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadTimeGrid);
    }
    Ok(())
}

/// Single-mode state evolved under the Kerr propagator
/// `exp(i·Φ_NL·n̂²/(2⟨n̂⟩))`.
///
/// Kerr evolution is diagonal in the Fock basis, so `|coeffs[n]|` never
/// depends on `phi_nl`: the photon distribution stays Poissonian.
#[derive(Debug, Clone)]
pub struct KerrState {
    /// Fock amplitudes from `n = 0` up to the retained cutoff.
    pub coeffs: Vec<C64>,
    /// The `⟨n̂⟩` normalizing the propagator phase; fixed to `|α|²` of the
    /// input.
    pub mean_n: f64,
    /// Accumulated dimensionless nonlinear phase.
    pub phi_nl: f64,
}

/// Apply the Kerr propagator to an input coherent state `|alpha⟩`.
pub fn kerr_evolve(alpha: C64, phi_nl: f64, cutoff_epsilon: f64) -> Result<KerrState> {
    if !phi_nl.is_finite() {
        return Err(Error::NonFiniteTime(phi_nl));
    }
    let mean_n = alpha.norm_sqr();
    if !(cutoff_epsilon > 0.0 && cutoff_epsilon <= 1e-6) {
        return Err(Error::InvalidCutoff(cutoff_epsilon));
    }
    if !mean_n.is_finite() || mean_n > crate::hilbert::QUANTUM_PHOTON_GUARD {
        return Err(Error::AmplitudeTooLarge(mean_n));
    }
    let base = coherent_coefficients(alpha, cutoff_epsilon);
    let coeffs = if mean_n == 0.0 {
        base
    } else {
        base.iter()
            .enumerate()
            .map(|(n, c)| {
                let phase = phi_nl * (n * n) as f64 / (2.0 * mean_n);
                c * C64::from_polar(1.0, phase)
            })
            .collect()
    };
    Ok(KerrState { coeffs, mean_n, phi_nl })
}

/// Fock coefficients of `|alpha⟩` from `n = 0` to the Poisson-tail cutoff.
pub fn coherent_coefficients(alpha: C64, cutoff_epsilon: f64) -> Vec<C64> {
    let mean = alpha.norm_sqr();
    if mean == 0.0 {
        return vec![C64::new(1.0, 0.0)];
    }
    // extend until the cumulative tail drops below the cutoff
    let mut coeffs = Vec::new();
    let mut mass = 0.0;
    let mut ln_mag = -mean / 2.0; // ln |c_0|
    let mut phase = C64::new(1.0, 0.0);
    let unit = alpha / alpha.norm();
    let mut n = 0usize;
    loop {
        let c = phase * ln_mag.exp();
        mass += c.norm_sqr();
        coeffs.push(c);
        if mass >= 1.0 - cutoff_epsilon || n > 100_000 {
            break;
        }
        n += 1;
        ln_mag += mean.ln() / 2.0 - (n as f64).ln() / 2.0;
        phase *= unit;
    }
    coeffs
}

impl KerrState {
    /// Photon number distribution `|coeffs[n]|²`.
    pub fn photon_distribution(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `|⟨φ|ψ⟩|²` against an arbitrary Fock-basis vector.
    pub fn overlap_with(&self, other: &[C64]) -> f64 {
        let inner: C64 = self
            .coeffs
            .iter()
            .zip(other)
            .map(|(a, b)| b.conj() * a)
            .sum();
        inner.norm_sqr()
    }
}

/// Fock coefficients of `|alpha⟩` truncated (or zero-padded) to exactly
/// `len` entries; the workhorse for overlap evaluations against a
/// fixed-dimension density matrix.
pub fn coherent_coefficients_fixed(alpha: C64, len: usize) -> Vec<C64> {
    let mean = alpha.norm_sqr();
    let mut coeffs = Vec::with_capacity(len);
    let mut ln_mag = -mean / 2.0;
    let mut phase = C64::new(1.0, 0.0);
    let unit = if mean > 0.0 { alpha / alpha.norm() } else { C64::new(1.0, 0.0) };
    for n in 0..len {
        if n > 0 {
            if mean > 0.0 {
                ln_mag += mean.ln() / 2.0 - (n as f64).ln() / 2.0;
            } else {
                ln_mag = f64::NEG_INFINITY;
            }
            phase *= unit;
        }
        coeffs.push(phase * ln_mag.exp());
    }
    coeffs
}

/// Fock coefficients of the normalized cat `N(|β⟩ + e^{iφ}|−β⟩)` with
/// `N = 1/√(2 + 2cos(φ)·e^{−2|β|²})`, truncated at `len` entries.
pub fn cat_coefficients(beta: C64, phi: f64, len: usize) -> Vec<C64> {
    displaced_cat_coefficients(C64::new(0.0, 0.0), beta, phi, len)
}

/// Fock coefficients of the displaced cat
/// `N(|center+β⟩ + e^{iφ}|center−β⟩)` with the exact normalization
/// `N = 1/√(2 + 2·e^{−2|β|²}·cos(φ + 2·Im(β* center)))`.
pub fn displaced_cat_coefficients(center: C64, beta: C64, phi: f64, len: usize) -> Vec<C64> {
    let shift = 2.0 * (beta.conj() * center).im;
    let norm = (2.0 + 2.0 * (-2.0 * beta.norm_sqr()).exp() * (phi + shift).cos()).sqrt();
    let rel = C64::from_polar(1.0, phi);
    let plus = coherent_coefficients_fixed(center + beta, len);
    let minus = coherent_coefficients_fixed(center - beta, len);
    plus.iter()
        .zip(&minus)
        .map(|(p, m)| (p + rel * m) / norm)
        .collect()
}

/// Squared overlap of a Kerr-evolved coherent state at `Φ_NL = π⟨n̂⟩` with
/// the cat `(e^{iπ/4}/√2)(|α⟩ + e^{−iπ/2}|−α⟩)`.
pub fn kerr_cat_overlap(state: &KerrState, alpha: C64) -> f64 {
    let cat = cat_coefficients(alpha, -std::f64::consts::FRAC_PI_2, state.coeffs.len());
    // the global e^{iπ/4} drops out of |<cat|psi>|^2
    state.overlap_with(&cat)
}
