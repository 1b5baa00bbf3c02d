//! Truncated two-mode Fock space for the second-harmonic interaction.
//!
//! The coupling `a₁†² a₂ + a₁² a₂†` conserves `N = n₁ + 2 n₂`, so a two-mode
//! state splits into independent blocks labelled by `N`. Within block `N` the
//! basis is `|n₁ = N − 2k, n₂ = k⟩` for `k = 0 … ⌊N/2⌋`, and the coupling is a
//! real symmetric tridiagonal matrix with zero diagonal. This module builds
//! the initial coherent ⊗ vacuum state in that representation and provides
//! the per-block Hamiltonian data.

use crate::{C64, Error, Result};

/// Largest `|α|²` accepted on the exact-diagonalization path.
pub const QUANTUM_PHOTON_GUARD: f64 = 1e4;

/// Default discarded-tail bound for coherent-state truncation.
pub const DEFAULT_CUTOFF_EPSILON: f64 = 1e-12;

/// Which of the two field modes an expectation value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// The pump wave (`a₁`), carrying one quantum of `N` per photon.
    Pump,
    /// The second harmonic (`a₂`), carrying two quanta of `N` per photon.
    Harmonic,
}

/// Amplitudes of one conserved-`N` block.
///
/// Entry `k` of `amps` is the amplitude of `|n₁ = N − 2k, n₂ = k⟩`; the
/// vector always has the full block length `⌊N/2⌋ + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub n_total: usize,
    pub amps: Vec<C64>,
}

impl Block {
    pub fn dim(n_total: usize) -> usize {
        n_total / 2 + 1
    }

    fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Pure two-mode state stored as conserved-`N` amplitude blocks.
///
/// States are immutable after construction; every operation takes `&self`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    blocks: Vec<Block>,
    cutoff_epsilon: f64,
    alpha0: C64,
}

/// One conserved-`N` block of the interaction Hamiltonian, in units of the
/// coupling `g`.
///
/// The matrix is real symmetric tridiagonal with zero diagonal; `offdiag[k]`
/// couples `k ↔ k+1` and equals `√((N−2k)(N−2k−1)(k+1))`. `coupling_sign`
/// records the overall `−g` prefactor of the Hamiltonian, so
/// `H_N = coupling_sign · g · T_N` with `T_N` the stored tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHamiltonian {
    pub n_total: usize,
    pub offdiag: Vec<f64>,
    pub coupling_sign: f64,
}

/// Tridiagonal coupling matrix of the block with conserved quantity `N`.
pub fn block_hamiltonian(n_total: usize) -> BlockHamiltonian {
    let dim = Block::dim(n_total);
    let offdiag = (0..dim - 1)
        .map(|k| {
            let n1 = (n_total - 2 * k) as f64;
            (n1 * (n1 - 1.0) * (k as f64 + 1.0)).sqrt()
        })
        .collect();
    BlockHamiltonian { n_total, offdiag, coupling_sign: -1.0 }
}

/// Build the coherent-pump ⊗ vacuum-harmonic input state.
///
/// The pump amplitude is `alpha` in dimensionless √photon units; blocks are
/// retained contiguously around the Poisson peak until the discarded tail
/// mass drops below `cutoff_epsilon`. Coherent coefficients are evaluated
/// through running log-factorials, so `|alpha|²` up to the guard of 1e4
/// causes no overflow.
pub fn build_initial_state(alpha: C64, cutoff_epsilon: f64) -> Result<TwoModeState> {
    if !(cutoff_epsilon > 0.0 && cutoff_epsilon <= 1e-6) {
        return Err(Error::InvalidCutoff(cutoff_epsilon));
    }
    let mean = alpha.norm_sqr();
    if !mean.is_finite() || mean > QUANTUM_PHOTON_GUARD {
        return Err(Error::AmplitudeTooLarge(mean));
    }

    if mean == 0.0 {
        return Ok(TwoModeState {
            blocks: vec![Block { n_total: 0, amps: vec![C64::new(1.0, 0.0)] }],
            cutoff_epsilon,
            alpha0: alpha,
        });
    }

    let (lo, hi, weights) = poisson_window(mean, cutoff_epsilon);
    let phase = alpha / alpha.norm();
    // amplitude phase of |n⟩ is arg(alpha)·n
    let mut phase_n = C64::new(1.0, 0.0) * phase.powu(lo as u32);
    let mut blocks = Vec::with_capacity(hi - lo + 1);
    for (idx, &w) in weights.iter().enumerate() {
        let n = lo + idx;
        let mut amps = vec![C64::new(0.0, 0.0); Block::dim(n)];
        amps[0] = phase_n * w.sqrt();
        blocks.push(Block { n_total: n, amps });
        phase_n *= phase;
    }
    Ok(TwoModeState { blocks, cutoff_epsilon, alpha0: alpha })
}

// Contiguous Poisson window [lo, hi] around the peak with retained mass
// >= 1 - epsilon, plus the probabilities themselves.
fn poisson_window(mean: f64, epsilon: f64) -> (usize, usize, Vec<f64>) {
    // ln p_n = -mean + n ln(mean) - ln(n!)
    let ln_p = |n: usize, ln_fact: f64| -mean + n as f64 * mean.ln() - ln_fact;
    let peak = mean.floor() as usize;

    // Walk outward from the peak, extending whichever edge carries more mass.
    // Running log-factorials keep this exact at large n.
    let mut ln_fact_peak = 0.0;
    for k in 1..=peak {
        ln_fact_peak += (k as f64).ln();
    }
    let mut lo = peak;
    let mut hi = peak;
    let mut ln_fact_lo = ln_fact_peak;
    let mut ln_fact_hi = ln_fact_peak;
    let mut probs = std::collections::VecDeque::new();
    probs.push_back(ln_p(peak, ln_fact_peak).exp());
    let mut mass: f64 = probs[0];

    while mass < 1.0 - epsilon {
        let p_below = if lo > 0 {
            ln_p(lo - 1, ln_fact_lo - (lo as f64).ln()).exp()
        } else {
            -1.0
        };
        let p_above = ln_p(hi + 1, ln_fact_hi + ((hi + 1) as f64).ln()).exp();
        if p_below <= 0.0 && p_above <= 0.0 {
            // both tails underflowed; nothing left to add
            break;
        }
        if p_below >= p_above {
            ln_fact_lo -= (lo as f64).ln();
            lo -= 1;
            probs.push_front(p_below);
            mass += p_below;
        } else {
            ln_fact_hi += ((hi + 1) as f64).ln();
            hi += 1;
            probs.push_back(p_above);
            mass += p_above;
        }
    }
    (lo, hi, probs.into_iter().collect())
}

impl TwoModeState {
    /// Rebuild a state from raw blocks, validating the block invariants
    /// (strictly increasing `N`, exact block lengths, unit norm within
    /// `10 · cutoff_epsilon`).
    pub fn from_blocks(blocks: Vec<Block>, cutoff_epsilon: f64, alpha0: C64) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidBlocks("no blocks".into()));
        }
        for pair in blocks.windows(2) {
            if pair[1].n_total <= pair[0].n_total {
                return Err(Error::InvalidBlocks(format!(
                    "block indices not strictly increasing: {} then {}",
                    pair[0].n_total, pair[1].n_total
                )));
            }
        }
        for b in &blocks {
            if b.amps.len() != Block::dim(b.n_total) {
                return Err(Error::InvalidBlocks(format!(
                    "block N = {} has {} amplitudes, expected {}",
                    b.n_total,
                    b.amps.len(),
                    Block::dim(b.n_total)
                )));
            }
            if b.amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
                return Err(Error::InvalidBlocks(format!(
                    "block N = {} contains non-finite amplitudes",
                    b.n_total
                )));
            }
        }
        let norm_sq: f64 = blocks.iter().map(Block::norm_sq).sum();
        if (norm_sq - 1.0).abs() > 10.0 * cutoff_epsilon {
            return Err(Error::InvalidBlocks(format!(
                "total probability {norm_sq} deviates from 1 by more than 10 * cutoff_epsilon"
            )));
        }
        Ok(Self { blocks, cutoff_epsilon, alpha0 })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn cutoff_epsilon(&self) -> f64 {
        self.cutoff_epsilon
    }

    pub fn alpha0(&self) -> C64 {
        self.alpha0
    }

    /// Total probability carried by the retained blocks.
    pub fn norm_sq(&self) -> f64 {
        self.blocks.iter().map(Block::norm_sq).sum()
    }

    /// Largest retained pump Fock index (`n₁ = N` of the last block).
    pub fn max_pump_fock(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.n_total)
    }

    /// Mean photon number of one mode: `Σ (N−2k)|ψ|²` for the pump,
    /// `Σ k|ψ|²` for the harmonic.
    pub fn mean_photon(&self, mode: Mode) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| {
                b.amps.iter().enumerate().map(move |(k, a)| {
                    let weight = match mode {
                        Mode::Pump => (b.n_total - 2 * k) as f64,
                        Mode::Harmonic => k as f64,
                    };
                    weight * a.norm_sqr()
                })
            })
            .sum()
    }

    /// The conserved combination `⟨n₁⟩ + 2⟨n₂⟩`.
    pub fn conserved_quantity(&self) -> f64 {
        self.mean_photon(Mode::Pump) + 2.0 * self.mean_photon(Mode::Harmonic)
    }
}
