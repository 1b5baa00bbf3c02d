//! Truncated-Wigner-style classical simulation of the second-harmonic
//! interaction.
//!
//! Quantum fluctuations of the coherent pump and vacuum harmonic inputs are
//! represented by Gaussian samples with per-quadrature variance 1/4; each
//! sample then propagates deterministically under the classical field
//! equations `da₁/d(gt) = 2i a₂ a₁*`, `da₂/d(gt) = i a₁²` with classic
//! fourth-order Runge–Kutta at a fixed step.
//!
//! Reproducibility contract: every trajectory owns a counter-based RNG
//! stream keyed by its index, and ensemble statistics reduce over
//! fixed-size chunks in index order, so results are bitwise identical for
//! any worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::{C64, Error, Result};

/// Hard cap on the integration step.
pub const DT_CAP: f64 = 1e-3;
/// Manley–Rowe drift above which a trajectory fails the quality gate.
pub const DRIFT_GATE: f64 = 1e-8;
/// Trajectories per reduction chunk; fixed so that the summation tree does
/// not depend on the worker count.
const CHUNK_SIZE: usize = 64;

/// One draw of the classical input fields, in √photon units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalSample {
    /// Pump amplitude `α + x₁ + i y₁`.
    pub a1: C64,
    /// Harmonic amplitude `x₂ + i y₂`.
    pub a2: C64,
}

impl ClassicalSample {
    /// The Manley–Rowe invariant `|a₁|² + 2|a₂|²`.
    pub fn invariant(&self) -> f64 {
        self.a1.norm_sqr() + 2.0 * self.a2.norm_sqr()
    }

    /// The conserved interaction energy `Re(a₁*² a₂)`.
    pub fn energy(&self) -> f64 {
        (self.a1.conj() * self.a1.conj() * self.a2).re
    }
}

// Deterministic per-trajectory draw: stream = trajectory index.
fn draw_sample(seed: u64, alpha: C64, index: u64) -> ClassicalSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let normal = Normal::new(0.0, 0.5).expect("valid std dev");
    let x1 = normal.sample(&mut rng);
    let y1 = normal.sample(&mut rng);
    let x2 = normal.sample(&mut rng);
    let y2 = normal.sample(&mut rng);
    ClassicalSample {
        a1: alpha + C64::new(x1, y1),
        a2: C64::new(x2, y2),
    }
}

/// Draw the Gaussian input fluctuations for `n_traj` trajectories.
///
/// Each quadrature is an independent zero-mean Gaussian with variance 1/4;
/// identical `(seed, alpha, n_traj)` yields bitwise-identical samples.
pub fn sample_inputs(seed: u64, alpha: C64, n_traj: usize) -> Result<Vec<ClassicalSample>> {
    if n_traj == 0 {
        return Err(Error::NoTrajectories);
    }
    Ok((0..n_traj as u64).map(|i| draw_sample(seed, alpha, i)).collect())
}

/// Step bound `min(1e−3, 0.1/√(|a₁|² + 2|a₂|²))` for one sample.
pub fn step_bound(sample: &ClassicalSample) -> f64 {
    let inv = sample.invariant();
    if inv > 0.0 {
        DT_CAP.min(0.1 / inv.sqrt())
    } else {
        DT_CAP
    }
}

/// Conservative default step for an ensemble with mean photon number
/// `|alpha|²`: well under the bound evaluated at a 10-σ-high invariant, so
/// every realistic Gaussian draw satisfies its own precondition and the
/// accumulated Manley–Rowe drift stays an order of magnitude below the
/// 1e−8 gate.
pub fn default_dt(alpha: C64) -> f64 {
    let n = alpha.norm_sqr();
    let inv_high = n + 10.0 * n.sqrt() + 25.0;
    DT_CAP.min(0.015 / inv_high.sqrt())
}

#[inline]
fn derivative(a1: C64, a2: C64) -> (C64, C64) {
    let i = C64::new(0.0, 1.0);
    (2.0 * i * a2 * a1.conj(), i * a1 * a1)
}

#[inline]
fn rk4_step(a1: C64, a2: C64, dt: f64) -> (C64, C64) {
    let (k1a, k1b) = derivative(a1, a2);
    let (k2a, k2b) = derivative(a1 + k1a * (dt / 2.0), a2 + k1b * (dt / 2.0));
    let (k3a, k3b) = derivative(a1 + k2a * (dt / 2.0), a2 + k2b * (dt / 2.0));
    let (k4a, k4b) = derivative(a1 + k3a * dt, a2 + k3b * dt);
    (
        a1 + (k1a + 2.0 * k2a + 2.0 * k3a + k4a) * (dt / 6.0),
        a2 + (k1b + 2.0 * k2b + 2.0 * k3b + k4b) * (dt / 6.0),
    )
}

/// One integrated trajectory, recorded at every step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub a1: Vec<C64>,
    pub a2: Vec<C64>,
    /// Max relative drift of `|a₁|² + 2|a₂|²` over the run.
    pub invariant_drift: f64,
    /// Max drift of `Re(a₁*² a₂)`, normalized by the invariant^(3/2) scale.
    pub energy_drift: f64,
}

/// Integrate a single sample to `gt_end` with fixed step `dt`.
pub fn integrate_trajectory(
    sample: &ClassicalSample,
    gt_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let bound = step_bound(sample);
    if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, bound });
    }
    let n_steps = (gt_end / dt).round().max(1.0) as usize;
    let mut a1 = sample.a1;
    let mut a2 = sample.a2;
    let inv0 = sample.invariant();
    let e0 = sample.energy();
    let e_scale = inv0.powf(1.5).max(f64::MIN_POSITIVE);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut a1s = Vec::with_capacity(n_steps + 1);
    let mut a2s = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    a1s.push(a1);
    a2s.push(a2);
    let mut invariant_drift = 0.0_f64;
    let mut energy_drift = 0.0_f64;
    for step in 1..=n_steps {
        (a1, a2) = rk4_step(a1, a2, dt);
        let gt = step as f64 * dt;
        if !a1.re.is_finite() || !a1.im.is_finite() || !a2.re.is_finite() || !a2.im.is_finite() {
            return Err(Error::NonFiniteState(gt));
        }
        let here = ClassicalSample { a1, a2 };
        let inv = here.invariant();
        let rel = if inv0 > 0.0 { (inv - inv0).abs() / inv0 } else { inv.abs() };
        invariant_drift = invariant_drift.max(rel);
        energy_drift = energy_drift.max((here.energy() - e0).abs() / e_scale);
        times.push(gt);
        a1s.push(a1);
        a2s.push(a2);
    }
    Ok(Trajectory { times, a1: a1s, a2: a2s, invariant_drift, energy_drift })
}

/// Parameters of an ensemble run.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleConfig {
    pub seed: u64,
    /// Mean input pump amplitude (the ensemble mean photon number is
    /// `|alpha|²`).
    pub alpha: C64,
    pub n_traj: usize,
    /// Fixed integration step; must satisfy the per-sample bound.
    pub dt: f64,
    /// Requested end time; rounded up to a whole number of recorded steps.
    pub gt_end: f64,
    /// Record every this many integration steps.
    pub record_every: usize,
    /// Keep the full per-trajectory records (for scatter plots); otherwise
    /// only final states are retained.
    pub keep_states: bool,
}

impl EnsembleConfig {
    /// Sensible defaults for a given pump amplitude: auto step, roughly 500
    /// recorded times across the run, final-time states only.
    pub fn new(seed: u64, alpha: C64, n_traj: usize, gt_end: f64) -> Self {
        let dt = default_dt(alpha);
        let record_every = ((gt_end / 500.0 / dt).round() as usize).max(1);
        EnsembleConfig { seed, alpha, n_traj, dt, gt_end, record_every, keep_states: false }
    }
}

/// Classical trajectory ensemble with shared time grid and seed provenance.
#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    pub seed: u64,
    pub alpha: C64,
    pub n_traj: usize,
    pub dt: f64,
    /// Recorded `gt` values (uniform, starting at 0).
    pub times: Vec<f64>,
    pub samples_in: Vec<ClassicalSample>,
    /// Per-trajectory `(a₁, a₂)` at every recorded time, when kept.
    pub states: Option<Vec<Vec<(C64, C64)>>>,
    /// `(a₁, a₂)` of every trajectory at the final time.
    pub final_states: Vec<(C64, C64)>,
    /// Per-trajectory max relative Manley–Rowe drift.
    pub invariant_drift: Vec<f64>,
    // sum over trajectories of |a1|^2 at each recorded time, accumulated in
    // fixed chunk order
    sum_abs1_sq: Vec<f64>,
}

struct ChunkResult {
    sum_abs1_sq: Vec<f64>,
    samples: Vec<ClassicalSample>,
    finals: Vec<(C64, C64)>,
    drifts: Vec<f64>,
    states: Option<Vec<Vec<(C64, C64)>>>,
    error: Option<(usize, Error)>,
}

/// Integrate a full ensemble. Trajectories run concurrently; all outputs are
/// bitwise independent of the worker count.
///
/// Fails with [`Error::DriftGate`] if any trajectory exceeds the 1e−8
/// Manley–Rowe drift gate, and with [`Error::StepTooLarge`] if `dt` violates
/// the step bound of any drawn sample.
pub fn integrate_ensemble(config: &EnsembleConfig) -> Result<TrajectoryEnsemble> {
    if config.n_traj == 0 {
        return Err(Error::NoTrajectories);
    }
    if !(config.dt > 0.0) || !config.gt_end.is_finite() || config.gt_end <= 0.0 {
        return Err(Error::BadTimeGrid);
    }
    let record_every = config.record_every.max(1);
    let raw_steps = (config.gt_end / config.dt).ceil().max(1.0) as usize;
    let n_steps = raw_steps.div_ceil(record_every) * record_every;
    let n_records = n_steps / record_every;
    let times: Vec<f64> = (0..=n_records)
        .map(|i| (i * record_every) as f64 * config.dt)
        .collect();

    let n_chunks = config.n_traj.div_ceil(CHUNK_SIZE);
    let chunks: Vec<ChunkResult> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK_SIZE;
            let hi = ((chunk + 1) * CHUNK_SIZE).min(config.n_traj);
            let mut result = ChunkResult {
                sum_abs1_sq: vec![0.0; n_records + 1],
                samples: Vec::with_capacity(hi - lo),
                finals: Vec::with_capacity(hi - lo),
                drifts: Vec::with_capacity(hi - lo),
                states: config.keep_states.then(Vec::new),
                error: None,
            };
            for index in lo..hi {
                let sample = draw_sample(config.seed, config.alpha, index as u64);
                match integrate_recorded(&sample, config.dt, n_steps, record_every) {
                    Ok((records, drift)) => {
                        for (slot, &(a1, _)) in result.sum_abs1_sq.iter_mut().zip(&records) {
                            *slot += a1.norm_sqr();
                        }
                        result.finals.push(records[n_records]);
                        result.drifts.push(drift);
                        if let Some(states) = &mut result.states {
                            states.push(records);
                        }
                        result.samples.push(sample);
                    }
                    Err(err) => {
                        result.error = Some((index, err));
                        break;
                    }
                }
            }
            result
        })
        .collect();

    for chunk in &chunks {
        if let Some((_, err)) = &chunk.error {
            return Err(err.clone());
        }
    }

    let mut ensemble = TrajectoryEnsemble {
        seed: config.seed,
        alpha: config.alpha,
        n_traj: config.n_traj,
        dt: config.dt,
        times,
        samples_in: Vec::with_capacity(config.n_traj),
        states: config.keep_states.then(Vec::new),
        final_states: Vec::with_capacity(config.n_traj),
        invariant_drift: Vec::with_capacity(config.n_traj),
        sum_abs1_sq: vec![0.0; n_records + 1],
    };
    // fixed chunk order keeps the reduction deterministic
    for chunk in chunks {
        for (slot, value) in ensemble.sum_abs1_sq.iter_mut().zip(&chunk.sum_abs1_sq) {
            *slot += value;
        }
        ensemble.samples_in.extend(chunk.samples);
        ensemble.final_states.extend(chunk.finals);
        ensemble.invariant_drift.extend(chunk.drifts);
        if let (Some(all), Some(part)) = (&mut ensemble.states, chunk.states) {
            all.extend(part);
        }
    }

    let worst = ensemble
        .invariant_drift
        .iter()
        .cloned()
        .fold(0.0_f64, f64::max);
    if worst >= DRIFT_GATE {
        let offenders: Vec<usize> = ensemble
            .invariant_drift
            .iter()
            .enumerate()
            .filter(|(_, &d)| d >= DRIFT_GATE)
            .map(|(i, _)| i)
            .collect();
        return Err(Error::DriftGate {
            drift: worst,
            count: offenders.len(),
            first: offenders[0],
        });
    }
    Ok(ensemble)
}

// Integrate one sample, returning (a1, a2) at every recorded step plus the
// max relative invariant drift.
fn integrate_recorded(
    sample: &ClassicalSample,
    dt: f64,
    n_steps: usize,
    record_every: usize,
) -> Result<(Vec<(C64, C64)>, f64)> {
    let bound = step_bound(sample);
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, bound });
    }
    let mut a1 = sample.a1;
    let mut a2 = sample.a2;
    let inv0 = sample.invariant();
    let mut records = Vec::with_capacity(n_steps / record_every + 1);
    records.push((a1, a2));
    let mut drift = 0.0_f64;
    for step in 1..=n_steps {
        (a1, a2) = rk4_step(a1, a2, dt);
        if !a1.re.is_finite() || !a1.im.is_finite() || !a2.re.is_finite() || !a2.im.is_finite() {
            return Err(Error::NonFiniteState(step as f64 * dt));
        }
        let inv = a1.norm_sqr() + 2.0 * a2.norm_sqr();
        let rel = if inv0 > 0.0 { (inv - inv0).abs() / inv0 } else { inv.abs() };
        drift = drift.max(rel);
        if step % record_every == 0 {
            records.push((a1, a2));
        }
    }
    Ok((records, drift))
}

impl TrajectoryEnsemble {
    /// Symmetric-ordering-corrected pump photon number: mean of `|a₁|² − ½`
    /// at each recorded time. The sampled vacuum contributes ½ to `⟨|a₁|²⟩`,
    /// so this is the series to compare against quantum `⟨n₁⟩`.
    pub fn mean_photon(&self) -> Vec<f64> {
        self.sum_abs1_sq
            .iter()
            .map(|s| s / self.n_traj as f64 - 0.5)
            .collect()
    }

    /// Uncorrected mean of `|a₁|²`.
    pub fn mean_photon_raw(&self) -> Vec<f64> {
        self.sum_abs1_sq.iter().map(|s| s / self.n_traj as f64).collect()
    }

    /// Index of the recorded time nearest `gt`, if within half a record step.
    fn time_index(&self, gt: f64) -> Result<usize> {
        let step = if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            self.dt
        };
        let idx = ((gt / step).round()).max(0.0) as usize;
        if idx >= self.times.len() || (self.times[idx] - gt).abs() > step / 2.0 + 1e-12 {
            return Err(Error::TimeOutOfRange(gt));
        }
        Ok(idx)
    }

    /// Pump amplitude of every trajectory at the recorded time nearest `gt`.
    ///
    /// Needs `keep_states` unless `gt` is the final time.
    pub fn final_scatter(&self, gt: f64) -> Result<Vec<C64>> {
        let idx = self.time_index(gt)?;
        if let Some(states) = &self.states {
            return Ok(states.iter().map(|records| records[idx].0).collect());
        }
        if idx + 1 == self.times.len() {
            return Ok(self.final_states.iter().map(|&(a1, _)| a1).collect());
        }
        Err(Error::TimeOutOfRange(gt))
    }

    /// Worst per-trajectory Manley–Rowe drift.
    pub fn max_drift(&self) -> f64 {
        self.invariant_drift.iter().cloned().fold(0.0, f64::max)
    }
}
