//! Seeded Monte-Carlo runner: single trials, Cartesian sweeps and spectrum dumps.
//!
//! Each trial draws its path gain, phase schedule and noise from substreams keyed
//! by `(base_seed, point_key, trial)`. The point key depends only on `(L, n_x, n_y)`,
//! so trials at different SNRs of the same geometry share gain, phases and the
//! unit-variance noise draws, and adding sweep points never perturbs existing ones.

mod config;
mod output;

pub use config::{
    ArrayConfig, EstimatorSettings, ExperimentConfig, GridConfig, OutputConfig, RefPolicySetting,
    ScenarioConfig, SweepConfig,
};
pub use output::{read_spectrum, write_csv, write_spectrum, SpectrumDump, CSV_COLUMNS};

use std::f64::consts::TAU;
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{random_phase_shifts, ChannelParams};
use crate::error::Result;
use crate::estimator::{estimate_channel, oracle_ls, reconstruct_channel, ChannelEstimate, SpectrumGrid2D};
use crate::metrics::{nmse, spectral_efficiency, to_db, TrialOutcome};
use crate::rng::{derive_seed, trial_rng, trial_seed};
use crate::sounding::{make_pilots, snr_db_to_power, SoundingSet};
use crate::C64;

/// One coordinate of the Cartesian sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub soundings: usize,
    pub n_x: usize,
    pub n_y: usize,
}

impl SweepPoint {
    pub fn key(&self) -> u64 {
        derive_seed(0, &[self.soundings as u64, self.n_x as u64, self.n_y as u64])
    }
}

impl ExperimentConfig {
    /// Sweep points ordered by RIS size, then `L`, then SNR.
    pub fn sweep_points(&self) -> Vec<SweepPoint> {
        let mut points = Vec::new();
        for [n_x, n_y] in &self.sweep.ris_sizes {
            for &soundings in &self.sweep.soundings {
                for &snr_db in &self.sweep.snr_db {
                    points.push(SweepPoint {
                        snr_db,
                        soundings,
                        n_x: *n_x,
                        n_y: *n_y,
                    });
                }
            }
        }
        points
    }

    pub fn first_point(&self) -> SweepPoint {
        self.sweep_points()[0]
    }
}

/// Proposed estimator and OracleLS evaluated on the same soundings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialPair {
    pub truth: ChannelParams,
    pub estimate: ChannelEstimate,
    pub oracle_gain: C64,
    pub proposed: TrialOutcome,
    pub oracle: TrialOutcome,
}

impl TrialPair {
    pub fn gain_err_rel(&self) -> f64 {
        (self.estimate.gain - self.truth.gain).norm() / self.truth.gain.norm()
    }
}

/// Runs one trial. Estimator failures propagate as errors so the caller can
/// count them.
pub fn run_trial(cfg: &ExperimentConfig, point: &SweepPoint, trial: u64) -> Result<TrialPair> {
    run_trial_with(cfg, point, trial, false)
}

fn run_trial_with(cfg: &ExperimentConfig, point: &SweepPoint, trial: u64, diagnostics: bool) -> Result<TrialPair> {
    let arrays = cfg.arrays_for(point.n_x, point.n_y)?;
    let mut est_cfg = cfg.estimator_config()?;
    est_cfg.keep_diagnostics = diagnostics;

    let base = cfg.sweep.base_seed;
    let key = point.key();
    let mut rng = trial_rng(base, key, trial);
    let gain = C64::from_polar(1.0, rng.random::<f64>() * TAU);
    let truth = cfg.true_params(gain);
    let omegas: Vec<_> = (0..point.soundings)
        .map(|_| random_phase_shifts(&mut rng, arrays.n_r()))
        .collect();
    let power = snr_db_to_power(point.snr_db);
    let pilots = make_pilots(arrays.n_u(), power)?;
    let set = SoundingSet::simulate(
        &truth,
        omegas,
        &arrays,
        pilots,
        trial_seed(base, key, trial),
        cfg.sweep.noise,
    )?;

    let known = truth.known();
    let estimate = estimate_channel(&set, &known, &arrays, &est_cfg)?;
    let oracle_gain = oracle_ls(&set.coarse, &set.omegas(), &truth, &arrays)?;
    let oracle_estimate = ChannelEstimate {
        theta_u: truth.theta_u,
        phi_u: truth.phi_u,
        psi_u: truth.psi_u,
        gain: oracle_gain,
        c_tilde: Vec::new(),
        diagnostics: None,
    };

    let last = &set.blocks[set.len() - 1].omega;
    let h_last = crate::channel::cascaded_channel(&truth, last, &arrays)?;
    let proposed_h = reconstruct_channel(&estimate, last, &known, &arrays)?;
    let oracle_h = reconstruct_channel(&oracle_estimate, last, &known, &arrays)?;

    let errors = [
        estimate.theta_u.degrees() - truth.theta_u.degrees(),
        estimate.phi_u.degrees() - truth.phi_u.degrees(),
        estimate.psi_u.degrees() - truth.psi_u.degrees(),
    ];
    let proposed = TrialOutcome::from_channels(
        &h_last,
        &proposed_h,
        spectral_efficiency(&truth, &estimate, power, &arrays),
        errors,
    );
    let oracle = TrialOutcome::from_channels(
        &h_last,
        &oracle_h,
        spectral_efficiency(&truth, &oracle_estimate, power, &arrays),
        [0.0; 3],
    );
    Ok(TrialPair {
        truth,
        estimate,
        oracle_gain,
        proposed,
        oracle,
    })
}

/// Aggregates for one sweep point. Failed trials are excluded from every average.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub trials: usize,
    pub failures: usize,
    pub nmse_db_proposed: f64,
    pub nmse_db_oracle: f64,
    pub se_proposed: f64,
    pub se_oracle: f64,
    /// Mean absolute angle errors (θ_u, φ_u, ψ_u), degrees.
    pub angle_errors_deg: [f64; 3],
    pub gain_err_rel: f64,
    pub seed: u64,
    pub wall_time_s: f64,
}

impl SweepRow {
    pub fn aggregate(point: SweepPoint, seed: u64, results: &[Result<TrialPair>], wall_time_s: f64) -> Self {
        let ok: Vec<&TrialPair> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
        let proposed: Vec<TrialOutcome> = ok.iter().map(|t| t.proposed).collect();
        let oracle: Vec<TrialOutcome> = ok.iter().map(|t| t.oracle).collect();
        let mean = |f: &dyn Fn(&TrialPair) -> f64| -> f64 {
            if ok.is_empty() {
                f64::NAN
            } else {
                ok.iter().map(|t| f(t)).sum::<f64>() / ok.len() as f64
            }
        };
        let nmse_db = |o: &[TrialOutcome]| nmse(o).map(to_db).unwrap_or(f64::NAN);
        Self {
            point,
            trials: results.len(),
            failures: results.len() - ok.len(),
            nmse_db_proposed: nmse_db(&proposed),
            nmse_db_oracle: nmse_db(&oracle),
            se_proposed: mean(&|t| t.proposed.se_bits),
            se_oracle: mean(&|t| t.oracle.se_bits),
            angle_errors_deg: [
                mean(&|t| t.proposed.angle_errors[0].abs()),
                mean(&|t| t.proposed.angle_errors[1].abs()),
                mean(&|t| t.proposed.angle_errors[2].abs()),
            ],
            gain_err_rel: mean(&|t| t.gain_err_rel()),
            seed,
            wall_time_s,
        }
    }

    /// OracleLS should never be worse than the proposed estimator; more than
    /// 1 dB in the wrong direction points at a bug or too few trials.
    pub fn oracle_violation(&self) -> bool {
        self.nmse_db_oracle > self.nmse_db_proposed + 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Runs every sweep point; trials within a point run in parallel on the current
/// rayon pool and are reduced in trial order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for point in cfg.sweep_points() {
        let start = Instant::now();
        let results: Vec<Result<TrialPair>> = (0..cfg.sweep.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(cfg, &point, t))
            .collect();
        rows.push(SweepRow::aggregate(
            point,
            cfg.sweep.base_seed,
            &results,
            start.elapsed().as_secs_f64(),
        ));
    }
    Ok(SweepResult { rows })
}

/// Coarse `(φ, ψ)` pseudo-spectrum of one trial at `point`.
pub fn spectrum_for(cfg: &ExperimentConfig, point: &SweepPoint, trial: u64) -> Result<SpectrumGrid2D> {
    let pair = run_trial_with(cfg, point, trial, true)?;
    let diag = pair.estimate.diagnostics.expect("diagnostics requested");
    Ok(diag.ris_spectrum)
}

/// Writes the spectrum of trial `trial` at the first sweep point to `path`.
pub fn dump_spectrum(cfg: &ExperimentConfig, trial: u64, path: &Path) -> Result<SpectrumGrid2D> {
    cfg.validate()?;
    let point = cfg.first_point();
    let grid = spectrum_for(cfg, &point, trial)?;
    write_spectrum(path, &grid, &point, cfg.sweep.base_seed, trial)?;
    Ok(grid)
}

/// Flat, serializable view of a trial for the `trial` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub point: SweepPoint,
    pub seed: u64,
    pub trial: u64,
    pub theta_u_deg: f64,
    pub phi_u_deg: f64,
    pub psi_u_deg: f64,
    pub gain_true: [f64; 2],
    pub gain_hat: [f64; 2],
    pub gain_oracle: [f64; 2],
    pub angle_errors_deg: [f64; 3],
    pub nmse_db_proposed: f64,
    pub nmse_db_oracle: f64,
    pub se_proposed: f64,
    pub se_oracle: f64,
}

impl TrialSummary {
    pub fn new(point: SweepPoint, seed: u64, trial: u64, pair: &TrialPair) -> Self {
        let parts = |c: C64| [c.re, c.im];
        let ratio = |o: &TrialOutcome| to_db(o.nmse_num / o.nmse_den);
        Self {
            point,
            seed,
            trial,
            theta_u_deg: pair.estimate.theta_u.degrees(),
            phi_u_deg: pair.estimate.phi_u.degrees(),
            psi_u_deg: pair.estimate.psi_u.degrees(),
            gain_true: parts(pair.truth.gain),
            gain_hat: parts(pair.estimate.gain),
            gain_oracle: parts(pair.oracle_gain),
            angle_errors_deg: pair.proposed.angle_errors,
            nmse_db_proposed: ratio(&pair.proposed),
            nmse_db_oracle: ratio(&pair.oracle),
            se_proposed: pair.proposed.se_bits,
            se_oracle: pair.oracle.se_bits,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.sweep.ris_sizes = vec![[4, 4]];
        cfg.sweep.soundings = vec![3];
        cfg.sweep.trials = 3;
        cfg
    }

    #[test]
    fn trial_is_deterministic() {
        let cfg = small_config();
        let p = cfg.first_point();
        let a = run_trial(&cfg, &p, 5).unwrap();
        let b = run_trial(&cfg, &p, 5).unwrap();
        assert_eq!(a, b);
        let c = run_trial(&cfg, &p, 6).unwrap();
        assert_ne!(a.truth.gain, c.truth.gain);
    }

    #[test]
    fn noiseless_trial_is_exact() {
        let mut cfg = small_config();
        cfg.sweep.noise = false;
        let pair = run_trial(&cfg, &cfg.first_point(), 0).unwrap();
        let nmse = pair.proposed.nmse_num / pair.proposed.nmse_den;
        assert!(nmse < 1e-15, "nmse {nmse}");
    }

    #[test]
    fn sweep_shape_and_point_order() {
        let mut cfg = small_config();
        cfg.sweep.snr_db = vec![-10.0, 0.0];
        cfg.sweep.trials = 1;
        let res = run_sweep(&cfg).unwrap();
        assert_eq!(res.rows.len(), 2);
        assert_eq!(res.rows[0].point.snr_db, -10.0);
        assert_eq!(res.rows[1].trials, 1);
    }

    #[test]
    fn adding_points_keeps_existing_rows() {
        let cfg = small_config();
        let mut wider = cfg.clone();
        wider.sweep.snr_db = vec![-20.0, -10.0];
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&wider).unwrap();
        let strip = |r: &SweepRow| SweepRow { wall_time_s: 0.0, ..r.clone() };
        assert_eq!(strip(&a.rows[0]), strip(&b.rows[1]));
    }

    #[test]
    fn failures_are_counted_not_averaged() {
        let ok = run_trial(&small_config(), &small_config().first_point(), 0);
        let failed: Result<TrialPair> = Err(crate::Error::DegenerateGeometry);
        let row = SweepRow::aggregate(small_config().first_point(), 1, &[ok, failed], 0.0);
        assert_eq!(row.trials, 2);
        assert_eq!(row.failures, 1);
        assert!(row.nmse_db_proposed.is_finite());
    }
}
