//! Monte-Carlo behaviour of the full pipeline at moderate trial counts.

use ris_chest::harness::{run_sweep, run_trial, ExperimentConfig};

fn config(snr_db: Vec<f64>, soundings: Vec<usize>, n: usize, trials: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.sweep.snr_db = snr_db;
    cfg.sweep.soundings = soundings;
    cfg.sweep.ris_sizes = vec![[n, n]];
    cfg.sweep.trials = trials;
    cfg
}

#[test]
fn theta_within_one_degree_at_minus_ten_db() {
    let cfg = config(vec![-10.0], vec![5], 16, 100);
    let point = cfg.first_point();
    let hits = (0..100)
        .filter(|t| run_trial(&cfg, &point, *t).unwrap().proposed.angle_errors[0].abs() <= 1.0)
        .count();
    assert!(hits >= 95, "{hits}/100");
}

#[test]
fn oracle_is_never_clearly_worse_and_nmse_falls_with_snr() {
    let cfg = config(vec![-10.0, 0.0, 10.0], vec![4], 8, 60);
    let rows = run_sweep(&cfg).unwrap().rows;
    for r in &rows {
        assert!(!r.oracle_violation(), "{r:?}");
        assert!(r.se_proposed <= r.se_oracle + 1e-9);
        assert_eq!(r.failures, 0);
    }
    assert!(rows[0].nmse_db_proposed > rows[1].nmse_db_proposed);
    assert!(rows[1].nmse_db_proposed > rows[2].nmse_db_proposed);
    // OracleLS error scales exactly with the noise power under common random numbers.
    assert!((rows[0].nmse_db_oracle - rows[1].nmse_db_oracle - 10.0).abs() < 1e-6);
}

#[test]
fn more_soundings_help() {
    let cfg = config(vec![-10.0], vec![2, 6], 8, 60);
    let rows = run_sweep(&cfg).unwrap().rows;
    assert!(rows[1].nmse_db_proposed < rows[0].nmse_db_proposed - 3.0);
    assert!(rows[1].angle_errors_deg[1] < rows[0].angle_errors_deg[1]);
}

#[test]
fn high_snr_estimates_are_tight() {
    let cfg = config(vec![20.0], vec![3], 8, 20);
    let point = cfg.first_point();
    for t in 0..20 {
        let pair = run_trial(&cfg, &point, t).unwrap();
        assert!(pair.proposed.angle_errors.iter().all(|e| e.abs() < 0.5), "{t}: {:?}", pair.proposed.angle_errors);
        assert!(pair.gain_err_rel() < 0.05);
    }
}
