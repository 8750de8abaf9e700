//! Evaluation quantities: channel NMSE, angle-based RIS phase design and the
//! spectral efficiency it achieves.

use crate::channel::{reflect, ChannelParams, PhaseShiftMatrix, Arrays};
use crate::error::{Error, Result};
use crate::estimator::ChannelEstimate;
use crate::geometry::{bs_response, ris_response, ue_response, Angle, UpaConfig};
use crate::{CMatrix, C64};

/// Per-trial quantities; [`nmse`] averages numerators and denominators separately.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrialOutcome {
    /// `‖H_L - Ĥ_L‖_F²`
    pub nmse_num: f64,
    /// `‖H_L‖_F²`
    pub nmse_den: f64,
    /// `log2(1 + |w^H H(Ω̂) f|² P)`
    pub se_bits: f64,
    /// Signed (θ_u, φ_u, ψ_u) errors in degrees.
    pub angle_errors: [f64; 3],
}

impl TrialOutcome {
    pub fn from_channels(truth: &CMatrix, estimate: &CMatrix, se_bits: f64, angle_errors: [f64; 3]) -> Self {
        Self {
            nmse_num: (truth - estimate).norm_squared(),
            nmse_den: truth.norm_squared(),
            se_bits,
            angle_errors,
        }
    }
}

/// `E[‖H_L - Ĥ_L‖²] / E[‖H_L‖²]`, the ratio of sample means.
pub fn nmse(outcomes: &[TrialOutcome]) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::DegenerateScenario("no trial outcomes"));
    }
    let num: f64 = outcomes.iter().map(|o| o.nmse_num).sum();
    let den: f64 = outcomes.iter().map(|o| o.nmse_den).sum();
    if !(den > 0.0) {
        return Err(Error::DegenerateScenario("true channel has zero energy"));
    }
    Ok(num / den)
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// RIS phases that co-phase the arrival and departure responses so that
/// `|a_R^H(φ_b, ψ_b) Ω a_R(φ_u, ψ_u)| = N_r`:
/// `arg ω_i = arg a_R(φ_b, ψ_b)_i - arg a_R(φ_u, ψ_u)_i`.
pub fn optimal_phase_shifts(phi_u: Angle, psi_u: Angle, phi_b: Angle, psi_b: Angle, ris: &UpaConfig) -> PhaseShiftMatrix {
    let a_ru = ris_response(phi_u, psi_u, ris);
    let a_rb = ris_response(phi_b, psi_b, ris);
    let phases: Vec<f64> = a_ru
        .iter()
        .zip(a_rb.iter())
        .map(|(u, b)| b.arg() - u.arg())
        .collect();
    PhaseShiftMatrix::from_phases(&phases)
}

/// Single-trial spectral efficiency (bits/s/Hz) when the UE precoder and RIS
/// phases are designed from the estimated angles while the channel follows the
/// true parameters.
pub fn spectral_efficiency(params: &ChannelParams, estimate: &ChannelEstimate, power: f64, arrays: &Arrays) -> f64 {
    let omega = optimal_phase_shifts(estimate.phi_u, estimate.psi_u, params.phi_b, params.psi_b, &arrays.ris);
    let a_b = bs_response(params.theta_b, &arrays.bs);
    let a_rb = ris_response(params.phi_b, params.psi_b, &arrays.ris);
    let a_ru = ris_response(params.phi_u, params.psi_u, &arrays.ris);
    let a_u_true = ue_response(params.theta_u, &arrays.ue);
    let a_u_hat = ue_response(estimate.theta_u, &arrays.ue);
    let n_b = arrays.n_b() as f64;
    let n_u = arrays.n_u() as f64;
    // w^H H f with w = a_B / sqrt(N_b), f = a_U(θ̂_u) / sqrt(N_u)
    let combiner = a_b.norm_squared() / n_b.sqrt();
    let precoder: C64 = a_u_true.dotc(&a_u_hat) / n_u.sqrt();
    let gain = params.gain * combiner * reflect(&a_rb, &omega, &a_ru) * precoder;
    (1.0 + gain.norm_sqr() * power).log2()
}
