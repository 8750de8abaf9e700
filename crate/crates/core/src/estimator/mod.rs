//! Three-stage estimator for the UE side of the link.
//!
//! 1. `θ_u` by MUSIC on the stacked coarse estimates ([`estimate_theta_u`]).
//! 2. `(φ_u, ψ_u)` from the null space of the pairwise sounding constraints
//!    ([`estimate_c`], [`build_a_tilde`], [`estimate_ris_angles`]).
//! 3. `g` by least squares ([`estimate_gain`]).
//!
//! The RIS–BS angles `(θ_b, φ_b, ψ_b)` are inputs and never estimated.

mod aoa;
mod aod;
mod gain;
mod grid;
mod subspace;

pub use aoa::{build_a_tilde, estimate_c, estimate_ris_angles, RefPolicy, RisSearch};
pub use aod::{estimate_theta_u, stack_observations, theta_cost};
pub use gain::{estimate_gain, oracle_ls};
pub use grid::{AngleAxis, SpectrumGrid1D, SpectrumGrid2D};
pub use subspace::{noise_subspace, row_space_basis, SubspaceBasis, SubspaceRole, RANK_TOL};

use crate::channel::{cascaded_channel, Arrays, ChannelParams, KnownAngles, PhaseShiftMatrix, UeAngles};
use crate::error::{Error, Result};
use crate::geometry::{ris_response, Angle};
use crate::sounding::SoundingSet;
use crate::{CMatrix, CVector, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub theta_axis: AngleAxis,
    pub ris_search: RisSearch,
    pub ref_policy: RefPolicy,
    /// Keep the sampled spectra and constraint residuals in the estimate.
    pub keep_diagnostics: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            theta_axis: AngleAxis::from_degrees(-90.0, 90.0, 0.1).expect("static grid"),
            ris_search: RisSearch::default(),
            ref_policy: RefPolicy::First,
            keep_diagnostics: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub theta_spectrum: SpectrumGrid1D,
    /// Coarse `(φ, ψ)` spectrum.
    pub ris_spectrum: SpectrumGrid2D,
    pub ref_index: usize,
    /// `Ã a_R(φ̂_u, ψ̂_u)`, the per-constraint errors at the estimate.
    pub residuals: CVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub theta_u: Angle,
    pub phi_u: Angle,
    pub psi_u: Angle,
    pub gain: C64,
    pub c_tilde: Vec<C64>,
    pub diagnostics: Option<Box<Diagnostics>>,
}

impl ChannelEstimate {
    pub fn ue_angles(&self) -> UeAngles {
        UeAngles {
            theta_u: self.theta_u,
            phi_u: self.phi_u,
            psi_u: self.psi_u,
        }
    }

    pub fn params(&self, known: &KnownAngles) -> ChannelParams {
        ChannelParams::from_parts(self.ue_angles(), *known, self.gain)
    }
}

/// Runs all three stages on one sounding set.
pub fn estimate_channel(
    set: &SoundingSet,
    known: &KnownAngles,
    arrays: &Arrays,
    cfg: &EstimatorConfig,
) -> Result<ChannelEstimate> {
    if set.len() < 2 {
        return Err(Error::InsufficientSoundings(set.len()));
    }
    let omegas = set.omegas();

    let (theta_u, theta_spectrum) = estimate_theta_u(&set.coarse, &arrays.ue, &cfg.theta_axis)?;

    let c_tilde: Vec<C64> = set
        .coarse
        .iter()
        .map(|h| estimate_c(h, known.theta_b, theta_u, arrays))
        .collect();
    let ref_index = cfg.ref_policy.select(&c_tilde);
    let a_tilde = build_a_tilde(&c_tilde, &omegas, known.phi_b, known.psi_b, &arrays.ris, ref_index)?;
    let (phi_u, psi_u, ris_spectrum) = estimate_ris_angles(&a_tilde, &arrays.ris, &cfg.ris_search)?;

    let ue = UeAngles {
        theta_u,
        phi_u,
        psi_u,
    };
    let gain = estimate_gain(&set.coarse, &omegas, known, &ue, arrays)?;

    let diagnostics = cfg.keep_diagnostics.then(|| {
        Box::new(Diagnostics {
            theta_spectrum,
            ris_spectrum,
            ref_index,
            residuals: &a_tilde * ris_response(phi_u, psi_u, &arrays.ris),
        })
    });
    Ok(ChannelEstimate {
        theta_u,
        phi_u,
        psi_u,
        gain,
        c_tilde,
        diagnostics,
    })
}

/// Cascaded channel rebuilt from the estimate for phase configuration `omega`.
pub fn reconstruct_channel(
    estimate: &ChannelEstimate,
    omega: &PhaseShiftMatrix,
    known: &KnownAngles,
    arrays: &Arrays,
) -> Result<CMatrix> {
    cascaded_channel(&estimate.params(known), omega, arrays)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::channel::random_phase_shifts;
    use crate::geometry::{UlaConfig, UpaConfig};
    use crate::rng::{trial_rng, trial_seed};
    use crate::sounding::{make_pilots, snr_db_to_power};

    pub fn arrays(n_x: usize, n_y: usize) -> Arrays {
        Arrays::new(
            UlaConfig::half_wavelength(12).unwrap(),
            UlaConfig::half_wavelength(8).unwrap(),
            UpaConfig::sub_wavelength(n_x, n_y).unwrap(),
        )
        .unwrap()
    }

    pub fn reference_params(gain: C64) -> ChannelParams {
        ChannelParams {
            theta_u: Angle::from_degrees(40.0),
            theta_b: Angle::from_degrees(40.0),
            phi_u: Angle::from_degrees(50.0),
            psi_u: Angle::from_degrees(30.0),
            phi_b: Angle::from_degrees(50.0),
            psi_b: Angle::from_degrees(65.0),
            gain,
        }
    }

    pub fn sounding(
        params: &ChannelParams,
        arrays: &Arrays,
        l: usize,
        snr_db: Option<f64>,
        seed: u64,
    ) -> SoundingSet {
        let mut rng = trial_rng(seed, 0, 0);
        let omegas = (0..l).map(|_| random_phase_shifts(&mut rng, arrays.n_r())).collect();
        let power = snr_db.map(snr_db_to_power).unwrap_or(1.0);
        let pilots = make_pilots(arrays.n_u(), power).unwrap();
        SoundingSet::simulate(params, omegas, arrays, pilots, trial_seed(seed, 0, 0), snr_db.is_some())
            .unwrap()
    }
}
