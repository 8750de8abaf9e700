//! Rank-1 line-of-sight channels: UE→RIS and the cascaded UE→RIS→BS link.

use std::f64::consts::TAU;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{bs_response, ris_response, ue_response, Angle, UlaConfig, UpaConfig};
use crate::{CMatrix, CVector, C64};

/// The three apertures of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrays {
    pub bs: UlaConfig,
    pub ue: UlaConfig,
    pub ris: UpaConfig,
}

impl Arrays {
    pub fn new(bs: UlaConfig, ue: UlaConfig, ris: UpaConfig) -> Result<Self> {
        bs.validate()?;
        ue.validate()?;
        ris.validate()?;
        Ok(Self { bs, ue, ris })
    }

    pub fn n_b(&self) -> usize {
        self.bs.n_elements
    }

    pub fn n_u(&self) -> usize {
        self.ue.n_elements
    }

    pub fn n_r(&self) -> usize {
        self.ris.n_elements()
    }
}

/// Angles fixed by the RIS and BS positions, known to the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnownAngles {
    pub theta_b: Angle,
    pub phi_b: Angle,
    pub psi_b: Angle,
}

/// Angles describing the UE side of the link; these are what the estimator recovers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeAngles {
    pub theta_u: Angle,
    pub phi_u: Angle,
    pub psi_u: Angle,
}

/// Full description of the LoS scenario. Only the product gain `g = g_rb * g_ur`
/// is modeled; the per-link gains are not identifiable from the received signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub theta_u: Angle,
    pub theta_b: Angle,
    pub phi_u: Angle,
    pub psi_u: Angle,
    pub phi_b: Angle,
    pub psi_b: Angle,
    pub gain: C64,
}

impl ChannelParams {
    pub fn from_parts(ue: UeAngles, known: KnownAngles, gain: C64) -> Self {
        Self {
            theta_u: ue.theta_u,
            theta_b: known.theta_b,
            phi_u: ue.phi_u,
            psi_u: ue.psi_u,
            phi_b: known.phi_b,
            psi_b: known.psi_b,
            gain,
        }
    }

    pub fn known(&self) -> KnownAngles {
        KnownAngles {
            theta_b: self.theta_b,
            phi_b: self.phi_b,
            psi_b: self.psi_b,
        }
    }

    pub fn ue(&self) -> UeAngles {
        UeAngles {
            theta_u: self.theta_u,
            phi_u: self.phi_u,
            psi_u: self.psi_u,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.theta_u.validate("theta_u")?;
        self.theta_b.validate("theta_b")?;
        self.phi_u.validate("phi_u")?;
        self.psi_u.validate("psi_u")?;
        self.phi_b.validate("phi_b")?;
        self.psi_b.validate("psi_b")?;
        if !(self.gain.re.is_finite() && self.gain.im.is_finite()) {
            return Err(Error::Config("path gain must be finite".into()));
        }
        Ok(())
    }
}

/// Diagonal of a RIS phase-shift matrix; every entry has unit modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftMatrix {
    omega: CVector,
}

impl PhaseShiftMatrix {
    const MODULUS_TOL: f64 = 1e-9;

    pub fn new(omega: CVector) -> Result<Self> {
        if let Some(bad) = omega
            .iter()
            .find(|w| (w.norm() - 1.0).abs() > Self::MODULUS_TOL)
        {
            return Err(Error::Config(format!(
                "phase shift {bad} does not have unit modulus"
            )));
        }
        Ok(Self { omega })
    }

    pub fn from_phases(phases: &[f64]) -> Self {
        Self {
            omega: CVector::from_iterator(
                phases.len(),
                phases.iter().map(|&a| C64::from_polar(1.0, a)),
            ),
        }
    }

    /// Ω = I.
    pub fn identity(n_r: usize) -> Self {
        Self {
            omega: CVector::from_element(n_r, C64::new(1.0, 0.0)),
        }
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn diagonal(&self) -> &CVector {
        &self.omega
    }

    fn check_len(&self, n_r: usize) -> Result<()> {
        if self.len() != n_r {
            return Err(Error::DimensionMismatch {
                what: "phase-shift vector",
                expected: n_r,
                found: self.len(),
            });
        }
        Ok(())
    }
}

/// `a^H diag(ω) b`, evaluated elementwise.
pub(crate) fn reflect(arrival_bs: &CVector, omega: &PhaseShiftMatrix, departure_ue: &CVector) -> C64 {
    arrival_bs
        .iter()
        .zip(omega.diagonal().iter())
        .zip(departure_ue.iter())
        .map(|((a, w), b)| a.conj() * w * b)
        .sum()
}

/// UE→RIS channel `a_R(φ_u, ψ_u) a_U^H(θ_u)` with unit gain.
pub fn ue_ris_channel(params: &ChannelParams, ue: &UlaConfig, ris: &UpaConfig) -> CMatrix {
    let a_r = ris_response(params.phi_u, params.psi_u, ris);
    let a_u = ue_response(params.theta_u, ue);
    &a_r * a_u.adjoint()
}

/// Scalar `c = g a_R^H(φ_b, ψ_b) Ω a_R(φ_u, ψ_u)` that multiplies `a_B a_U^H`.
pub fn effective_gain(params: &ChannelParams, omega: &PhaseShiftMatrix, ris: &UpaConfig) -> Result<C64> {
    omega.check_len(ris.n_elements())?;
    let a_rb = ris_response(params.phi_b, params.psi_b, ris);
    let a_ru = ris_response(params.phi_u, params.psi_u, ris);
    Ok(params.gain * reflect(&a_rb, omega, &a_ru))
}

/// Cascaded `N_b x N_u` channel through the RIS configured with `omega`.
pub fn cascaded_channel(params: &ChannelParams, omega: &PhaseShiftMatrix, arrays: &Arrays) -> Result<CMatrix> {
    let c = effective_gain(params, omega, &arrays.ris)?;
    let a_b = bs_response(params.theta_b, &arrays.bs);
    let a_u = ue_response(params.theta_u, &arrays.ue);
    Ok((&a_b * a_u.adjoint()) * c)
}

/// Independent phases drawn uniformly on the unit circle.
pub fn random_phase_shifts<R: Rng + ?Sized>(rng: &mut R, n_r: usize) -> PhaseShiftMatrix {
    let phases: Vec<f64> = (0..n_r).map(|_| rng.random::<f64>() * TAU).collect();
    PhaseShiftMatrix::from_phases(&phases)
}
