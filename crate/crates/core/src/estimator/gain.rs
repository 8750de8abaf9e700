//! Least-squares path gain given the angles.

use std::borrow::Borrow;

use crate::channel::{reflect, Arrays, ChannelParams, KnownAngles, PhaseShiftMatrix, UeAngles};
use crate::error::{Error, Result};
use crate::geometry::{bs_response, ris_response, ue_response};
use crate::{CMatrix, C64};

/// `ĝ = v^H b / ‖v‖²` with `b_i = H̃_i a_U(θ_u)` and
/// `v_i = N_u a_B(θ_b) a_R^H(φ_b, ψ_b) Ω_i a_R(φ_u, ψ_u)` stacked over the soundings.
pub fn estimate_gain<W: Borrow<PhaseShiftMatrix>>(
    coarse: &[CMatrix],
    omegas: &[W],
    known: &KnownAngles,
    ue: &UeAngles,
    arrays: &Arrays,
) -> Result<C64> {
    if coarse.len() != omegas.len() {
        return Err(Error::DimensionMismatch {
            what: "coarse estimates vs phase schedules",
            expected: omegas.len(),
            found: coarse.len(),
        });
    }
    let a_b = bs_response(known.theta_b, &arrays.bs);
    let a_u = ue_response(ue.theta_u, &arrays.ue);
    let a_rb = ris_response(known.phi_b, known.psi_b, &arrays.ris);
    let a_ru = ris_response(ue.phi_u, ue.psi_u, &arrays.ris);
    let n_u = arrays.n_u() as f64;
    let n_b = arrays.n_b() as f64;

    // v_i = N_u r_i a_B, so v^H b = N_u Σ conj(r_i) a_B^H b_i and ‖v‖² = N_u² N_b Σ |r_i|²
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for (h, omega) in coarse.iter().zip(omegas) {
        let omega = omega.borrow();
        if h.shape() != (arrays.n_b(), arrays.n_u()) {
            return Err(Error::DimensionMismatch {
                what: "coarse estimate rows",
                expected: arrays.n_b(),
                found: h.nrows(),
            });
        }
        if omega.len() != arrays.n_r() {
            return Err(Error::DimensionMismatch {
                what: "phase-shift vector",
                expected: arrays.n_r(),
                found: omega.len(),
            });
        }
        let r = reflect(&a_rb, omega, &a_ru);
        let b = h * &a_u;
        num += r.conj() * a_b.dotc(&b) * n_u;
        den += r.norm_sqr() * n_u * n_u * n_b;
    }
    if !(den > 0.0) {
        return Err(Error::DegenerateGeometry);
    }
    Ok(num / den)
}

/// Baseline that knows every angle and only fits the gain.
pub fn oracle_ls<W: Borrow<PhaseShiftMatrix>>(
    coarse: &[CMatrix],
    omegas: &[W],
    params: &ChannelParams,
    arrays: &Arrays,
) -> Result<C64> {
    estimate_gain(coarse, omegas, &params.known(), &params.ue(), arrays)
}
