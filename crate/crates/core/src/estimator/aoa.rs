//! Angle of arrival at the RIS from the null space of the stacked sounding
//! constraints `a_R^H(φ_b, ψ_b) (c_ref Ω_j - c_j Ω_ref) a_R(φ_u, ψ_u) = 0`.

use std::borrow::Borrow;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::channel::{Arrays, PhaseShiftMatrix};
use crate::error::{Error, Result};
use crate::estimator::grid::{
    argmax2, quadratic_offset_2d, spectrum_from_cost, AngleAxis, SpectrumGrid2D, EXACT_NULL,
};
use crate::estimator::subspace::{row_space_basis, SubspaceBasis};
use crate::geometry::{bs_response, ris_direction_cosines, ris_response, steering_into, ue_response, Angle, UpaConfig};
use crate::{CMatrix, C64};

/// Which sounding plays the role of the reference `c_ref, Ω_ref` in the
/// stacked constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RefPolicy {
    /// Always the first sounding.
    #[default]
    First,
    /// The sounding with the largest `|c̃_i|`, which avoids a reference near a null.
    MaxMagnitude,
}

impl RefPolicy {
    pub fn select(self, c_tilde: &[C64]) -> usize {
        match self {
            RefPolicy::First => 0,
            RefPolicy::MaxMagnitude => {
                let mut best = 0;
                for (i, c) in c_tilde.iter().enumerate() {
                    if c.norm() > c_tilde[best].norm() {
                        best = i;
                    }
                }
                best
            }
        }
    }
}

/// Two-stage (coarse, then local fine) search settings for `(φ, ψ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisSearch {
    pub phi_axis: AngleAxis,
    pub psi_axis: AngleAxis,
    pub fine_step_deg: f64,
    pub fine_half_width_deg: f64,
}

impl Default for RisSearch {
    fn default() -> Self {
        let axis = AngleAxis::from_degrees(0.0, 90.0, 0.5).expect("static grid");
        Self {
            phi_axis: axis,
            psi_axis: axis,
            fine_step_deg: 0.02,
            fine_half_width_deg: 1.0,
        }
    }
}

/// Noisy measurement of `c_i`: `a_B^H(θ_b) H̃_i a_U(θ̂_u) / (N_b N_u)`.
pub fn estimate_c(coarse: &CMatrix, theta_b: Angle, theta_u_hat: Angle, arrays: &Arrays) -> C64 {
    let a_b = bs_response(theta_b, &arrays.bs);
    let a_u = ue_response(theta_u_hat, &arrays.ue);
    let scale = (arrays.n_b() * arrays.n_u()) as f64;
    (a_b.adjoint() * coarse * a_u)[(0, 0)] / scale
}

/// Stacked `(L-1) x N_r` constraint matrix; row order follows the soundings
/// with the reference skipped.
pub fn build_a_tilde<W: Borrow<PhaseShiftMatrix>>(
    c_tilde: &[C64],
    omegas: &[W],
    phi_b: Angle,
    psi_b: Angle,
    ris: &UpaConfig,
    ref_index: usize,
) -> Result<CMatrix> {
    let l = c_tilde.len();
    if l < 2 {
        return Err(Error::InsufficientSoundings(l));
    }
    if omegas.len() != l {
        return Err(Error::DimensionMismatch {
            what: "phase schedules vs gain measurements",
            expected: l,
            found: omegas.len(),
        });
    }
    if ref_index >= l {
        return Err(Error::Config(format!("reference sounding {ref_index} out of range")));
    }
    let n_r = ris.n_elements();
    if let Some(w) = omegas.iter().find(|w| (*w).borrow().len() != n_r) {
        return Err(Error::DimensionMismatch {
            what: "phase-shift vector",
            expected: n_r,
            found: w.borrow().len(),
        });
    }
    let a_rb = ris_response(phi_b, psi_b, ris);
    let c_ref = c_tilde[ref_index];
    let w_ref = omegas[ref_index].borrow().diagonal();
    let mut a = CMatrix::zeros(l - 1, n_r);
    for (row, j) in (0..l).filter(|j| *j != ref_index).enumerate() {
        let w_j = omegas[j].borrow().diagonal();
        for m in 0..n_r {
            a[(row, m)] = a_rb[m].conj() * (c_ref * w_j[m] - c_tilde[j] * w_ref[m]);
        }
    }
    Ok(a)
}

/// Evaluates `‖Q^H a_R(φ, ψ)‖²` using the Kronecker structure of `a_R`.
pub(crate) struct RisCost {
    ris: UpaConfig,
    dim: usize,
    // conj(Q), column-major per basis vector
    conj_basis: Vec<C64>,
}

impl RisCost {
    pub(crate) fn new(basis: &SubspaceBasis, ris: &UpaConfig) -> Self {
        let n_r = ris.n_elements();
        let dim = basis.dim();
        let mut conj_basis = Vec::with_capacity(dim * n_r);
        for k in 0..dim {
            conj_basis.extend(basis.vectors.column(k).iter().map(|v| v.conj()));
        }
        Self {
            ris: *ris,
            dim,
            conj_basis,
        }
    }

    pub(crate) fn eval(&self, phi: Angle, psi: Angle, ax: &mut [C64], ay: &mut [C64]) -> f64 {
        let (ux, uy) = ris_direction_cosines(phi, psi);
        let d = self.ris.spacing_wavelengths;
        steering_into(ux, d, ax);
        steering_into(uy, d, ay);
        let (n_x, n_y) = (self.ris.n_x, self.ris.n_y);
        let n_r = n_x * n_y;
        let mut total = 0.0;
        for k in 0..self.dim {
            let q = &self.conj_basis[k * n_r..(k + 1) * n_r];
            let mut acc = C64::new(0.0, 0.0);
            for (p, x) in ax.iter().enumerate() {
                let row = &q[p * n_y..(p + 1) * n_y];
                let inner: C64 = row.iter().zip(ay.iter()).map(|(a, b)| a * b).sum();
                acc += x * inner;
            }
            total += acc.norm_sqr();
        }
        total
    }

    fn scratch(&self) -> (Vec<C64>, Vec<C64>) {
        (
            vec![C64::new(0.0, 0.0); self.ris.n_x],
            vec![C64::new(0.0, 0.0); self.ris.n_y],
        )
    }

    /// Costs over the full `phi x psi` grid, rows evaluated in parallel.
    pub(crate) fn grid(&self, phi_axis: &AngleAxis, psi_axis: &AngleAxis) -> DMatrix<f64> {
        let rows: Vec<Vec<f64>> = (0..phi_axis.len())
            .into_par_iter()
            .map(|i| {
                let (mut ax, mut ay) = self.scratch();
                let phi = phi_axis.at(i);
                psi_axis
                    .iter()
                    .map(|psi| self.eval(phi, psi, &mut ax, &mut ay))
                    .collect()
            })
            .collect();
        DMatrix::from_fn(phi_axis.len(), psi_axis.len(), |i, j| rows[i][j])
    }
}

/// Estimates `(φ_u, ψ_u)` from the peak of `1 / ‖Q^H a_R(φ, ψ)‖²` where `Q`
/// spans the row space of `a_tilde`. Returns the refined peak and the coarse
/// spectrum.
pub fn estimate_ris_angles(
    a_tilde: &CMatrix,
    ris: &UpaConfig,
    search: &RisSearch,
) -> Result<(Angle, Angle, SpectrumGrid2D)> {
    if a_tilde.ncols() != ris.n_elements() {
        return Err(Error::DimensionMismatch {
            what: "constraint matrix columns vs RIS size",
            expected: ris.n_elements(),
            found: a_tilde.ncols(),
        });
    }
    let basis = row_space_basis(a_tilde)?;
    let cost = RisCost::new(&basis, ris);

    let coarse_costs = cost.grid(&search.phi_axis, &search.psi_axis);
    let spectrum = SpectrumGrid2D {
        phi_axis: search.phi_axis,
        psi_axis: search.psi_axis,
        values: coarse_costs.map(spectrum_from_cost),
    };
    let (ci, cj) = spectrum.peak_index();
    let center_phi = search.phi_axis.degrees_at(ci);
    let center_psi = search.psi_axis.degrees_at(cj);
    let exact = coarse_costs[(ci, cj)] <= EXACT_NULL * ris.n_elements() as f64;
    if exact || search.fine_step_deg <= 0.0 {
        return Ok((Angle::from_degrees(center_phi), Angle::from_degrees(center_psi), spectrum));
    }

    let fine_phi = search
        .phi_axis
        .window(center_phi, search.fine_half_width_deg, search.fine_step_deg);
    let fine_psi = search
        .psi_axis
        .window(center_psi, search.fine_half_width_deg, search.fine_step_deg);
    let fine = cost.grid(&fine_phi, &fine_psi);
    let (fi, fj) = argmax2(&fine.map(spectrum_from_cost));
    let mut phi_deg = fine_phi.degrees_at(fi);
    let mut psi_deg = fine_psi.degrees_at(fj);
    let interior = fi > 0 && fj > 0 && fi + 1 < fine.nrows() && fj + 1 < fine.ncols();
    if interior && fine[(fi, fj)] > EXACT_NULL * ris.n_elements() as f64 {
        let mut patch = [[0.0; 3]; 3];
        for (di, row) in patch.iter_mut().enumerate() {
            for (dj, v) in row.iter_mut().enumerate() {
                *v = fine[(fi + di - 1, fj + dj - 1)];
            }
        }
        let (dx, dy) = quadratic_offset_2d(&patch);
        phi_deg += dx * search.fine_step_deg;
        psi_deg += dy * search.fine_step_deg;
    }
    Ok((Angle::from_degrees(phi_deg), Angle::from_degrees(psi_deg), spectrum))
}
