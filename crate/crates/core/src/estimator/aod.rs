//! UE angle of departure by MUSIC over the stacked coarse channel estimates.

use crate::error::{Error, Result};
use crate::estimator::grid::{parabolic_offset, spectrum_from_cost, AngleAxis, SpectrumGrid1D, EXACT_NULL};
use crate::estimator::subspace::{noise_subspace, SubspaceBasis};
use crate::geometry::{steering, Angle, UlaConfig};
use crate::CMatrix;

/// `G = [H̃_1^H ... H̃_L^H]`, of size `N_u x L N_b`.
pub fn stack_observations(coarse: &[CMatrix]) -> Result<CMatrix> {
    let first = coarse
        .first()
        .ok_or(Error::EstimationFailure("no sounding blocks"))?;
    let (n_b, n_u) = first.shape();
    let mut g = CMatrix::zeros(n_u, n_b * coarse.len());
    for (i, h) in coarse.iter().enumerate() {
        if h.shape() != (n_b, n_u) {
            return Err(Error::DimensionMismatch {
                what: "coarse estimate size",
                expected: n_b * n_u,
                found: h.nrows() * h.ncols(),
            });
        }
        g.columns_mut(i * n_b, n_b).copy_from(&h.adjoint());
    }
    Ok(g)
}

/// MUSIC cost `‖U^H a_U(θ)‖²` for the given noise subspace.
pub fn theta_cost(noise: &SubspaceBasis, theta: Angle, ue: &UlaConfig) -> f64 {
    let a = steering(theta.sin(), ue.n_elements, ue.spacing_wavelengths);
    noise.projection_norm_sq(&a)
}

/// Estimates `θ_u` from the peak of `1 / ‖U^H a_U(θ)‖²` over `axis`,
/// refined by a three-point parabola on the cost around the best sample.
pub fn estimate_theta_u(
    coarse: &[CMatrix],
    ue: &UlaConfig,
    axis: &AngleAxis,
) -> Result<(Angle, SpectrumGrid1D)> {
    let g = stack_observations(coarse)?;
    if g.nrows() != ue.n_elements {
        return Err(Error::DimensionMismatch {
            what: "coarse estimate columns vs UE array",
            expected: ue.n_elements,
            found: g.nrows(),
        });
    }
    let noise = noise_subspace(&g)?;
    let costs: Vec<f64> = axis.iter().map(|t| theta_cost(&noise, t, ue)).collect();
    let spectrum = SpectrumGrid1D {
        axis: *axis,
        values: costs.iter().map(|c| spectrum_from_cost(*c)).collect(),
    };
    let k = spectrum.peak_index();
    let mut deg = axis.degrees_at(k);
    let exact = costs[k] <= EXACT_NULL * ue.n_elements as f64;
    if !exact && k > 0 && k + 1 < costs.len() {
        deg += parabolic_offset(costs[k - 1], costs[k], costs[k + 1]) * axis.step_degrees();
    }
    Ok((Angle::from_degrees(deg), spectrum))
}
