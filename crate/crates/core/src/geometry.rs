//! Array response vectors for the BS and UE linear arrays and the RIS planar array.
//!
//! All apertures share the convention `a(u, N)[k] = exp(-j 2π k (d/λ) u)`, so the
//! first entry is always exactly one. The RIS response is the Kronecker product of
//! an x-axis factor and a y-axis factor, flattened x-major: flat index `p * n_y + q`
//! holds `a_x[p] * a_y[q]`. Phase-shift vectors index RIS elements in that order.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::{CVector, C64};

/// Uniform linear array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlaConfig {
    pub n_elements: usize,
    /// Inter-element spacing in wavelengths (d/λ).
    pub spacing_wavelengths: f64,
}

impl UlaConfig {
    pub const DEFAULT_SPACING: f64 = 0.5;

    pub fn new(n_elements: usize, spacing_wavelengths: f64) -> Result<Self> {
        let cfg = Self {
            n_elements,
            spacing_wavelengths,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Half-wavelength array with `n_elements` antennas.
    pub fn half_wavelength(n_elements: usize) -> Result<Self> {
        Self::new(n_elements, Self::DEFAULT_SPACING)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(Error::Config("ULA needs at least one element".into()));
        }
        if !(self.spacing_wavelengths.is_finite() && self.spacing_wavelengths > 0.0) {
            return Err(Error::Config(format!(
                "ULA spacing must be positive, got {}",
                self.spacing_wavelengths
            )));
        }
        Ok(())
    }
}

/// Uniform planar array (the RIS).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpaConfig {
    pub n_x: usize,
    pub n_y: usize,
    pub spacing_wavelengths: f64,
}

impl UpaConfig {
    pub const DEFAULT_SPACING: f64 = 0.2;

    pub fn new(n_x: usize, n_y: usize, spacing_wavelengths: f64) -> Result<Self> {
        let cfg = Self {
            n_x,
            n_y,
            spacing_wavelengths,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Planar array with the default λ/5 sub-wavelength spacing.
    pub fn sub_wavelength(n_x: usize, n_y: usize) -> Result<Self> {
        Self::new(n_x, n_y, Self::DEFAULT_SPACING)
    }

    pub fn n_elements(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_x == 0 || self.n_y == 0 {
            return Err(Error::Config(format!(
                "UPA dimensions must be positive, got {}x{}",
                self.n_x, self.n_y
            )));
        }
        if !(self.spacing_wavelengths.is_finite() && self.spacing_wavelengths > 0.0) {
            return Err(Error::Config(format!(
                "UPA spacing must be positive, got {}",
                self.spacing_wavelengths
            )));
        }
        Ok(())
    }

    pub fn x_axis(&self) -> UlaConfig {
        UlaConfig {
            n_elements: self.n_x,
            spacing_wavelengths: self.spacing_wavelengths,
        }
    }

    pub fn y_axis(&self) -> UlaConfig {
        UlaConfig {
            n_elements: self.n_y,
            spacing_wavelengths: self.spacing_wavelengths,
        }
    }
}

/// A physical angle stored in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Angle(f64);

impl Angle {
    pub const fn from_radians(rad: f64) -> Self {
        Angle(rad)
    }

    pub fn from_degrees(deg: f64) -> Self {
        Angle(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    /// Checks the angle is finite and within [-π/2, π/2].
    pub fn validate(self, name: &str) -> Result<Self> {
        // one ulp of slack so that from_degrees(90.0) passes
        if !self.0.is_finite() || self.0.abs() > FRAC_PI_2 * (1.0 + f64::EPSILON) {
            return Err(Error::Config(format!(
                "{name} = {}° is outside [-90°, 90°]",
                self.degrees()
            )));
        }
        Ok(self)
    }
}

/// ULA response for direction cosine `u`.
pub fn ula_response(u: f64, cfg: &UlaConfig) -> Result<CVector> {
    if !u.is_finite() || u.abs() > 1.0 {
        return Err(Error::InvalidDirection(u));
    }
    Ok(steering(u, cfg.n_elements, cfg.spacing_wavelengths))
}

/// Response of the BS array to angle of arrival `theta`.
pub fn bs_response(theta: Angle, cfg: &UlaConfig) -> CVector {
    steering(theta.sin(), cfg.n_elements, cfg.spacing_wavelengths)
}

/// Response of the UE array to angle of departure `theta`.
pub fn ue_response(theta: Angle, cfg: &UlaConfig) -> CVector {
    steering(theta.sin(), cfg.n_elements, cfg.spacing_wavelengths)
}

/// RIS response for elevation `phi` and azimuth `psi`.
pub fn ris_response(phi: Angle, psi: Angle, cfg: &UpaConfig) -> CVector {
    let (ax, ay) = ris_factors(phi, psi, cfg);
    let mut out = CVector::zeros(cfg.n_elements());
    for (p, x) in ax.iter().enumerate() {
        for (q, y) in ay.iter().enumerate() {
            out[p * cfg.n_y + q] = x * y;
        }
    }
    out
}

/// The x- and y-axis factors whose Kronecker product is the RIS response.
pub(crate) fn ris_factors(phi: Angle, psi: Angle, cfg: &UpaConfig) -> (CVector, CVector) {
    let (ux, uy) = ris_direction_cosines(phi, psi);
    (
        steering(ux, cfg.n_x, cfg.spacing_wavelengths),
        steering(uy, cfg.n_y, cfg.spacing_wavelengths),
    )
}

pub(crate) fn ris_direction_cosines(phi: Angle, psi: Angle) -> (f64, f64) {
    let (sphi, _) = phi.radians().sin_cos();
    let (spsi, cpsi) = psi.radians().sin_cos();
    (sphi * spsi, sphi * cpsi)
}

pub(crate) fn steering(u: f64, n: usize, spacing: f64) -> CVector {
    let w = -2.0 * PI * spacing * u;
    CVector::from_iterator(n, (0..n).map(|k| C64::from_polar(1.0, w * k as f64)))
}

/// Fills `out` with the steering vector, reusing its allocation.
pub(crate) fn steering_into(u: f64, spacing: f64, out: &mut [C64]) {
    let w = -2.0 * PI * spacing * u;
    for (k, v) in out.iter_mut().enumerate() {
        *v = C64::from_polar(1.0, w * k as f64);
    }
}
