//! Uplink training: orthogonal pilots, repeated soundings under distinct RIS
//! phase configurations, and pilot removal.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{cascaded_channel, Arrays, ChannelParams, PhaseShiftMatrix};
use crate::error::{Error, Result};
use crate::rng::block_rng;
use crate::{CMatrix, C64};

/// Orthogonal `N_u x N_u` pilot matrix with `S S^H = S^H S = (P / N_u) I`.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotMatrix {
    s: CMatrix,
    power: f64,
}

impl PilotMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.s
    }

    /// Linear SNR `P`.
    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn n_u(&self) -> usize {
        self.s.nrows()
    }
}

/// Scaled DFT pilots: `S[m, n] = sqrt(P) / N_u * exp(-j 2π m n / N_u)`.
pub fn make_pilots(n_u: usize, power: f64) -> Result<PilotMatrix> {
    if n_u == 0 {
        return Err(Error::Config("pilot matrix needs at least one antenna".into()));
    }
    if !(power.is_finite() && power > 0.0) {
        return Err(Error::Config(format!("pilot power must be positive, got {power}")));
    }
    let scale = power.sqrt() / n_u as f64;
    let s = CMatrix::from_fn(n_u, n_u, |m, n| {
        // reduce the index product first so the phase stays exact for large N_u
        let k = (m * n) % n_u;
        C64::from_polar(scale, -TAU * k as f64 / n_u as f64)
    });
    Ok(PilotMatrix { s, power })
}

/// Converts an SNR in dB to the linear pilot power.
pub fn snr_db_to_power(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Received block `X = H S + N` with `N` i.i.d. CN(0, 1) when `noise_on`.
pub fn sound<R: Rng + ?Sized>(
    h: &CMatrix,
    pilots: &PilotMatrix,
    rng: &mut R,
    noise_on: bool,
) -> Result<CMatrix> {
    if h.ncols() != pilots.n_u() {
        return Err(Error::DimensionMismatch {
            what: "channel columns vs pilot rows",
            expected: pilots.n_u(),
            found: h.ncols(),
        });
    }
    let mut x = h * pilots.matrix();
    if noise_on {
        for v in x.iter_mut() {
            *v += complex_gaussian(rng);
        }
    }
    Ok(x)
}

/// One CN(0, 1) draw.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Pilot removal: `(N_u / P) X S^H`.
pub fn coarse_estimate(x: &CMatrix, pilots: &PilotMatrix) -> Result<CMatrix> {
    if x.ncols() != pilots.n_u() {
        return Err(Error::DimensionMismatch {
            what: "received block columns",
            expected: pilots.n_u(),
            found: x.ncols(),
        });
    }
    let scale = pilots.n_u() as f64 / pilots.power();
    Ok(x * pilots.matrix().adjoint() * C64::new(scale, 0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoundingBlock {
    pub omega: PhaseShiftMatrix,
    pub received: CMatrix,
}

/// The `L` training blocks of one channel-estimation round.
#[derive(Debug, Clone, PartialEq)]
pub struct SoundingSet {
    pub blocks: Vec<SoundingBlock>,
    pub pilots: PilotMatrix,
    /// Per-block coarse estimates `H̃_i`.
    pub coarse: Vec<CMatrix>,
}

impl SoundingSet {
    /// Simulates one sounding per phase configuration. Block `i` draws its noise
    /// from substream `i` of `noise_seed`, so results do not depend on `L` or on
    /// the order blocks are generated in.
    pub fn simulate(
        params: &ChannelParams,
        omegas: Vec<PhaseShiftMatrix>,
        arrays: &Arrays,
        pilots: PilotMatrix,
        noise_seed: u64,
        noise_on: bool,
    ) -> Result<Self> {
        if omegas.len() < 2 {
            return Err(Error::InsufficientSoundings(omegas.len()));
        }
        if pilots.n_u() != arrays.n_u() {
            return Err(Error::DimensionMismatch {
                what: "pilot size vs UE array",
                expected: arrays.n_u(),
                found: pilots.n_u(),
            });
        }
        let mut blocks = Vec::with_capacity(omegas.len());
        let mut coarse = Vec::with_capacity(omegas.len());
        for (i, omega) in omegas.into_iter().enumerate() {
            let h = cascaded_channel(params, &omega, arrays)?;
            let received = sound(&h, &pilots, &mut block_rng(noise_seed, i), noise_on)?;
            coarse.push(coarse_estimate(&received, &pilots)?);
            blocks.push(SoundingBlock { omega, received });
        }
        Ok(Self {
            blocks,
            pilots,
            coarse,
        })
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn omegas(&self) -> Vec<&PhaseShiftMatrix> {
        self.blocks.iter().map(|b| &b.omega).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::random_phase_shifts;
    use crate::geometry::{Angle, UlaConfig, UpaConfig};
    use crate::rng::trial_rng;
    use proptest::prelude::*;

    fn identity_scaled(n: usize, s: f64) -> CMatrix {
        CMatrix::identity(n, n) * C64::new(s, 0.0)
    }

    #[test]
    fn pilots_are_scaled_unitary() {
        let s = make_pilots(8, 1.0).unwrap();
        let m = s.matrix();
        let target = identity_scaled(8, 1.0 / 8.0);
        assert!((m * m.adjoint() - &target).norm() < 1e-12);
        assert!((m.adjoint() * m - &target).norm() < 1e-12);
        let gram = m.adjoint() * m;
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert!(gram[(i, j)].norm() < 1e-10 / 8.0);
                }
            }
        }
    }

    #[test]
    fn single_antenna_pilot() {
        let s = make_pilots(1, 4.0).unwrap();
        assert!((s.matrix()[(0, 0)].norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pilot_arguments_validated() {
        assert!(make_pilots(0, 1.0).is_err());
        assert!(make_pilots(4, 0.0).is_err());
        assert!(make_pilots(4, f64::NAN).is_err());
    }

    #[test]
    fn noiseless_sounding_is_exact() {
        let pilots = make_pilots(8, 0.1).unwrap();
        let mut rng = trial_rng(0, 0, 0);
        let h = CMatrix::from_fn(12, 8, |m, n| C64::new(m as f64, -(n as f64)));
        let x = sound(&h, &pilots, &mut rng, false).unwrap();
        assert_eq!(x.shape(), (12, 8));
        assert_eq!(x, &h * pilots.matrix());
        let back = coarse_estimate(&x, &pilots).unwrap();
        assert!((back - &h).norm() < 1e-12 * h.norm());
        let zero = coarse_estimate(&CMatrix::zeros(12, 8), &pilots).unwrap();
        assert_eq!(zero.norm(), 0.0);
    }

    #[test]
    fn sound_checks_dimensions() {
        let pilots = make_pilots(8, 1.0).unwrap();
        let h = CMatrix::zeros(12, 7);
        assert!(sound(&h, &pilots, &mut trial_rng(0, 0, 0), true).is_err());
    }

    #[test]
    fn noise_has_unit_variance() {
        let pilots = make_pilots(8, 1.0).unwrap();
        let h = CMatrix::zeros(125, 8);
        let mut rng = trial_rng(42, 0, 0);
        let mut acc = 0.0;
        let mut count = 0usize;
        while count < 100_000 {
            let x = sound(&h, &pilots, &mut rng, true).unwrap();
            acc += x.iter().map(|v| v.norm_sqr()).sum::<f64>();
            count += x.len();
        }
        let var = acc / count as f64;
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn simulate_requires_two_blocks_and_is_deterministic() {
        let arrays = Arrays::new(
            UlaConfig::half_wavelength(12).unwrap(),
            UlaConfig::half_wavelength(8).unwrap(),
            UpaConfig::sub_wavelength(4, 4).unwrap(),
        )
        .unwrap();
        let params = ChannelParams {
            theta_u: Angle::from_degrees(40.0),
            theta_b: Angle::from_degrees(40.0),
            phi_u: Angle::from_degrees(50.0),
            psi_u: Angle::from_degrees(30.0),
            phi_b: Angle::from_degrees(50.0),
            psi_b: Angle::from_degrees(65.0),
            gain: C64::new(1.0, 0.0),
        };
        let pilots = make_pilots(8, 1.0).unwrap();
        let one = vec![PhaseShiftMatrix::identity(16)];
        assert!(matches!(
            SoundingSet::simulate(&params, one, &arrays, pilots.clone(), 1, true),
            Err(Error::InsufficientSoundings(1))
        ));
        let mut rng = trial_rng(1, 1, 1);
        let omegas: Vec<_> = (0..3).map(|_| random_phase_shifts(&mut rng, 16)).collect();
        let a = SoundingSet::simulate(&params, omegas.clone(), &arrays, pilots.clone(), 7, true).unwrap();
        let b = SoundingSet::simulate(&params, omegas.clone(), &arrays, pilots.clone(), 7, true).unwrap();
        assert_eq!(a, b);
        // block noise is independent of how many blocks follow it
        let short = SoundingSet::simulate(&params, omegas[..2].to_vec(), &arrays, pilots, 7, true).unwrap();
        assert_eq!(short.blocks[..], a.blocks[..2]);
    }

    proptest! {
        #[test]
        fn pilot_removal_exact_for_rank_one(seed in any::<u64>(), p_db in -20.0f64..20.0) {
            let pilots = make_pilots(8, snr_db_to_power(p_db)).unwrap();
            let mut rng = trial_rng(seed, 0, 0);
            let u = CMatrix::from_fn(12, 1, |_, _| complex_gaussian(&mut rng));
            let v = CMatrix::from_fn(8, 1, |_, _| complex_gaussian(&mut rng));
            let h = &u * v.adjoint();
            let x = sound(&h, &pilots, &mut rng, false).unwrap();
            let back = coarse_estimate(&x, &pilots).unwrap();
            prop_assert!((back - &h).norm() <= 1e-12 * h.norm().max(1.0));
        }
    }
}
