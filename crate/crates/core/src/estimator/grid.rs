//! Angle grids, sampled pseudo-spectra and peak refinement.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::Angle;

/// Smallest projection cost kept before taking the reciprocal, so every
/// spectrum sample stays finite.
pub(crate) const COST_FLOOR: f64 = 1e-300;

/// A projection cost this small (relative to `‖a‖²`) means the grid point
/// already sits on the noiseless null; interpolation would only add error.
pub(crate) const EXACT_NULL: f64 = 1e-18;

/// Uniformly spaced angle samples `start + k * step`, `k = 0..len`.
///
/// Samples are generated in degrees so that round configuration values land on
/// the grid without accumulated drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleAxis {
    start_deg: f64,
    step_deg: f64,
    len: usize,
}

impl AngleAxis {
    pub fn from_degrees(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if step <= 0.0 {
            return Err(Error::Config(format!("grid step must be positive, got {step}")));
        }
        if stop < start {
            return Err(Error::Config(format!("grid stop {stop} precedes start {start}")));
        }
        let len = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok(Self {
            start_deg: start,
            step_deg: step,
            len,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn start(&self) -> Angle {
        Angle::from_degrees(self.start_deg)
    }

    pub fn stop(&self) -> Angle {
        self.at(self.len - 1)
    }

    pub fn step(&self) -> f64 {
        self.step_deg.to_radians()
    }

    pub fn step_degrees(&self) -> f64 {
        self.step_deg
    }

    pub fn degrees_at(&self, i: usize) -> f64 {
        self.start_deg + i as f64 * self.step_deg
    }

    pub fn at(&self, i: usize) -> Angle {
        Angle::from_degrees(self.degrees_at(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = Angle> + '_ {
        (0..self.len).map(|i| self.at(i))
    }

    /// Window of half-width `half_width` degrees around `center`, clipped to `self`.
    pub(crate) fn window(&self, center: f64, half_width: f64, step: f64) -> AngleAxis {
        let lo_bound = self.start_deg;
        let hi_bound = self.degrees_at(self.len - 1);
        let half = (half_width / step + 1e-9).floor() as i64;
        let first = (-half..=0)
            .find(|k| center + *k as f64 * step >= lo_bound - 1e-12)
            .unwrap_or(0);
        let last = (0..=half)
            .rev()
            .find(|k| center + *k as f64 * step <= hi_bound + 1e-12)
            .unwrap_or(0);
        AngleAxis {
            start_deg: center + first as f64 * step,
            step_deg: step,
            len: (last - first) as usize + 1,
        }
    }
}

/// Pseudo-spectrum sampled along one angle axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid1D {
    pub axis: AngleAxis,
    pub values: Vec<f64>,
}

impl SpectrumGrid1D {
    pub fn start(&self) -> Angle {
        self.axis.start()
    }

    pub fn stop(&self) -> Angle {
        self.axis.stop()
    }

    pub fn step(&self) -> f64 {
        self.axis.step()
    }

    /// Index of the largest sample; the smallest index wins ties.
    pub fn peak_index(&self) -> usize {
        argmax(&self.values)
    }
}

/// Pseudo-spectrum over an (elevation, azimuth) grid; rows follow `phi_axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid2D {
    pub phi_axis: AngleAxis,
    pub psi_axis: AngleAxis,
    pub values: DMatrix<f64>,
}

impl SpectrumGrid2D {
    /// `(phi, psi)` index of the largest sample; smallest phi, then smallest psi, wins ties.
    pub fn peak_index(&self) -> (usize, usize) {
        argmax2(&self.values)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn argmax2(values: &DMatrix<f64>) -> (usize, usize) {
    let mut best = (0, 0);
    for i in 0..values.nrows() {
        for j in 0..values.ncols() {
            if values[(i, j)] > values[best] {
                best = (i, j);
            }
        }
    }
    best
}

pub(crate) fn spectrum_from_cost(cost: f64) -> f64 {
    1.0 / cost.max(COST_FLOOR)
}

/// Vertex offset, in grid steps, of the parabola through three equally spaced
/// cost samples centered on a local minimum. Returns 0 when the samples are not convex.
pub(crate) fn parabolic_offset(left: f64, center: f64, right: f64) -> f64 {
    let curvature = left - 2.0 * center + right;
    if !(curvature > 0.0) {
        return 0.0;
    }
    (0.5 * (left - right) / curvature).clamp(-1.0, 1.0)
}

/// Newton step, in grid steps, of the quadratic through the 3x3 cost neighborhood
/// `f[row][col]` centered on a local minimum. Falls back to independent
/// per-axis parabolas when the fitted Hessian is not positive definite.
pub(crate) fn quadratic_offset_2d(f: &[[f64; 3]; 3]) -> (f64, f64) {
    let gx = 0.5 * (f[2][1] - f[0][1]);
    let gy = 0.5 * (f[1][2] - f[1][0]);
    let hxx = f[2][1] - 2.0 * f[1][1] + f[0][1];
    let hyy = f[1][2] - 2.0 * f[1][1] + f[1][0];
    let hxy = 0.25 * (f[2][2] - f[2][0] - f[0][2] + f[0][0]);
    let det = hxx * hyy - hxy * hxy;
    if hxx > 0.0 && det > 0.0 {
        let dx = -(hyy * gx - hxy * gy) / det;
        let dy = -(hxx * gy - hxy * gx) / det;
        if dx.abs() <= 1.0 && dy.abs() <= 1.0 {
            return (dx, dy);
        }
    }
    (
        parabolic_offset(f[0][1], f[1][1], f[2][1]),
        parabolic_offset(f[1][0], f[1][1], f[1][2]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_lengths_and_endpoints() {
        let theta = AngleAxis::from_degrees(-90.0, 90.0, 0.1).unwrap();
        assert_eq!(theta.len(), 1801);
        assert!((theta.degrees_at(1300) - 40.0).abs() < 1e-9);
        let ris = AngleAxis::from_degrees(0.0, 90.0, 0.5).unwrap();
        assert_eq!(ris.len(), 181);
        assert!((ris.stop().degrees() - 90.0).abs() < 1e-9);
        assert!(AngleAxis::from_degrees(0.0, 1.0, 0.0).is_err());
        assert!(AngleAxis::from_degrees(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn window_is_clipped_and_centered() {
        let ris = AngleAxis::from_degrees(0.0, 90.0, 0.5).unwrap();
        let w = ris.window(50.0, 1.0, 0.02);
        assert_eq!(w.len(), 101);
        assert_eq!(w.degrees_at(50), 50.0);
        let edge = ris.window(0.5, 1.0, 0.02);
        assert!(edge.degrees_at(0) >= -1e-12);
        assert!((edge.degrees_at(edge.len() - 1) - 1.5).abs() < 1e-9);
    }

    #[test]
    fn ties_pick_the_smallest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), 1);
        let m = DMatrix::from_row_slice(2, 2, &[5.0, 1.0, 5.0, 5.0]);
        assert_eq!(argmax2(&m), (0, 0));
    }

    #[test]
    fn parabola_recovers_vertex() {
        let f = |x: f64| 3.0 * (x - 0.3).powi(2) + 1.0;
        let d = parabolic_offset(f(-1.0), f(0.0), f(1.0));
        assert!((d - 0.3).abs() < 1e-12);
        assert_eq!(parabolic_offset(1.0, 2.0, 1.0), 0.0);
    }

    #[test]
    fn quadratic_2d_recovers_coupled_vertex() {
        let (x0, y0) = (0.2, -0.35);
        let f = |x: f64, y: f64| {
            let (dx, dy) = (x - x0, y - y0);
            2.0 * dx * dx + 1.2 * dx * dy + 1.0 * dy * dy + 0.5
        };
        let mut s = [[0.0; 3]; 3];
        for (i, row) in s.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(i as f64 - 1.0, j as f64 - 1.0);
            }
        }
        let (dx, dy) = quadratic_offset_2d(&s);
        assert!((dx - x0).abs() < 1e-12 && (dy - y0).abs() < 1e-12);
    }
}
