use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Singular values below this fraction of the largest are treated as zero
/// when forming the row-space basis.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceRole {
    /// Orthogonal complement of the dominant direction (UE array).
    Noise,
    /// Row space of the stacked two-sounding constraints (RIS).
    RowSpace,
}

/// Matrix with orthonormal columns spanning a subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    pub vectors: CMatrix,
    pub role: SubspaceRole,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// `‖B^H a‖²`.
    pub fn projection_norm_sq(&self, a: &crate::CVector) -> f64 {
        (self.vectors.adjoint() * a).norm_squared()
    }
}

/// All `nrows` left singular vectors of `m`, with their singular values,
/// ordered by decreasing singular value. Wide matrices are decomposed directly;
/// tall ones through `m m^H` so the complement is never truncated away.
pub(crate) fn left_singular_full(m: &CMatrix) -> (CMatrix, Vec<f64>) {
    let n = m.nrows();
    let (u, sigma) = if m.ncols() >= n {
        let svd = m.clone().svd(true, false);
        (svd.u.expect("requested U"), svd.singular_values.as_slice().to_vec())
    } else {
        let gram = m * m.adjoint();
        let svd = gram.svd(true, false);
        let sigma = svd.singular_values.iter().map(|s| s.max(0.0).sqrt()).collect();
        (svd.u.expect("requested U"), sigma)
    };
    sort_columns(u, sigma)
}

/// Thin left singular vectors of `m` (`min(rows, cols)` of them), decreasing order.
pub(crate) fn left_singular_thin(m: &CMatrix) -> (CMatrix, Vec<f64>) {
    let svd = m.clone().svd(true, false);
    sort_columns(
        svd.u.expect("requested U"),
        svd.singular_values.as_slice().to_vec(),
    )
}

fn sort_columns(u: CMatrix, sigma: Vec<f64>) -> (CMatrix, Vec<f64>) {
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));
    let cols: Vec<_> = order.iter().map(|&k| u.column(k).into_owned()).collect();
    let sorted = CMatrix::from_columns(&cols);
    (sorted, order.iter().map(|&k| sigma[k]).collect())
}

/// Noise subspace of `g`: every left singular vector except the dominant one.
pub fn noise_subspace(g: &CMatrix) -> Result<SubspaceBasis> {
    if g.nrows() < 2 {
        return Err(Error::EstimationFailure(
            "a single-antenna array has no noise subspace",
        ));
    }
    if g.iter().all(|v| *v == C64::new(0.0, 0.0)) {
        return Err(Error::EstimationFailure("observation matrix is all zero"));
    }
    let (u, sigma) = left_singular_full(g);
    if !(sigma[0] > 0.0) || !sigma[0].is_finite() {
        return Err(Error::EstimationFailure("observation matrix is degenerate"));
    }
    Ok(SubspaceBasis {
        vectors: u.columns(1, u.ncols() - 1).into_owned(),
        role: SubspaceRole::Noise,
    })
}

/// Orthonormal basis of the row space of `a`, i.e. of the column space of `a^H`,
/// keeping singular values above `RANK_TOL * σ_max`.
pub fn row_space_basis(a: &CMatrix) -> Result<SubspaceBasis> {
    let (u, sigma) = left_singular_thin(&a.adjoint());
    let max = sigma.first().copied().unwrap_or(0.0);
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::EstimationFailure("constraint matrix is all zero"));
    }
    let rank = sigma.iter().take_while(|s| **s > RANK_TOL * max).count();
    Ok(SubspaceBasis {
        vectors: u.columns(0, rank).into_owned(),
        role: SubspaceRole::RowSpace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use crate::sounding::complex_gaussian;

    fn random(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = trial_rng(seed, 0, 0);
        CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(&mut rng))
    }

    fn assert_orthonormal(b: &SubspaceBasis) {
        let gram = b.vectors.adjoint() * &b.vectors;
        let eye = CMatrix::identity(b.dim(), b.dim());
        assert!((gram - eye).norm() < 1e-10);
    }

    #[test]
    fn noise_subspace_is_orthogonal_to_rank_one_direction() {
        let v = random(8, 1, 1);
        let w = random(1, 60, 2);
        let g = &v * &w;
        let b = noise_subspace(&g).unwrap();
        assert_eq!(b.dim(), 7);
        assert_orthonormal(&b);
        assert!(b.projection_norm_sq(&v.column(0).into_owned()) < 1e-20 * v.norm_squared());
    }

    #[test]
    fn noise_subspace_from_tall_observation_is_complete() {
        let v = random(8, 1, 3);
        let g = &v * random(1, 4, 4);
        let b = noise_subspace(&g).unwrap();
        assert_eq!(b.dim(), 7);
        assert_orthonormal(&b);
    }

    #[test]
    fn zero_observation_fails() {
        assert!(matches!(
            noise_subspace(&CMatrix::zeros(8, 12)),
            Err(Error::EstimationFailure(_))
        ));
        assert!(row_space_basis(&CMatrix::zeros(3, 16)).is_err());
    }

    #[test]
    fn row_space_drops_null_directions() {
        let a = random(2, 16, 5);
        let stacked = CMatrix::from_rows(&[
            a.row(0).into_owned(),
            a.row(1).into_owned(),
            (a.row(0) * C64::new(2.0, -1.0)).into_owned(),
        ]);
        let b = row_space_basis(&stacked).unwrap();
        assert_eq!(b.dim(), 2);
        assert_orthonormal(&b);
        // every row lies in the span
        for r in 0..3 {
            let row = stacked.row(r).adjoint();
            let proj = b.projection_norm_sq(&row);
            assert!((proj - row.norm_squared()).abs() < 1e-9 * row.norm_squared());
        }
    }
}
