//! Pure states, density matrices, dephasing and von Neumann entropy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::operator::ginibre;
use crate::tolerance::{EIGEN_ZERO, HERMITIAN_TOL, NORM_TOL, PHASE_TOL, PSD_TOL, TRACE_TOL};

/// Unit-norm state vector in canonical global phase: the first amplitude
/// with modulus above [`PHASE_TOL`] is real and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Validates the norm and fixes the global phase.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDimension {
                dim: 0,
                reason: "state must have at least one amplitude",
            });
        }
        if let Some(k) = amps
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite { row: k, col: 0 });
        }
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        let residual = (norm_sqr - 1.0).abs();
        if residual > NORM_TOL {
            return Err(Error::NotNormalized { residual });
        }
        Ok(Self {
            amps: canonical_phase(amps),
        })
    }

    /// Rescales to unit norm, then canonicalizes.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Self::new(amps.into_iter().map(|z| z / norm).collect())
    }

    /// Real amplitudes, rescaled to unit norm.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Basis state |k> (zero-based).
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// All amplitudes equal to 1/sqrt(N).
    pub fn maximally_coherent(dim: usize) -> Self {
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { amps: vec![a; dim] }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Built from amplitudes already known to be normalized and canonical.
    pub(crate) fn from_canonical_unchecked(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }
}

pub(crate) fn canonical_phase(mut amps: Vec<Complex64>) -> Vec<Complex64> {
    if let Some(k) = amps.iter().position(|z| z.norm() > PHASE_TOL) {
        let modulus = amps[k].norm();
        let phase = amps[k].conj() / modulus;
        for z in amps.iter_mut() {
            *z *= phase;
        }
        amps[k] = Complex64::new(modulus, 0.0);
    }
    amps
}

/// Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let residual = mat.hermitian_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        let residual = (mat.trace() - Complex64::new(1.0, 0.0)).norm();
        if residual > TRACE_TOL {
            return Err(Error::TraceNotOne { residual });
        }
        let min_eigenvalue = hermitian_eigenvalues(&mat)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { mat })
    }

    /// Diagonal density matrix from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let diag: Vec<Complex64> = probs.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        Self::new(ComplexMatrix::from_diagonal(&diag))
    }

    /// Convex combination `lambda * a + (1 - lambda) * b`.
    pub fn mix(a: &Self, b: &Self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "mixing weight {lambda} outside [0, 1]"
            )));
        }
        crate::matrix::check_dims(a.dim(), b.dim())?;
        let m = a.mat.as_dmatrix() * Complex64::new(lambda, 0.0)
            + b.mat.as_dmatrix() * Complex64::new(1.0 - lambda, 0.0);
        Ok(Self::from_trusted(ComplexMatrix::from_dmatrix_unchecked(m)))
    }

    /// Skips validation; callers guarantee the invariants hold by construction.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat.get(row, col)
    }

    /// Real diagonal (the populations).
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat.get(i, i).re).collect()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    pub fn purity(&self) -> f64 {
        let m = self.mat.as_dmatrix();
        (m * m).trace().re
    }
}

pub(crate) fn hermitian_eigenvalues(mat: &ComplexMatrix) -> Vec<f64> {
    if mat.is_diagonal() {
        return (0..mat.dim()).map(|i| mat.get(i, i).re).collect();
    }
    mat.as_dmatrix()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect()
}

/// Rank-one projector |psi><psi|.
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    let v = DVector::from_column_slice(psi.amplitudes());
    let m = &v * v.adjoint();
    DensityMatrix::from_trusted(ComplexMatrix::from_dmatrix_unchecked(m))
}

/// Zeroes every off-diagonal entry.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    let diag: Vec<Complex64> = rho
        .populations()
        .into_iter()
        .map(|p| Complex64::new(p, 0.0))
        .collect();
    DensityMatrix::from_trusted(ComplexMatrix::from_diagonal(&diag))
}

/// -sum p ln p with 0 ln 0 = 0; entries below [`EIGEN_ZERO`] count as zero.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p >= EIGEN_ZERO)
        .map(|&p| -p * p.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.eigenvalues())
}

/// Normalized `A A^dag` with `A` complex Ginibre.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let a = ginibre(dim, rng);
    let m: DMatrix<Complex64> = &a * a.adjoint();
    let tr = m.trace().re;
    let mut m = m / Complex64::new(tr, 0.0);
    // enforce exact Hermiticity
    for i in 0..dim {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..dim {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    DensityMatrix::from_trusted(ComplexMatrix::from_dmatrix_unchecked(m))
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    let g = ginibre(dim, rng);
    let amps: Vec<Complex64> = g.column(0).iter().copied().collect();
    PureState::normalized(amps).expect("Gaussian vector is non-zero with probability one")
}
