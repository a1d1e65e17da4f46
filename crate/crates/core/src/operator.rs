//! Unitary and Hermitian operators and their canonical constructors.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::{check_dims, ComplexMatrix};
use crate::state::DensityMatrix;
use crate::tolerance::{HERMITIAN_TOL, UNITARY_TOL};

/// Square matrix with `U^dag U = I` to within [`UNITARY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    mat: ComplexMatrix,
}

impl UnitaryOperator {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let residual = mat.unitarity_residual();
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { mat })
    }

    /// Diagonal unitary `diag(e^{i phases})`.
    pub fn diagonal_phases(phases: &[f64]) -> Self {
        let diag: Vec<Complex64> = phases
            .iter()
            .map(|&p| Complex64::from_polar(1.0, p))
            .collect();
        Self {
            mat: ComplexMatrix::from_diagonal(&diag),
        }
    }

    /// Permutation matrix sending basis state `j` to `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(format!(
                    "{perm:?} is not a permutation"
                )));
            }
        }
        let mut m = DMatrix::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            m[(i, j)] = Complex64::new(1.0, 0.0);
        }
        Ok(Self {
            mat: ComplexMatrix::from_dmatrix_unchecked(m),
        })
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

    /// Product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Self::new(self.mat.mul(&other.mat)?)
    }

    /// `U psi` for a raw amplitude vector.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let m = self.mat.as_dmatrix();
        let n = self.dim();
        debug_assert_eq!(amps.len(), n);
        (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)] * amps[j]).sum())
            .collect()
    }
}

/// Hermitian matrix, the generator of `U(t) = exp(-iHt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianOperator {
    mat: ComplexMatrix,
}

impl HamiltonianOperator {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let residual = mat.hermitian_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self { mat })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::from_dmatrix_unchecked(DMatrix::zeros(dim, dim)),
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            mat: ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2"),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// `exp(-iHt)` via the Hermitian eigendecomposition; diagonal generators
    /// are exponentiated entrywise.
    pub fn evolution(&self, t: f64) -> Result<UnitaryOperator> {
        let n = self.dim();
        if self.mat.is_diagonal() {
            let phases: Vec<f64> = (0..n).map(|i| -self.mat.get(i, i).re * t).collect();
            return Ok(UnitaryOperator::diagonal_phases(&phases));
        }
        let eig = self.mat.as_dmatrix().clone().symmetric_eigen();
        let v = &eig.eigenvectors;
        let phases = DVector::from_iterator(
            n,
            eig.eigenvalues
                .iter()
                .map(|&l| Complex64::from_polar(1.0, -l * t)),
        );
        let u = v * DMatrix::from_diagonal(&phases) * v.adjoint();
        UnitaryOperator::new(ComplexMatrix::from_dmatrix(u)?)
    }
}

/// `U rho U^dag`.
pub fn conjugate_by_unitary(rho: &DensityMatrix, u: &UnitaryOperator) -> Result<DensityMatrix> {
    check_dims(u.dim(), rho.dim())?;
    let um = u.matrix().as_dmatrix();
    let out = um * rho.matrix().as_dmatrix() * um.adjoint();
    Ok(DensityMatrix::from_trusted(
        ComplexMatrix::from_dmatrix_unchecked(out),
    ))
}

pub fn identity_unitary(dim: usize) -> UnitaryOperator {
    UnitaryOperator {
        mat: ComplexMatrix::identity(dim),
    }
}

/// Rotation by `theta` about the x axis in three dimensions: identity on
/// the first basis state, `[[cos, -sin], [sin, cos]]` on the other two.
pub fn rotation_x(theta: f64) -> UnitaryOperator {
    let (s, c) = theta.sin_cos();
    let mat = ComplexMatrix::from_real(3, &[1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c]).expect("3x3");
    UnitaryOperator { mat }
}

/// Discrete Fourier matrix `F_{aj} = exp(2 pi i a j / N) / sqrt(N)`.
pub fn fourier_unitary(dim: usize) -> Result<UnitaryOperator> {
    if dim == 0 {
        return Err(Error::InvalidDimension {
            dim,
            reason: "Fourier matrix needs N >= 1",
        });
    }
    let scale = 1.0 / (dim as f64).sqrt();
    let m = DMatrix::from_fn(dim, dim, |a, j| {
        // reduce a*j mod N first so the angle stays in [0, 2 pi)
        let k = (a * j) % dim;
        Complex64::from_polar(scale, TAU * k as f64 / dim as f64)
    });
    UnitaryOperator::new(ComplexMatrix::from_dmatrix_unchecked(m))
}

/// Complex Ginibre matrix: i.i.d. entries `(x + iy)/sqrt(2)` with x, y standard normal.
pub(crate) fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * scale, im * scale)
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn haar_random_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryOperator {
    assert!(dim >= 1, "Haar sampling needs N >= 1");
    let z = ginibre(dim, rng);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    UnitaryOperator {
        mat: ComplexMatrix::from_dmatrix_unchecked(q),
    }
}

/// Deterministic Haar sample for a given seed.
pub fn haar_random_unitary(dim: usize, seed: u64) -> UnitaryOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_random_unitary_with(dim, &mut rng)
}
