//! Coherence measures and the coherence gain of a unitary on one input state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::check_dims;
use crate::operator::{conjugate_by_unitary, UnitaryOperator};
use crate::state::{dephase, shannon_entropy, von_neumann_entropy, DensityMatrix, PureState};
use crate::tolerance::NEG_ZERO_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoherenceMeasureId {
    /// Sum of moduli of the off-diagonal entries.
    L1,
    /// `S(dephase(rho)) - S(rho)`, in nats.
    RelEnt,
}

impl CoherenceMeasureId {
    pub const ALL: [Self; 2] = [Self::L1, Self::RelEnt];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::L1 => "l1",
            Self::RelEnt => "relent",
        }
    }

    /// Largest value the measure takes in dimension `dim`.
    pub fn upper_bound(self, dim: usize) -> f64 {
        match self {
            Self::L1 => dim as f64 - 1.0,
            Self::RelEnt => (dim as f64).ln(),
        }
    }

    pub fn of(self, rho: &DensityMatrix) -> f64 {
        match self {
            Self::L1 => c_l1(rho),
            Self::RelEnt => c_rel_ent(rho),
        }
    }
}

impl fmt::Display for CoherenceMeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoherenceMeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Self::L1),
            "relent" => Ok(Self::RelEnt),
            other => Err(Error::InvalidParameter(format!(
                "unknown measure `{other}` (expected l1 or relent)"
            ))),
        }
    }
}

/// l1-norm of coherence: `sum_{i != j} |rho_ij|`.
pub fn c_l1(rho: &DensityMatrix) -> f64 {
    let n = rho.dim();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += rho.get(i, j).norm();
            }
        }
    }
    total
}

/// Relative entropy of coherence in nats.
pub fn c_rel_ent(rho: &DensityMatrix) -> f64 {
    let value = von_neumann_entropy(&dephase(rho)) - von_neumann_entropy(rho);
    if value < 0.0 && value > -NEG_ZERO_TOL {
        0.0
    } else {
        value
    }
}

/// `C_m(U rho U^dag) - C_m(rho)`; negative when the unitary destroys coherence.
pub fn gain(u: &UnitaryOperator, rho: &DensityMatrix, m: CoherenceMeasureId) -> Result<f64> {
    let out = conjugate_by_unitary(rho, u)?;
    Ok(m.of(&out) - m.of(rho))
}

/// Coherence of the projector onto `amps`, computed from the amplitudes
/// alone. Matches `m.of(&density_from_pure(..))` up to rounding.
fn pure_coherence(amps: &[num_complex::Complex64], m: CoherenceMeasureId) -> f64 {
    match m {
        CoherenceMeasureId::L1 => {
            // sum_{i != j} |a_i||a_j| = (sum |a_i|)^2 - sum |a_i|^2
            let moduli_sum: f64 = amps.iter().map(|z| z.norm()).sum();
            let sq_sum: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
            (moduli_sum * moduli_sum - sq_sum).max(0.0)
        }
        CoherenceMeasureId::RelEnt => {
            let probs: Vec<f64> = amps.iter().map(|z| z.norm_sqr()).collect();
            shannon_entropy(&probs)
        }
    }
}

/// Gain on the pure input `psi`, without forming density matrices.
///
/// This is the objective evaluated inside the optimizers; reported results
/// are always re-checked with [`gain`].
pub fn gain_pure(u: &UnitaryOperator, psi: &PureState, m: CoherenceMeasureId) -> Result<f64> {
    check_dims(u.dim(), psi.dim())?;
    Ok(gain_amplitudes(u, psi.amplitudes(), m))
}

/// Gain on an arbitrary unit vector; no phase convention needed.
pub(crate) fn gain_amplitudes(
    u: &UnitaryOperator,
    amps: &[num_complex::Complex64],
    m: CoherenceMeasureId,
) -> f64 {
    let out = u.apply(amps);
    pure_coherence(&out, m) - pure_coherence(amps, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{haar_random_unitary, identity_unitary, rotation_x};
    use crate::state::{density_from_pure, random_density_matrix};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn l1_examples() {
        let rho = DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(c_l1(&rho), 0.0);
        for n in 2..=6 {
            let rho = density_from_pure(&PureState::maximally_coherent(n));
            assert!((c_l1(&rho) - (n as f64 - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn l1_of_rotated_witness() {
        let (c1, c3) = (0.3, 0.91f64.sqrt());
        let psi = PureState::from_real(&[c1, 0.0, c3]).unwrap();
        let rho = density_from_pure(&psi);
        let out = conjugate_by_unitary(&rho, &rotation_x(FRAC_PI_4)).unwrap();
        // off-diagonals: four of modulus c1 c3 / sqrt2, two of c3^2 / 2
        let expected = 4.0 * c1 * c3 / 2f64.sqrt() + c3 * c3;
        assert!((c_l1(&out) - expected).abs() < 1e-14);
        assert!((c_l1(&rho) - 2.0 * c1 * c3).abs() < 1e-15);
    }

    #[test]
    fn relent_examples() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.25, 0.25]).unwrap();
        assert_eq!(c_rel_ent(&rho), 0.0);
        let plus = density_from_pure(&PureState::from_real(&[1.0, 1.0]).unwrap());
        assert!((c_rel_ent(&plus) - 2f64.ln()).abs() < 1e-12);
        let q3 = 0.12533f64;
        let phi = PureState::from_real(&[0.0, (1.0 - q3 * q3).sqrt(), q3]).unwrap();
        let value = c_rel_ent(&density_from_pure(&phi));
        // scalar oracle: -(0.984292 ln 0.984292 + 0.015708 ln 0.015708)
        assert!((value - 0.080819).abs() < 1e-4);
        assert!((value - 0.080_826_875_412_395_43).abs() < 1e-12);
    }

    #[test]
    fn gain_witnesses() {
        let psi = PureState::from_real(&[0.3, 0.0, 0.91f64.sqrt()]).unwrap();
        let g = gain(
            &rotation_x(FRAC_PI_4),
            &density_from_pure(&psi),
            CoherenceMeasureId::L1,
        )
        .unwrap();
        assert!((g - 1.1471).abs() < 5e-5, "{g}");

        let q3 = 0.12533f64;
        let phi = PureState::from_real(&[0.0, (1.0 - q3 * q3).sqrt(), q3]).unwrap();
        let g = gain(
            &rotation_x(FRAC_PI_8),
            &density_from_pure(&phi),
            CoherenceMeasureId::RelEnt,
        )
        .unwrap();
        assert!((g - 0.47648).abs() < 5e-5, "{g}");
    }

    #[test]
    fn diagonal_unitary_gives_zero_gain() {
        let u = UnitaryOperator::diagonal_phases(&[0.1, -2.0, 3.0]);
        let rho = DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        for m in CoherenceMeasureId::ALL {
            assert_eq!(gain(&u, &rho, m).unwrap(), 0.0);
        }
    }

    #[test]
    fn gain_rejects_dimension_mismatch() {
        let rho = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        assert!(gain(&identity_unitary(3), &rho, CoherenceMeasureId::L1).is_err());
        assert!(gain_pure(
            &identity_unitary(3),
            &PureState::basis(2, 0),
            CoherenceMeasureId::L1
        )
        .is_err());
    }

    #[test]
    fn pure_fast_path_matches_density_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 2..=5 {
            for s in 0..30 {
                let u = haar_random_unitary(n, s);
                let psi = crate::state::random_pure_state(n, &mut rng);
                for m in CoherenceMeasureId::ALL {
                    let fast = gain_pure(&u, &psi, m).unwrap();
                    let slow = gain(&u, &density_from_pure(&psi), m).unwrap();
                    assert!((fast - slow).abs() < 1e-10, "{m} {fast} {slow}");
                }
            }
        }
    }

    #[test]
    fn relent_never_reports_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let rho = random_density_matrix(3, &mut rng);
            assert!(c_rel_ent(&rho) >= 0.0);
        }
        let tiny = Complex64::new(1e-12, 0.0);
        let m = crate::matrix::ComplexMatrix::from_row_major(
            2,
            &[
                Complex64::new(1.0, 0.0),
                tiny,
                tiny,
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let rho = DensityMatrix::new(m).unwrap();
        assert!(c_rel_ent(&rho) >= 0.0);
    }
}
