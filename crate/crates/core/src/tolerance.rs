//! Library-wide numerical tolerances.

/// Hermiticity: max |A_ij - conj(A_ji)|.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// |Tr rho - 1|.
pub const TRACE_TOL: f64 = 1e-10;
/// Minimum admissible eigenvalue of a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Max entry deviation of U^dag U from the identity.
pub const UNITARY_TOL: f64 = 1e-10;
/// |sum |a_i|^2 - 1| for pure states.
pub const NORM_TOL: f64 = 1e-12;
/// Amplitudes with modulus at or below this are skipped by phase canonicalization.
pub const PHASE_TOL: f64 = 1e-12;
/// Eigenvalues below this contribute nothing to entropies.
pub const EIGEN_ZERO: f64 = 1e-12;
/// Relative-entropy values in (-NEG_ZERO_TOL, 0) are reported as zero.
pub const NEG_ZERO_TOL: f64 = 1e-10;
/// Agreement required between an estimate and the re-evaluated gain of its achiever.
pub const ACHIEVER_TOL: f64 = 1e-8;
