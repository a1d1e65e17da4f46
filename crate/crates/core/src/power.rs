//! Coherence power of unitaries and Hamiltonian generators.
//!
//! Every estimate carries the pure input state that achieves it. Before an
//! estimate is returned the achiever is pushed through the full
//! density-matrix path of [`crate::measures::gain`], and a disagreement
//! beyond [`ACHIEVER_TOL`] is an error.
//!
//! [`global_power`] is a multistart heuristic over pure states, not a
//! certified global maximum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{gain, gain_pure, CoherenceMeasureId};
use crate::operator::{HamiltonianOperator, UnitaryOperator};
use crate::optim::{
    decode, encode, local_maximize, restart_rng, GeneratorConfig, LocalResult, OptimizerConfig,
    StateParams,
};
use crate::state::{density_from_pure, random_density_matrix, shannon_entropy, PureState};
use crate::tolerance::ACHIEVER_TOL;

/// Number of random mixed states whose gain is recorded as a sanity check
/// on the pure-state search.
pub const MIXED_STATE_CHECKS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    IncoherentScan,
    GlobalOptimization,
    BruteForce,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ClosedForm => "closed_form",
            Self::IncoherentScan => "incoherent_scan",
            Self::GlobalOptimization => "global_optimization",
            Self::BruteForce => "brute_force",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Local searches started (zero for closed forms and grid scans).
    pub restarts: usize,
    pub best_restart: Option<usize>,
    /// Total optimizer iterations, or grid points for a grid scan.
    pub iterations: usize,
    /// At least one restart met its tolerance.
    pub converged: bool,
    /// Best gain seen on the random mixed-state sample, when taken.
    pub mixed_state_best: Option<f64>,
}

impl Diagnostics {
    fn exact() -> Self {
        Self {
            restarts: 0,
            best_restart: None,
            iterations: 0,
            converged: true,
            mixed_state_best: None,
        }
    }
}

/// Per-step record of a generator-power limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorTrace {
    pub dt_ladder: Vec<f64>,
    /// `global_power(exp(-iH dt)) / dt` per ladder step.
    pub rates: Vec<f64>,
    /// Richardson extrapolation of each consecutive pair of rates.
    pub extrapolated: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerEstimate {
    pub value: f64,
    pub measure: CoherenceMeasureId,
    pub achiever: PureState,
    pub method: Method,
    pub diagnostics: Diagnostics,
    /// Present only for generator power; `value` is then a rate and the
    /// achiever belongs to the smallest time step.
    pub generator: Option<GeneratorTrace>,
}

pub(crate) fn finalize_estimate(
    u: &UnitaryOperator,
    measure: CoherenceMeasureId,
    value: f64,
    achiever: PureState,
    method: Method,
    diagnostics: Diagnostics,
) -> Result<PowerEstimate> {
    let reevaluated = gain(u, &density_from_pure(&achiever), measure)?;
    if !((reevaluated - value).abs() <= ACHIEVER_TOL) {
        return Err(Error::InconsistentEstimate {
            reported: value,
            reevaluated,
        });
    }
    Ok(PowerEstimate {
        value,
        measure,
        achiever,
        method,
        diagnostics,
        generator: None,
    })
}

/// Max over `items` by value; the lowest index wins ties.
fn argmax(values: impl IntoIterator<Item = f64>) -> Option<(usize, f64)> {
    values
        .into_iter()
        .enumerate()
        .fold(None, |best, (i, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((i, v)),
        })
}

/// `max_j (sum_i |U_ij|)^2 - 1`: the l1 coherence of `U|j>`, maximized over columns.
fn column_l1_scan(u: &UnitaryOperator) -> (usize, f64) {
    let n = u.dim();
    let values = (0..n).map(|j| {
        let s: f64 = (0..n).map(|i| u.get(i, j).norm()).sum();
        s * s - 1.0
    });
    argmax(values).expect("dimension is positive")
}

/// Closed form for qubits, where the maximum sits on a basis state.
pub fn qubit_l1_power(u: &UnitaryOperator) -> Result<PowerEstimate> {
    if u.dim() != 2 {
        return Err(Error::InvalidDimension {
            dim: u.dim(),
            reason: "qubit closed form needs N = 2",
        });
    }
    let (j, value) = column_l1_scan(u);
    finalize_estimate(
        u,
        CoherenceMeasureId::L1,
        value,
        PureState::basis(2, j),
        Method::ClosedForm,
        Diagnostics::exact(),
    )
}

/// l1 power restricted to incoherent inputs.
pub fn incoherent_l1_power(u: &UnitaryOperator) -> Result<PowerEstimate> {
    let (j, value) = column_l1_scan(u);
    finalize_estimate(
        u,
        CoherenceMeasureId::L1,
        value,
        PureState::basis(u.dim(), j),
        Method::IncoherentScan,
        Diagnostics::exact(),
    )
}

/// Relative-entropy power restricted to incoherent inputs: the Shannon
/// entropy of `|U_ij|^2` down column `j`, maximized over `j`. Column `j`
/// holds the populations of `U|j><j|U^dag`.
pub fn incoherent_relent_power(u: &UnitaryOperator) -> Result<PowerEstimate> {
    let n = u.dim();
    let values = (0..n).map(|j| {
        let probs: Vec<f64> = (0..n).map(|i| u.get(i, j).norm_sqr()).collect();
        shannon_entropy(&probs)
    });
    let (j, value) = argmax(values).expect("dimension is positive");
    finalize_estimate(
        u,
        CoherenceMeasureId::RelEnt,
        value,
        PureState::basis(n, j),
        Method::IncoherentScan,
        Diagnostics::exact(),
    )
}

/// Start point of restart `index`: basis states first, then the maximally
/// coherent state, then uniform draws from the parameter box.
fn restart_start(dim: usize, index: usize, seed: u64) -> StateParams {
    if index < dim {
        encode(&PureState::basis(dim, index))
    } else if index == dim {
        encode(&PureState::maximally_coherent(dim))
    } else {
        StateParams::random(dim, &mut restart_rng(seed, index as u64))
    }
}

/// Multistart maximization of the gain over pure input states.
///
/// Restart `k` draws from its own RNG stream, so the result does not depend
/// on how restarts are scheduled across threads.
pub fn global_power(
    u: &UnitaryOperator,
    m: CoherenceMeasureId,
    cfg: &OptimizerConfig,
) -> Result<PowerEstimate> {
    let dim = u.dim();
    if dim < 2 {
        return Err(Error::InvalidDimension {
            dim,
            reason: "global optimization needs N >= 2",
        });
    }
    cfg.validate()?;
    let restarts = cfg.restarts.max(dim + 1);
    let objective = |p: &StateParams| {
        gain_pure(u, &decode(p), m).expect("parameters match the unitary's dimension")
    };

    let results: Vec<LocalResult> = (0..restarts)
        .into_par_iter()
        .map(|k| local_maximize(objective, &restart_start(dim, k, cfg.seed), cfg))
        .collect();

    let (best_index, best_value) =
        argmax(results.iter().map(|r| r.value)).expect("at least one restart");
    let converged = results.iter().any(|r| r.diagnostics.converged);
    let iterations = results.iter().map(|r| r.diagnostics.iterations).sum();

    let mut rng = restart_rng(cfg.seed, u64::MAX);
    let mixed_best = (0..MIXED_STATE_CHECKS)
        .map(|_| gain(u, &random_density_matrix(dim, &mut rng), m))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);

    let estimate = finalize_estimate(
        u,
        m,
        best_value,
        decode(&results[best_index].params),
        Method::GlobalOptimization,
        Diagnostics {
            restarts,
            best_restart: Some(best_index),
            iterations,
            converged,
            mixed_state_best: Some(mixed_best),
        },
    )?;
    if !converged {
        return Err(Error::NotConverged {
            partial: Box::new(estimate),
        });
    }
    Ok(estimate)
}

/// Rate of coherence generation by `exp(-iHt)` as `t -> 0`.
///
/// Each ladder step gives `g(dt) = global_power(exp(-iH dt)) / dt`;
/// consecutive pairs are extrapolated linearly to `dt = 0` and the last
/// extrapolation is reported. Consecutive extrapolations that disagree by
/// more than `limit_tol` are an error.
pub fn generator_power(
    h: &HamiltonianOperator,
    m: CoherenceMeasureId,
    cfg: &GeneratorConfig,
) -> Result<PowerEstimate> {
    cfg.validate()?;
    let mut rates = Vec::with_capacity(cfg.dt_ladder.len());
    let mut last = None;
    for &dt in &cfg.dt_ladder {
        let u = h.evolution(dt)?;
        let est = global_power(&u, m, &cfg.inner)?;
        rates.push(est.value / dt);
        last = Some(est);
    }
    let extrapolated: Vec<f64> = cfg
        .dt_ladder
        .windows(2)
        .zip(rates.windows(2))
        .map(|(h, g)| (h[0] * g[1] - h[1] * g[0]) / (h[0] - h[1]))
        .collect();
    if extrapolated
        .windows(2)
        .any(|w| !((w[1] - w[0]).abs() <= cfg.limit_tol))
    {
        return Err(Error::LimitNotConverged {
            estimates: extrapolated,
        });
    }
    let mut est = last.expect("ladder is non-empty");
    est.value = *extrapolated.last().expect("ladder has at least two steps");
    est.generator = Some(GeneratorTrace {
        dt_ladder: cfg.dt_ladder.clone(),
        rates,
        extrapolated,
    });
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;
    use crate::operator::{fourier_unitary, haar_random_unitary, identity_unitary, rotation_x};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

    fn cfg(seed: u64) -> OptimizerConfig {
        OptimizerConfig::with_seed(seed)
    }

    #[test]
    fn qubit_closed_form_examples() {
        assert_eq!(qubit_l1_power(&identity_unitary(2)).unwrap().value, 0.0);
        let s = FRAC_1_SQRT_2;
        let hadamard =
            UnitaryOperator::new(ComplexMatrix::from_real(2, &[s, s, s, -s]).unwrap()).unwrap();
        let est = qubit_l1_power(&hadamard).unwrap();
        assert!((est.value - 1.0).abs() < 1e-15);
        assert_eq!(est.method, Method::ClosedForm);
        assert_eq!(est.achiever, PureState::basis(2, 0));
        assert!(matches!(
            qubit_l1_power(&identity_unitary(3)),
            Err(Error::InvalidDimension { dim: 3, .. })
        ));
    }

    #[test]
    fn incoherent_l1_examples() {
        let est = incoherent_l1_power(&rotation_x(FRAC_PI_4)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
        assert_eq!(est.achiever, PureState::basis(3, 1));
        for n in 2..=6 {
            let v = incoherent_l1_power(&fourier_unitary(n).unwrap())
                .unwrap()
                .value;
            assert!((v - (n as f64 - 1.0)).abs() < 1e-9);
        }
        let perm = UnitaryOperator::permutation(&[2, 0, 3, 1]).unwrap();
        assert_eq!(incoherent_l1_power(&perm).unwrap().value, 0.0);
        assert_eq!(
            incoherent_l1_power(&perm).unwrap().achiever,
            PureState::basis(4, 0)
        );
    }

    #[test]
    fn incoherent_relent_examples() {
        assert_eq!(
            incoherent_relent_power(&identity_unitary(3)).unwrap().value,
            0.0
        );
        let v = incoherent_relent_power(&rotation_x(FRAC_PI_8))
            .unwrap()
            .value;
        assert!((v - 0.41650).abs() < 5e-5, "{v}");
        for n in 2..=6 {
            let v = incoherent_relent_power(&fourier_unitary(n).unwrap())
                .unwrap()
                .value;
            assert!((v - (n as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn scans_match_basis_state_gains() {
        for n in 2..=5 {
            for seed in 0..20 {
                let u = haar_random_unitary(n, seed);
                for (m, est) in [
                    (CoherenceMeasureId::L1, incoherent_l1_power(&u).unwrap()),
                    (
                        CoherenceMeasureId::RelEnt,
                        incoherent_relent_power(&u).unwrap(),
                    ),
                ] {
                    let direct = (0..n)
                        .map(|k| gain(&u, &density_from_pure(&PureState::basis(n, k)), m).unwrap())
                        .fold(f64::NEG_INFINITY, f64::max);
                    assert!((est.value - direct).abs() < 1e-12, "{m} n={n} seed={seed}");
                }
            }
        }
    }

    #[test]
    fn relent_scan_uses_columns() {
        // rows and columns of this unitary have different moduli
        let u = haar_random_unitary(3, 17);
        let est = incoherent_relent_power(&u).unwrap();
        let j = (0..3)
            .position(|k| est.achiever == PureState::basis(3, k))
            .unwrap();
        let col: Vec<f64> = (0..3).map(|i| u.get(i, j).norm_sqr()).collect();
        assert!((shannon_entropy(&col) - est.value).abs() < 1e-15);
    }

    #[test]
    fn global_on_diagonal_unitary_is_zero() {
        let u = UnitaryOperator::diagonal_phases(&[0.3, 1.7, -2.2]);
        for m in CoherenceMeasureId::ALL {
            let est = global_power(&u, m, &cfg(1)).unwrap();
            assert!(est.value.abs() < 1e-8, "{m} {}", est.value);
        }
    }

    #[test]
    fn global_beats_incoherent_for_counterexamples() {
        let l1 = global_power(&rotation_x(FRAC_PI_4), CoherenceMeasureId::L1, &cfg(0)).unwrap();
        assert!(l1.value >= 1.1471 - 1e-4, "{}", l1.value);
        assert!(l1.value - 1.0 >= 0.147 - 1e-3);
        assert!(l1.value <= 2.0 + 1e-9);

        let re = global_power(&rotation_x(FRAC_PI_8), CoherenceMeasureId::RelEnt, &cfg(0)).unwrap();
        assert!(re.value >= 0.47648 - 1e-4, "{}", re.value);
        assert!(re.value <= 3f64.ln() + 1e-9);
        assert_eq!(re.method, Method::GlobalOptimization);
        assert_eq!(re.diagnostics.restarts, 64);
    }

    #[test]
    fn global_is_deterministic_across_thread_counts() {
        let u = haar_random_unitary(3, 9);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        for m in CoherenceMeasureId::ALL {
            let a = single.install(|| global_power(&u, m, &cfg(5)).unwrap());
            let b = multi.install(|| global_power(&u, m, &cfg(5)).unwrap());
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(a.achiever, b.achiever);
        }
    }

    #[test]
    fn global_rejects_small_dim_and_bad_config() {
        assert!(global_power(&identity_unitary(1), CoherenceMeasureId::L1, &cfg(0)).is_err());
        let bad = OptimizerConfig {
            restarts: 0,
            ..OptimizerConfig::default()
        };
        assert!(global_power(&identity_unitary(2), CoherenceMeasureId::L1, &bad).is_err());
    }

    #[test]
    fn global_reports_no_convergence_with_partial_result() {
        let tiny = OptimizerConfig {
            max_iters: 1,
            ..OptimizerConfig::default()
        };
        let u = haar_random_unitary(3, 2);
        match global_power(&u, CoherenceMeasureId::L1, &tiny) {
            Err(Error::NotConverged { partial }) => {
                assert!(partial.value >= incoherent_l1_power(&u).unwrap().value - 1e-9);
                assert!(!partial.diagnostics.converged);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn generator_examples() {
        let gcfg = GeneratorConfig::default();
        let zero =
            generator_power(&HamiltonianOperator::zero(3), CoherenceMeasureId::L1, &gcfg).unwrap();
        assert_eq!(zero.value, 0.0);

        let diag =
            HamiltonianOperator::new(ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -0.5]).unwrap())
                .unwrap();
        for m in CoherenceMeasureId::ALL {
            assert!(generator_power(&diag, m, &gcfg).unwrap().value.abs() <= 1e-6);
        }

        let px = generator_power(
            &HamiltonianOperator::pauli_x(),
            CoherenceMeasureId::L1,
            &gcfg,
        )
        .unwrap();
        assert!((px.value - 2.0).abs() < 1e-3, "{}", px.value);
        let trace = px.generator.unwrap();
        assert_eq!(trace.rates.len(), 4);
        assert_eq!(trace.extrapolated.len(), 3);
    }

    #[test]
    fn generator_config_validation() {
        let mut gcfg = GeneratorConfig {
            dt_ladder: vec![1e-3, 2e-3],
            ..GeneratorConfig::default()
        };
        assert!(generator_power(
            &HamiltonianOperator::pauli_x(),
            CoherenceMeasureId::L1,
            &gcfg
        )
        .is_err());
        gcfg.dt_ladder = vec![1e-3];
        assert!(gcfg.validate().is_err());
    }

    #[test]
    fn generator_flags_non_convergent_limit() {
        // a ladder of large steps sees the curvature of sin(2t)/t
        let gcfg = GeneratorConfig {
            dt_ladder: vec![1.2, 0.6, 0.3],
            limit_tol: 1e-3,
            ..GeneratorConfig::default()
        };
        assert!(matches!(
            generator_power(
                &HamiltonianOperator::pauli_x(),
                CoherenceMeasureId::L1,
                &gcfg
            ),
            Err(Error::LimitNotConverged { .. })
        ));
    }
}
