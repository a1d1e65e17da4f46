use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, TAU};

use cohpower::operator::conjugate_by_unitary;
use cohpower::state::random_density_matrix;
use cohpower::{
    density_from_pure, dephase, fourier_unitary, gain, global_power, haar_random_unitary,
    incoherent_l1_power, incoherent_relent_power, qubit_l1_power, rotation_x, von_neumann_entropy,
    CoherenceMeasureId, OptimizerConfig, PureState, UnitaryOperator,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn witness_gaps_exceed_incoherent_power() {
    let cfg = OptimizerConfig::default();
    let rx4 = rotation_x(FRAC_PI_4);
    let gap = global_power(&rx4, CoherenceMeasureId::L1, &cfg)
        .unwrap()
        .value
        - incoherent_l1_power(&rx4).unwrap().value;
    assert!(gap >= 0.147 - 1e-3, "{gap}");

    let rx8 = rotation_x(FRAC_PI_8);
    let gap = global_power(&rx8, CoherenceMeasureId::RelEnt, &cfg)
        .unwrap()
        .value
        - incoherent_relent_power(&rx8).unwrap().value;
    assert!(gap >= 0.0599 - 1e-3, "{gap}");
}

#[test]
fn incoherent_scans_match_basis_state_gains() {
    for seed in 0..20 {
        let u = haar_random_unitary(2 + (seed as usize % 4), seed);
        for m in CoherenceMeasureId::ALL {
            let scan = match m {
                CoherenceMeasureId::L1 => incoherent_l1_power(&u),
                CoherenceMeasureId::RelEnt => incoherent_relent_power(&u),
            }
            .unwrap()
            .value;
            let direct = (0..u.dim())
                .map(|k| gain(&u, &density_from_pure(&PureState::basis(u.dim(), k)), m).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                (scan - direct).abs() <= 1e-12,
                "seed {seed} {m}: {scan} vs {direct}"
            );
        }
    }
}

#[test]
fn fourier_attains_the_l1_upper_bound() {
    let cfg = OptimizerConfig::default();
    for n in 2..=5 {
        let v = global_power(&fourier_unitary(n).unwrap(), CoherenceMeasureId::L1, &cfg)
            .unwrap()
            .value;
        assert!((v - (n as f64 - 1.0)).abs() <= 1e-6, "N={n}: {v}");
    }
}

#[test]
fn constructors_are_unitary() {
    for n in 1..=8 {
        let f = fourier_unitary(n).unwrap();
        assert!(UnitaryOperator::new(f.matrix().clone()).is_ok());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let theta = rand::Rng::random_range(&mut rng, -10.0..10.0);
        assert!(UnitaryOperator::new(rotation_x(theta).matrix().clone()).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn qubit_global_matches_closed_form(seed in any::<u64>()) {
        let u = haar_random_unitary(2, seed);
        let diff = global_power(&u, CoherenceMeasureId::L1, &OptimizerConfig::default())
            .unwrap()
            .value
            - qubit_l1_power(&u).unwrap().value;
        prop_assert!((-1e-4..=1e-6).contains(&diff), "{}", diff);
    }

    #[test]
    fn conjugation_preserves_trace_and_spectrum(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(n, &mut rng);
        let u = haar_random_unitary(n, seed ^ 0x5eed);
        let out = conjugate_by_unitary(&rho, &u).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-12);
        for (a, b) in sorted(rho.eigenvalues()).iter().zip(sorted(out.eigenvalues())) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn dephasing_never_decreases_entropy(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(n, &mut rng);
        prop_assert!(von_neumann_entropy(&dephase(&rho)) >= von_neumann_entropy(&rho) - 1e-10);
    }

    #[test]
    fn global_power_respects_upper_bounds(seed in any::<u64>(), n in 2usize..=4) {
        let u = haar_random_unitary(n, seed);
        let cfg = OptimizerConfig { restarts: 16, ..OptimizerConfig::default() };
        for m in CoherenceMeasureId::ALL {
            let v = global_power(&u, m, &cfg).unwrap().value;
            prop_assert!(v <= m.upper_bound(n) + 1e-9);
            prop_assert!(v >= incoherent_l1_or_relent(&u, m) - 1e-12);
        }
    }
}

fn incoherent_l1_or_relent(u: &UnitaryOperator, m: CoherenceMeasureId) -> f64 {
    match m {
        CoherenceMeasureId::L1 => incoherent_l1_power(u),
        CoherenceMeasureId::RelEnt => incoherent_relent_power(u),
    }
    .unwrap()
    .value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn diagonal_sandwich_leaves_power_unchanged(
        seed in any::<u64>(),
        n in 2usize..=3,
        a in prop::collection::vec(0.0..TAU, 3),
        b in prop::collection::vec(0.0..TAU, 3),
    ) {
        let u = haar_random_unitary(n, seed);
        let d1 = UnitaryOperator::diagonal_phases(&a[..n]);
        let d2 = UnitaryOperator::diagonal_phases(&b[..n]);
        let sandwiched = d1.compose(&u).unwrap().compose(&d2).unwrap();
        let cfg = OptimizerConfig::default();
        for m in CoherenceMeasureId::ALL {
            let p = global_power(&u, m, &cfg).unwrap().value;
            let q = global_power(&sandwiched, m, &cfg).unwrap().value;
            prop_assert!((p - q).abs() <= 2e-4, "{} vs {} ({})", p, q, m);
        }
    }
}
