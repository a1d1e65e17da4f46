//! The fixed reproduction suite behind `cohpower reproduce`.
//!
//! Each row compares a computed number against a reference value under a
//! hard-coded tolerance; the suite passes iff every row does.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::measures::{gain, CoherenceMeasureId};
use crate::operator::{fourier_unitary, haar_random_unitary_with, rotation_x};
use crate::optim::{brute_force_power, OptimizerConfig};
use crate::power::{global_power, incoherent_l1_power, incoherent_relent_power, qubit_l1_power};
use crate::state::{density_from_pure, PureState};

pub const QUBIT_SAMPLES: usize = 100;
pub const QUBIT_ABS_TOL: f64 = 1e-4;
pub const QUBIT_EXCESS_TOL: f64 = 1e-6;
pub const FOURIER_TOL: f64 = 1e-9;
pub const RX4_INCOHERENT: f64 = 1.0;
pub const RX4_INCOHERENT_TOL: f64 = 1e-12;
pub const RX4_WITNESS_GAIN: f64 = 1.1471;
pub const RX8_INCOHERENT: f64 = 0.41650;
pub const RX8_WITNESS_GAIN: f64 = 0.47648;
pub const VALUE_TOL: f64 = 5e-5;
pub const GLOBAL_SLACK: f64 = 1e-4;
pub const BRUTE_STEPS: usize = 48;
pub const BRUTE_RX4_FLOOR: f64 = 1.146;
pub const BRUTE_AGREEMENT_TOL: f64 = 1e-3;
pub const BRUTE_HAAR_SAMPLES: usize = 2;

/// Amplitudes `(0.3, 0, sqrt(0.91))`.
pub fn l1_witness() -> PureState {
    PureState::from_real(&[0.3, 0.0, (1.0f64 - 0.09).sqrt()]).expect("unit vector")
}

/// Amplitudes `(0, sqrt(1 - 0.12533^2), 0.12533)`.
pub fn relent_witness() -> PureState {
    let q3 = 0.12533f64;
    PureState::from_real(&[0.0, (1.0 - q3 * q3).sqrt(), q3]).expect("unit vector")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub expected: String,
    pub computed: f64,
    pub tolerance: String,
    pub pass: bool,
}

fn equal_row(name: impl Into<String>, expected: f64, computed: f64, tol: f64) -> Row {
    Row {
        name: name.into(),
        expected: format!("{expected}"),
        computed,
        tolerance: format!("± {tol:e}"),
        pass: (computed - expected).abs() <= tol,
    }
}

fn at_least_row(name: impl Into<String>, floor: f64, computed: f64, slack: f64) -> Row {
    Row {
        name: name.into(),
        expected: format!(">= {floor}"),
        computed,
        tolerance: format!("-{slack:e}"),
        pass: computed >= floor - slack,
    }
}

fn at_most_row(name: impl Into<String>, ceiling: f64, computed: f64, slack: f64) -> Row {
    Row {
        name: name.into(),
        expected: format!("<= {ceiling}"),
        computed,
        tolerance: format!("+{slack:e}"),
        pass: computed <= ceiling + slack,
    }
}

/// Runs every row. `seed` drives both the Haar populations and the optimizer.
pub fn run(seed: u64) -> Result<Vec<Row>> {
    let cfg = OptimizerConfig::with_seed(seed);
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut worst_abs = 0.0_f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for _ in 0..QUBIT_SAMPLES {
        let u = haar_random_unitary_with(2, &mut rng);
        let closed = qubit_l1_power(&u)?.value;
        let global = global_power(&u, CoherenceMeasureId::L1, &cfg)?.value;
        worst_abs = worst_abs.max((global - closed).abs());
        worst_excess = worst_excess.max(global - closed);
    }
    rows.push(at_most_row(
        format!("Qubit Haar x{QUBIT_SAMPLES}: max |global - closed form| l1"),
        0.0,
        worst_abs,
        QUBIT_ABS_TOL,
    ));
    rows.push(at_most_row(
        format!("Qubit Haar x{QUBIT_SAMPLES}: max (global - closed form) l1"),
        0.0,
        worst_excess,
        QUBIT_EXCESS_TOL,
    ));

    for n in 2..=6 {
        let f = fourier_unitary(n)?;
        let bound = n as f64 - 1.0;
        rows.push(equal_row(
            format!("Fourier N={n} incoherent l1 = N-1"),
            bound,
            incoherent_l1_power(&f)?.value,
            FOURIER_TOL,
        ));
        rows.push(at_most_row(
            format!("Fourier N={n} global l1 <= N-1"),
            bound,
            global_power(&f, CoherenceMeasureId::L1, &cfg)?.value,
            FOURIER_TOL,
        ));
    }

    let rx4 = rotation_x(FRAC_PI_4);
    rows.push(equal_row(
        "Rx(pi/4) incoherent l1 = 1",
        RX4_INCOHERENT,
        incoherent_l1_power(&rx4)?.value,
        RX4_INCOHERENT_TOL,
    ));
    rows.push(equal_row(
        "Rx(pi/4) witness gain l1 = 1.1471",
        RX4_WITNESS_GAIN,
        gain(
            &rx4,
            &density_from_pure(&l1_witness()),
            CoherenceMeasureId::L1,
        )?,
        VALUE_TOL,
    ));
    let rx4_global = global_power(&rx4, CoherenceMeasureId::L1, &cfg)?.value;
    rows.push(at_least_row(
        "Rx(pi/4) global l1 ≥ 1.1471",
        RX4_WITNESS_GAIN,
        rx4_global,
        GLOBAL_SLACK,
    ));

    let rx8 = rotation_x(FRAC_PI_8);
    rows.push(equal_row(
        "Rx(pi/8) incoherent relent = 0.41650",
        RX8_INCOHERENT,
        incoherent_relent_power(&rx8)?.value,
        VALUE_TOL,
    ));
    rows.push(equal_row(
        "Rx(pi/8) witness gain relent = 0.47648",
        RX8_WITNESS_GAIN,
        gain(
            &rx8,
            &density_from_pure(&relent_witness()),
            CoherenceMeasureId::RelEnt,
        )?,
        VALUE_TOL,
    ));
    let rx8_global = global_power(&rx8, CoherenceMeasureId::RelEnt, &cfg)?.value;
    rows.push(at_least_row(
        "Rx(pi/8) global relent ≥ 0.47648",
        RX8_WITNESS_GAIN,
        rx8_global,
        GLOBAL_SLACK,
    ));

    let rx4_brute = brute_force_power(&rx4, CoherenceMeasureId::L1, BRUTE_STEPS)?.value;
    rows.push(at_least_row(
        format!("Rx(pi/4) brute-force l1 (grid {BRUTE_STEPS}) ≥ {BRUTE_RX4_FLOOR}"),
        BRUTE_RX4_FLOOR,
        rx4_brute,
        0.0,
    ));
    rows.push(at_most_row(
        "Rx(pi/4) |global - brute-force| l1",
        0.0,
        (rx4_global - rx4_brute).abs(),
        BRUTE_AGREEMENT_TOL,
    ));
    let rx8_brute = brute_force_power(&rx8, CoherenceMeasureId::RelEnt, BRUTE_STEPS)?.value;
    rows.push(at_most_row(
        "Rx(pi/8) |global - brute-force| relent",
        0.0,
        (rx8_global - rx8_brute).abs(),
        BRUTE_AGREEMENT_TOL,
    ));
    for k in 0..BRUTE_HAAR_SAMPLES {
        let u = haar_random_unitary_with(3, &mut rng);
        for m in CoherenceMeasureId::ALL {
            let global = global_power(&u, m, &cfg)?.value;
            let brute = brute_force_power(&u, m, BRUTE_STEPS)?.value;
            rows.push(at_most_row(
                format!("Haar N=3 #{k} |global - brute-force| {m}"),
                0.0,
                (global - brute).abs(),
                BRUTE_AGREEMENT_TOL,
            ));
        }
    }
    Ok(rows)
}

pub fn render(rows: &[Row]) -> String {
    let width = rows
        .iter()
        .map(|r| r.name.chars().count())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "RESULT {:<width$}  {:>14}  {:>22}  TOLERANCE",
        "CHECK", "EXPECTED", "COMPUTED"
    );
    for r in rows {
        let pad = width - r.name.chars().count();
        let _ = writeln!(
            out,
            "{:<6} {}{}  {:>14}  {:>22.15}  {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            " ".repeat(pad),
            r.expected,
            r.computed,
            r.tolerance
        );
    }
    out
}
