//! Pure-state parameterization, Nelder-Mead ascent and the grid oracle.
//!
//! A pure state in dimension `N` is parameterized by `N - 1` hyperspherical
//! angles `theta_k` in `[0, pi/2]` and `N - 1` relative phases `phi_k` in
//! `[0, 2 pi)`:
//!
//! ```text
//! |a_1| = cos theta_1
//! |a_k| = sin theta_1 ... sin theta_{k-1} cos theta_k      (1 < k < N)
//! |a_N| = sin theta_1 ... sin theta_{N-1}
//! arg a_1 = 0,  arg a_k = phi_{k-1}
//! ```

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{gain_amplitudes, CoherenceMeasureId};
use crate::operator::UnitaryOperator;
use crate::power::{finalize_estimate, Diagnostics, Method, PowerEstimate};
use crate::state::{canonical_phase, PureState};

/// Multistart optimizer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Simplex diameter below which a local search stops.
    pub param_tol: f64,
    /// Spread of simplex values below which a local search stops.
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 2000,
            param_tol: 1e-9,
            value_tol: 1e-10,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParameter(
                "restarts and max_iters must be positive".into(),
            ));
        }
        if !(self.param_tol > 0.0 && self.value_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Settings for the `dt -> 0` limit of generator power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub inner: OptimizerConfig,
    /// Strictly decreasing positive time steps.
    pub dt_ladder: Vec<f64>,
    /// Maximum disagreement between successive extrapolated estimates.
    pub limit_tol: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            inner: OptimizerConfig::default(),
            dt_ladder: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3],
            limit_tol: 1e-3,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        self.inner.validate()?;
        if self.dt_ladder.len() < 2 {
            return Err(Error::InvalidParameter(
                "dt ladder needs at least two steps".into(),
            ));
        }
        let positive = self.dt_ladder.iter().all(|&dt| dt > 0.0 && dt.is_finite());
        let decreasing = self.dt_ladder.windows(2).all(|w| w[1] < w[0]);
        if !(positive && decreasing) {
            return Err(Error::InvalidParameter(
                "dt ladder must be positive and strictly decreasing".into(),
            ));
        }
        if !(self.limit_tol > 0.0) {
            return Err(Error::InvalidParameter("limit_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Angles of a pure state; see the module docs for the map.
#[derive(Debug, Clone, PartialEq)]
pub struct StateParams {
    dim: usize,
    thetas: Vec<f64>,
    phis: Vec<f64>,
}

impl StateParams {
    pub fn new(thetas: Vec<f64>, phis: Vec<f64>) -> Result<Self> {
        if thetas.len() != phis.len() {
            return Err(Error::InvalidParameter(format!(
                "{} thetas but {} phis",
                thetas.len(),
                phis.len()
            )));
        }
        if let Some(t) = thetas.iter().find(|t| !(0.0..=FRAC_PI_2).contains(*t)) {
            return Err(Error::InvalidParameter(format!(
                "theta {t} outside [0, pi/2]"
            )));
        }
        if let Some(p) = phis.iter().find(|p| !(0.0..TAU).contains(*p)) {
            return Err(Error::InvalidParameter(format!(
                "phi {p} outside [0, 2 pi)"
            )));
        }
        Ok(Self {
            dim: thetas.len() + 1,
            thetas,
            phis,
        })
    }

    /// Canonical parameters of the state reached by plugging arbitrary real
    /// angles (`N - 1` thetas followed by `N - 1` phis) into the map.
    pub fn from_raw(dim: usize, raw: &[f64]) -> Self {
        assert_eq!(raw.len(), 2 * (dim - 1), "expected 2N-2 raw parameters");
        let (thetas, phis) = raw.split_at(dim - 1);
        let amps = canonical_phase(raw_amplitudes(thetas, phis));
        encode(&PureState::from_canonical_unchecked(amps))
    }

    /// Uniform draw from the parameter box.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let thetas = (0..dim - 1)
            .map(|_| rng.random_range(0.0..=FRAC_PI_2))
            .collect();
        let phis = (0..dim - 1).map(|_| rng.random_range(0.0..TAU)).collect();
        Self { dim, thetas, phis }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    /// Thetas followed by phis.
    pub fn to_raw(&self) -> Vec<f64> {
        self.thetas.iter().chain(&self.phis).copied().collect()
    }
}

fn raw_amplitudes(thetas: &[f64], phis: &[f64]) -> Vec<Complex64> {
    let n = thetas.len() + 1;
    let mut amps = Vec::with_capacity(n);
    let mut radius = 1.0;
    for k in 0..n {
        let modulus = if k + 1 < n {
            let (s, c) = thetas[k].sin_cos();
            let m = radius * c;
            radius *= s;
            m
        } else {
            radius
        };
        let amp = if k == 0 {
            Complex64::new(modulus, 0.0)
        } else {
            Complex64::from_polar(modulus, phis[k - 1])
        };
        amps.push(amp);
    }
    amps
}

/// Parameters to canonical pure state.
pub fn decode(p: &StateParams) -> PureState {
    PureState::from_canonical_unchecked(canonical_phase(raw_amplitudes(&p.thetas, &p.phis)))
}

/// Inverse of [`decode`] on canonical states.
pub fn encode(psi: &PureState) -> StateParams {
    let amps = psi.amplitudes();
    let n = amps.len();
    // tail[k] = sqrt(sum_{j >= k} |a_j|^2)
    let mut tail = vec![0.0; n + 1];
    for k in (0..n).rev() {
        tail[k] = (tail[k + 1] * tail[k + 1] + amps[k].norm_sqr()).sqrt();
    }
    let thetas = (0..n - 1)
        .map(|k| tail[k + 1].atan2(amps[k].norm()))
        .collect();
    let phis = amps[1..]
        .iter()
        .map(|z| {
            let mut p = z.arg();
            if p < 0.0 {
                p += TAU;
            }
            if p >= TAU {
                p = 0.0;
            }
            p
        })
        .collect();
    StateParams {
        dim: n,
        thetas,
        phis,
    }
}

/// Bookkeeping for one local search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDiagnostics {
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub params: StateParams,
    /// `objective(&params)`, bit for bit.
    pub value: f64,
    pub diagnostics: LocalDiagnostics,
}

const INITIAL_STEP: f64 = 0.25;
const MAX_POLISH_ROUNDS: usize = 8;

struct Vertex {
    x: Vec<f64>,
    params: StateParams,
    value: f64,
}

/// Nelder-Mead ascent over the raw angles, restarted from the incumbent
/// until a restart stops improving it. The incumbent is never replaced by
/// a worse point, so the result is at least `objective(start)`.
///
/// Iteration-budget exhaustion leaves `converged == false`.
pub fn local_maximize<F>(objective: F, start: &StateParams, cfg: &OptimizerConfig) -> LocalResult
where
    F: Fn(&StateParams) -> f64,
{
    let dim = start.dim();
    let eval = |x: Vec<f64>| {
        let params = StateParams::from_raw(dim, &x);
        let value = objective(&params);
        Vertex { x, params, value }
    };

    let mut best = Vertex {
        x: start.to_raw(),
        params: start.clone(),
        value: objective(start),
    };
    let mut diag = LocalDiagnostics {
        iterations: 0,
        evaluations: 1,
        converged: false,
    };
    if best.x.is_empty() {
        diag.converged = true;
        return LocalResult {
            params: best.params,
            value: best.value,
            diagnostics: diag,
        };
    }

    for _ in 0..MAX_POLISH_ROUNDS {
        let before = best.value;
        let (vertex, converged) = nelder_mead_round(&eval, best, cfg, &mut diag);
        best = vertex;
        if !converged {
            diag.converged = false;
            break;
        }
        diag.converged = true;
        if best.value - before <= cfg.value_tol {
            break;
        }
    }

    LocalResult {
        params: best.params,
        value: best.value,
        diagnostics: diag,
    }
}

fn nelder_mead_round<E>(
    eval: &E,
    start: Vertex,
    cfg: &OptimizerConfig,
    diag: &mut LocalDiagnostics,
) -> (Vertex, bool)
where
    E: Fn(Vec<f64>) -> Vertex,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let n = start.x.len();
    let origin = start.x.clone();
    let mut simplex = Vec::with_capacity(n + 1);
    simplex.push(start);
    for i in 0..n {
        let mut x = origin.clone();
        x[i] += INITIAL_STEP;
        simplex.push(eval(x));
    }
    diag.evaluations += n;

    let affine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect()
    };

    loop {
        // descending by value; stable sort keeps the incumbent first on ties
        simplex.sort_by(|a, b| b.value.total_cmp(&a.value));

        let spread = simplex[0].value - simplex[n].value;
        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.x.iter()
                    .zip(&simplex[0].x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if diameter < cfg.param_tol || spread < cfg.value_tol {
            return (simplex.swap_remove(0), true);
        }
        if diag.iterations >= cfg.max_iters {
            return (simplex.swap_remove(0), false);
        }
        diag.iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(&v.x) {
                *c += x / n as f64;
            }
        }
        let worst = &simplex[n];
        let reflected = eval(affine(&centroid, &worst.x, -REFLECT));
        diag.evaluations += 1;

        if reflected.value > simplex[0].value {
            let expanded = eval(affine(&centroid, &worst.x, -EXPAND));
            diag.evaluations += 1;
            simplex[n] = if expanded.value > reflected.value {
                expanded
            } else {
                reflected
            };
            continue;
        }
        if reflected.value > simplex[n - 1].value {
            simplex[n] = reflected;
            continue;
        }
        let contracted = if reflected.value > worst.value {
            eval(affine(&centroid, &reflected.x, CONTRACT))
        } else {
            eval(affine(&centroid, &worst.x, CONTRACT))
        };
        diag.evaluations += 1;
        if contracted.value > worst.value.max(reflected.value) {
            simplex[n] = contracted;
            continue;
        }
        let anchor = simplex[0].x.clone();
        for v in simplex[1..].iter_mut() {
            *v = eval(affine(&anchor, &v.x, SHRINK));
        }
        diag.evaluations += n;
    }
}

/// Grid coordinates: thetas on `steps` points spanning `[0, pi/2]`
/// inclusive, phis on `steps` points `2 pi k / steps`. A grid with
/// `steps^2` points contains the grid with `steps` points.
fn grid_theta(k: usize, steps: usize) -> f64 {
    FRAC_PI_2 * (k as f64 / (steps - 1) as f64)
}

fn grid_phi(k: usize, steps: usize) -> f64 {
    TAU * (k as f64 / steps as f64)
}

fn grid_params(mut index: usize, dim: usize, steps: usize) -> StateParams {
    let count = dim - 1;
    let mut digits = vec![0; 2 * count];
    for d in digits.iter_mut().rev() {
        *d = index % steps;
        index /= steps;
    }
    StateParams {
        dim,
        thetas: digits[..count]
            .iter()
            .map(|&k| grid_theta(k, steps))
            .collect(),
        phis: digits[count..]
            .iter()
            .map(|&k| grid_phi(k, steps))
            .collect(),
    }
}

/// Largest dimension the grid oracle accepts.
pub const BRUTE_FORCE_MAX_DIM: usize = 3;
pub const BRUTE_FORCE_MIN_STEPS: usize = 8;

/// Exhaustive maximization of the gain over the parameter grid.
pub fn brute_force_power(
    u: &UnitaryOperator,
    m: CoherenceMeasureId,
    grid_steps: usize,
) -> Result<PowerEstimate> {
    let dim = u.dim();
    if dim > BRUTE_FORCE_MAX_DIM {
        return Err(Error::InvalidDimension {
            dim,
            reason: "grid oracle supports N <= 3",
        });
    }
    if grid_steps < BRUTE_FORCE_MIN_STEPS {
        return Err(Error::InvalidParameter(format!(
            "grid_steps {grid_steps} below minimum {BRUTE_FORCE_MIN_STEPS}"
        )));
    }
    let count = dim - 1;
    let total = grid_steps.pow(2 * count as u32);

    let theta_trig: Vec<(f64, f64)> = (0..grid_steps)
        .map(|k| grid_theta(k, grid_steps).sin_cos())
        .collect();
    let phases: Vec<Complex64> = (0..grid_steps)
        .map(|k| Complex64::from_polar(1.0, grid_phi(k, grid_steps)))
        .collect();

    let value_at = |mut index: usize| -> f64 {
        let mut digits = [0usize; 2 * (BRUTE_FORCE_MAX_DIM - 1)];
        for d in digits[..2 * count].iter_mut().rev() {
            *d = index % grid_steps;
            index /= grid_steps;
        }
        let mut amps = [Complex64::new(0.0, 0.0); BRUTE_FORCE_MAX_DIM];
        let mut radius = 1.0;
        for k in 0..dim {
            let modulus = if k < count {
                let (s, c) = theta_trig[digits[k]];
                let m = radius * c;
                radius *= s;
                m
            } else {
                radius
            };
            amps[k] = if k == 0 {
                Complex64::new(modulus, 0.0)
            } else {
                phases[digits[count + k - 1]] * modulus
            };
        }
        gain_amplitudes(u, &amps[..dim], m)
    };

    let (best_value, best_index) = (0..total).into_par_iter().map(|i| (value_at(i), i)).reduce(
        || (f64::NEG_INFINITY, usize::MAX),
        |a, b| {
            if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                a
            } else {
                b
            }
        },
    );

    let achiever = decode(&grid_params(best_index, dim, grid_steps));
    finalize_estimate(
        u,
        m,
        best_value,
        achiever,
        Method::BruteForce,
        Diagnostics {
            restarts: 0,
            best_restart: None,
            iterations: total,
            converged: true,
            mixed_state_best: None,
        },
    )
}

/// Independent RNG stream for restart `index` under a master seed.
pub(crate) fn restart_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
