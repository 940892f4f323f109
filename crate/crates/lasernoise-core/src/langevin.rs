//! Euler–Maruyama integration of the rate equations with state-dependent
//! Gaussian noise. The cavity-output noise is drawn as its own stream so the
//! recorded emission flux and the photon-number equation share the same
//! realization with opposite sign (their anti-correlation is exact, not
//! approximated through the covariance matrix).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::device::DeviceParams;
use crate::diffusion::{diffusion_matrix, DiffusionModel};
use crate::error::{Error, Result};
use crate::jump::N_CHANNELS;
use crate::steady::{rate_equation_rhs, stationary_state};
use crate::trajectory::Trajectory;

#[derive(Clone, Copy, Debug)]
pub struct LangevinOptions {
    /// starting (N, n); defaults to the deterministic steady state
    pub initial: Option<(f64, f64)>,
    /// record every k-th integrator step (emission bins aggregate over them)
    pub sample_every: usize,
    /// multiplies every noise variance; 0 recovers the deterministic rate
    /// equations with the same stepping
    pub noise_scale: f64,
}

impl Default for LangevinOptions {
    fn default() -> Self {
        LangevinOptions {
            initial: None,
            sample_every: 1,
            noise_scale: 1.0,
        }
    }
}

/// Largest admissible integrator step: a tenth of the fastest relaxation
/// timescale at the operating point. Below transparency the oscillation
/// frequency is absent and only the two damping rates matter.
pub fn max_stable_dt(params: &DeviceParams) -> Result<f64> {
    let op = stationary_state(params)?;
    let gamma_cap = (1.0 + 2.0 * params.beta * op.n_bar) / params.tau;
    let gamma_n = 2.0 * params.kappa * (op.n_t + 0.5) / (op.n_bar + 0.5);
    let omega_sq =
        4.0 * params.kappa * params.kappa * params.beta * (op.n_bar - op.n_t)
            / (params.kappa * params.tau);
    let omega = if omega_sq > 0.0 { omega_sq.sqrt() } else { 0.0 };
    let fastest = gamma_cap.max(gamma_n).max(omega);
    Ok(0.1 / fastest)
}

pub fn langevin_run(
    params: &DeviceParams,
    sigma: f64,
    dt: f64,
    t_end: f64,
    seed: u64,
) -> Result<Trajectory> {
    langevin_run_with(
        params,
        sigma,
        dt,
        t_end,
        seed,
        DiffusionModel::Kinetic,
        LangevinOptions::default(),
    )
}

pub fn langevin_run_with(
    params: &DeviceParams,
    sigma: f64,
    dt: f64,
    t_end: f64,
    seed: u64,
    model: DiffusionModel,
    opts: LangevinOptions,
) -> Result<Trajectory> {
    let mut rng = rand::SeedableRng::seed_from_u64(seed);
    let mut traj = langevin_core(params, sigma, dt, t_end, &mut rng, model, opts)?;
    traj.seed = seed;
    Ok(traj)
}

/// Independent trajectories from one master seed via per-trajectory RNG
/// streams; trajectory 0 equals the single-run result for the same seed.
pub fn langevin_ensemble(
    params: &DeviceParams,
    sigma: f64,
    dt: f64,
    t_end: f64,
    seed: u64,
    n_traj: usize,
    model: DiffusionModel,
    opts: LangevinOptions,
) -> Result<Vec<Trajectory>> {
    use rayon::prelude::*;
    (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut tr = langevin_core(params, sigma, dt, t_end, &mut rng, model, opts)?;
            tr.seed = seed;
            Ok(tr)
        })
        .collect()
}

pub(crate) fn langevin_core(
    params: &DeviceParams,
    sigma: f64,
    dt: f64,
    t_end: f64,
    rng: &mut ChaCha8Rng,
    model: DiffusionModel,
    opts: LangevinOptions,
) -> Result<Trajectory> {
    params.validate()?;
    if !(0.0..=1.0).contains(&sigma) || !sigma.is_finite() {
        return Err(Error::validation("sigma", "must lie in [0, 1]"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::validation("dt", "must be positive and finite"));
    }
    let dt_max = max_stable_dt(params)?;
    if dt > dt_max {
        return Err(Error::validation(
            "dt",
            format!(
                "step {dt:e} exceeds a tenth of the fastest relaxation time; \
                 use dt <= {dt_max:e} for this device"
            ),
        ));
    }
    if opts.sample_every == 0 {
        return Err(Error::validation("sample_every", "must be at least 1"));
    }
    if !(opts.noise_scale >= 0.0) || !opts.noise_scale.is_finite() {
        return Err(Error::validation(
            "noise_scale",
            "must be nonnegative and finite",
        ));
    }
    let sample_dt = dt * opts.sample_every as f64;
    if !(t_end >= sample_dt) || !t_end.is_finite() {
        return Err(Error::validation(
            "t_end",
            "must be finite and cover at least one recorded sample",
        ));
    }

    let n_samples = (t_end / sample_dt).floor() as usize;
    let (mut x, mut y) = match opts.initial {
        Some(s) => s,
        None => {
            let op = stationary_state(params)?;
            (op.n_cap_bar, op.n_bar)
        }
    };
    if x < 0.0 || y < 0.0 {
        return Err(Error::validation("initial", "state must be nonnegative"));
    }

    let mut t_grid = Vec::with_capacity(n_samples + 1);
    let mut cap_s = Vec::with_capacity(n_samples + 1);
    let mut n_s = Vec::with_capacity(n_samples + 1);
    let mut bins = Vec::with_capacity(n_samples + 1);
    t_grid.push(0.0);
    cap_s.push(x);
    n_s.push(y);
    bins.push(0.0);

    let two_kappa = 2.0 * params.kappa;
    let mut boundary_hits: u64 = 0;
    let mut flux_acc = 0.0f64;

    for k in 1..=(n_samples as u64 * opts.sample_every as u64) {
        let (fx, fy) = rate_equation_rhs(params, x, y);
        let mut cov =
            diffusion_matrix(params, x, y, sigma, model).scale(dt * opts.noise_scale);
        let cav_var = two_kappa * y * dt * opts.noise_scale;
        // the cavity-output component of the photon noise is drawn separately
        cov.m[1][1] -= cav_var;

        let chol = cov.cholesky_psd(1e-12 * cov.norm().max(cav_var)).map_err(|e| {
            Error::numerical(
                "langevin diffusion",
                format!("at t = {:e}, N = {x:e}, n = {y:e}: {e}", (k - 1) as f64 * dt),
            )
        })?;
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let z3: f64 = rng.sample(StandardNormal);
        let q_cap = chol.m[0][0] * z1;
        let q_n = chol.m[1][0] * z1 + chol.m[1][1] * z2;
        let w_out = cav_var.sqrt() * z3;

        flux_acc += two_kappa * y * dt + w_out;
        x += fx * dt + q_cap;
        y += fy * dt + q_n - w_out;
        if x < 0.0 {
            x = -x;
            boundary_hits += 1;
        }
        if y < 0.0 {
            y = -y;
            boundary_hits += 1;
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::numerical(
                "langevin",
                format!("state diverged at t = {:e}", k as f64 * dt),
            ));
        }

        if k % opts.sample_every as u64 == 0 {
            t_grid.push(k as f64 * dt);
            cap_s.push(x);
            n_s.push(y);
            bins.push(flux_acc);
            flux_acc = 0.0;
        }
    }

    Ok(Trajectory {
        sample_dt,
        t: t_grid,
        n_cap: cap_s,
        n: n_s,
        emission_bins: bins,
        seed: 0,
        method: "langevin",
        truncated: false,
        boundary_hits,
        channel_counts: [0; N_CHANNELS],
    })
}
