//! Exact stochastic simulation of the jump process (direct method), with
//! deterministic pump events interleaved when the pump is regular.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::jump::{JumpProcess, PumpMode, CHANNELS, EMISSION_CHANNEL, N_CHANNELS, PUMP_CHANNEL};
use crate::steady::stationary_state;
use crate::trajectory::Trajectory;

pub const DEFAULT_MAX_EVENTS: u64 = 500_000_000;

#[derive(Clone, Copy, Debug)]
pub struct GillespieOptions {
    /// starting (N, n); defaults to the rounded deterministic steady state
    pub initial: Option<(u64, u64)>,
    /// hard event budget; the run is truncated (and flagged) when it runs out
    pub max_events: u64,
}

impl Default for GillespieOptions {
    fn default() -> Self {
        GillespieOptions {
            initial: None,
            max_events: DEFAULT_MAX_EVENTS,
        }
    }
}

pub fn gillespie_run(
    process: &JumpProcess,
    t_end: f64,
    seed: u64,
    sample_dt: f64,
) -> Result<Trajectory> {
    let mut rng = rand::SeedableRng::seed_from_u64(seed);
    let mut traj = gillespie_core(
        process,
        t_end,
        sample_dt,
        &mut rng,
        GillespieOptions::default(),
    )?;
    traj.seed = seed;
    Ok(traj)
}

pub fn gillespie_run_with(
    process: &JumpProcess,
    t_end: f64,
    seed: u64,
    sample_dt: f64,
    opts: GillespieOptions,
) -> Result<Trajectory> {
    let mut rng = rand::SeedableRng::seed_from_u64(seed);
    let mut traj = gillespie_core(process, t_end, sample_dt, &mut rng, opts)?;
    traj.seed = seed;
    Ok(traj)
}

/// Independent trajectories from one master seed: trajectory i uses RNG
/// stream i, so any prefix of the ensemble is bit-reproducible and
/// trajectory 0 equals the single-run result for the same seed.
pub fn gillespie_ensemble(
    process: &JumpProcess,
    t_end: f64,
    sample_dt: f64,
    seed: u64,
    n_traj: usize,
    opts: GillespieOptions,
) -> Result<Vec<Trajectory>> {
    use rayon::prelude::*;
    (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut tr = gillespie_core(process, t_end, sample_dt, &mut rng, opts)?;
            tr.seed = seed;
            Ok(tr)
        })
        .collect()
}

pub(crate) fn default_initial_state(process: &JumpProcess) -> (u64, u64) {
    let op = stationary_state(&process.params);
    match op {
        Ok(op) => (op.n_cap_bar.round().max(0.0) as u64, op.n_bar.round().max(0.0) as u64),
        Err(_) => (0, 0),
    }
}

/// Direct-method loop. Between stochastic events the state is constant, so
/// sampling is hold-left on the uniform grid; emission counts land in the
/// bin whose right edge is the first grid point at or after the event.
pub(crate) fn gillespie_core(
    process: &JumpProcess,
    t_end: f64,
    sample_dt: f64,
    rng: &mut ChaCha8Rng,
    opts: GillespieOptions,
) -> Result<Trajectory> {
    if !(sample_dt > 0.0) || !sample_dt.is_finite() {
        return Err(Error::validation("sample_dt", "must be positive and finite"));
    }
    if !(t_end >= sample_dt) || !t_end.is_finite() {
        return Err(Error::validation("t_end", "must be finite and at least sample_dt"));
    }
    let steps = (t_end / sample_dt).floor() as usize;

    let (mut n_cap, mut n) = opts.initial.unwrap_or_else(|| default_initial_state(process));

    let mut t_grid = Vec::with_capacity(steps + 1);
    let mut cap_s = Vec::with_capacity(steps + 1);
    let mut n_s = Vec::with_capacity(steps + 1);
    let mut bins = vec![0.0f64; steps + 1];
    t_grid.push(0.0);
    cap_s.push(n_cap as f64);
    n_s.push(n as f64);

    let period = match process.pump_mode {
        PumpMode::Regular => 1.0 / process.params.pump_rate,
        PumpMode::Poisson => f64::INFINITY,
    };
    let mut pump_fired: u64 = 0;

    let mut rates = [0.0f64; N_CHANNELS];
    let mut t = 0.0f64;
    let mut next_idx = 1usize;
    let mut events: u64 = 0;
    let mut channel_counts = [0u64; N_CHANNELS];
    let mut truncated = false;

    'outer: loop {
        process.rates(n_cap, n, &mut rates);
        let total: f64 = rates.iter().sum();
        let dt_stoch = if total > 0.0 {
            let e: f64 = rng.sample(Exp1);
            e / total
        } else {
            f64::INFINITY
        };
        let next_pump = (pump_fired + 1) as f64 * period;

        let (event_time, channel) = if next_pump <= t + dt_stoch {
            (next_pump, PUMP_CHANNEL)
        } else {
            (t + dt_stoch, usize::MAX) // stochastic channel picked below
        };

        if event_time > t_end || !event_time.is_finite() {
            while next_idx <= steps {
                t_grid.push(next_idx as f64 * sample_dt);
                cap_s.push(n_cap as f64);
                n_s.push(n as f64);
                next_idx += 1;
            }
            break;
        }

        // hold the pre-event state on every grid point strictly before the event
        while next_idx <= steps && (next_idx as f64 * sample_dt) < event_time {
            t_grid.push(next_idx as f64 * sample_dt);
            cap_s.push(n_cap as f64);
            n_s.push(n as f64);
            next_idx += 1;
        }

        let channel = if channel == PUMP_CHANNEL {
            pump_fired += 1;
            PUMP_CHANNEL
        } else {
            let mut u: f64 = rng.gen::<f64>() * total;
            let mut picked = N_CHANNELS - 1;
            for (c, r) in rates.iter().enumerate() {
                if u < *r {
                    picked = c;
                    break;
                }
                u -= r;
            }
            picked
        };

        t = event_time;
        let ch = &CHANNELS[channel];
        n_cap = n_cap.checked_add_signed(ch.d_cap).ok_or_else(|| {
            Error::numerical("gillespie", "carrier count went negative")
        })?;
        n = n.checked_add_signed(ch.d_n).ok_or_else(|| {
            Error::numerical("gillespie", "photon count went negative")
        })?;
        channel_counts[channel] += 1;
        if channel == EMISSION_CHANNEL && next_idx <= steps {
            bins[next_idx] += 1.0;
        }

        events += 1;
        if events >= opts.max_events {
            truncated = true;
            break 'outer;
        }
    }

    bins.truncate(t_grid.len());
    Ok(Trajectory {
        sample_dt,
        t: t_grid,
        n_cap: cap_s,
        n: n_s,
        emission_bins: bins,
        seed: 0,
        method: "gillespie",
        truncated,
        boundary_hits: 0,
        channel_counts,
    })
}
