//! The six subcommands. Each builds its artifact from a resolved
//! configuration and hands back rendered text; stderr carries progress and
//! human-readable summaries so machine output stays clean.

use std::time::Instant;

use lasernoise_core::estimators::output_fano_from;
use lasernoise_core::gillespie::DEFAULT_MAX_EVENTS;
use lasernoise_core::jump::PumpMode;
use lasernoise_core::langevin::max_stable_dt;
use lasernoise_core::multimode::{
    geometric_approx_pmf, microcanonical_pmf, mode_mean, mode_variance, pairwise_covariance,
    EXACT_SIZE_LIMIT,
};
use lasernoise_core::*;
use serde_json::{json, Value};

use crate::config::{Config, Method, MultimodeConfig, PumpConfig, SweepConfig};
use crate::output::{document, num, render_json, text, Format, Table};

pub struct Ctx {
    pub cfg: Config,
    pub model: DiffusionModel,
    pub dominance: f64,
    pub format: Format,
}

impl Ctx {
    fn resolved(&self) -> Value {
        serde_json::to_value(&self.cfg).expect("config serialization")
    }
}

// ---------------------------------------------------------------------------

pub fn steady(ctx: &Ctx) -> Result<String> {
    let p = ctx.cfg.pumped_device()?;
    let op = stationary_state(&p)?;
    let scales = derived_scales(&p)?;
    let device = classify_device(&p);
    let (lower, upper) = class_boundaries(&p);
    let regime = fluctuation_rates(&p, &op)
        .ok()
        .map(|r| classify_regime(&r, ctx.dominance));
    let noise = noise_report(&p, ctx.dominance, ctx.model).ok();
    // the class boundaries are order-of-magnitude statements; flag devices
    // within a factor 3 of one
    let beta_inv = 1.0 / p.beta;
    let near_boundary = [lower, upper]
        .iter()
        .any(|&b| beta_inv / b < 3.0 && b / beta_inv < 3.0);
    let currents = p.active_volume.map(|_| {
        json!({
            "pump_mA": electrical_current(p.pump_rate).unwrap_or(f64::NAN) * 1e3,
            "threshold_mA": electrical_current(scales.j_th).unwrap_or(f64::NAN) * 1e3,
        })
    });

    eprintln!(
        "device:      {device}{} (class boundaries in 1/beta: {lower:.3e}, {upper:.3e})",
        if near_boundary { " [near a class boundary]" } else { "" }
    );
    eprintln!(
        "operating:   n_bar = {:.6e}  N_bar = {:.6e}  efficiency = {:.4}",
        op.n_bar, op.n_cap_bar, op.quantum_efficiency
    );
    eprintln!(
        "scales:      n_t = {:.4}  j_th = {:.6e}  n_th = {:.6e}",
        scales.n_t, scales.j_th, scales.n_th
    );
    match &regime {
        Some(r) => eprintln!(
            "regime:      {} (dominance ratio {:.3})",
            r.regime, r.dominance_ratio
        ),
        None => eprintln!("regime:      below transparency"),
    }
    if let Some(n) = &noise {
        eprintln!(
            "noise:       dn^2/n^2 = {:.6e}  output/shot = {:.6e}",
            n.pnf_ratio, n.lfn_ratio
        );
    }

    let body = json!({
        "operating_point": op,
        "derived_scales": scales,
        "device": device,
        "near_class_boundary": near_boundary,
        "class_boundaries_beta_inv": { "microscopic_below": lower, "macroscopic_above": upper },
        "regime": regime,
        "noise": noise,
        "currents": currents,
        "diffusion": ctx.model,
    });
    let doc = document(&ctx.resolved(), body);
    match ctx.format {
        Format::Json => Ok(render_json(&doc)),
        Format::Csv => {
            let mut t = Table::new(&[
                "n_bar",
                "n_cap_bar",
                "quantum_efficiency",
                "n_t",
                "j_th",
                "n_th",
                "device",
                "regime",
            ]);
            t.push(vec![
                num(op.n_bar),
                num(op.n_cap_bar),
                num(op.quantum_efficiency),
                num(scales.n_t),
                num(scales.j_th),
                num(scales.n_th),
                text(device.to_string()),
                regime
                    .map(|r| text(r.regime.to_string()))
                    .unwrap_or(Value::Null),
            ]);
            Ok(t.render(Format::Csv, &ctx.resolved()))
        }
    }
}

// ---------------------------------------------------------------------------

pub fn thresholds(ctx: &Ctx) -> Result<String> {
    let p = ctx.cfg.device()?;
    let scales = derived_scales(&p)?;
    let nt = noise_threshold(&p)?;
    let sq = squeezing_threshold(&p)?;
    let device = classify_device(&p);
    let (lower, upper) = class_boundaries(&p);
    let threshold_ma = p
        .active_volume
        .map(|_| electrical_current(scales.j_th).unwrap_or(f64::NAN) * 1e3);

    let body = json!({
        "derived_scales": scales,
        "noise_threshold": nt,
        "squeezing_threshold": sq,
        "device": device,
        "class_boundaries_beta_inv": { "microscopic_below": lower, "macroscopic_above": upper },
        "threshold_current_mA": threshold_ma,
    });
    match ctx.format {
        Format::Json => Ok(render_json(&document(&ctx.resolved(), body))),
        Format::Csv => {
            let mut t = Table::new(&[
                "n_t", "j_th", "n_th", "n_delta", "n_sq", "device",
            ]);
            t.push(vec![
                num(scales.n_t),
                num(scales.j_th),
                num(scales.n_th),
                num(nt.n_delta),
                num(sq.n_sq),
                text(device.to_string()),
            ]);
            Ok(t.render(Format::Csv, &ctx.resolved()))
        }
    }
}

// ---------------------------------------------------------------------------

const AXIS_NAMES: &[&str] = &[
    "beta",
    "kappa_tau",
    "transparency_photons",
    "sigma",
    "pump_rate",
    "photon_number",
    "threshold_multiple",
];

fn apply_axis(cfg: &mut Config, name: &str, v: f64) -> Result<()> {
    let device = cfg.device.get_or_insert_with(Default::default);
    match name {
        "beta" => device.beta = Some(v),
        "kappa_tau" => device.kappa_tau = Some(v),
        "transparency_photons" => device.transparency_photons = Some(v),
        "sigma" => device.sigma = Some(v),
        "pump_rate" => {
            cfg.pump = Some(PumpConfig {
                rate: Some(v),
                ..Default::default()
            })
        }
        "photon_number" => {
            cfg.pump = Some(PumpConfig {
                photon_number: Some(v),
                ..Default::default()
            })
        }
        "threshold_multiple" => {
            cfg.pump = Some(PumpConfig {
                threshold_multiple: Some(v),
                ..Default::default()
            })
        }
        other => {
            return Err(Error::validation(
                "sweep.axes.name",
                format!("unknown axis `{other}`; known: {}", AXIS_NAMES.join(", ")),
            ))
        }
    }
    Ok(())
}

pub fn sweep(ctx: &Ctx) -> Result<String> {
    let spec: &SweepConfig = ctx
        .cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::validation("sweep", "config needs a `sweep` block"))?;
    if spec.axes.is_empty() {
        return Err(Error::validation("sweep.axes", "need at least one axis"));
    }
    for (i, a) in spec.axes.iter().enumerate() {
        if spec.axes[..i].iter().any(|b| b.name == a.name) {
            return Err(Error::validation(
                "sweep.axes",
                format!("duplicate axis `{}`", a.name),
            ));
        }
        if !AXIS_NAMES.contains(&a.name.as_str()) {
            return Err(Error::validation(
                "sweep.axes.name",
                format!("unknown axis `{}`; known: {}", a.name, AXIS_NAMES.join(", ")),
            ));
        }
    }
    if spec.sigmas.is_some() && spec.axes.iter().any(|a| a.name == "sigma") {
        return Err(Error::validation(
            "sweep.sigmas",
            "drop the sigma list when sigma is already an axis",
        ));
    }

    let grids: Vec<Vec<f64>> = spec
        .axes
        .iter()
        .map(crate::config::grid)
        .collect::<Result<_>>()?;
    let mut columns: Vec<&str> = spec.axes.iter().map(|a| a.name.as_str()).collect();
    columns.extend_from_slice(&[
        "sigma",
        "n_bar",
        "n_cap_bar",
        "gamma_cap_n",
        "gamma_n",
        "omega_r",
        "r",
        "pnf_approx",
        "pnf_exact",
        "lfn_approx",
        "lfn_exact",
        "regime",
        "device",
    ]);
    let mut t = Table::new(&columns);
    t.comments
        .push(format!("diffusion = {}", ctx.model));

    // odometer over the axis grids, first axis outermost
    let mut idx = vec![0usize; grids.len()];
    loop {
        let mut point = ctx.cfg.clone();
        for (j, a) in spec.axes.iter().enumerate() {
            apply_axis(&mut point, &a.name, grids[j][idx[j]])?;
        }
        let p0 = point.pumped_device()?;
        let sigmas = spec.sigmas.clone().unwrap_or_else(|| vec![p0.sigma]);
        for &sigma in &sigmas {
            let p = p0.with_pump(p0.pump_rate, sigma)?;
            let op = stationary_state(&p)?;
            let mut row: Vec<Value> = (0..grids.len()).map(|j| num(grids[j][idx[j]])).collect();
            row.push(num(sigma));
            row.push(num(op.n_bar));
            row.push(num(op.n_cap_bar));
            match fluctuation_rates(&p, &op) {
                Ok(rates) => {
                    row.push(num(rates.gamma_cap_n));
                    row.push(num(rates.gamma_n));
                    row.push(num(rates.omega_r));
                    row.push(num(rates.r));
                    row.push(num(pnf_approx(&p, op.n_bar)));
                    row.push(
                        pnf_exact(&p, &op, ctx.model)
                            .map(|v| num(v / (op.n_bar * op.n_bar)))
                            .unwrap_or(Value::Null),
                    );
                    row.push(num(lfn_approx(&p, op.n_bar, sigma)));
                    row.push(
                        lfn_exact(&p, &op, sigma, ctx.model)
                            .map(num)
                            .unwrap_or(Value::Null),
                    );
                    row.push(text(
                        classify_regime(&rates, ctx.dominance).regime.to_string(),
                    ));
                }
                Err(_) => {
                    for _ in 0..8 {
                        row.push(Value::Null);
                    }
                    row.push(text("below-transparency"));
                }
            }
            row.push(text(classify_device(&p).to_string()));
            t.push(row);
        }
        // advance the odometer, last axis fastest
        let mut k = grids.len();
        loop {
            if k == 0 {
                return Ok(t.render(ctx.format, &ctx.resolved()));
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < grids[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

// ---------------------------------------------------------------------------

pub fn figure(ctx: &Ctx, id: Option<u32>) -> Result<String> {
    let cfg_fig = ctx.cfg.figure.as_ref();
    let id = id
        .or(cfg_fig.map(|f| f.id))
        .ok_or_else(|| Error::validation("figure.id", "give a figure id (2, 3, 4, 5, 6, 8)"))?;
    let resolution = cfg_fig.and_then(|f| f.resolution);
    let t = crate::figures::figure_table(id, resolution, ctx.model, ctx.dominance)?;
    Ok(t.render(ctx.format, &ctx.resolved()))
}

// ---------------------------------------------------------------------------

pub struct SimulateArtifacts {
    pub report: String,
    /// one CSV per trajectory, written next to the report by the caller
    pub trajectories: Vec<(String, DeviceParams, Trajectory)>,
}

pub fn simulate(ctx: &Ctx) -> Result<SimulateArtifacts> {
    let sim = ctx
        .cfg
        .simulate
        .clone()
        .ok_or_else(|| Error::validation("simulate", "config needs a `simulate` block"))?;
    let seed = ctx.cfg.seed.ok_or_else(|| {
        Error::validation("seed", "simulation needs a seed (--seed or config.seed)")
    })?;
    if !(sim.t_end > 0.0) || !(sim.sample_dt > 0.0) {
        return Err(Error::validation(
            "simulate",
            "t_end and sample_dt must be > 0",
        ));
    }
    if sim.n_traj == 0 {
        return Err(Error::validation("simulate.n_traj", "must be >= 1"));
    }
    if sim.windows.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::validation("simulate.windows", "must be > 0"));
    }

    let p = ctx.cfg.pumped_device()?;
    let start = Instant::now();
    let mut integrator_dt = None;
    let trajs = match sim.method {
        Method::Gillespie => {
            let mode = if p.sigma == 0.0 {
                PumpMode::Regular
            } else {
                PumpMode::Poisson
            };
            let proc = build_jump_process(&p, mode)?;
            let opts = GillespieOptions {
                initial: None,
                max_events: sim.max_events.unwrap_or(DEFAULT_MAX_EVENTS),
            };
            gillespie_ensemble(&proc, sim.t_end, sim.sample_dt, seed, sim.n_traj, opts)?
        }
        Method::Langevin => {
            let base_dt = match sim.dt {
                Some(dt) if dt > 0.0 => dt,
                Some(_) => return Err(Error::validation("simulate.dt", "must be > 0")),
                None => max_stable_dt(&p)?,
            };
            // land an integer number of steps on every sample bin
            let k = (sim.sample_dt / base_dt).ceil().max(1.0) as usize;
            let dt = sim.sample_dt / k as f64;
            integrator_dt = Some(dt);
            let opts = LangevinOptions {
                initial: None,
                sample_every: k,
                noise_scale: 1.0,
            };
            langevin_ensemble(
                &p, p.sigma, dt, sim.t_end, seed, sim.n_traj, ctx.model, opts,
            )?
        }
    };
    let wall = start.elapsed().as_secs_f64();

    let moments = estimate_moments(&trajs, sim.burn_in)?;
    let fano = if sim.windows.is_empty() {
        fano_plateau(&trajs, sim.burn_in)?
    } else {
        let estimates = sim
            .windows
            .iter()
            .map(|&w| output_fano_from(&trajs, w, sim.burn_in))
            .collect::<Result<Vec<_>>>()?;
        FanoCurve {
            windows: sim.windows.clone(),
            estimates,
            plateau: None,
        }
    };
    let two_time = if sim.lags.is_empty() {
        None
    } else {
        Some(estimate_two_time(&trajs, &sim.lags, sim.burn_in)?)
    };

    let events: u64 = trajs
        .iter()
        .map(|tr| tr.channel_counts.iter().sum::<u64>())
        .sum();
    let samples: usize = trajs.iter().map(|tr| tr.len()).sum();
    eprintln!(
        "{} trajectories, {} samples, {:.3e} events, {:.1} s wall",
        trajs.len(),
        samples,
        events as f64,
        wall
    );

    let traj_meta: Vec<Value> = trajs
        .iter()
        .map(|tr| {
            json!({
                "seed": tr.seed,
                "samples": tr.len(),
                "truncated": tr.truncated,
                "boundary_hits": tr.boundary_hits,
                "channel_counts": tr.channel_counts,
                "total_emission": tr.total_emission(),
            })
        })
        .collect();
    let body = json!({
        "method": sim.method,
        "seed": seed,
        "diffusion": ctx.model,
        "integrator_dt": integrator_dt,
        "events_total": events,
        "trajectories": traj_meta,
        "moments": moments,
        "fano": fano,
        "two_time": two_time,
    });
    let report = render_json(&document(&ctx.resolved(), body));
    let trajectories = trajs
        .into_iter()
        .enumerate()
        .map(|(i, tr)| (format!("traj{i}.csv"), p, tr))
        .collect();
    Ok(SimulateArtifacts {
        report,
        trajectories,
    })
}

// ---------------------------------------------------------------------------

pub fn multimode_cmd(ctx: &Ctx, modes: Option<u64>, photons: Option<u64>) -> Result<String> {
    let from_cfg = ctx
        .cfg
        .multimode
        .clone()
        .unwrap_or(MultimodeConfig {
            modes: None,
            photons: None,
        });
    let mut effective = None;
    let (m, n) = match (
        modes.or(from_cfg.modes),
        photons.or(from_cfg.photons),
    ) {
        (Some(m), Some(n)) => (m, n),
        (None, None) => {
            let p = ctx.cfg.pumped_device()?;
            let op = stationary_state(&p)?;
            let em = effective_modes(&p, &op)?;
            eprintln!(
                "effective modes from the operating point: M = {} (gamma_n/Gamma_N = {:.3}), \
                 N = {} (output/Gamma_N = {:.3}), over-damped: {}",
                em.m, em.m_raw, em.n, em.n_raw, em.over_damped
            );
            effective = Some(em);
            (em.m, em.n)
        }
        _ => {
            return Err(Error::validation(
                "multimode",
                "give both MODES and PHOTONS (or neither, with a device config)",
            ))
        }
    };

    let exact = if m + n <= EXACT_SIZE_LIMIT {
        Some(microcanonical_pmf(m, n)?.probabilities)
    } else {
        eprintln!(
            "M + N = {} exceeds the exact-arithmetic limit {EXACT_SIZE_LIMIT}; \
             emitting the geometric form only",
            m + n
        );
        None
    };
    let geometric = if m >= 2 && n >= 1 {
        Some(geometric_approx_pmf(m, n)?.probabilities)
    } else {
        None
    };
    if exact.is_none() && geometric.is_none() {
        return Err(Error::validation(
            "multimode",
            "no distribution computable for these M, N",
        ));
    }

    let mut t = Table::new(&["n", "p_exact", "p_geometric"]);
    t.comments.push(format!(
        "M = {m} modes sharing N = {n} photons; per-mode mean {:.6e}, variance {:.6e}",
        mode_mean(m, n),
        mode_variance(m, n)
    ));
    if m >= 2 {
        t.comments.push(format!(
            "pairwise covariance {:.6e}",
            pairwise_covariance(m, n)
        ));
    }
    if let Some(em) = &effective {
        t.comments.push(format!(
            "effective modes: m_raw = {:.6}, n_raw = {:.6}, over_damped = {}",
            em.m_raw, em.n_raw, em.over_damped
        ));
    }
    let len = exact
        .as_ref()
        .map(|v| v.len())
        .max(geometric.as_ref().map(|v| v.len()))
        .unwrap();
    for k in 0..len {
        let pick = |v: &Option<Vec<f64>>| {
            v.as_ref()
                .and_then(|v| v.get(k).copied())
                .map(num)
                .unwrap_or(Value::Null)
        };
        t.push(vec![Value::from(k as u64), pick(&exact), pick(&geometric)]);
    }
    Ok(t.render(ctx.format, &ctx.resolved()))
}
