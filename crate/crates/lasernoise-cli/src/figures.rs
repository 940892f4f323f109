//! Figure data generators. All jobs run in kappa = 1 internal units with the
//! fixed gain medium (transparency at 3/2 photons, kappa tau = 1e4/3) unless
//! the job itself scans those ratios; outputs are plain data tables, plotting
//! is external.

use lasernoise_core::*;
use serde_json::Value;

use crate::output::{num, text, Table};

const KT: f64 = 1e4 / 3.0;
const N_T: f64 = 1.5;

fn ratio_device(beta: f64) -> Result<DeviceParams> {
    DeviceParams::from_ratios(beta, KT, N_T)
}

fn log_points(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (la, lb) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (la + (lb - la) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

pub fn figure_table(
    id: u32,
    resolution: Option<usize>,
    model: DiffusionModel,
    dominance: f64,
) -> Result<Table> {
    match id {
        2 => regime_map(resolution.unwrap_or(200), dominance),
        3 => fluctuation_map(resolution.unwrap_or(200)),
        4 => noise_vs_pump_curves(resolution.unwrap_or(400)),
        5 => threshold_curves(resolution.unwrap_or(400)),
        6 => device_characteristics(resolution.unwrap_or(400)),
        8 => two_time_curve(resolution.unwrap_or(400), model),
        other => Err(Error::validation(
            "figure.id",
            format!("unknown figure {other}; available: 2, 3, 4, 5, 6, 8"),
        )),
    }
}

/// Dominant-timescale regime over the (photon number, beta) plane, with the
/// threshold photon number per beta as overlay.
fn regime_map(res: usize, dominance: f64) -> Result<Table> {
    let mut t = Table::new(&["beta", "n_bar", "regime", "dominance_ratio", "n_th"]);
    t.comments.push(format!(
        "regime grid at n_t = {N_T}, kappa tau = {KT:.6}; a scale dominates when it exceeds \
         {dominance} x the sum of the other two"
    ));
    for &beta in &log_points(1e-8, 1e-1, res) {
        let params = ratio_device(beta)?;
        let n_th = derived_scales(&params)?.n_th;
        for &n in &log_points(1.0, 1e8, res) {
            let p = device_at_photon_number(&params, n)?;
            let op = stationary_state(&p)?;
            let (label, ratio) = match fluctuation_rates(&p, &op) {
                Ok(rates) => {
                    let rep = classify_regime(&rates, dominance);
                    (rep.regime.to_string(), num(rep.dominance_ratio))
                }
                Err(_) => ("below-transparency".to_string(), Value::Null),
            };
            t.push(vec![num(beta), num(n), text(label), ratio, num(n_th)]);
        }
    }
    Ok(t)
}

/// Photon-number fluctuations over the shot level, same plane as the regime
/// map. The contour levels of the published plot go up by 10^(5/9) per step.
fn fluctuation_map(res: usize) -> Result<Table> {
    let mut t = Table::new(&["beta", "n_bar", "pnf_over_shot"]);
    t.comments.push(format!(
        "dn^2 / n_bar at n_t = {N_T}, kappa tau = {KT:.6}; contour levels 10^(5k/9), \
         k = 0, 1, 2, ... (factor 3.594 per contour, level 1 bounds the black region)"
    ));
    for &beta in &log_points(1e-8, 1e-1, res) {
        let params = ratio_device(beta)?;
        for &n in &log_points(1.0, 1e8, res) {
            t.push(vec![num(beta), num(n), num(pnf_approx(&params, n) * n)]);
        }
    }
    Ok(t)
}

/// Output-noise curves against pump strength for the four pump noise factors.
fn noise_vs_pump_curves(res: usize) -> Result<Table> {
    let params = ratio_device(1e-3)?;
    let j_th = derived_scales(&params)?.j_th;
    let mut t = Table::new(&[
        "j_over_jth",
        "pump_rate",
        "n_bar",
        "db_sigma_1",
        "db_sigma_0_25",
        "db_sigma_0_0625",
        "db_sigma_0",
    ]);
    t.comments.push(format!(
        "low-frequency output noise in dB over shot at beta = 1e-3, n_t = {N_T}, \
         kappa tau = {KT:.6}"
    ));
    for &mult in &log_points(0.3, 1e3, res) {
        let j = mult * j_th;
        let p = params.with_pump(j, 1.0)?;
        let n = stationary_state(&p)?.n_bar;
        let db = |sigma: f64| num(to_db(lfn_approx(&p, n, sigma)));
        t.push(vec![
            num(mult),
            num(j),
            num(n),
            db(1.0),
            db(0.25),
            db(0.0625),
            db(0.0),
        ]);
    }
    Ok(t)
}

/// Laser threshold, half-thermal-noise threshold, squeezing threshold
/// against the inverse spontaneous-emission factor.
fn threshold_curves(res: usize) -> Result<Table> {
    let mut t = Table::new(&["beta_inv", "beta", "n_th", "n_delta", "n_sq"]);
    t.comments.push(format!(
        "threshold photon numbers at n_t = {N_T}, kappa tau = {KT:.6}"
    ));
    for &beta_inv in &log_points(10.0, 1e8, res) {
        let beta = 1.0 / beta_inv;
        let params = ratio_device(beta)?;
        t.push(vec![
            num(beta_inv),
            num(beta),
            num(derived_scales(&params)?.n_th),
            num(noise_threshold(&params)?.n_delta),
            num(squeezing_threshold(&params)?.n_sq),
        ]);
    }
    Ok(t)
}

/// Photon-number fluctuations and output noise against pump strength for a
/// mesoscopic (beta = 1e-4) and a microscopic (beta = 1e-2) device; marker
/// rows pin the output levels 2 kappa n_bar = j_th and 9 j_th.
fn device_characteristics(res: usize) -> Result<Table> {
    let mut t = Table::new(&[
        "beta",
        "j_over_jth",
        "pump_rate",
        "n_bar",
        "pnf_db",
        "lfn_db",
        "marker",
    ]);
    t.comments.push(format!(
        "dn^2/n_bar and low-frequency output noise (sigma = 1) in dB over shot at \
         n_t = {N_T}, kappa tau = {KT:.6}"
    ));
    for &beta in &[1e-4, 1e-2] {
        let params = ratio_device(beta)?;
        let j_th = derived_scales(&params)?.j_th;
        // (pump multiple, marker label)
        let mut xs: Vec<(f64, &str)> = log_points(0.3, 1e3, res)
            .into_iter()
            .map(|m| (m, ""))
            .collect();
        for (factor, label) in [(1.0, "2kn=jth"), (9.0, "2kn=9jth")] {
            let n_mark = factor * j_th / (2.0 * params.kappa);
            let j_mark = pump_for_photon_number(&params, n_mark)?;
            xs.push((j_mark / j_th, label));
        }
        xs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (mult, label) in xs {
            let p = params.with_pump(mult * j_th, 1.0)?;
            let n = stationary_state(&p)?.n_bar;
            t.push(vec![
                num(beta),
                num(mult),
                num(mult * j_th),
                num(n),
                num(to_db(pnf_approx(&p, n) * n)),
                num(to_db(lfn_approx(&p, n, 1.0))),
                text(label),
            ]);
        }
    }
    Ok(t)
}

/// Two-time correlation of the output intensity at a point where the optical
/// decay outpaces the carriers fivefold (gamma_n / Gamma_N = 5).
fn two_time_curve(res: usize, model: DiffusionModel) -> Result<Table> {
    let base = DeviceParams::from_ratios(0.5, 9.375, N_T)?;
    let params = device_at_photon_number(&base, 2.0)?.with_pump(
        pump_for_photon_number(&base, 2.0)?,
        1.0,
    )?;
    let op = stationary_state(&params)?;
    let rates = fluctuation_rates(&params, &op)?;
    let em = effective_modes(&params, &op)?;
    let exact0 = two_time_correlation_exact(&params, &op, 0.0, 1.0, model)?;
    let approx0 = two_time_correlation_approx(&params, &op, 0.0)?;
    let mut t = Table::new(&[
        "dt",
        "exact_smooth",
        "approx_smooth",
        "approx_bunching",
        "approx_anti_bunching",
    ]);
    t.comments.push(format!(
        "gamma_n / Gamma_N = {:.3}, n_bar = {:.3}, sigma = 1, {} diffusion",
        em.m_raw, op.n_bar, model
    ));
    t.comments.push(format!(
        "delta weight (shot part) {:.6}; split form applicable: {}",
        exact0.delta_weight, !approx0.regime_warning
    ));
    t.comments.push(format!(
        "relaxation rates gamma_n = {:.4}, gamma_cap_n = {:.4}",
        rates.gamma_n, rates.gamma_cap_n
    ));
    for i in 0..res {
        let dt = 25.0 * i as f64 / (res - 1) as f64;
        let exact = two_time_correlation_exact(&params, &op, dt, 1.0, model)?;
        let approx = two_time_correlation_approx(&params, &op, dt)?;
        t.push(vec![
            num(dt),
            num(exact.smooth),
            num(approx.smooth()),
            num(approx.bunching),
            num(approx.anti_bunching),
        ]);
    }
    Ok(t)
}
