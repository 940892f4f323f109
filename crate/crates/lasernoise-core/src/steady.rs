//! Stationary solution of the rate equations and the derived scales
//! (transparency photon number, threshold current, threshold photon number).

use serde::{Deserialize, Serialize};

use crate::device::{transparency_photon_number, DeviceParams};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DerivedScales {
    /// photon number at transparency, n_t = beta N_T / (2 kappa tau)
    pub n_t: f64,
    /// threshold current j_th = 2 kappa (1 - beta)/beta (n_t + 1/2)
    pub j_th: f64,
    /// photon number at threshold, n_th = sqrt(1/16 + j_th/(4 kappa)) - 1/4
    pub n_th: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// stationary mean cavity photon number
    pub n_bar: f64,
    /// stationary mean excitation number N-bar
    pub n_cap_bar: f64,
    pub n_t: f64,
    pub j_th: f64,
    pub n_th: f64,
    /// coherent output flux over pump rate, 2 kappa n_bar / j (0 when j = 0)
    pub quantum_efficiency: f64,
}

pub fn derived_scales(params: &DeviceParams) -> Result<DerivedScales> {
    params.validate()?;
    if params.beta == 0.0 {
        return Err(Error::validation(
            "beta",
            "threshold scales need beta > 0 (no coupling into the lasing mode)",
        ));
    }
    let n_t = transparency_photon_number(params);
    let j_th = 2.0 * params.kappa * (1.0 - params.beta) / params.beta * (n_t + 0.5);
    let n_th = (1.0 / 16.0 + j_th / (4.0 * params.kappa)).sqrt() - 0.25;
    Ok(DerivedScales { n_t, j_th, n_th })
}

/// Closed-form stationary photon number at pump rate j. Exact root of
/// j (2n + 1) = 4 kappa n^2 + 2 n (kappa + j_th).
pub fn stationary_photon_number(params: &DeviceParams, scales: &DerivedScales) -> f64 {
    let j = params.pump_rate;
    if j == 0.0 {
        return 0.0;
    }
    let x = (j - scales.j_th) / (4.0 * params.kappa);
    x - 0.25 + ((x + 0.25).powi(2) + scales.j_th / (4.0 * params.kappa)).sqrt()
}

/// Pump rate that produces stationary photon number n_bar (inverse of the
/// light-current characteristic).
pub fn pump_for_photon_number(params: &DeviceParams, n_bar: f64) -> Result<f64> {
    if !(n_bar >= 0.0) {
        return Err(Error::validation("n_bar", "must be >= 0"));
    }
    let scales = derived_scales(params)?;
    let k = params.kappa;
    Ok((4.0 * k * n_bar * n_bar + 2.0 * n_bar * (k + scales.j_th)) / (2.0 * n_bar + 1.0))
}

/// Convenience: same device re-pumped so that the stationary photon number is
/// exactly `n_bar`.
pub fn device_at_photon_number(params: &DeviceParams, n_bar: f64) -> Result<DeviceParams> {
    let j = pump_for_photon_number(params, n_bar)?;
    let mut p = *params;
    p.pump_rate = j;
    Ok(p)
}

pub fn stationary_state(params: &DeviceParams) -> Result<OperatingPoint> {
    let scales = derived_scales(params)?;
    let n_bar = stationary_photon_number(params, &scales);
    // N-bar from gain clamping; at n_bar = 0 the photon-balance form is 0/0,
    // the carrier balance alone gives N = j tau.
    let n_cap_bar = if n_bar > 0.0 {
        let n_t = scales.n_t;
        if n_t > 0.0 {
            params.n_cap_t * (1.0 + 1.0 / (2.0 * n_t)) / (1.0 + 1.0 / (2.0 * n_bar))
        } else {
            // N_T = 0: stationary photon balance 2(beta/tau) N (n + 1/2) = 2 kappa n
            params.kappa * params.tau / params.beta * n_bar / (n_bar + 0.5)
        }
    } else {
        params.pump_rate * params.tau
    };
    let quantum_efficiency = if params.pump_rate > 0.0 {
        2.0 * params.kappa * n_bar / params.pump_rate
    } else {
        0.0
    };
    Ok(OperatingPoint {
        n_bar,
        n_cap_bar,
        n_t: scales.n_t,
        j_th: scales.j_th,
        n_th: scales.n_th,
        quantum_efficiency,
    })
}

/// Right-hand sides of the two rate equations at (N, n) — used for residual
/// checks and by the simulators' drift verification.
pub fn rate_equation_rhs(params: &DeviceParams, n_cap: f64, n: f64) -> (f64, f64) {
    let bt = params.beta / params.tau;
    let gain = bt * (n_cap - params.n_cap_t);
    let d_cap = params.pump_rate - n_cap / params.tau - 2.0 * gain * n;
    let d_n = 2.0 * (gain - params.kappa) * n + bt * n_cap;
    (d_cap, d_n)
}

/// Relative residuals of both rate equations at the stationary point.
pub fn stationarity_residuals(params: &DeviceParams, op: &OperatingPoint) -> (f64, f64) {
    let (d_cap, d_n) = rate_equation_rhs(params, op.n_cap_bar, op.n_bar);
    // scale by the largest individual flow term in each equation
    let bt = params.beta / params.tau;
    let scale_cap = params
        .pump_rate
        .max(op.n_cap_bar / params.tau)
        .max((2.0 * bt * (op.n_cap_bar - params.n_cap_t) * op.n_bar).abs())
        .max(f64::MIN_POSITIVE);
    let scale_n = (2.0 * params.kappa * op.n_bar)
        .max(bt * op.n_cap_bar)
        .max(f64::MIN_POSITIVE);
    (d_cap.abs() / scale_cap, d_n.abs() / scale_n)
}
