//! Linearized fluctuation dynamics around the stationary point and the
//! timescale-dominance regime classification.

use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::steady::OperatingPoint;

/// Coefficients of d/dt (dN, dn) = A (dN, dn) + noise:
/// A = [[-Gamma_N, -r w_R], [w_R / r, -gamma_n]].
///
/// The off-diagonal products are kept in algebraic form so the drift stays
/// finite at transparency, where w_R and r both vanish but w_R/r does not:
/// -r w_R = -2 kappa (n - n_t)/(n + 1/2),  w_R / r = (beta/tau)(2n + 1).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FluctuationRates {
    /// electronic relaxation rate Gamma_N = (1 + 2 beta n)/tau
    pub gamma_cap_n: f64,
    /// optical relaxation rate gamma_n = 2 kappa (n_t + 1/2)/(n + 1/2)
    pub gamma_n: f64,
    /// coupling frequency w_R = 2 kappa sqrt(beta (n - n_t)/(kappa tau))
    pub omega_r: f64,
    /// hole-burning ratio r = sqrt(kappa tau / beta * (n - n_t)/(n + 1/2)^2)
    pub r: f64,
    pub drift: Mat2,
}

pub fn fluctuation_rates(params: &DeviceParams, op: &OperatingPoint) -> Result<FluctuationRates> {
    let n = op.n_bar;
    let n_t = op.n_t;
    if n < n_t {
        return Err(Error::BelowTransparency { n_bar: n, n_t });
    }
    let k = params.kappa;
    let kt = params.kappa_tau();
    let gamma_cap_n = (1.0 + 2.0 * params.beta * n) / params.tau;
    let gamma_n = 2.0 * k * (n_t + 0.5) / (n + 0.5);
    let omega_r = 2.0 * k * (params.beta * (n - n_t) / kt).sqrt();
    let r = (kt / params.beta * (n - n_t) / ((n + 0.5) * (n + 0.5))).sqrt();
    let drift = Mat2::new(
        -gamma_cap_n,
        -2.0 * k * (n - n_t) / (n + 0.5),
        params.beta / params.tau * (2.0 * n + 1.0),
        -gamma_n,
    );
    Ok(FluctuationRates {
        gamma_cap_n,
        gamma_n,
        omega_r,
        r,
        drift,
    })
}

/// Dominant-timescale regime of the fluctuation dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// w_R dominant: oscillatory energy exchange at w_R, damping (Gamma_N + gamma_n)/2
    RelaxationOscillations,
    /// gamma_n dominant: thermal light-field fluctuations, coherence time 1/gamma_n
    OpticalRelaxation,
    /// Gamma_N dominant: carriers slave to photons, extra damping w_R^2/Gamma_N
    AdiabaticHoleBurning,
    Mixed,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::RelaxationOscillations => "relaxation-oscillations",
            Regime::OpticalRelaxation => "optical-relaxation",
            Regime::AdiabaticHoleBurning => "adiabatic-hole-burning",
            Regime::Mixed => "mixed",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: Regime,
    /// largest scale divided by the sum of the other two
    pub dominance_ratio: f64,
    /// the factor the ratio was compared against
    pub dominance_factor: f64,
}

/// A scale wins its regime when it strictly exceeds
/// dominance_factor * (sum of the other two); ties and weaker maxima are Mixed.
pub fn classify_regime(rates: &FluctuationRates, dominance_factor: f64) -> RegimeReport {
    let scales = [
        (rates.omega_r, Regime::RelaxationOscillations),
        (rates.gamma_n, Regime::OpticalRelaxation),
        (rates.gamma_cap_n, Regime::AdiabaticHoleBurning),
    ];
    let total: f64 = scales.iter().map(|(s, _)| s).sum();
    let (largest, candidate) = scales
        .iter()
        .cloned()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap();
    let rest = total - largest;
    let dominance_ratio = if rest > 0.0 {
        largest / rest
    } else if largest > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let regime = if dominance_ratio > dominance_factor {
        candidate
    } else {
        Regime::Mixed
    };
    RegimeReport {
        regime,
        dominance_ratio,
        dominance_factor,
    }
}
