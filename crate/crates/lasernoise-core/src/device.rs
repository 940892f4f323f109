//! Device constants, validation, material presets, size classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19; // C

/// The four device constants plus pump settings.
///
/// `beta`: spontaneous emission factor (fraction of spontaneous emission into
/// the lasing mode); `tau`: excitation lifetime; `n_cap_t`: excitation number
/// at transparency N_T; `kappa`: cavity loss rate; `pump_rate`: injected
/// excitations per unit time j; `sigma`: pump noise factor (1 = Poissonian
/// injection, 0 = perfectly regular).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub beta: f64,
    pub tau: f64,
    pub n_cap_t: f64,
    pub kappa: f64,
    #[serde(default)]
    pub pump_rate: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_volume: Option<f64>, // cm^3, set by material presets
}

fn default_sigma() -> f64 {
    1.0
}

impl DeviceParams {
    pub fn new(beta: f64, tau: f64, n_cap_t: f64, kappa: f64) -> Result<Self> {
        let p = DeviceParams {
            beta,
            tau,
            n_cap_t,
            kappa,
            pump_rate: 0.0,
            sigma: 1.0,
            active_volume: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Dimensionless construction in kappa = 1 time units: only the ratios
    /// (beta, kappa*tau, n_t) matter for the noise results. N_T is recovered
    /// from the transparency photon number n_t = beta N_T / (2 kappa tau).
    pub fn from_ratios(beta: f64, kappa_tau: f64, n_t: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::validation("beta", "must be > 0 to recover N_T"));
        }
        if !(kappa_tau > 0.0) {
            return Err(Error::validation("kappa_tau", "must be > 0"));
        }
        if !(n_t >= 0.0) {
            return Err(Error::validation("n_t", "must be >= 0"));
        }
        DeviceParams::new(beta, kappa_tau, 2.0 * kappa_tau * n_t / beta, 1.0)
    }

    pub fn with_pump(mut self, pump_rate: f64, sigma: f64) -> Result<Self> {
        self.pump_rate = pump_rate;
        self.sigma = sigma;
        self.validate()?;
        Ok(self)
    }

    /// Semiconductor material preset from the active volume (cm^3):
    /// beta = 1e-14 / V, N_T = 1e18 * V, tau = 3 ns, kappa = 1e12 / s.
    pub fn material_preset(volume: f64) -> Result<Self> {
        if !(volume > 0.0) {
            return Err(Error::validation("active_volume", "must be > 0 cm^3"));
        }
        let beta = 1e-14 / volume;
        if beta > 1.0 {
            return Err(Error::validation(
                "active_volume",
                format!("volume {volume:e} cm^3 implies beta = {beta:e} > 1"),
            ));
        }
        let mut p = DeviceParams::new(beta, 3e-9, 1e18 * volume, 1e12)?;
        p.active_volume = Some(volume);
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        fn finite(field: &'static str, x: f64) -> Result<()> {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(field, format!("must be finite, got {x}")))
            }
        }
        finite("beta", self.beta)?;
        finite("tau", self.tau)?;
        finite("n_cap_t", self.n_cap_t)?;
        finite("kappa", self.kappa)?;
        finite("pump_rate", self.pump_rate)?;
        finite("sigma", self.sigma)?;
        // beta = 0 is a valid decoupled limit for the simulators; the
        // threshold scales guard against it separately
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::validation("beta", "must be in [0, 1]"));
        }
        if !(self.tau > 0.0) {
            return Err(Error::validation("tau", "must be > 0"));
        }
        if !(self.n_cap_t >= 0.0) {
            return Err(Error::validation("n_cap_t", "must be >= 0"));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::validation("kappa", "must be > 0"));
        }
        if !(self.pump_rate >= 0.0) {
            return Err(Error::validation("pump_rate", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.sigma) {
            return Err(Error::validation("sigma", "must be in [0, 1]"));
        }
        if let Some(v) = self.active_volume {
            if !(v > 0.0) {
                return Err(Error::validation("active_volume", "must be > 0"));
            }
        }
        Ok(())
    }

    /// Gain can exceed cavity loss: kappa < beta N_T / tau. Reported, not
    /// enforced — below-transparency operation is still a valid input.
    pub fn lasing_condition(&self) -> bool {
        self.kappa < self.beta * self.n_cap_t / self.tau
    }

    pub fn kappa_tau(&self) -> f64 {
        self.kappa * self.tau
    }
}

/// Pump/emission rate (1/s) to electrical current (A).
pub fn electrical_current(rate: f64) -> Result<f64> {
    if !(rate >= 0.0) {
        return Err(Error::validation("rate", "must be >= 0"));
    }
    Ok(rate * ELEMENTARY_CHARGE)
}

/// Electrical current (A) to pump/emission rate (1/s).
pub fn rate_from_current(amperes: f64) -> Result<f64> {
    if !(amperes >= 0.0) {
        return Err(Error::validation("amperes", "must be >= 0"));
    }
    Ok(amperes / ELEMENTARY_CHARGE)
}

/// Device size class by spontaneous emission factor. The boundaries in
/// beta^-1 are 2(2 kappa tau)^2 (n_t + 1/2) (macroscopic above) and
/// 4 kappa tau (n_t + 1/2) (microscopic below); ties go to the larger class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaserType {
    Macroscopic,
    Mesoscopic,
    Microscopic,
}

impl std::fmt::Display for LaserType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LaserType::Macroscopic => "macroscopic",
            LaserType::Mesoscopic => "mesoscopic",
            LaserType::Microscopic => "microscopic",
        };
        f.write_str(s)
    }
}

/// (beta^-1 at the mesoscopic/microscopic boundary, beta^-1 at the
/// macroscopic/mesoscopic boundary).
pub fn class_boundaries(params: &DeviceParams) -> (f64, f64) {
    let kt = params.kappa_tau();
    let a = transparency_photon_number(params) + 0.5;
    (4.0 * kt * a, 2.0 * (2.0 * kt) * (2.0 * kt) * a)
}

/// n_t = beta N_T / (2 kappa tau).
pub fn transparency_photon_number(params: &DeviceParams) -> f64 {
    params.beta * params.n_cap_t / (2.0 * params.kappa * params.tau)
}

pub fn classify_device(params: &DeviceParams) -> LaserType {
    let (lower, upper) = class_boundaries(params);
    let beta_inv = 1.0 / params.beta;
    // boundary values belong to the larger class
    if beta_inv >= upper {
        LaserType::Macroscopic
    } else if beta_inv >= lower {
        LaserType::Mesoscopic
    } else {
        LaserType::Microscopic
    }
}
