//! Run configuration: a single versioned JSON document. Command-line flags
//! override file values; every output artifact embeds the resolved form so a
//! run can be reproduced from its own header.

use std::fs;
use std::path::Path;

use lasernoise_core::{
    derived_scales, device_at_photon_number, DeviceParams, DiffusionModel, Error, Result,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<DeviceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<PumpConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<DiffusionModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dominance_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multimode: Option<MultimodeConfig>,
}

/// Device geometry in one of three forms: dimensionless ratios (kappa = 1
/// internal units), absolute rates, or a semiconductor volume preset.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transparency_photons: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transparency_carriers: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume_cm3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

/// Exactly one way of fixing the operating point.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub photon_number: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_multiple: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub name: String,
    pub scale: Scale,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<AxisConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gillespie,
    Langevin,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub method: Method,
    pub t_end: f64,
    pub sample_dt: f64,
    #[serde(default = "one")]
    pub n_traj: usize,
    #[serde(default)]
    pub burn_in: f64,
    /// integrator step for the langevin method; defaults to the largest
    /// stable step at the operating point
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// counting windows for the output Fano factor; empty = automatic curve
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub windows: Vec<f64>,
    /// lags for the two-time intensity correlation
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lags: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_events: Option<u64>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureConfig {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultimodeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub photons: Option<u64>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::validation("config", format!("{}: {e}", path.display())))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            Error::validation(
                "config",
                format!("{} (at field path `{}`)", e.inner(), e.path()),
            )
        })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::validation(
                "config.schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", cfg.schema_version),
            ));
        }
        Ok(cfg)
    }

    /// Device without an operating point; figure-scale ratio defaults
    /// (kappa tau = 1e4/3, transparency at 3/2 photons) fill missing fields.
    pub fn device(&self) -> Result<DeviceParams> {
        let d = self.device.clone().unwrap_or_default();
        let sigma = d.sigma.unwrap_or(1.0);
        let absolute =
            d.kappa.is_some() || d.tau.is_some() || d.transparency_carriers.is_some();
        let params = if let Some(v) = d.volume_cm3 {
            if absolute || d.beta.is_some() || d.kappa_tau.is_some() {
                return Err(Error::validation(
                    "device.volume_cm3",
                    "the volume preset fixes all geometry; drop the other fields",
                ));
            }
            DeviceParams::material_preset(v)?
        } else if absolute {
            let need = |field: &'static str, v: Option<f64>| {
                v.ok_or_else(|| {
                    Error::validation(field, "required with the absolute-rate device form")
                })
            };
            DeviceParams::new(
                need("device.beta", d.beta)?,
                need("device.tau", d.tau)?,
                need("device.transparency_carriers", d.transparency_carriers)?,
                need("device.kappa", d.kappa)?,
            )?
        } else {
            let beta = d.beta.ok_or_else(|| {
                Error::validation("device.beta", "required (no device form given)")
            })?;
            DeviceParams::from_ratios(
                beta,
                d.kappa_tau.unwrap_or(1e4 / 3.0),
                d.transparency_photons.unwrap_or(1.5),
            )?
        };
        params.with_pump(0.0, sigma)
    }

    /// Device with the pump resolved (zero pump when the block is absent).
    pub fn pumped_device(&self) -> Result<DeviceParams> {
        let params = self.device()?;
        let p = self.pump.clone().unwrap_or_default();
        let given = [
            p.rate.is_some(),
            p.photon_number.is_some(),
            p.threshold_multiple.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if given > 1 {
            return Err(Error::validation(
                "pump",
                "give exactly one of rate, photon_number, threshold_multiple",
            ));
        }
        if let Some(rate) = p.rate {
            params.with_pump(rate, params.sigma)
        } else if let Some(n) = p.photon_number {
            device_at_photon_number(&params, n)
        } else if let Some(mult) = p.threshold_multiple {
            if !(mult >= 0.0) {
                return Err(Error::validation(
                    "pump.threshold_multiple",
                    "must be >= 0",
                ));
            }
            let j_th = derived_scales(&params)?.j_th;
            params.with_pump(mult * j_th, params.sigma)
        } else {
            Ok(params)
        }
    }
}

pub fn grid(axis: &AxisConfig) -> Result<Vec<f64>> {
    if axis.points == 0 {
        return Err(Error::validation("sweep.axes.points", "must be >= 1"));
    }
    if axis.points == 1 {
        return Ok(vec![axis.min]);
    }
    if !(axis.min <= axis.max) {
        return Err(Error::validation("sweep.axes", "min must be <= max"));
    }
    match axis.scale {
        Scale::Linear => Ok((0..axis.points)
            .map(|i| {
                axis.min + (axis.max - axis.min) * i as f64 / (axis.points - 1) as f64
            })
            .collect()),
        Scale::Log => {
            if !(axis.min > 0.0) {
                return Err(Error::validation(
                    "sweep.axes",
                    "log scale needs min > 0",
                ));
            }
            let (la, lb) = (axis.min.ln(), axis.max.ln());
            Ok((0..axis.points)
                .map(|i| (la + (lb - la) * i as f64 / (axis.points - 1) as f64).exp())
                .collect())
        }
    }
}
