//! Integer jump process underlying the rate equations: channel table,
//! propensities, and the drift identity used to cross-check the simulators.

use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PumpMode {
    /// pump events arrive as a Poisson stream at rate j (sigma = 1)
    Poisson,
    /// pump events at exact multiples of 1/j (sigma = 0)
    Regular,
}

/// One transition channel: state change and a label. Rates are evaluated by
/// `JumpProcess::rates` so the table itself stays `Copy`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Channel {
    pub d_cap: i64,
    pub d_n: i64,
    pub label: &'static str,
    /// channel event also emits one output photon at the cavity mirror
    pub emits: bool,
}

pub const N_CHANNELS: usize = 6;

pub const CHANNELS: [Channel; N_CHANNELS] = [
    Channel { d_cap: 1, d_n: 0, label: "pump", emits: false },
    Channel { d_cap: -1, d_n: 0, label: "non-lasing loss", emits: false },
    Channel { d_cap: -1, d_n: 1, label: "spontaneous", emits: false },
    Channel { d_cap: -1, d_n: 1, label: "stimulated", emits: false },
    Channel { d_cap: 1, d_n: -1, label: "absorption", emits: false },
    Channel { d_cap: 0, d_n: -1, label: "cavity emission", emits: true },
];

pub const PUMP_CHANNEL: usize = 0;
pub const EMISSION_CHANNEL: usize = 5;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct JumpProcess {
    pub params: DeviceParams,
    pub pump_mode: PumpMode,
}

/// The jump simulator realizes sigma = 1 (Poisson pump) or sigma = 0
/// (regular pump) exactly; intermediate pump statistics have no microscopic
/// event model here and are left to the Langevin integrator.
pub fn build_jump_process(params: &DeviceParams, pump_mode: PumpMode) -> Result<JumpProcess> {
    params.validate()?;
    let want = match pump_mode {
        PumpMode::Poisson => 1.0,
        PumpMode::Regular => 0.0,
    };
    if params.sigma != want {
        return Err(Error::UnsupportedPump(format!(
            "jump simulation supports sigma = 1 (poisson) or sigma = 0 (regular); \
             got sigma = {} with {:?} pump — use the langevin integrator for \
             intermediate pump noise",
            params.sigma, pump_mode
        )));
    }
    if pump_mode == PumpMode::Regular && params.pump_rate <= 0.0 {
        return Err(Error::UnsupportedPump(
            "regular pumping needs pump_rate > 0".into(),
        ));
    }
    Ok(JumpProcess {
        params: *params,
        pump_mode,
    })
}

impl JumpProcess {
    /// Propensities at integer state (N, n). The pump slot is filled only in
    /// Poisson mode; regular pump events are scheduled deterministically.
    pub fn rates(&self, n_cap: u64, n: u64, out: &mut [f64; N_CHANNELS]) {
        let p = &self.params;
        let bt = p.beta / p.tau;
        let ncf = n_cap as f64;
        let nf = n as f64;
        out[0] = match self.pump_mode {
            PumpMode::Poisson => p.pump_rate,
            PumpMode::Regular => 0.0,
        };
        out[1] = (1.0 - p.beta) * ncf / p.tau;
        out[2] = bt * ncf;
        out[3] = 2.0 * bt * ncf * nf;
        out[4] = 2.0 * bt * p.n_cap_t * nf;
        out[5] = 2.0 * p.kappa * nf;
    }

    /// Sum of delta * rate over all channels at real-valued (N, n);
    /// equals the rate-equation right-hand side identically.
    pub fn drift(&self, n_cap: f64, n: f64) -> (f64, f64) {
        let p = &self.params;
        let bt = p.beta / p.tau;
        let rates = [
            p.pump_rate, // drift includes the pump in either mode
            (1.0 - p.beta) * n_cap / p.tau,
            bt * n_cap,
            2.0 * bt * n_cap * n,
            2.0 * bt * p.n_cap_t * n,
            2.0 * p.kappa * n,
        ];
        let mut d_cap = 0.0;
        let mut d_n = 0.0;
        for (c, r) in CHANNELS.iter().zip(rates) {
            d_cap += c.d_cap as f64 * r;
            d_n += c.d_n as f64 * r;
        }
        (d_cap, d_n)
    }
}
