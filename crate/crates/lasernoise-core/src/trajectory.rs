//! Sampled trajectories and their on-disk CSV form.

use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::jump::N_CHANNELS;

/// A trajectory sampled on a uniform grid. `emission_bins[k]` counts output
/// photons (cavity emission events, or the integrated output stream for the
/// Langevin integrator) in the interval ending at `t[k]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub sample_dt: f64,
    pub t: Vec<f64>,
    pub n_cap: Vec<f64>,
    pub n: Vec<f64>,
    pub emission_bins: Vec<f64>,
    pub seed: u64,
    pub method: &'static str,
    /// jump runs only: the event budget ran out before t_end
    pub truncated: bool,
    /// langevin runs only: how often a variable had to be reflected at zero
    pub boundary_hits: u64,
    /// jump runs only: events fired per channel (all zero for langevin)
    pub channel_counts: [u64; N_CHANNELS],
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn total_emission(&self) -> f64 {
        self.emission_bins.iter().sum()
    }

    /// CSV dump: `#` header lines carry the device parameters (as JSON), the
    /// seed, the method and the sample step, so a file is self-describing.
    pub fn write_csv<W: std::io::Write>(&self, params: &DeviceParams, mut w: W) -> Result<()> {
        let params_json = serde_json::to_string(params)
            .map_err(|e| Error::numerical("trajectory header", e.to_string()))?;
        let io = |e: std::io::Error| Error::numerical("trajectory write", e.to_string());
        writeln!(w, "# params = {params_json}").map_err(io)?;
        writeln!(w, "# seed = {}", self.seed).map_err(io)?;
        writeln!(w, "# method = {}", self.method).map_err(io)?;
        writeln!(w, "# sample_dt = {}", self.sample_dt).map_err(io)?;
        writeln!(w, "t,N,n,emission_count_bin").map_err(io)?;
        for k in 0..self.t.len() {
            writeln!(
                w,
                "{},{},{},{}",
                self.t[k], self.n_cap[k], self.n[k], self.emission_bins[k]
            )
            .map_err(io)?;
        }
        Ok(())
    }
}
