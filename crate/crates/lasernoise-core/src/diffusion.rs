//! Noise (diffusion) matrices for the Langevin description. Two conventions
//! are shipped because the published correlation table differs from the
//! per-channel rate sum of the underlying jump process in the stimulated
//! emission and carrier-loss entries; the discrepancy matters for squeezing.

use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::linalg::Mat2;
use crate::steady::OperatingPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffusionModel {
    /// correlation table as published: D_NN = sigma j + (beta/tau)(n+1)N
    /// + 2(beta/tau) N_T n + (beta/tau) N; D_nn and D_Nn without the
    /// stimulated-emission and non-lasing-loss channel sums
    Paper,
    /// sum of jump-channel rates, the convention realized exactly by the
    /// jump simulator
    Kinetic,
}

impl std::fmt::Display for DiffusionModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DiffusionModel::Paper => "paper",
            DiffusionModel::Kinetic => "kinetic",
        })
    }
}

/// Symmetric diffusion matrix for (q_N, q_n) evaluated at state (N, n) with
/// pump noise factor sigma. Both conventions are positive semidefinite for
/// N, n >= 0.
pub fn diffusion_matrix(
    params: &DeviceParams,
    n_cap: f64,
    n: f64,
    sigma: f64,
    model: DiffusionModel,
) -> Mat2 {
    let bt = params.beta / params.tau;
    let j = params.pump_rate;
    let k = params.kappa;
    match model {
        DiffusionModel::Paper => {
            let exchange = 2.0 * bt * params.n_cap_t * n + bt * n_cap;
            Mat2::new(
                sigma * j + bt * (n + 1.0) * n_cap + exchange,
                -exchange,
                -exchange,
                2.0 * k * n + exchange,
            )
        }
        DiffusionModel::Kinetic => {
            // channels swapping one excitation for one photon (or back):
            // spontaneous + stimulated + absorption
            let exchange = bt * n_cap + 2.0 * bt * n_cap * n + 2.0 * bt * params.n_cap_t * n;
            Mat2::new(
                sigma * j + (1.0 - params.beta) * n_cap / params.tau + exchange,
                -exchange,
                -exchange,
                2.0 * k * n + exchange,
            )
        }
    }
}

/// Diffusion matrix at the stationary operating point.
pub fn stationary_diffusion(
    params: &DeviceParams,
    op: &OperatingPoint,
    sigma: f64,
    model: DiffusionModel,
) -> Mat2 {
    diffusion_matrix(params, op.n_cap_bar, op.n_bar, sigma, model)
}
