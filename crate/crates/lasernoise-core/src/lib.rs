//! Photon-number rate-equation model of a single-mode laser: stationary
//! operating points, linearized intensity-noise formulas (photon-number
//! variance, low-frequency output noise, squeezing and noise thresholds,
//! spectra and two-time correlations), exact jump-process and approximate
//! Langevin simulation with counting-statistics estimators, and the
//! uniform-composition multimode photon statistics of the squeezed output.

pub mod device;
pub mod diffusion;
pub mod error;
pub mod estimators;
pub mod gillespie;
pub mod jump;
pub mod langevin;
pub mod linalg;
pub mod multimode;
pub mod noise;
pub mod rates;
pub mod steady;
pub mod trajectory;

pub use device::{
    class_boundaries, classify_device, electrical_current, rate_from_current,
    transparency_photon_number, DeviceParams, LaserType, ELEMENTARY_CHARGE,
};
pub use diffusion::{diffusion_matrix, stationary_diffusion, DiffusionModel};
pub use error::{Error, Result};
pub use estimators::{
    estimate_moments, estimate_two_time, fano_plateau, output_fano, output_fano_from,
    EnsembleEstimate, FanoCurve, MomentEstimates, TwoTimeEstimates,
};
pub use gillespie::{
    gillespie_ensemble, gillespie_run, gillespie_run_with, GillespieOptions, DEFAULT_MAX_EVENTS,
};
pub use jump::{build_jump_process, Channel, JumpProcess, PumpMode, CHANNELS};
pub use langevin::{langevin_ensemble, langevin_run, langevin_run_with, LangevinOptions};
pub use linalg::{lyapunov_2x2, lyapunov_residual, Mat2, Vec2};
pub use multimode::{
    effective_modes, geometric_approx_pmf, microcanonical_pmf, microcanonical_pmf_exact,
    mode_mean, mode_variance, pairwise_covariance, sample_composition, sample_composition_with,
    EffectiveModes, PhotonDistribution,
};
pub use noise::{
    lfn_approx, lfn_exact, noise_report, noise_threshold, pnf_approx, pnf_exact, spectrum,
    squeezing_threshold, stationary_covariance, to_db, two_time_correlation_approx,
    two_time_correlation_exact, two_time_integral_exact, NoiseReport, NoiseThreshold,
    SqueezingThreshold, TwoTimeApprox, TwoTimeExact,
};
pub use rates::{classify_regime, fluctuation_rates, FluctuationRates, Regime, RegimeReport};
pub use steady::{
    derived_scales, device_at_photon_number, pump_for_photon_number, rate_equation_rhs,
    stationarity_residuals, stationary_photon_number, stationary_state, DerivedScales,
    OperatingPoint,
};
pub use trajectory::Trajectory;
