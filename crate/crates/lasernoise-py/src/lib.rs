//! Python extension module: device construction, stationary analysis, the
//! linearized noise formulas, jump/Langevin simulation with counting
//! statistics, and the multimode occupation distributions.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use lasernoise_core as ln;
use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn pyerr(e: ln::Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_model(name: &str) -> PyResult<ln::DiffusionModel> {
    match name {
        "paper" => Ok(ln::DiffusionModel::Paper),
        "kinetic" => Ok(ln::DiffusionModel::Kinetic),
        other => Err(PyValueError::new_err(format!(
            "unknown diffusion model `{other}`; use \"paper\" or \"kinetic\""
        ))),
    }
}

// ---------------------------------------------------------------------------
// result types
// ---------------------------------------------------------------------------

/// Stationary operating point together with the derived device scales.
#[pyclass(frozen, get_all)]
#[derive(Clone)]
struct OperatingPoint {
    n_bar: f64,
    n_cap_bar: f64,
    quantum_efficiency: f64,
    n_t: f64,
    j_th: f64,
    n_th: f64,
}

#[pymethods]
impl OperatingPoint {
    fn __repr__(&self) -> String {
        format!(
            "OperatingPoint(n_bar={:.6e}, n_cap_bar={:.6e}, quantum_efficiency={:.4})",
            self.n_bar, self.n_cap_bar, self.quantum_efficiency
        )
    }
}

impl From<ln::OperatingPoint> for OperatingPoint {
    fn from(op: ln::OperatingPoint) -> Self {
        OperatingPoint {
            n_bar: op.n_bar,
            n_cap_bar: op.n_cap_bar,
            quantum_efficiency: op.quantum_efficiency,
            n_t: op.n_t,
            j_th: op.j_th,
            n_th: op.n_th,
        }
    }
}

/// Linearized fluctuation rates at an operating point.
#[pyclass(frozen, get_all)]
#[derive(Clone)]
struct Rates {
    gamma_cap_n: f64,
    gamma_n: f64,
    omega_r: f64,
    r: f64,
}

#[pymethods]
impl Rates {
    fn __repr__(&self) -> String {
        format!(
            "Rates(gamma_cap_n={:.6e}, gamma_n={:.6e}, omega_r={:.6e}, r={:.6e})",
            self.gamma_cap_n, self.gamma_n, self.omega_r, self.r
        )
    }
}

/// A simulation estimate with its batch-mean standard error.
#[pyclass(frozen, get_all)]
#[derive(Clone)]
struct Estimate {
    value: f64,
    std_error: f64,
    segments: u64,
    effective_samples: f64,
}

#[pymethods]
impl Estimate {
    fn __repr__(&self) -> String {
        format!("Estimate({:.6e} +- {:.2e})", self.value, self.std_error)
    }
}

impl From<ln::EnsembleEstimate> for Estimate {
    fn from(e: ln::EnsembleEstimate) -> Self {
        Estimate {
            value: e.value,
            std_error: e.std_error,
            segments: e.segments,
            effective_samples: e.effective_samples,
        }
    }
}

/// Stationary moments estimated from an ensemble.
#[pyclass(frozen, get_all)]
#[derive(Clone)]
struct Moments {
    mean_n_cap: Estimate,
    mean_n: Estimate,
    var_n_cap: Estimate,
    var_n: Estimate,
    cov: Estimate,
    burn_in: f64,
    samples: u64,
}

/// Two-time output correlation estimates on the sample-bin grid.
#[pyclass(frozen, get_all)]
#[derive(Clone)]
struct TwoTime {
    delta_weight: Estimate,
    same_bin_excess: Estimate,
    lags: Vec<f64>,
    covariances: Vec<Estimate>,
    resolution_warning: bool,
}

/// One sampled trajectory.
#[pyclass(frozen)]
struct Trajectory {
    inner: ln::Trajectory,
}

#[pymethods]
impl Trajectory {
    #[getter]
    fn t(&self) -> Vec<f64> {
        self.inner.t.clone()
    }
    /// carrier numbers on the sample grid
    #[getter]
    fn carriers(&self) -> Vec<f64> {
        self.inner.n_cap.clone()
    }
    /// photon numbers on the sample grid
    #[getter]
    fn photons(&self) -> Vec<f64> {
        self.inner.n.clone()
    }
    /// output photons counted per sample bin
    #[getter]
    fn emission_bins(&self) -> Vec<f64> {
        self.inner.emission_bins.clone()
    }
    #[getter]
    fn sample_dt(&self) -> f64 {
        self.inner.sample_dt
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }
    #[getter]
    fn method(&self) -> &str {
        self.inner.method
    }
    #[getter]
    fn truncated(&self) -> bool {
        self.inner.truncated
    }
    #[getter]
    fn boundary_hits(&self) -> u64 {
        self.inner.boundary_hits
    }
    #[getter]
    fn channel_counts(&self) -> Vec<u64> {
        self.inner.channel_counts.to_vec()
    }
    fn total_emission(&self) -> f64 {
        self.inner.total_emission()
    }
    fn __len__(&self) -> usize {
        self.inner.len()
    }
    fn __repr__(&self) -> String {
        format!(
            "Trajectory(method={}, seed={}, samples={})",
            self.inner.method,
            self.inner.seed,
            self.inner.len()
        )
    }
}

/// An ensemble of trajectories from one device, with its estimators.
#[pyclass(frozen)]
struct Run {
    params: ln::DeviceParams,
    trajs: Vec<ln::Trajectory>,
}

#[pymethods]
impl Run {
    #[getter]
    fn method(&self) -> &str {
        self.trajs.first().map(|tr| tr.method).unwrap_or("")
    }

    /// total simulated jump events (zero for Langevin runs)
    #[getter]
    fn events_total(&self) -> u64 {
        self.trajs
            .iter()
            .map(|tr| tr.channel_counts.iter().sum::<u64>())
            .sum()
    }

    fn __len__(&self) -> usize {
        self.trajs.len()
    }

    fn trajectory(&self, index: usize) -> PyResult<Trajectory> {
        self.trajs
            .get(index)
            .map(|tr| Trajectory { inner: tr.clone() })
            .ok_or_else(|| {
                PyIndexError::new_err(format!(
                    "trajectory index {index} out of range ({} available)",
                    self.trajs.len()
                ))
            })
    }

    /// Dump one trajectory as a self-describing CSV.
    #[pyo3(signature = (path, index = 0))]
    fn write_csv(&self, path: PathBuf, index: usize) -> PyResult<()> {
        let tr = self.trajs.get(index).ok_or_else(|| {
            PyIndexError::new_err(format!(
                "trajectory index {index} out of range ({} available)",
                self.trajs.len()
            ))
        })?;
        let f = File::create(&path).map_err(PyErr::from)?;
        tr.write_csv(&self.params, BufWriter::new(f)).map_err(pyerr)
    }

    #[pyo3(signature = (burn_in = 0.0))]
    fn moments(&self, burn_in: f64) -> PyResult<Moments> {
        let m = ln::estimate_moments(&self.trajs, burn_in).map_err(pyerr)?;
        Ok(Moments {
            mean_n_cap: m.mean_n_cap.into(),
            mean_n: m.mean_n.into(),
            var_n_cap: m.var_n_cap.into(),
            var_n: m.var_n.into(),
            cov: m.cov.into(),
            burn_in: m.burn_in,
            samples: m.samples,
        })
    }

    /// Fano factor of the output counts over windows of length `window`.
    #[pyo3(signature = (window, burn_in = 0.0))]
    fn output_fano(&self, window: f64, burn_in: f64) -> PyResult<Estimate> {
        ln::output_fano_from(&self.trajs, window, burn_in)
            .map(Estimate::from)
            .map_err(pyerr)
    }

    /// Fano factors over an automatic window sweep; returns
    /// (windows, estimates, plateau_index).
    #[pyo3(signature = (burn_in = 0.0))]
    fn fano_plateau(&self, burn_in: f64) -> PyResult<(Vec<f64>, Vec<Estimate>, Option<usize>)> {
        let c = ln::fano_plateau(&self.trajs, burn_in).map_err(pyerr)?;
        Ok((
            c.windows,
            c.estimates.into_iter().map(Estimate::from).collect(),
            c.plateau,
        ))
    }

    /// Two-time covariances of the output counts at the requested lags.
    #[pyo3(signature = (lags, burn_in = 0.0))]
    fn two_time(&self, lags: Vec<f64>, burn_in: f64) -> PyResult<TwoTime> {
        let e = ln::estimate_two_time(&self.trajs, &lags, burn_in).map_err(pyerr)?;
        Ok(TwoTime {
            delta_weight: e.delta_weight.into(),
            same_bin_excess: e.same_bin_excess.into(),
            lags: e.lags,
            covariances: e.covariances.into_iter().map(Estimate::from).collect(),
            resolution_warning: e.resolution_warning,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Run(method={}, trajectories={}, events={})",
            self.method(),
            self.trajs.len(),
            self.events_total()
        )
    }
}

// ---------------------------------------------------------------------------
// the device itself
// ---------------------------------------------------------------------------

/// A single-mode laser defined by its rate-equation parameters.
#[pyclass(frozen)]
#[derive(Clone)]
struct Device {
    inner: ln::DeviceParams,
}

impl Device {
    fn steady_inner(&self) -> PyResult<(ln::DeviceParams, ln::OperatingPoint)> {
        let op = ln::stationary_state(&self.inner).map_err(pyerr)?;
        Ok((self.inner, op))
    }
}

#[pymethods]
impl Device {
    /// Dimensionless construction (kappa = 1 time units) from the ratios
    /// that control the noise: beta, kappa*tau and the transparency photon
    /// number.
    #[new]
    #[pyo3(signature = (beta, kappa_tau = 1e4 / 3.0, transparency_photons = 1.5))]
    fn new(beta: f64, kappa_tau: f64, transparency_photons: f64) -> PyResult<Self> {
        ln::DeviceParams::from_ratios(beta, kappa_tau, transparency_photons)
            .map(|inner| Device { inner })
            .map_err(pyerr)
    }

    /// Construction from absolute rates: beta, carrier lifetime, carrier
    /// transparency number and cavity decay rate.
    #[staticmethod]
    fn absolute(beta: f64, tau: f64, transparency_carriers: f64, kappa: f64) -> PyResult<Self> {
        ln::DeviceParams::new(beta, tau, transparency_carriers, kappa)
            .map(|inner| Device { inner })
            .map_err(pyerr)
    }

    /// Semiconductor preset from the active volume in cm^3.
    #[staticmethod]
    fn preset(volume_cm3: f64) -> PyResult<Self> {
        ln::DeviceParams::material_preset(volume_cm3)
            .map(|inner| Device { inner })
            .map_err(pyerr)
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }
    #[getter]
    fn tau(&self) -> f64 {
        self.inner.tau
    }
    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }
    #[getter]
    fn transparency_carriers(&self) -> f64 {
        self.inner.n_cap_t
    }
    #[getter]
    fn transparency_photons(&self) -> f64 {
        ln::transparency_photon_number(&self.inner)
    }
    #[getter]
    fn pump_rate(&self) -> f64 {
        self.inner.pump_rate
    }
    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }
    #[getter]
    fn active_volume(&self) -> Option<f64> {
        self.inner.active_volume
    }

    /// Same device at pump rate `pump_rate`; `sigma` defaults to the
    /// current pump-noise factor.
    #[pyo3(signature = (pump_rate, sigma = None))]
    fn with_pump(&self, pump_rate: f64, sigma: Option<f64>) -> PyResult<Device> {
        self.inner
            .with_pump(pump_rate, sigma.unwrap_or(self.inner.sigma))
            .map(|inner| Device { inner })
            .map_err(pyerr)
    }

    /// Same device pumped so the stationary photon number is `n_bar`.
    fn at_photon_number(&self, n_bar: f64) -> PyResult<Device> {
        ln::device_at_photon_number(&self.inner, n_bar)
            .map(|inner| Device { inner })
            .map_err(pyerr)
    }

    /// Pump rate that yields stationary photon number `n_bar`.
    fn pump_for(&self, n_bar: f64) -> PyResult<f64> {
        ln::pump_for_photon_number(&self.inner, n_bar).map_err(pyerr)
    }

    fn steady(&self) -> PyResult<OperatingPoint> {
        Ok(ln::stationary_state(&self.inner).map_err(pyerr)?.into())
    }

    /// Size class: "macroscopic", "mesoscopic" or "microscopic".
    fn classify(&self) -> String {
        ln::classify_device(&self.inner).to_string()
    }

    /// (microscopic-below, macroscopic-above) boundaries in 1/beta.
    fn class_boundaries(&self) -> (f64, f64) {
        ln::class_boundaries(&self.inner)
    }

    fn rates(&self) -> PyResult<Rates> {
        let (p, op) = self.steady_inner()?;
        let r = ln::fluctuation_rates(&p, &op).map_err(pyerr)?;
        Ok(Rates {
            gamma_cap_n: r.gamma_cap_n,
            gamma_n: r.gamma_n,
            omega_r: r.omega_r,
            r: r.r,
        })
    }

    /// Dominant-timescale regime and its dominance ratio.
    #[pyo3(signature = (dominance = 1.0))]
    fn regime(&self, dominance: f64) -> PyResult<(String, f64)> {
        let (p, op) = self.steady_inner()?;
        let r = ln::fluctuation_rates(&p, &op).map_err(pyerr)?;
        let rep = ln::classify_regime(&r, dominance);
        Ok((rep.regime.to_string(), rep.dominance_ratio))
    }

    /// Photon number above which dn^2 < n_bar^2 / 2 (half the thermal level).
    fn noise_threshold(&self) -> PyResult<f64> {
        Ok(ln::noise_threshold(&self.inner).map_err(pyerr)?.n_delta)
    }

    /// Photon number where the sigma = 0 output noise crosses shot level.
    fn squeezing_threshold(&self) -> PyResult<f64> {
        Ok(ln::squeezing_threshold(&self.inner).map_err(pyerr)?.n_sq)
    }

    /// Threshold pump as an electrical current in mA (material presets only).
    fn threshold_current_ma(&self) -> PyResult<Option<f64>> {
        if self.inner.active_volume.is_none() {
            return Ok(None);
        }
        let j_th = ln::derived_scales(&self.inner).map_err(pyerr)?.j_th;
        Ok(Some(ln::electrical_current(j_th).map_err(pyerr)? * 1e3))
    }

    /// Compact relative photon-number variance dn^2 / n_bar^2.
    fn pnf_approx(&self) -> PyResult<f64> {
        let (p, op) = self.steady_inner()?;
        Ok(ln::pnf_approx(&p, op.n_bar))
    }

    /// Linearized relative photon-number variance dn^2 / n_bar^2.
    #[pyo3(signature = (model = "kinetic"))]
    fn pnf_exact(&self, model: &str) -> PyResult<f64> {
        let (p, op) = self.steady_inner()?;
        let v = ln::pnf_exact(&p, &op, parse_model(model)?).map_err(pyerr)?;
        Ok(v / (op.n_bar * op.n_bar))
    }

    /// Compact low-frequency output noise over shot level.
    #[pyo3(signature = (sigma = None))]
    fn lfn_approx(&self, sigma: Option<f64>) -> PyResult<f64> {
        let (p, op) = self.steady_inner()?;
        Ok(ln::lfn_approx(&p, op.n_bar, sigma.unwrap_or(p.sigma)))
    }

    /// Linearized low-frequency output noise over shot level.
    #[pyo3(signature = (sigma = None, model = "kinetic"))]
    fn lfn_exact(&self, sigma: Option<f64>, model: &str) -> PyResult<f64> {
        let (p, op) = self.steady_inner()?;
        ln::lfn_exact(&p, &op, sigma.unwrap_or(p.sigma), parse_model(model)?).map_err(pyerr)
    }

    /// Output intensity-noise spectrum over shot level at frequency omega.
    #[pyo3(signature = (omega, sigma = None, model = "kinetic"))]
    fn spectrum(&self, omega: f64, sigma: Option<f64>, model: &str) -> PyResult<f64> {
        let (p, op) = self.steady_inner()?;
        ln::spectrum(&p, &op, sigma.unwrap_or(p.sigma), omega, parse_model(model)?).map_err(pyerr)
    }

    /// Linearized two-time output correlation at lag dt:
    /// (delta_weight, smooth_part).
    #[pyo3(signature = (dt, sigma = None, model = "kinetic"))]
    fn two_time_exact(&self, dt: f64, sigma: Option<f64>, model: &str) -> PyResult<(f64, f64)> {
        let (p, op) = self.steady_inner()?;
        let c = ln::two_time_correlation_exact(
            &p,
            &op,
            dt,
            sigma.unwrap_or(p.sigma),
            parse_model(model)?,
        )
        .map_err(pyerr)?;
        Ok((c.delta_weight, c.smooth))
    }

    /// Split two-exponential form of the smooth correlation:
    /// (bunching_term, anti_bunching_term, regime_warning).
    fn two_time_approx(&self, dt: f64) -> PyResult<(f64, f64, bool)> {
        let (p, op) = self.steady_inner()?;
        let c = ln::two_time_correlation_approx(&p, &op, dt).map_err(pyerr)?;
        Ok((c.bunching, c.anti_bunching, c.regime_warning))
    }

    /// Effective (modes, photons, raw modes, raw photons, over_damped) of
    /// the squeezed output.
    fn effective_modes(&self) -> PyResult<(u64, u64, f64, f64, bool)> {
        let (p, op) = self.steady_inner()?;
        let em = ln::effective_modes(&p, &op).map_err(pyerr)?;
        Ok((em.m, em.n, em.m_raw, em.n_raw, em.over_damped))
    }

    /// Exact jump simulation. Sigma selects the pump statistics: 1 runs a
    /// Poisson pump, 0 a regular pump; anything else is rejected.
    #[pyo3(signature = (t_end, sample_dt, seed, n_traj = 1, max_events = None))]
    fn gillespie(
        &self,
        py: Python<'_>,
        t_end: f64,
        sample_dt: f64,
        seed: u64,
        n_traj: usize,
        max_events: Option<u64>,
    ) -> PyResult<Run> {
        let p = self.inner;
        let mode = if p.sigma == 0.0 {
            ln::PumpMode::Regular
        } else {
            ln::PumpMode::Poisson
        };
        let proc = ln::build_jump_process(&p, mode).map_err(pyerr)?;
        let opts = ln::GillespieOptions {
            initial: None,
            max_events: max_events.unwrap_or(ln::DEFAULT_MAX_EVENTS),
        };
        let trajs = py
            .allow_threads(|| ln::gillespie_ensemble(&proc, t_end, sample_dt, seed, n_traj, opts))
            .map_err(pyerr)?;
        Ok(Run { params: p, trajs })
    }

    /// Langevin integration of the linearized fluctuations around the
    /// stationary point; `dt` defaults to the largest stable step and is
    /// refined so an integer number of steps lands on each sample bin.
    #[pyo3(signature = (t_end, sample_dt, seed, n_traj = 1, dt = None, model = "kinetic"))]
    fn langevin(
        &self,
        py: Python<'_>,
        t_end: f64,
        sample_dt: f64,
        seed: u64,
        n_traj: usize,
        dt: Option<f64>,
        model: &str,
    ) -> PyResult<Run> {
        let p = self.inner;
        let model = parse_model(model)?;
        let base_dt = match dt {
            Some(dt) if dt > 0.0 => dt,
            Some(_) => return Err(PyValueError::new_err("dt must be > 0")),
            None => ln::langevin::max_stable_dt(&p).map_err(pyerr)?,
        };
        if !(sample_dt > 0.0) {
            return Err(PyValueError::new_err("sample_dt must be > 0"));
        }
        let k = (sample_dt / base_dt).ceil().max(1.0) as usize;
        let dt = sample_dt / k as f64;
        let opts = ln::LangevinOptions {
            initial: None,
            sample_every: k,
            noise_scale: 1.0,
        };
        let trajs = py
            .allow_threads(|| {
                ln::langevin_ensemble(&p, p.sigma, dt, t_end, seed, n_traj, model, opts)
            })
            .map_err(pyerr)?;
        Ok(Run { params: p, trajs })
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "Device(beta={:e}, kappa_tau={:e}, n_t={:.4}, pump_rate={:e}, sigma={})",
            p.beta,
            p.kappa * p.tau,
            ln::transparency_photon_number(p),
            p.pump_rate,
            p.sigma
        )
    }
}

// ---------------------------------------------------------------------------
// multimode statistics and small helpers
// ---------------------------------------------------------------------------

/// Exact occupation pmf of one of `modes` modes sharing `photons` photons.
#[pyfunction]
fn microcanonical_pmf(modes: u64, photons: u64) -> PyResult<Vec<f64>> {
    Ok(ln::microcanonical_pmf(modes, photons)
        .map_err(pyerr)?
        .probabilities)
}

/// Geometric (thermal) approximation of the occupation pmf.
#[pyfunction]
fn geometric_pmf(modes: u64, photons: u64) -> PyResult<Vec<f64>> {
    Ok(ln::geometric_approx_pmf(modes, photons)
        .map_err(pyerr)?
        .probabilities)
}

#[pyfunction]
fn mode_mean(modes: u64, photons: u64) -> f64 {
    ln::mode_mean(modes, photons)
}

#[pyfunction]
fn mode_variance(modes: u64, photons: u64) -> f64 {
    ln::mode_variance(modes, photons)
}

#[pyfunction]
fn pairwise_covariance(modes: u64, photons: u64) -> f64 {
    ln::pairwise_covariance(modes, photons)
}

/// dB relative to shot noise.
#[pyfunction]
fn to_db(ratio: f64) -> f64 {
    ln::to_db(ratio)
}

#[pymodule]
fn lasernoise(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Device>()?;
    m.add_class::<OperatingPoint>()?;
    m.add_class::<Rates>()?;
    m.add_class::<Estimate>()?;
    m.add_class::<Moments>()?;
    m.add_class::<TwoTime>()?;
    m.add_class::<Trajectory>()?;
    m.add_class::<Run>()?;
    m.add_function(wrap_pyfunction!(microcanonical_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(mode_mean, m)?)?;
    m.add_function(wrap_pyfunction!(mode_variance, m)?)?;
    m.add_function(wrap_pyfunction!(pairwise_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(to_db, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
