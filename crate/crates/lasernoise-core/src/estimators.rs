//! Stationary statistics from sampled trajectories. Error bars come from
//! batch means: each trajectory is cut into contiguous batches much longer
//! than the correlation time, per-batch raw moments are pooled, and the
//! standard error of any derived statistic is obtained by leave-one-batch-out
//! jackknife. Second moments are accumulated around a fixed shift (the first
//! usable sample) so large means do not eat the mantissa.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EnsembleEstimate {
    pub value: f64,
    pub std_error: f64,
    /// batches pooled across trajectories; error bars come from their spread
    pub segments: u64,
    /// raw sample count deflated by the measured autocorrelation of the
    /// series underlying this statistic
    pub effective_samples: f64,
}

#[derive(Clone, Debug)]
struct Batch {
    sums: Vec<f64>,
    count: f64,
}

/// Cut `m` serial samples into batches and accumulate `width` values per
/// sample. `b_target` overrides the default sqrt(m) batch count (used when
/// the values themselves are windowed and need longer batches).
fn build_batches<F: FnMut(usize, &mut [f64])>(
    m: usize,
    width: usize,
    b_target: Option<usize>,
    mut value_at: F,
    batches: &mut Vec<Batch>,
) {
    if m < 8 {
        return;
    }
    let b = b_target
        .unwrap_or_else(|| (m as f64).sqrt() as usize)
        .clamp(4, 64)
        .min(m / 2);
    let l = m / b;
    if l == 0 {
        return;
    }
    let mut buf = vec![0.0; width];
    for bi in 0..b {
        let mut sums = vec![0.0; width];
        for i in bi * l..(bi + 1) * l {
            value_at(i, &mut buf);
            for (s, v) in sums.iter_mut().zip(&buf) {
                *s += *v;
            }
        }
        batches.push(Batch {
            sums,
            count: l as f64,
        });
    }
}

fn pooled_means(batches: &[Batch]) -> (Vec<f64>, f64) {
    let width = batches[0].sums.len();
    let mut tot = vec![0.0; width];
    let mut tc = 0.0;
    for b in batches {
        for (t, s) in tot.iter_mut().zip(&b.sums) {
            *t += *s;
        }
        tc += b.count;
    }
    for t in tot.iter_mut() {
        *t /= tc;
    }
    (tot, tc)
}

fn jackknife<F: Fn(&[f64]) -> f64>(batches: &[Batch], g: F) -> (f64, f64) {
    let width = batches[0].sums.len();
    let mut tot = vec![0.0; width];
    let mut tc = 0.0;
    for b in batches {
        for (t, s) in tot.iter_mut().zip(&b.sums) {
            *t += *s;
        }
        tc += b.count;
    }
    let means: Vec<f64> = tot.iter().map(|s| s / tc).collect();
    let value = g(&means);
    let bn = batches.len();
    if bn < 2 {
        return (value, f64::NAN);
    }
    let mut loo = Vec::with_capacity(bn);
    let mut m = vec![0.0; width];
    for b in batches {
        let c = tc - b.count;
        for ((mm, t), s) in m.iter_mut().zip(&tot).zip(&b.sums) {
            *mm = (t - s) / c;
        }
        loo.push(g(&m));
    }
    let lm = loo.iter().sum::<f64>() / bn as f64;
    let var =
        loo.iter().map(|v| (v - lm) * (v - lm)).sum::<f64>() * (bn as f64 - 1.0) / bn as f64;
    (value, var.sqrt())
}

/// s²/SE² of the mean of one accumulated component: how many independent
/// samples the correlated record is worth.
fn effective_samples(batches: &[Batch], mean_idx: usize, sq_idx: usize) -> f64 {
    let (m, tc) = pooled_means(batches);
    let s2 = m[sq_idx] - m[mean_idx] * m[mean_idx];
    let bn = batches.len();
    if bn < 2 || s2 <= 0.0 {
        return tc;
    }
    let bmeans: Vec<f64> = batches
        .iter()
        .map(|b| b.sums[mean_idx] / b.count)
        .collect();
    let avg = bmeans.iter().sum::<f64>() / bn as f64;
    let vbm = bmeans.iter().map(|v| (v - avg) * (v - avg)).sum::<f64>() / (bn as f64 - 1.0);
    if vbm <= 0.0 {
        return tc;
    }
    let se2 = vbm / bn as f64;
    s2 / se2
}

fn estimate<F: Fn(&[f64]) -> f64>(
    batches: &[Batch],
    g: F,
    mean_idx: usize,
    sq_idx: usize,
) -> EnsembleEstimate {
    let (value, std_error) = jackknife(batches, g);
    EnsembleEstimate {
        value,
        std_error,
        segments: batches.len() as u64,
        effective_samples: effective_samples(batches, mean_idx, sq_idx),
    }
}

/// Stationary means, variances and the carrier–photon covariance.
/// Effective sample sizes refer to the underlying (N or n) series.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MomentEstimates {
    pub mean_n_cap: EnsembleEstimate,
    pub mean_n: EnsembleEstimate,
    pub var_n_cap: EnsembleEstimate,
    pub var_n: EnsembleEstimate,
    pub cov: EnsembleEstimate,
    pub burn_in: f64,
    pub samples: u64,
}

pub fn estimate_moments(trajs: &[Trajectory], burn_in: f64) -> Result<MomentEstimates> {
    let mut batches = Vec::new();
    let mut shift: Option<(f64, f64)> = None;
    for tr in trajs {
        let start = tr.t.partition_point(|&t| t < burn_in);
        let m = tr.len().saturating_sub(start);
        if m < 8 {
            continue;
        }
        let (cx, cy) = *shift.get_or_insert((tr.n_cap[start], tr.n[start]));
        build_batches(
            m,
            5,
            None,
            |i, out| {
                let u = tr.n_cap[start + i] - cx;
                let v = tr.n[start + i] - cy;
                out[0] = u;
                out[1] = v;
                out[2] = u * u;
                out[3] = v * v;
                out[4] = u * v;
            },
            &mut batches,
        );
    }
    if batches.len() < 2 {
        return Err(Error::StatisticalPower(
            "not enough post-burn-in samples for batch-mean error bars".into(),
        ));
    }
    let (cx, cy) = shift.unwrap();
    let samples = batches.iter().map(|b| b.count).sum::<f64>() as u64;
    Ok(MomentEstimates {
        mean_n_cap: estimate(&batches, |m| cx + m[0], 0, 2),
        mean_n: estimate(&batches, |m| cy + m[1], 1, 3),
        var_n_cap: estimate(&batches, |m| m[2] - m[0] * m[0], 0, 2),
        var_n: estimate(&batches, |m| m[3] - m[1] * m[1], 1, 3),
        cov: estimate(&batches, |m| m[4] - m[0] * m[1], 1, 3),
        burn_in,
        samples,
    })
}

/// Fano factor of photon counts in windows of length `window`, from the
/// emission bins of one trajectory. Windows overlap (stride one bin); batch
/// lengths are several windows so neighbouring batches stay nearly
/// independent.
pub fn output_fano(traj: &Trajectory, window: f64) -> Result<EnsembleEstimate> {
    output_fano_from(std::slice::from_ref(traj), window, 0.0)
}

pub fn output_fano_from(
    trajs: &[Trajectory],
    window: f64,
    burn_in: f64,
) -> Result<EnsembleEstimate> {
    if !(window > 0.0) || !window.is_finite() {
        return Err(Error::validation("window", "must be positive and finite"));
    }
    let mut batches = Vec::new();
    let mut shift: Option<f64> = None;
    let mut nonoverlap: u64 = 0;
    for tr in trajs {
        let dt = tr.sample_dt;
        let w = ((window / dt).round() as usize).max(1);
        // bin i covers (t[i-1], t[i]]; bin 0 covers nothing
        let start = tr.t.partition_point(|&t| t < burn_in).max(1);
        let mbins = tr.len().saturating_sub(start);
        if mbins < w + 1 {
            continue;
        }
        let mut prefix = Vec::with_capacity(mbins + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for i in 0..mbins {
            acc += tr.emission_bins[start + i];
            prefix.push(acc);
        }
        let positions = mbins - w + 1;
        nonoverlap += (mbins / w) as u64;
        let c = *shift.get_or_insert(prefix[w] - prefix[0]);
        let b_target = (positions / (4 * w)).clamp(8, 64);
        build_batches(
            positions,
            2,
            Some(b_target),
            |i, out| {
                let u = (prefix[i + w] - prefix[i]) - c;
                out[0] = u;
                out[1] = u * u;
            },
            &mut batches,
        );
    }
    if nonoverlap < 30 || batches.len() < 2 {
        return Err(Error::StatisticalPower(format!(
            "need at least 30 non-overlapping count windows, have {nonoverlap}"
        )));
    }
    let c = shift.unwrap();
    let (pool, _) = pooled_means(&batches);
    if c + pool[0] <= 0.0 {
        return Err(Error::numerical("fano", "mean window count is zero"));
    }
    Ok(estimate(
        &batches,
        |m| (m[1] - m[0] * m[0]) / (c + m[0]),
        0,
        1,
    ))
}

/// Fano factors over a log-spaced window grid, with a plateau flag: the
/// index of the largest window whose estimate is statistically consistent
/// with the previous one (the long-window limit has been reached).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FanoCurve {
    pub windows: Vec<f64>,
    pub estimates: Vec<EnsembleEstimate>,
    pub plateau: Option<usize>,
}

impl FanoCurve {
    pub fn plateau_estimate(&self) -> Option<(f64, EnsembleEstimate)> {
        self.plateau.map(|i| (self.windows[i], self.estimates[i]))
    }
}

pub fn fano_plateau(trajs: &[Trajectory], burn_in: f64) -> Result<FanoCurve> {
    let mut usable: f64 = f64::INFINITY;
    for tr in trajs {
        let start = tr.t.partition_point(|&t| t < burn_in).max(1);
        let mbins = tr.len().saturating_sub(start);
        usable = usable.min(mbins as f64 * tr.sample_dt);
    }
    if !usable.is_finite() || usable <= 0.0 {
        return Err(Error::StatisticalPower(
            "no usable record after burn-in".into(),
        ));
    }
    let dt = trajs[0].sample_dt;
    let t_max = usable / 30.0;
    let t_min = (2.0 * dt).max(t_max / 100.0);
    if t_max <= t_min {
        return Err(Error::StatisticalPower(
            "record too short for a window sweep".into(),
        ));
    }
    let points = 10usize;
    let mut windows = Vec::new();
    let mut last_w = 0usize;
    for i in 0..points {
        let t = t_min * (t_max / t_min).powf(i as f64 / (points - 1) as f64);
        let w = ((t / dt).round() as usize).max(1);
        if w != last_w {
            windows.push(w as f64 * dt);
            last_w = w;
        }
    }
    let mut estimates = Vec::with_capacity(windows.len());
    for &t in &windows {
        estimates.push(output_fano_from(trajs, t, burn_in)?);
    }
    let mut plateau = None;
    if estimates.len() >= 2 {
        let k = estimates.len() - 1;
        let (a, b) = (&estimates[k - 1], &estimates[k]);
        let joint = (a.std_error * a.std_error + b.std_error * b.std_error).sqrt();
        if (a.value - b.value).abs() <= 2.0 * joint {
            plateau = Some(k);
        }
    }
    Ok(FanoCurve {
        windows,
        estimates,
        plateau,
    })
}

/// Lagged covariance of the binned output intensity. The same-bin shot-noise
/// part (weight = mean intensity) is reported separately from the smooth
/// covariance at each requested lag.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoTimeEstimates {
    /// delta-term weight: the mean output intensity
    pub delta_weight: EnsembleEstimate,
    /// same-bin variance with the shot-noise part removed: the smooth
    /// correlation at zero lag
    pub same_bin_excess: EnsembleEstimate,
    /// achieved lags (integer multiples of the bin width)
    pub lags: Vec<f64>,
    pub covariances: Vec<EnsembleEstimate>,
    /// a requested lag was not representable on the bin grid
    pub resolution_warning: bool,
}

pub fn estimate_two_time(
    trajs: &[Trajectory],
    lags: &[f64],
    burn_in: f64,
) -> Result<TwoTimeEstimates> {
    if trajs.is_empty() {
        return Err(Error::StatisticalPower("no trajectories".into()));
    }
    let dt = trajs[0].sample_dt;
    if trajs
        .iter()
        .any(|tr| (tr.sample_dt - dt).abs() > 1e-9 * dt)
    {
        return Err(Error::validation(
            "trajectories",
            "sample steps differ across the ensemble",
        ));
    }

    let mut resolution_warning = false;
    let ks: Vec<usize> = lags
        .iter()
        .map(|&lag| {
            if !(lag >= 0.0) || !lag.is_finite() {
                return 0;
            }
            let k = (lag / dt).round() as usize;
            if lag > 0.0 && (k == 0 || (k as f64 * dt - lag).abs() > 0.25 * lag) {
                resolution_warning = true;
            }
            k
        })
        .collect();

    // same-bin statistics from the rate series r = bin / dt
    let mut base_batches = Vec::new();
    let mut shift: Option<f64> = None;
    for tr in trajs {
        let start = tr.t.partition_point(|&t| t < burn_in).max(1);
        let m = tr.len().saturating_sub(start);
        if m < 8 {
            continue;
        }
        let c = *shift.get_or_insert(tr.emission_bins[start] / dt);
        build_batches(
            m,
            2,
            None,
            |i, out| {
                let u = tr.emission_bins[start + i] / dt - c;
                out[0] = u;
                out[1] = u * u;
            },
            &mut base_batches,
        );
    }
    if base_batches.len() < 2 {
        return Err(Error::StatisticalPower(
            "not enough post-burn-in bins".into(),
        ));
    }
    let c = shift.unwrap();
    let delta_weight = estimate(&base_batches, |m| c + m[0], 0, 1);
    let same_bin_excess = estimate(
        &base_batches,
        |m| (m[1] - m[0] * m[0]) - (c + m[0]) / dt,
        0,
        1,
    );

    let mut achieved = Vec::with_capacity(ks.len());
    let mut covariances = Vec::with_capacity(ks.len());
    for &k in &ks {
        if k == 0 {
            achieved.push(0.0);
            covariances.push(same_bin_excess);
            continue;
        }
        let mut batches = Vec::new();
        for tr in trajs {
            let start = tr.t.partition_point(|&t| t < burn_in).max(1);
            let m = tr.len().saturating_sub(start);
            if m < k + 8 {
                continue;
            }
            let pairs = m - k;
            build_batches(
                pairs,
                4,
                None,
                |i, out| {
                    let u = tr.emission_bins[start + i] / dt - c;
                    let v = tr.emission_bins[start + i + k] / dt - c;
                    out[0] = u * v;
                    out[1] = (u * v) * (u * v);
                    out[2] = u;
                    out[3] = v;
                },
                &mut batches,
            );
        }
        if batches.len() < 2 {
            return Err(Error::StatisticalPower(format!(
                "not enough bins for lag {k} (bin units)"
            )));
        }
        achieved.push(k as f64 * dt);
        covariances.push(estimate(&batches, |m| m[0] - m[2] * m[3], 0, 1));
    }

    Ok(TwoTimeEstimates {
        delta_weight,
        same_bin_excess,
        lags: achieved,
        covariances,
        resolution_warning,
    })
}
