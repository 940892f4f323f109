//! Photon statistics of one mode when N photons are spread over M modes
//! with every distribution equally likely: exact combinatorial pmf, its
//! large-M geometric (thermal) form, the effective (M, N) pair of an
//! operating point, and uniform composition sampling.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::rates::fluctuation_rates;
use crate::steady::OperatingPoint;

pub type BigRational = Ratio<BigInt>;

/// Largest M + N handled by the exact combinatorial path.
pub const EXACT_SIZE_LIMIT: u64 = 20_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhotonDistribution {
    pub mode_count: u64,
    pub total_photons: u64,
    /// p(k) for k = 0, 1, ... (exact pmf: up to N; geometric: up to the
    /// truncation point)
    pub probabilities: Vec<f64>,
}

impl PhotonDistribution {
    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - m) * (k as f64 - m) * p)
            .sum()
    }

    pub fn total_variation(&self, other: &PhotonDistribution) -> f64 {
        let len = self.probabilities.len().max(other.probabilities.len());
        let mut tv = 0.0;
        for k in 0..len {
            let p = self.probabilities.get(k).copied().unwrap_or(0.0);
            let q = other.probabilities.get(k).copied().unwrap_or(0.0);
            tv += (p - q).abs();
        }
        0.5 * tv
    }
}

/// Exact rational pmf of one mode's occupation: the fraction of
/// compositions of N photons over M modes that put k photons in mode 1,
/// p(k) = C(N−k+M−2, M−2) / C(N+M−1, M−1), via the recurrence
/// p(0) = (M−1)/(N+M−1), p(k+1) = p(k)·(N−k)/(N+M−2−k).
pub fn microcanonical_pmf_exact(m: u64, n: u64) -> Result<Vec<BigRational>> {
    if m < 1 {
        return Err(Error::validation("mode_count", "must be at least 1"));
    }
    if m + n > EXACT_SIZE_LIMIT {
        return Err(Error::validation(
            "mode_count",
            format!(
                "M + N = {} exceeds the exact-combinatorics limit {}; \
                 use geometric_approx_pmf",
                m + n,
                EXACT_SIZE_LIMIT
            ),
        ));
    }
    let mut probs = Vec::with_capacity(n as usize + 1);
    if m == 1 {
        for _ in 0..n {
            probs.push(BigRational::zero());
        }
        probs.push(BigRational::one());
        return Ok(probs);
    }
    let mut p = BigRational::new(BigInt::from(m - 1), BigInt::from(n + m - 1));
    probs.push(p.clone());
    for k in 0..n {
        p *= BigRational::new(BigInt::from(n - k), BigInt::from(n + m - 2 - k));
        probs.push(p.clone());
    }
    Ok(probs)
}

pub fn microcanonical_pmf(m: u64, n: u64) -> Result<PhotonDistribution> {
    let exact = microcanonical_pmf_exact(m, n)?;
    let probabilities = exact
        .iter()
        .map(|r| r.to_f64().unwrap_or(0.0))
        .collect();
    Ok(PhotonDistribution {
        mode_count: m,
        total_photons: n,
        probabilities,
    })
}

/// Thermal (geometric) approximation p(k) = (M/(N+M))·(1+M/N)^(−k),
/// truncated once the remaining tail falls below `GEOMETRIC_TAIL` and
/// renormalized.
pub const GEOMETRIC_TAIL: f64 = 1e-15;

pub fn geometric_approx_pmf(m: u64, n: u64) -> Result<PhotonDistribution> {
    if m < 2 {
        return Err(Error::validation("mode_count", "must be at least 2"));
    }
    if n < 1 {
        return Err(Error::validation("total_photons", "must be at least 1"));
    }
    let q = n as f64 / (n + m) as f64;
    // tail mass beyond index k is q^(k+1) for the normalized geometric
    let kmax = (GEOMETRIC_TAIL.ln() / q.ln()).ceil().max(1.0) as usize;
    let mut probabilities = Vec::with_capacity(kmax + 1);
    let mut p = 1.0 - q;
    let mut sum = 0.0;
    for _ in 0..=kmax {
        probabilities.push(p);
        sum += p;
        p *= q;
    }
    for p in probabilities.iter_mut() {
        *p /= sum;
    }
    Ok(PhotonDistribution {
        mode_count: m,
        total_photons: n,
        probabilities,
    })
}

/// Mean occupation of one mode: N/M.
pub fn mode_mean(m: u64, n: u64) -> f64 {
    n as f64 / m as f64
}

/// Exact occupation variance of one mode under the uniform-composition
/// ensemble: N(M−1)(M+N)/(M²(M+1)).
pub fn mode_variance(m: u64, n: u64) -> f64 {
    let (m, n) = (m as f64, n as f64);
    n * (m - 1.0) * (m + n) / (m * m * (m + 1.0))
}

/// Exact covariance of two different modes: −N(M+N)/(M²(M+1)).
/// Together with `mode_variance` this makes the total-photon variance zero.
pub fn pairwise_covariance(m: u64, n: u64) -> f64 {
    let (m, n) = (m as f64, n as f64);
    -n * (m + n) / (m * m * (m + 1.0))
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EffectiveModes {
    pub m_raw: f64,
    pub n_raw: f64,
    pub m: u64,
    pub n: u64,
    /// the mapping assumes non-oscillatory relaxation; false flags a
    /// complex-eigenvalue operating point
    pub over_damped: bool,
}

/// Effective mode count M = γ_n/Γ_N and photon budget N = 2κn̄/Γ_N of an
/// operating point, rounded to integers ≥ 1 with the raw ratios kept.
pub fn effective_modes(params: &DeviceParams, op: &OperatingPoint) -> Result<EffectiveModes> {
    let rates = fluctuation_rates(params, op)?;
    let m_raw = rates.gamma_n / rates.gamma_cap_n;
    let n_raw = 2.0 * params.kappa * op.n_bar / rates.gamma_cap_n;
    let mu = 0.5 * rates.drift.trace();
    let disc = mu * mu - rates.drift.det();
    Ok(EffectiveModes {
        m_raw,
        n_raw,
        m: (m_raw.round() as u64).max(1),
        n: (n_raw.round() as u64).max(1),
        over_damped: disc >= 0.0,
    })
}

/// One uniform sample of N photons over M modes (stars and bars: an
/// (M−1)-subset of N+M−1 slots picked uniformly, occupations = gap sizes).
pub fn sample_composition(m: u64, n: u64, seed: u64) -> Result<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_composition_with(m, n, &mut rng)
}

pub fn sample_composition_with(m: u64, n: u64, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    if m < 1 {
        return Err(Error::validation("mode_count", "must be at least 1"));
    }
    if m == 1 {
        return Ok(vec![n]);
    }
    let slots = (n + m - 1)
        .to_usize()
        .ok_or_else(|| Error::validation("total_photons", "too large to sample"))?;
    let bars = (m - 1) as usize;
    let mut idx = rand::seq::index::sample(rng, slots, bars).into_vec();
    idx.sort_unstable();
    let mut occ = Vec::with_capacity(m as usize);
    let mut prev: i64 = -1;
    for &b in &idx {
        occ.push((b as i64 - prev - 1) as u64);
        prev = b as i64;
    }
    occ.push((slots as i64 - prev - 1) as u64);
    Ok(occ)
}
