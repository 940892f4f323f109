//! Shared test oracles: the truncated master equation of the jump process
//! (steady state by inverse iteration on the block-tridiagonal generator,
//! zero-frequency counting statistics through the backward-equation route)
//! and brute-force multimode composition enumeration.

#![allow(dead_code)]

use lasernoise_core::jump::{CHANNELS, N_CHANNELS};
use lasernoise_core::multimode::BigRational;
use lasernoise_core::{build_jump_process, DeviceParams, PumpMode};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;

/// The small strongly-coupled device every simulation oracle runs on:
/// beta = 0.5, tau = 2, N_T = 2, kappa = 1, j = 6, Poisson pump.
pub fn toy_params() -> DeviceParams {
    DeviceParams::new(0.5, 2.0, 2.0, 1.0)
        .unwrap()
        .with_pump(6.0, 1.0)
        .unwrap()
}

/// Master-equation truncation box that leaves ~1e-26 tail mass for the toy
/// device.
pub const TOY_BOX: (usize, usize) = (60, 60);

/// Reference stationary moments of the toy device, frozen from an
/// independent sparse-solver implementation (agreement required to 1e-5
/// before the Rust oracle is trusted).
pub const TOY_MEAN_N: f64 = 2.248684;
pub const TOY_VAR_N: f64 = 5.232382;
pub const TOY_MEAN_N_CAP: f64 = 6.010528;
pub const TOY_VAR_N_CAP: f64 = 9.401396;
pub const TOY_COV: f64 = -3.028939;
/// Frozen zero-frequency Fano factor of the toy device's output stream.
pub const TOY_FANO_INF: f64 = 1.560350;
/// Frozen linear-response output-noise ratio of the toy device (kinetic
/// diffusion, sigma = 1); differs from TOY_FANO_INF by linearization error.
pub const TOY_LFN_KINETIC: f64 = 1.462356;

/// Truncated master equation on 0..=n_cap_max x 0..=n_max, stored as
/// N-major block-tridiagonal generator blocks (columns are source states;
/// transitions leaving the box are switched off).
pub struct Cme {
    pub n_cap_max: usize,
    pub n_max: usize,
    s: usize,
    diag: Vec<DMatrix<f64>>,
    lower: Vec<DMatrix<f64>>, // lower[i] = Q[block i, block i-1], i >= 1
    upper: Vec<DMatrix<f64>>, // upper[i] = Q[block i, block i+1], i < blocks-1
    rate_scale: f64,
    params: DeviceParams,
}

impl Cme {
    pub fn new(params: &DeviceParams, n_cap_max: usize, n_max: usize) -> Self {
        let process = build_jump_process(params, PumpMode::Poisson).expect("oracle params");
        let s = n_max + 1;
        let blocks = n_cap_max + 1;
        let mut diag = vec![DMatrix::zeros(s, s); blocks];
        let mut lower = vec![DMatrix::zeros(s, s); blocks];
        let mut upper = vec![DMatrix::zeros(s, s); blocks];
        let mut rates = [0.0f64; N_CHANNELS];
        let mut rate_scale = 0.0f64;
        for ncap in 0..=n_cap_max {
            for n in 0..=n_max {
                process.rates(ncap as u64, n as u64, &mut rates);
                for (ch, &r) in CHANNELS.iter().zip(rates.iter()) {
                    if r <= 0.0 {
                        continue;
                    }
                    let dcap = ncap as i64 + ch.d_cap;
                    let dn = n as i64 + ch.d_n;
                    if dcap < 0 || dcap > n_cap_max as i64 || dn < 0 || dn > n_max as i64 {
                        continue; // blocked at the truncation boundary
                    }
                    diag[ncap][(n, n)] -= r;
                    rate_scale = rate_scale.max(r);
                    let dn = dn as usize;
                    match ch.d_cap {
                        0 => diag[ncap][(dn, n)] += r,
                        1 => lower[ncap + 1][(dn, n)] += r,
                        -1 => upper[ncap - 1][(dn, n)] += r,
                        _ => unreachable!(),
                    }
                }
            }
        }
        Cme {
            n_cap_max,
            n_max,
            s,
            diag,
            lower,
            upper,
            rate_scale,
            params: *params,
        }
    }

    fn blocks(&self) -> usize {
        self.n_cap_max + 1
    }

    pub fn index(&self, ncap: usize, n: usize) -> usize {
        ncap * self.s + n
    }

    /// Stationary distribution by inverse iteration with a tiny shift.
    pub fn steady_state(&self) -> Vec<f64> {
        let b = self.blocks();
        let shift = 1e-9 * self.rate_scale;
        let diag_shifted: Vec<DMatrix<f64>> = self
            .diag
            .iter()
            .map(|d| {
                let mut d = d.clone();
                for k in 0..self.s {
                    d[(k, k)] -= shift;
                }
                d
            })
            .collect();
        let solver = BlockTri::factor(diag_shifted, self.lower.clone(), self.upper.clone());
        let mut x: Vec<DVector<f64>> = vec![DVector::from_element(self.s, 1.0); b];
        for _ in 0..3 {
            x = solver.solve(&x);
            let norm: f64 = x
                .iter()
                .map(|v| v.iter().map(|a| a.abs()).sum::<f64>())
                .sum();
            for v in x.iter_mut() {
                *v /= norm;
            }
        }
        let total: f64 = x.iter().map(|v| v.sum()).sum();
        let sgn = if total < 0.0 { -1.0 } else { 1.0 };
        let mut pi = Vec::with_capacity(b * self.s);
        for v in &x {
            for &a in v.iter() {
                pi.push((a * sgn).max(0.0));
            }
        }
        let z: f64 = pi.iter().sum();
        for p in pi.iter_mut() {
            *p /= z;
        }
        pi
    }

    /// Max-norm residual of Q pi = 0, relative to the largest rate.
    pub fn residual(&self, pi: &[f64]) -> f64 {
        let b = self.blocks();
        let mut worst = 0.0f64;
        for i in 0..b {
            let xi = DVector::from_column_slice(&pi[i * self.s..(i + 1) * self.s]);
            let mut r = &self.diag[i] * &xi;
            if i > 0 {
                let xm = DVector::from_column_slice(&pi[(i - 1) * self.s..i * self.s]);
                r += &self.lower[i] * &xm;
            }
            if i + 1 < b {
                let xp = DVector::from_column_slice(&pi[(i + 1) * self.s..(i + 2) * self.s]);
                r += &self.upper[i] * &xp;
            }
            worst = worst.max(r.amax());
        }
        worst / self.rate_scale
    }

    /// Probability mass on the outermost truncation layers.
    pub fn boundary_mass(&self, pi: &[f64]) -> f64 {
        let mut mass = 0.0;
        for n in 0..=self.n_max {
            mass += pi[self.index(self.n_cap_max, n)];
        }
        for ncap in 0..self.n_cap_max {
            mass += pi[self.index(ncap, self.n_max)];
        }
        mass
    }

    pub fn moments(&self, pi: &[f64]) -> CmeMoments {
        let mut mean_n = 0.0;
        let mut mean_cap = 0.0;
        for ncap in 0..=self.n_cap_max {
            for n in 0..=self.n_max {
                let p = pi[self.index(ncap, n)];
                mean_n += p * n as f64;
                mean_cap += p * ncap as f64;
            }
        }
        let (mut var_n, mut var_cap, mut cov) = (0.0, 0.0, 0.0);
        for ncap in 0..=self.n_cap_max {
            for n in 0..=self.n_max {
                let p = pi[self.index(ncap, n)];
                let dn = n as f64 - mean_n;
                let dc = ncap as f64 - mean_cap;
                var_n += p * dn * dn;
                var_cap += p * dc * dc;
                cov += p * dc * dn;
            }
        }
        CmeMoments {
            mean_n,
            mean_n_cap: mean_cap,
            var_n,
            var_n_cap: var_cap,
            cov,
        }
    }

    pub fn marginal_n(&self, pi: &[f64]) -> Vec<f64> {
        let mut m = vec![0.0; self.n_max + 1];
        for ncap in 0..=self.n_cap_max {
            for n in 0..=self.n_max {
                m[n] += pi[self.index(ncap, n)];
            }
        }
        m
    }

    pub fn marginal_n_cap(&self, pi: &[f64]) -> Vec<f64> {
        let mut m = vec![0.0; self.n_cap_max + 1];
        for ncap in 0..=self.n_cap_max {
            for n in 0..=self.n_max {
                m[ncap] += pi[self.index(ncap, n)];
            }
        }
        m
    }

    /// Zero-frequency Fano factor of the event stream of the given channels,
    /// via the backward-equation (Poisson-equation) route: solve
    /// A g = f_bar - f on the box (A = Q^T), then
    /// F = 1 + [2 sum pi (f - f_bar) g + 2 sum pi r_c(s) (g(s_c) - g(s))]/f_bar.
    pub fn fano_infinity(&self, pi: &[f64], counted: &[usize]) -> f64 {
        let process = build_jump_process(&self.params, PumpMode::Poisson).unwrap();
        let b = self.blocks();
        let total = b * self.s;

        // counted flow f(s) and its mean
        let mut f = vec![0.0f64; total];
        let mut rates = [0.0f64; N_CHANNELS];
        for ncap in 0..=self.n_cap_max {
            for n in 0..=self.n_max {
                process.rates(ncap as u64, n as u64, &mut rates);
                let mut fs = 0.0;
                for &c in counted {
                    let ch = &CHANNELS[c];
                    let dcap = ncap as i64 + ch.d_cap;
                    let dn = n as i64 + ch.d_n;
                    if dcap < 0 || dcap > self.n_cap_max as i64 || dn < 0 || dn > self.n_max as i64
                    {
                        continue;
                    }
                    fs += rates[c];
                }
                f[self.index(ncap, n)] = fs;
            }
        }
        let f_bar: f64 = pi.iter().zip(&f).map(|(p, fs)| p * fs).sum();

        // backward generator A = Q^T: block (i, i-1) = upper[i-1]^T,
        // block (i, i+1) = lower[i+1]^T
        let shift = 1e-9 * self.rate_scale;
        let diag_t: Vec<DMatrix<f64>> = self
            .diag
            .iter()
            .map(|d| {
                let mut d = d.transpose();
                for k in 0..self.s {
                    d[(k, k)] -= shift;
                }
                d
            })
            .collect();
        let mut sub_t = vec![DMatrix::zeros(self.s, self.s); b];
        let mut sup_t = vec![DMatrix::zeros(self.s, self.s); b];
        for i in 1..b {
            sub_t[i] = self.upper[i - 1].transpose();
        }
        for i in 0..b - 1 {
            sup_t[i] = self.lower[i + 1].transpose();
        }
        let solver = BlockTri::factor(diag_t, sub_t, sup_t);
        let rhs: Vec<DVector<f64>> = (0..b)
            .map(|i| {
                DVector::from_iterator(
                    self.s,
                    (0..self.s).map(|n| f_bar - f[i * self.s + n]),
                )
            })
            .collect();
        let g_blocks = solver.solve(&rhs);
        let mut g = Vec::with_capacity(total);
        for v in &g_blocks {
            for &a in v.iter() {
                g.push(a);
            }
        }

        // correlation term and the counted-jump displacement term
        let mut corr = 0.0;
        let mut jmp = 0.0;
        for ncap in 0..=self.n_cap_max {
            for n in 0..=self.n_max {
                let s = self.index(ncap, n);
                corr += pi[s] * (f[s] - f_bar) * g[s];
                process.rates(ncap as u64, n as u64, &mut rates);
                for &c in counted {
                    let ch = &CHANNELS[c];
                    let dcap = ncap as i64 + ch.d_cap;
                    let dn = n as i64 + ch.d_n;
                    if dcap < 0 || dcap > self.n_cap_max as i64 || dn < 0 || dn > self.n_max as i64
                    {
                        continue;
                    }
                    let dest = self.index(dcap as usize, dn as usize);
                    jmp += pi[s] * rates[c] * (g[dest] - g[s]);
                }
            }
        }
        (f_bar + 2.0 * corr + 2.0 * jmp) / f_bar
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CmeMoments {
    pub mean_n: f64,
    pub mean_n_cap: f64,
    pub var_n: f64,
    pub var_n_cap: f64,
    pub cov: f64,
}

/// Block-tridiagonal LU (block Thomas): factor once, solve many.
struct BlockTri {
    lus: Vec<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
    sub: Vec<DMatrix<f64>>,
    sup: Vec<DMatrix<f64>>,
}

impl BlockTri {
    fn factor(diag: Vec<DMatrix<f64>>, sub: Vec<DMatrix<f64>>, sup: Vec<DMatrix<f64>>) -> Self {
        let b = diag.len();
        let mut d = diag;
        let mut lus: Vec<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> = Vec::with_capacity(b);
        for i in 0..b {
            if i > 0 {
                let t = lus[i - 1]
                    .solve(&sup[i - 1])
                    .expect("singular diagonal block");
                let prod = &sub[i] * &t;
                d[i] -= prod;
            }
            lus.push(nalgebra::LU::new(d[i].clone()));
        }
        BlockTri { lus, sub, sup }
    }

    fn solve(&self, rhs: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let b = self.lus.len();
        let mut y: Vec<DVector<f64>> = Vec::with_capacity(b);
        for i in 0..b {
            let mut yi = rhs[i].clone();
            if i > 0 {
                let z = self.lus[i - 1].solve(&y[i - 1]).expect("singular block");
                yi -= &self.sub[i] * &z;
            }
            y.push(yi);
        }
        let mut x = vec![DVector::<f64>::zeros(0); b];
        x[b - 1] = self.lus[b - 1].solve(&y[b - 1]).expect("singular block");
        for i in (0..b - 1).rev() {
            let t = &y[i] - &self.sup[i] * &x[i + 1];
            x[i] = self.lus[i].solve(&t).expect("singular block");
        }
        x
    }
}

// ---------------------------------------------------------------------------
// multimode enumeration
// ---------------------------------------------------------------------------

/// All compositions of n photons over m modes (order matters).
pub fn enumerate_compositions(m: usize, n: u64) -> Vec<Vec<u64>> {
    if m == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for k in 0..=n {
        for rest in enumerate_compositions(m - 1, n - k) {
            let mut v = Vec::with_capacity(m);
            v.push(k);
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

/// Exact mode-1 occupation pmf by brute-force enumeration.
pub fn enumerated_mode_pmf(m: usize, n: u64) -> Vec<BigRational> {
    let comps = enumerate_compositions(m, n);
    let total = BigInt::from(comps.len());
    let mut counts = vec![BigInt::from(0); n as usize + 1];
    for c in &comps {
        counts[c[0] as usize] += 1;
    }
    counts
        .into_iter()
        .map(|c| BigRational::new(c, total.clone()))
        .collect()
}

/// Exact covariance of modes 1 and 2 by enumeration.
pub fn enumerated_pair_covariance(m: usize, n: u64) -> f64 {
    let comps = enumerate_compositions(m, n);
    let total = comps.len() as f64;
    let mean = comps.iter().map(|c| c[0] as f64).sum::<f64>() / total;
    comps
        .iter()
        .map(|c| (c[0] as f64 - mean) * (c[1] as f64 - mean))
        .sum::<f64>()
        / total
}

// ---------------------------------------------------------------------------
// small statistics helpers
// ---------------------------------------------------------------------------

/// Upper-tail p-value of a chi-square statistic.
pub fn chi_square_p(stat: f64, dof: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

/// Total-variation distance between two histograms over the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let mut tv = 0.0;
    for k in 0..len {
        let a = p.get(k).copied().unwrap_or(0.0);
        let b = q.get(k).copied().unwrap_or(0.0);
        tv += (a - b).abs();
    }
    0.5 * tv
}

/// Normalized histogram of integer-valued samples on 0..=max.
pub fn histogram(values: impl Iterator<Item = f64>, max: usize) -> Vec<f64> {
    let mut h = vec![0.0; max + 1];
    let mut count = 0.0;
    for v in values {
        let k = (v.round() as usize).min(max);
        h[k] += 1.0;
        count += 1.0;
    }
    for x in h.iter_mut() {
        *x /= count;
    }
    h
}
