//! Release gate: twelve numbered checks covering the analytic formulas, the
//! stochastic simulators and the multimode statistics. Every check prints one
//! verdict line. Two checks (03 and 07) probe compact large-device formulas
//! at points where their own validity assumptions bite; they FAIL by a
//! frozen, analysed margin and the gate enforces that they keep failing for
//! exactly that reason. The process exits non-zero only when a verdict
//! deviates from the expected outcome or an internal pin trips.

mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use lasernoise_core::estimators::{estimate_moments, output_fano_from};
use lasernoise_core::gillespie::GillespieOptions;
use lasernoise_core::jump::{PumpMode, EMISSION_CHANNEL, N_CHANNELS};
use lasernoise_core::*;
use support::{histogram, toy_params, total_variation, TOY_FANO_INF, TOY_LFN_KINETIC};

struct Verdict {
    pass: bool,
    detail: String,
}

fn pass(detail: String) -> Verdict {
    Verdict { pass: true, detail }
}

fn fail(detail: String) -> Verdict {
    Verdict { pass: false, detail }
}

/// Figure-scale gain medium: transparency at 3/2 photons, kappa tau = 1e4/3.
fn figure_device(beta: f64) -> DeviceParams {
    DeviceParams::from_ratios(beta, 1e4 / 3.0, 1.5).unwrap()
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (la, lb) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (la + (lb - la) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Exact linear-response Fano factor of counts in a finite window T:
/// F(T) = 1 + (2/L)[ I1(T) - I2(T)/T ] with I1 = int_0^T C(t) dt and
/// I2 = int_0^T t C(t) dt, both in closed form through
/// int_0^T e^{At} dt = A^-1(e^{AT}-1) and
/// int_0^T t e^{At} dt = T A^-1 e^{AT} - A^-2 (e^{AT}-1).
fn fano_window_linear(params: &DeviceParams, op: &OperatingPoint, sigma: f64, t_w: f64) -> f64 {
    let rates = fluctuation_rates(params, op).unwrap();
    let a = rates.drift;
    let d = stationary_diffusion(params, op, sigma, DiffusionModel::Kinetic);
    let s = lyapunov_2x2(&a, &d).unwrap();
    let k = params.kappa;
    let l = 2.0 * k * op.n_bar;
    let c = [0.0, -l];
    let ai = a.inverse().unwrap();
    let e = a.expm(t_w);
    let em1 = e.add(&Mat2::identity().scale(-1.0));
    let g1 = ai.mul(&em1);
    let g2 = ai.mul(&e).scale(t_w).add(&ai.mul(&ai).mul(&em1).scale(-1.0));
    let term = |g: &Mat2| 4.0 * k * k * g.mul(&s).m[1][1] + 2.0 * k * g.mul_vec(c)[1];
    1.0 + (2.0 / l) * (term(&g1) - term(&g2) / t_w)
}

// ---------------------------------------------------------------------------
// 01: small-beta scaling of the threshold current and threshold photon number
// ---------------------------------------------------------------------------

fn threshold_scaling() -> Verdict {
    let mut worst_j = 0.0f64;
    let mut worst_n = 0.0f64;
    for &beta in &[1e-6, 1e-4, 1e-2] {
        let p = figure_device(beta);
        let s = derived_scales(&p).unwrap();
        worst_j = worst_j.max((s.j_th * beta / (4.0 * p.kappa) - 1.0).abs());
        worst_n = worst_n.max((s.n_th * beta.sqrt() - 1.0).abs());
    }
    // beta = 1e-2 sits exactly on the 1% allowance (the deviation IS beta);
    // the 1e-9 slack covers float representation only
    let ok = worst_j <= 0.01 + 1e-9 && worst_n <= 0.05;
    let detail = format!(
        "j_th vs 4k/b off by {:.3}% worst, n_th vs b^-1/2 off by {:.2}% worst (allow 1% / 5%)",
        100.0 * worst_j,
        100.0 * worst_n
    );
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------
// 02: the squeezing threshold is the exact unity root of the compact
// sigma = 0 noise ratio, and approaches (n_t + 1/2)/beta for strong gain
// ---------------------------------------------------------------------------

fn squeezing_threshold_root() -> Verdict {
    let mut worst_unity = 0.0f64;
    for &beta in &[1e-6, 1e-4, 1e-2] {
        for &n_t in &[1.5, 30.0, 100.0] {
            let p = DeviceParams::from_ratios(beta, 1e4 / 3.0, n_t).unwrap();
            let sq = squeezing_threshold(&p).unwrap();
            worst_unity = worst_unity.max((lfn_approx(&p, sq.n_sq, 0.0) - 1.0).abs());
        }
    }
    // the carrier asymptote is a strong-gain (n_t >> 1) statement: its own
    // first correction is (1 - 2 beta)/(2a), so the 2% clause is exercised
    // where that correction is below 2%
    let mut worst_asym = 0.0f64;
    for &beta in &[1e-6, 1e-4, 1e-2] {
        for &n_t in &[30.0, 100.0] {
            let p = DeviceParams::from_ratios(beta, 1e4 / 3.0, n_t).unwrap();
            let sq = squeezing_threshold(&p).unwrap();
            worst_asym = worst_asym.max((sq.n_sq / sq.carrier_approx - 1.0).abs());
        }
    }
    // pump-side form at the shallow medium: ratio to the carrier form is
    // exactly 1 - beta
    let sq_shallow = squeezing_threshold(&figure_device(1e-2)).unwrap();
    let pump_ratio = sq_shallow.pump_approx / sq_shallow.carrier_approx;
    let shallow_ratio = sq_shallow.n_sq / sq_shallow.carrier_approx;
    assert!((pump_ratio - 0.99).abs() < 1e-12, "pump form ratio {pump_ratio}");
    let ok = worst_unity <= 1e-6 && worst_asym <= 0.02;
    let detail = format!(
        "unity residual {:.1e} worst (allow 1e-6); root vs (n_t+1/2)/b off {:.2}% worst for n_t >= 30 \
         (allow 2%; diagnostic at n_t = 3/2: {:.0}% high, the asymptote's own 1/(2a) term)",
        worst_unity,
        100.0 * worst_asym,
        100.0 * (shallow_ratio - 1.0)
    );
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------
// 03: output-noise curve family at beta = 1e-3 -- thermal peak near
// threshold, pump-noise asymptotes far above, monotone squeezing at sigma = 0
// ---------------------------------------------------------------------------

fn output_noise_curve_family() -> Verdict {
    let p = figure_device(1e-3);
    let scales = derived_scales(&p).unwrap();
    let sq = squeezing_threshold(&p).unwrap();

    // thermal peak of the sigma = 1 compact curve
    let grid = log_grid(1.0, 1e6, 3001);
    let mut n_peak = grid[0];
    let mut best = f64::MIN;
    for &n in &grid {
        let v = lfn_approx(&p, n, 1.0);
        if v > best {
            best = v;
            n_peak = n;
        }
    }
    let peak_off = (n_peak / scales.n_th - 1.0).abs();
    let peak_ok = peak_off <= 0.20;

    // residual spontaneous-emission floor at the pinned far-field point
    // n = 100 n_sq: a/(beta n) ~ 8.3e-3, which is negligible against
    // sigma = 0.25 but not against sigma = 0.0625
    let n_far = 100.0 * sq.n_sq;
    let gap_db = |sigma: f64| to_db(lfn_approx(&p, n_far, sigma)) - to_db(sigma);
    let (d25, d625) = (gap_db(0.25), gap_db(0.0625));
    assert!((0.05..=0.5).contains(&d25), "sigma=0.25 gap moved: {d25} dB");
    assert!((0.5..=0.7).contains(&d625), "sigma=0.0625 gap moved: {d625} dB");
    let asym_ok = d25.abs() <= 0.5 && d625.abs() <= 0.5;

    // monotone squeezing beyond the threshold root
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    for &n in &log_grid(sq.n_sq * (1.0 + 1e-9), 1e4 * sq.n_sq, 400) {
        let v = lfn_approx(&p, n, 0.0);
        if v >= 1.0 + 1e-12 || v > prev + 1e-12 {
            monotone = false;
        }
        prev = v;
    }

    let ok = peak_ok && asym_ok && monotone;
    let detail = format!(
        "peak at n = {:.1} ({:+.1}% of n_th = {:.1}); asymptote gap at 100 n_sq: {:.3} dB (sigma 1/4), \
         {:.3} dB (sigma 1/16) vs 0.5 dB allowed -- the spontaneous floor (n_t+1/2)/(b n) = {:.1e} \
         overwhelms sigma = 1/16 at this point; sigma = 0 monotone below shot: {}",
        n_peak,
        100.0 * (n_peak / scales.n_th - 1.0),
        scales.n_th,
        d25,
        d625,
        (1.5 + 0.5) / (1e-3 * n_far),
        monotone
    );
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------
// 04: the half-thermal-noise threshold sits at or above the laser threshold
// for every device size, and crosses the squeezing threshold near b = 1e-3
// ---------------------------------------------------------------------------

fn threshold_ordering_and_crossing() -> Verdict {
    let betas: Vec<f64> = log_grid(1e-8, 0.1, 400);
    let mut min_ratio = f64::INFINITY;
    let gap = |beta: f64| {
        let p = figure_device(beta);
        let nd = noise_threshold(&p).unwrap().n_delta;
        let ns = squeezing_threshold(&p).unwrap().n_sq;
        nd - ns
    };
    let mut crossings = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &beta in &betas {
        let p = figure_device(beta);
        let nd = noise_threshold(&p).unwrap().n_delta;
        min_ratio = min_ratio.min(nd / derived_scales(&p).unwrap().n_th);
        let g = gap(beta);
        if let Some((b0, g0)) = prev {
            if g0 * g < 0.0 {
                // bisect the crossing in beta
                let (mut lo, mut hi, mut glo) = (b0, beta, g0);
                for _ in 0..80 {
                    let mid = (lo * hi).sqrt();
                    let gm = gap(mid);
                    if gm * glo > 0.0 {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                crossings.push((lo * hi).sqrt());
            }
        }
        prev = Some((beta, g));
    }
    let ok = min_ratio >= 1.0 - 1e-9
        && crossings.len() == 1
        && crossings[0] >= 3e-4
        && crossings[0] <= 3e-3;
    let detail = format!(
        "n_delta/n_th >= {:.3} over beta^-1 in [10, 1e8]; n_delta = n_sq at beta* = {:.2e} \
         (required within [3e-4, 3e-3])",
        min_ratio,
        crossings.first().copied().unwrap_or(f64::NAN)
    );
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------
// 05: window where more-than-half-thermal photon-number noise coexists with
// sub-shot output noise under a quiet pump (beta = 1e-2)
// ---------------------------------------------------------------------------

fn thermal_squeezing_coexistence() -> Verdict {
    let base = figure_device(1e-2);
    let sq = squeezing_threshold(&base).unwrap();
    let mut witness: Option<(f64, f64, f64)> = None;
    let mut lo = f64::NAN;
    let mut hi = f64::NAN;
    for &n in &log_grid(sq.n_sq * 1.001, 4.0 * sq.n_sq, 200) {
        let p = device_at_photon_number(&base, n)
            .unwrap()
            .with_pump(pump_for_photon_number(&base, n).unwrap(), 0.0)
            .unwrap();
        let op = stationary_state(&p).unwrap();
        let lfn = lfn_exact(&p, &op, 0.0, DiffusionModel::Kinetic).unwrap();
        let ratio = pnf_exact(&p, &op, DiffusionModel::Kinetic).unwrap() / (n * n);
        if lfn < 1.0 && ratio > 0.5 {
            if witness.is_none() {
                lo = n;
            }
            hi = n;
            let margin = (1.0 - lfn) * (ratio - 0.5);
            if witness.is_none()
                || margin > (1.0 - witness.unwrap().1) * (witness.unwrap().2 - 0.5)
            {
                witness = Some((n, lfn, ratio));
            }
        }
    }
    match witness {
        Some((n, lfn, ratio)) => pass(format!(
            "quiet-pump window [{:.0}, {:.0}] above n_sq = {:.0}: e.g. n = {:.0} has output noise \
             {:.3} of shot level with photon variance {:.2} of thermal (kinetic diffusion)",
            lo, hi, sq.n_sq, n, lfn, ratio
        )),
        None => fail(format!(
            "no photon number above n_sq = {:.0} shows sub-shot output noise together with \
             more-than-half-thermal photon variance",
            sq.n_sq
        )),
    }
}

// ---------------------------------------------------------------------------
// 06: half-thermal-noise threshold -- root quality and the two closed-form
// approximations on presets of the matching size class
// ---------------------------------------------------------------------------

fn noise_threshold_closed_forms() -> Verdict {
    let meso = DeviceParams::from_ratios(1e-6, 1e4 / 3.0, 1.5).unwrap();
    let micro = DeviceParams::from_ratios(0.05, 8.0, 1.5).unwrap();
    assert_eq!(classify_device(&meso), LaserType::Mesoscopic);
    assert_eq!(classify_device(&micro), LaserType::Microscopic);

    let nt_meso = noise_threshold(&meso).unwrap();
    let nt_micro = noise_threshold(&micro).unwrap();
    let residual_ok = nt_meso.residual < 1e-8 && nt_micro.residual < 1e-8;

    let a = |p: &DeviceParams| transparency_photon_number(p) + 0.5;
    let r_meso = nt_meso.n_delta / (2.0 * meso.kappa_tau() * a(&meso));
    let r_micro =
        nt_micro.n_delta / (0.5 * micro.kappa_tau() * derived_scales(&micro).unwrap().n_th);
    let factor_ok = (0.5..=2.0).contains(&r_meso) && (0.5..=2.0).contains(&r_micro);

    // diagnostic: the small-device form degrades like sqrt(4a/kt) once the
    // cavity outlives the excitations by much more than the gain requires
    let deep = figure_device(1e-2);
    let r_deep = noise_threshold(&deep).unwrap().n_delta
        / (0.5 * deep.kappa_tau() * derived_scales(&deep).unwrap().n_th);

    let ok = residual_ok && factor_ok;
    let detail = format!(
        "root residuals {:.1e}/{:.1e} (allow 1e-8); n_delta over closed form: {:.3} (mesoscopic, \
         2 kt (n_t+1/2)), {:.3} (microscopic, kt n_th / 2), both within factor 2 \
         (same form at kt = 3333 gives {:.3} -- outside its validity window)",
        nt_meso.residual, nt_micro.residual, r_meso, r_micro, r_deep
    );
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------
// 07: do the compact formulas track the linear-response results under a
// single diffusion convention?
// ---------------------------------------------------------------------------

fn compact_formula_consistency() -> Verdict {
    let grid = log_grid(15.0, 1e4, 60);
    let mut report = Vec::new();
    let mut any_model_ok = false;
    let mut paper_pnf = 0.0f64;
    let mut kinetic_pnf = 0.0f64;
    for model in [DiffusionModel::Paper, DiffusionModel::Kinetic] {
        let mut worst_pnf = 0.0f64;
        let mut worst_lfn = 0.0f64;
        for &beta in &[1e-4, 1e-2] {
            let base = figure_device(beta);
            for &sigma in &[0.0, 1.0] {
                for &n in &grid {
                    let p = device_at_photon_number(&base, n)
                        .unwrap()
                        .with_pump(pump_for_photon_number(&base, n).unwrap(), sigma)
                        .unwrap();
                    let op = stationary_state(&p).unwrap();
                    let pnf_e = pnf_exact(&p, &op, model).unwrap() / (n * n);
                    let lfn_e = lfn_exact(&p, &op, sigma, model).unwrap();
                    worst_pnf = worst_pnf.max((pnf_approx(&p, n) - pnf_e).abs() / pnf_e);
                    worst_lfn = worst_lfn.max((lfn_approx(&p, n, sigma) - lfn_e).abs() / lfn_e);
                }
            }
        }
        if worst_pnf <= 0.15 && worst_lfn <= 0.10 {
            any_model_ok = true;
        }
        match model {
            DiffusionModel::Paper => paper_pnf = worst_pnf,
            DiffusionModel::Kinetic => kinetic_pnf = worst_pnf,
        }
        report.push(format!(
            "{model}: variance off {:.0}%, output noise off {:.0}%",
            100.0 * worst_pnf,
            100.0 * worst_lfn
        ));
    }
    // frozen analysis: the compact variance formula tracks the published
    // correlation table (within 15%) and not the channel sums; the compact
    // output-noise formula mixes both regimes and tracks neither within 10%
    assert!(paper_pnf < 0.15, "variance formula left the paper convention: {paper_pnf}");
    assert!(kinetic_pnf > 0.15, "variance formula now tracks channel sums: {kinetic_pnf}");
    let detail = format!(
        "{} (allow 15% / 10% under one convention; worst cases sit near threshold where the \
         compact forms assume beta << 1, n >> n_t)",
        report.join("; ")
    );
    if any_model_ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------
// 08: jump simulation against the truncated master equation
// ---------------------------------------------------------------------------

fn jump_vs_master_equation() -> Verdict {
    let start = Instant::now();
    let params = toy_params();
    let cme = support::Cme::new(&params, support::TOY_BOX.0, support::TOY_BOX.1);
    let pi = cme.steady_state();
    assert!(cme.residual(&pi) < 1e-10, "oracle residual");
    assert!(cme.boundary_mass(&pi) < 1e-12, "truncation box too small");
    let mom = cme.moments(&pi);
    assert!((mom.mean_n - support::TOY_MEAN_N).abs() < 2e-5, "oracle drifted");

    let proc = build_jump_process(&params, PumpMode::Poisson).unwrap();
    let ens =
        gillespie_ensemble(&proc, 62_500.0, 2.0, 101, 8, GillespieOptions::default()).unwrap();
    let events: u64 = ens
        .iter()
        .map(|tr| tr.channel_counts.iter().sum::<u64>())
        .sum();
    assert!(events >= 10_000_000, "event budget not reached: {events}");

    let burn = 50.0;
    let samples = |field: fn(&Trajectory) -> &Vec<f64>| {
        ens.iter().flat_map(move |tr| {
            tr.t
                .iter()
                .zip(field(tr))
                .filter(move |(t, _)| **t >= burn)
                .map(|(_, &v)| v)
        })
    };
    let tv_n = total_variation(
        &histogram(samples(|tr| &tr.n), support::TOY_BOX.1),
        &cme.marginal_n(&pi),
    );
    let tv_cap = total_variation(
        &histogram(samples(|tr| &tr.n_cap), support::TOY_BOX.0),
        &cme.marginal_n_cap(&pi),
    );

    let est = estimate_moments(&ens, burn).unwrap();
    let z = [
        (est.mean_n.value - mom.mean_n) / est.mean_n.std_error,
        (est.mean_n_cap.value - mom.mean_n_cap) / est.mean_n_cap.std_error,
        (est.var_n.value - mom.var_n) / est.var_n.std_error,
        (est.var_n_cap.value - mom.var_n_cap) / est.var_n_cap.std_error,
        (est.cov.value - mom.cov) / est.cov.std_error,
    ];
    let worst_z = z.iter().fold(0.0f64, |w, zi| w.max(zi.abs()));
    let elapsed = start.elapsed().as_secs_f64();

    let ok = tv_n < 0.02 && tv_cap < 0.02 && worst_z <= 3.0 && elapsed <= 120.0;
    let detail = format!(
        "{:.2e} events: stationary-marginal distance {:.4} (photons) / {:.4} (excitations), \
         allow 0.02; five moments within 3 SE of the master equation (worst {:.2} SE); {:.0} s",
        events as f64, tv_n, tv_cap, worst_z, elapsed
    );
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------
// 09: counting statistics of the output stream -- Fano plateau against the
// linear-response ratio, plus a reference-stream self-test
// ---------------------------------------------------------------------------

fn output_counting_statistics() -> Verdict {
    let start = Instant::now();
    let params = toy_params();

    // the plateau target measured through the master equation's counting
    // statistics sits 6.7% above the linear-response ratio (same-scale
    // fluctuations); both must agree before the simulation is judged
    let cme = support::Cme::new(&params, support::TOY_BOX.0, support::TOY_BOX.1);
    let pi = cme.steady_state();
    let f_true = cme.fano_infinity(&pi, &[EMISSION_CHANNEL]);
    assert!((f_true - TOY_FANO_INF).abs() < 2e-5, "counting oracle drifted: {f_true}");

    let proc = build_jump_process(&params, PumpMode::Poisson).unwrap();
    let ens =
        gillespie_ensemble(&proc, 50_000.0, 0.5, 137, 8, GillespieOptions::default()).unwrap();
    let f150 = output_fano_from(&ens, 150.0, 50.0).unwrap();
    let f75 = output_fano_from(&ens, 75.0, 50.0).unwrap();
    let joint = (f150.std_error.powi(2) + f75.std_error.powi(2)).sqrt();
    let plateau_ok = (f150.value - f75.value).abs() <= 3.0 * joint + 0.02;
    let target = TOY_LFN_KINETIC;
    let within = (f150.value - target).abs() / target;

    // self-test: a memoryless reference stream must come out at exactly the
    // shot level
    let n_bins = 120_000usize;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(53);
    let pois = rand_distr::Poisson::new(4.0f64).unwrap();
    let bins: Vec<f64> = (0..n_bins)
        .map(|_| rand_distr::Distribution::sample(&pois, &mut rng))
        .collect();
    let stream = Trajectory {
        sample_dt: 1.0,
        t: (0..n_bins).map(|k| k as f64).collect(),
        n_cap: vec![0.0; n_bins],
        n: vec![0.0; n_bins],
        emission_bins: bins,
        seed: 53,
        method: "gillespie",
        truncated: false,
        boundary_hits: 0,
        channel_counts: [0; N_CHANNELS],
    };
    let f_ref = output_fano_from(std::slice::from_ref(&stream), 40.0, 0.0).unwrap();
    let ref_ok = (f_ref.value - 1.0).abs() <= 3.0 * f_ref.std_error && f_ref.std_error < 0.05;
    let elapsed = start.elapsed().as_secs_f64();

    let ok = within <= 0.10 && plateau_ok && ref_ok && elapsed <= 300.0;
    let detail = format!(
        "window-150 Fano {:.4} +- {:.4} vs linear ratio {:.4}: {:.1}% off (allow 10%; exact \
         long-window limit {:.4}); windows 75/150 consistent: {}; Poisson reference \
         {:.4} +- {:.4}; {:.0} s",
        f150.value,
        f150.std_error,
        target,
        100.0 * within,
        f_true,
        plateau_ok,
        f_ref.value,
        f_ref.std_error,
        elapsed
    );
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------
// 10: pump-noise squeezing in the jump simulation on a desk-scale device
// ---------------------------------------------------------------------------

fn regular_pump_squeezing_simulation() -> Verdict {
    let start = Instant::now();
    let base = DeviceParams::from_ratios(1e-2, 50.0, 1.5).unwrap();
    let j = 3.0 * derived_scales(&base).unwrap().j_th;
    let window = 4000.0;
    let burn = 200.0;

    let quiet = base.with_pump(j, 0.0).unwrap();
    let op = stationary_state(&quiet).unwrap();
    let theory_quiet = lfn_exact(&quiet, &op, 0.0, DiffusionModel::Kinetic).unwrap();
    let theory_quiet_window = fano_window_linear(&quiet, &op, 0.0, window);

    let proc_quiet = build_jump_process(&quiet, PumpMode::Regular).unwrap();
    let opts = GillespieOptions {
        initial: None,
        max_events: 2_000_000_000,
    };
    let ens_quiet = gillespie_ensemble(&proc_quiet, 150_000.0, 1.0, 907, 8, opts).unwrap();
    assert!(ens_quiet.iter().all(|tr| !tr.truncated), "event budget hit");
    let f_quiet = output_fano_from(&ens_quiet, window, burn).unwrap();
    drop(ens_quiet);

    let noisy = base.with_pump(j, 1.0).unwrap();
    let theory_noisy = lfn_exact(&noisy, &op, 1.0, DiffusionModel::Kinetic).unwrap();
    let proc_noisy = build_jump_process(&noisy, PumpMode::Poisson).unwrap();
    let ens_noisy =
        gillespie_ensemble(&proc_noisy, 12_500.0, 1.0, 911, 8, GillespieOptions::default())
            .unwrap();
    let f_noisy = output_fano_from(&ens_noisy, 1000.0, burn).unwrap();
    let theory_noisy_window = fano_window_linear(&noisy, &op, 1.0, 1000.0);

    // gross sanity on the estimator before judging the physics
    assert!(
        (f_quiet.value - theory_quiet_window).abs() <= 0.5 * theory_quiet_window,
        "quiet-pump Fano far from the finite-window theory: {} vs {theory_quiet_window}",
        f_quiet.value
    );

    let squeezed = f_quiet.value + 3.0 * f_quiet.std_error < 1.0;
    let noisy_at_shot_or_above = f_noisy.value >= 1.0 - 3.0 * f_noisy.std_error;
    let elapsed = start.elapsed().as_secs_f64();
    let ok = squeezed && noisy_at_shot_or_above && elapsed <= 900.0;
    let detail = format!(
        "n = {:.0} at 3x threshold: regular pump F = {:.3} +- {:.3} (finite-window theory {:.3}, \
         limit {:.3}) -- below shot at 3 SE: {}; Poisson pump F = {:.2} +- {:.2} (theory {:.2}, \
         limit {:.2}) -- at/above shot: {}; {:.0} s",
        op.n_bar,
        f_quiet.value,
        f_quiet.std_error,
        theory_quiet_window,
        theory_quiet,
        squeezed,
        f_noisy.value,
        f_noisy.std_error,
        theory_noisy_window,
        theory_noisy,
        noisy_at_shot_or_above,
        elapsed
    );
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------
// 11: two-time correlation structure of the output intensity
// ---------------------------------------------------------------------------

fn two_time_correlation_structure() -> Verdict {
    // (a) the one-sided integral of the smooth part recovers the
    // zero-frequency ratio on every device/convention combination
    let crit_device = DeviceParams::from_ratios(1e-2, 50.0, 1.5).unwrap();
    let j3 = 3.0 * derived_scales(&crit_device).unwrap().j_th;
    let devices = [
        toy_params(),
        crit_device.with_pump(j3, 1.0).unwrap(),
        device_at_photon_number(&figure_device(1e-3), 1000.0).unwrap(),
    ];
    let mut worst_identity = 0.0f64;
    for p in &devices {
        let op = stationary_state(p).unwrap();
        for model in [DiffusionModel::Paper, DiffusionModel::Kinetic] {
            for sigma in [0.0, 1.0] {
                let l = 2.0 * p.kappa * op.n_bar;
                let lhs = 2.0 * two_time_integral_exact(p, &op, sigma, model).unwrap();
                let rhs = (lfn_exact(p, &op, sigma, model).unwrap() - 1.0) * l;
                worst_identity = worst_identity.max((lhs - rhs).abs() / l.max(lhs.abs()));
            }
        }
    }
    let identity_ok = worst_identity <= 1e-10;

    // (b) over-damped point at exactly half quantum efficiency: bunching at
    // short lags, anti-bunching at intermediate lags
    let base = DeviceParams::from_ratios(0.5, 9.375, 1.5).unwrap();
    let params = device_at_photon_number(&base, 1.5).unwrap();
    let op = stationary_state(&params).unwrap();
    assert!(
        (op.quantum_efficiency - 0.5).abs() < 1e-12,
        "operating point missed half efficiency: {}",
        op.quantum_efficiency
    );
    let rates = fluctuation_rates(&params, &op).unwrap();
    let disc = 0.25 * rates.drift.trace().powi(2) - rates.drift.det();
    assert!(disc > 0.0, "relaxation is not over-damped here");
    let mut first_positive = None;
    let mut min_negative = (0.0f64, 0.0f64);
    for k in 1..=160 {
        let t = 0.05 * k as f64;
        let c = two_time_correlation_exact(&params, &op, t, 1.0, DiffusionModel::Kinetic)
            .unwrap()
            .smooth;
        if c > 0.0 && first_positive.is_none() {
            first_positive = Some((t, c));
        }
        if c < min_negative.1 {
            min_negative = (t, c);
        }
    }
    let signs_ok = matches!(first_positive, Some((t, _)) if t < 1.0)
        && min_negative.1 < 0.0
        && min_negative.0 > first_positive.unwrap().0;

    // (c) the split into one bunching and one anti-bunching exponential
    // integrates to exactly zero: amp/g_n - (amp G_N/g_n)/G_N
    let tta = two_time_correlation_approx(&params, &op, 0.0).unwrap();
    assert!(!tta.regime_warning, "split form not applicable here");
    let cancel = tta.bunching / rates.gamma_n + tta.anti_bunching / rates.gamma_cap_n;
    let cancel_ok = cancel.abs() <= 1e-12 * (tta.bunching / rates.gamma_n);

    let ok = identity_ok && signs_ok && cancel_ok;
    let detail = format!(
        "integral identity off by {:.1e} worst over 3 devices x 2 conventions x 2 pump settings \
         (allow 1e-10); half-efficiency over-damped point: bunching to t = {:.2}, deepest \
         anti-bunching {:.2} at t = {:.2}; split-form integral cancels to {:.1e}",
        worst_identity,
        first_positive.map(|(t, _)| t).unwrap_or(f64::NAN),
        min_negative.1,
        min_negative.0,
        cancel.abs()
    );
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------
// 12: multimode occupation statistics
// ---------------------------------------------------------------------------

fn multimode_occupation_statistics() -> Verdict {
    let mut exact_ok = true;
    for m in 1..=8u64 {
        for n in 0..=8u64 {
            let got = multimode::microcanonical_pmf_exact(m, n).unwrap();
            let want = support::enumerated_mode_pmf(m as usize, n);
            if got != want {
                exact_ok = false;
            }
        }
    }
    let p22 = multimode::microcanonical_pmf(2, 2).unwrap();
    let uniform_ok = p22
        .probabilities
        .iter()
        .all(|&p| (p - 1.0 / 3.0).abs() < 1e-15);
    let tv = multimode::microcanonical_pmf(100, 100)
        .unwrap()
        .total_variation(&multimode::geometric_approx_pmf(100, 100).unwrap());
    let ok = exact_ok && uniform_ok && tv < 0.02;
    let detail = format!(
        "exact pmf equals enumeration for all M, N <= 8 (rational arithmetic): {}; two modes \
         sharing two photons: uniform thirds: {}; geometric form at M = N = 100 within \
         {:.4} total variation (allow 0.02)",
        exact_ok, uniform_ok, tv
    );
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------

struct Check {
    id: u32,
    name: &'static str,
    expect_pass: bool,
    run: fn() -> Verdict,
}

fn main() {
    let checks = [
        Check { id: 1, name: "threshold-scaling-small-beta", expect_pass: true, run: threshold_scaling },
        Check { id: 2, name: "squeezing-threshold-root", expect_pass: true, run: squeezing_threshold_root },
        Check { id: 3, name: "output-noise-curve-family", expect_pass: false, run: output_noise_curve_family },
        Check { id: 4, name: "threshold-ordering-and-crossing", expect_pass: true, run: threshold_ordering_and_crossing },
        Check { id: 5, name: "thermal-squeezing-coexistence", expect_pass: true, run: thermal_squeezing_coexistence },
        Check { id: 6, name: "noise-threshold-closed-forms", expect_pass: true, run: noise_threshold_closed_forms },
        Check { id: 7, name: "compact-formula-consistency", expect_pass: false, run: compact_formula_consistency },
        Check { id: 8, name: "jump-vs-master-equation", expect_pass: true, run: jump_vs_master_equation },
        Check { id: 9, name: "output-counting-statistics", expect_pass: true, run: output_counting_statistics },
        Check { id: 10, name: "regular-pump-squeezing-simulation", expect_pass: true, run: regular_pump_squeezing_simulation },
        Check { id: 11, name: "two-time-correlation-structure", expect_pass: true, run: two_time_correlation_structure },
        Check { id: 12, name: "multimode-occupation-statistics", expect_pass: true, run: multimode_occupation_statistics },
    ];

    let mut mismatches = 0;
    let mut passed = 0;
    for c in &checks {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(v) => {
                println!(
                    "check {:02} {:<36} {} [{:6.1} s]  {}",
                    c.id,
                    c.name,
                    if v.pass { "PASS" } else { "FAIL" },
                    secs,
                    v.detail
                );
                if v.pass {
                    passed += 1;
                }
                if v.pass != c.expect_pass {
                    mismatches += 1;
                    println!(
                        "         ^ unexpected verdict: this check is expected to {}",
                        if c.expect_pass {
                            "PASS"
                        } else {
                            "FAIL (documented miss of the compact formulas)"
                        }
                    );
                }
            }
            Err(payload) => {
                mismatches += 1;
                let msg = payload
                    .downcast_ref::<String>()
                    .map(String::as_str)
                    .or_else(|| payload.downcast_ref::<&str>().copied())
                    .unwrap_or("panic");
                println!(
                    "check {:02} {:<36} ERROR [{:6.1} s]  internal pin tripped: {}",
                    c.id, c.name, secs, msg
                );
            }
        }
    }
    println!(
        "gate: {passed}/{} checks pass; expected failures documented above; \
         verdict expectations {}",
        checks.len(),
        if mismatches == 0 { "all met" } else { "VIOLATED" }
    );
    if mismatches > 0 {
        std::process::exit(1);
    }
}
