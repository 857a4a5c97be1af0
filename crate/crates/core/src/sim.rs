//! Radar channel, matched-filter delay–Doppler estimation, FSK symbol
//! detection and the Monte Carlo MSE harness.

use crate::error::invalid;
use crate::fsk::{synthesize, tone, FrequencySequence, SampledWaveform, WaveformParams};
use crate::rms::{default_bandwidth, rms_bw_sq};
use crate::rng::substream;
use crate::stats::EmpiricalCdf;
use crate::stopper::{generate_waveform, StoppingConfig};
use crate::Result;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// True target parameters and noise level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelScenario {
    /// Round-trip delay, s.
    pub tau: f64,
    /// Doppler shift, rad/s.
    pub omega: f64,
    /// Variance of the complex reflection coefficient.
    pub sigma_b_sq: f64,
    /// Noise PSD.
    pub n0: f64,
    /// Use this reflection coefficient instead of drawing one.
    pub fixed_gain: Option<Complex64>,
}

impl ChannelScenario {
    /// `N₀ = σ² L T / SNR`, so the received signal energy over noise PSD
    /// equals `snr` for a waveform of `L` subpulses.
    pub fn with_snr(tau: f64, omega: f64, sigma_b_sq: f64, snr: f64, l: usize, t: f64) -> Result<Self> {
        if !(snr > 0.0 && sigma_b_sq > 0.0 && t > 0.0) || l == 0 {
            return invalid("SNR, σ², T and L must be positive");
        }
        Ok(Self {
            tau,
            omega,
            sigma_b_sq,
            n0: sigma_b_sq * l as f64 * t / snr,
            fixed_gain: None,
        })
    }

    pub fn noiseless(tau: f64, omega: f64) -> Self {
        Self {
            tau,
            omega,
            sigma_b_sq: 1.0,
            n0: 0.0,
            fixed_gain: Some(Complex64::new(1.0, 0.0)),
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// `r[n] = b s(t_n - τ) e^{jω t_n} + n[n]` over `window` samples.
///
/// Fractional delays use linear interpolation; the noise has per-sample
/// variance `N₀ f_s`.
pub fn apply_channel<R: Rng + ?Sized>(
    w: &SampledWaveform,
    scen: &ChannelScenario,
    window: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let fs = w.sample_rate;
    let shift = scen.tau * fs;
    if !(shift >= 0.0) || shift >= window as f64 {
        return invalid(format!(
            "delay {} s lies outside the {window}-sample observation window",
            scen.tau
        ));
    }
    if scen.n0 < 0.0 || scen.sigma_b_sq < 0.0 {
        return invalid("noise PSD and reflection variance must be nonnegative");
    }
    let b = match scen.fixed_gain {
        Some(g) => g,
        None => complex_normal(rng, scen.sigma_b_sq),
    };
    let whole = shift.floor();
    let frac = shift - whole;
    let d = whole as usize;
    let at = |i: isize| -> Complex64 {
        if i < 0 || i as usize >= w.len() {
            ZERO
        } else {
            w.samples[i as usize]
        }
    };
    let step = Complex64::from_polar(1.0, scen.omega / fs);
    let mut rot = Complex64::new(1.0, 0.0);
    let noise_var = scen.n0 * fs;
    let mut out = Vec::with_capacity(window);
    for n in 0..window {
        let i = n as isize - d as isize;
        let s = if frac == 0.0 {
            at(i)
        } else {
            // s(t_n - τ) sits between samples i - 1 and i
            at(i - 1) * frac + at(i) * (1.0 - frac)
        };
        if n % 1024 == 0 {
            rot = Complex64::from_polar(1.0, scen.omega * n as f64 / fs);
        }
        let mut r = b * s * rot;
        if noise_var > 0.0 {
            r += complex_normal(rng, noise_var);
        }
        out.push(r);
        rot *= step;
    }
    Ok(out)
}

/// Rectangular delay (s) × Doppler (rad/s) search grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    pub delay_min: f64,
    pub delay_step: f64,
    pub delay_count: usize,
    pub doppler_min: f64,
    pub doppler_step: f64,
    pub doppler_count: usize,
}

impl SearchGrid {
    /// Grid of `2·half + 1` points per axis centred on `(tau, omega)`.
    pub fn centered(tau: f64, delay_step: f64, delay_half: usize, omega: f64, doppler_step: f64, doppler_half: usize) -> Result<Self> {
        let g = Self {
            delay_min: tau - delay_half as f64 * delay_step,
            delay_step,
            delay_count: 2 * delay_half + 1,
            doppler_min: omega - doppler_half as f64 * doppler_step,
            doppler_step,
            doppler_count: 2 * doppler_half + 1,
        };
        g.validate()?;
        Ok(g)
    }

    /// Delay span `±delay_span_t·T` in one-sample steps, Doppler step
    /// `2π/(8 L_max T)` over `±2π/(L_max T)`.
    pub fn standard(params: &WaveformParams, tau: f64, omega: f64, delay_span_t: f64, l_max: usize) -> Result<Self> {
        let t = params.subpulse_interval;
        let ts = params.sample_period();
        let half = (delay_span_t * t / ts).round() as usize;
        let dstep = 2.0 * PI / (8.0 * l_max as f64 * t);
        Self::centered(tau, ts, half, omega, dstep, 8)
    }

    pub fn validate(&self) -> Result<()> {
        if self.delay_count == 0 || self.doppler_count == 0 {
            return invalid("search grid has an empty axis");
        }
        if !(self.delay_step > 0.0 && self.doppler_step > 0.0) {
            return invalid("search grid steps must be positive");
        }
        Ok(())
    }

    pub fn delay(&self, i: usize) -> f64 {
        self.delay_min + i as f64 * self.delay_step
    }

    pub fn doppler(&self, j: usize) -> f64 {
        self.doppler_min + j as f64 * self.doppler_step
    }

    pub fn delay_max(&self) -> f64 {
        self.delay(self.delay_count - 1)
    }

    /// Delay axis in whole samples: `(first lag, lag step)`.
    fn lags(&self, fs: f64) -> Result<(i64, i64)> {
        let first = self.delay_min * fs;
        let step = self.delay_step * fs;
        let (fr, sr) = (first.round(), step.round());
        if (first - fr).abs() > 1e-6 || (step - sr).abs() > 1e-6 || sr < 1.0 {
            return invalid("delay grid must fall on whole samples");
        }
        Ok((fr as i64, sr as i64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub tau_hat: f64,
    pub omega_hat: f64,
    /// `|Σ r s* e^{-jωt}|²` at the estimate.
    pub peak_metric: f64,
}

/// Direct evaluation of the matched-filter statistic on every grid point.
/// Ties resolve to the smallest delay, then the smallest Doppler.
pub fn ml_estimate(received: &[Complex64], w: &SampledWaveform, grid: &SearchGrid) -> Result<EstimationResult> {
    grid.validate()?;
    let fs = w.sample_rate;
    let (first, step) = grid.lags(fs)?;
    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for i in 0..grid.delay_count {
        let d = first + i as i64 * step;
        for j in 0..grid.doppler_count {
            let om = grid.doppler(j);
            let mut acc = ZERO;
            for (n, r) in received.iter().enumerate() {
                let q = n as i64 - d;
                if q < 0 || q as usize >= w.len() {
                    continue;
                }
                acc += r * w.samples[q as usize].conj() * Complex64::from_polar(1.0, -om * n as f64 / fs);
            }
            let v = acc.norm_sqr();
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    Ok(EstimationResult {
        tau_hat: grid.delay(best.1),
        omega_hat: grid.doppler(best.2),
        peak_metric: best.0,
    })
}

/// Matched filter specialised to rectangular-subpulse FSK.
///
/// With `y[n] = r[n] e^{-jω̄ n / f_s}` the statistic is `Σ_l D_l(d)` where
/// `D_l(d) = Σ_{j<P} y[lP + d + j] e^{-jθ_l j}`, and each `D_l` slides from
/// one lag to the next in O(1):
/// `D_l(d + 1) = e^{jθ_l} (D_l(d) - y[lP + d] + y[lP + d + P] e^{-jθ_l P})`.
/// The Doppler phasors are tabulated once for the longest window.
#[derive(Debug, Clone)]
pub struct MatchedFilterBank {
    params: WaveformParams,
    grid: SearchGrid,
    first_lag: i64,
    lag_step: i64,
    /// `doppler_count × max_window` table of `e^{-jω̄ n / f_s}`.
    phasors: Vec<Complex64>,
    max_window: usize,
    /// Per tone: `e^{jθ}` and `e^{-jθP}`.
    tone_rot: Vec<(Complex64, Complex64)>,
    /// Per tone, one subpulse of `e^{-jθ j}`.
    tone_conj: Vec<Vec<Complex64>>,
}

// Independent subpulse recurrences advanced together; the recurrence is
// latency bound, so interleaving them keeps the multiplier busy.
const LANES: usize = 8;

impl MatchedFilterBank {
    pub fn new(params: &WaveformParams, grid: &SearchGrid, max_window: usize) -> Result<Self> {
        params.validate_for_synthesis()?;
        grid.validate()?;
        let fs = params.sample_rate();
        let (first_lag, lag_step) = grid.lags(fs)?;
        let mut phasors = Vec::with_capacity(grid.doppler_count * max_window);
        for j in 0..grid.doppler_count {
            let om = grid.doppler(j);
            phasors.extend((0..max_window).map(|n| Complex64::from_polar(1.0, -om * n as f64 / fs)));
        }
        let p = params.samples_per_subpulse;
        let tone_rot = (0..params.m)
            .map(|m| {
                let th = params.tone_omega(m) / fs;
                (Complex64::from_polar(1.0, th), Complex64::from_polar(1.0, -th * p as f64))
            })
            .collect();
        let tone_conj = (0..params.m).map(|m| tone(params, m).iter().map(|c| c.conj()).collect()).collect();
        Ok(Self {
            params: params.clone(),
            grid: *grid,
            first_lag,
            lag_step,
            phasors,
            max_window,
            tone_rot,
            tone_conj,
        })
    }

    pub fn grid(&self) -> &SearchGrid {
        &self.grid
    }

    pub fn max_window(&self) -> usize {
        self.max_window
    }

    /// `|Z|²` surface, indexed `[doppler][delay]`.
    pub fn surface(&self, seq: &FrequencySequence, received: &[Complex64]) -> Result<Vec<Vec<f64>>> {
        if received.len() > self.max_window {
            return invalid(format!(
                "received window {} exceeds the tabulated {}",
                received.len(),
                self.max_window
            ));
        }
        if seq.alphabet() != self.params.m {
            return invalid("sequence alphabet does not match the filter");
        }
        let p = self.params.samples_per_subpulse;
        let nlags = (self.grid.delay_count - 1) * self.lag_step as usize + 1;
        // zero padding so every window index is in bounds
        let pad = (1 - self.first_lag).max(0) as usize;
        let last = (seq.len() * p) as i64 + self.first_lag + (nlags + p) as i64;
        let buf_len = pad + (last.max(received.len() as i64) as usize) + 1;
        // split re/im buffers so the lane loops vectorise
        let mut yr = vec![0.0; buf_len];
        let mut yi = vec![0.0; buf_len];
        let mut zr = vec![0.0; nlags];
        let mut zi = vec![0.0; nlags];
        let mut er = vec![0.0; (nlags - 1) * LANES];
        let mut ei = vec![0.0; (nlags - 1) * LANES];
        let mut out = Vec::with_capacity(self.grid.doppler_count);
        let idx = seq.indices();
        for j in 0..self.grid.doppler_count {
            let ph = &self.phasors[j * self.max_window..j * self.max_window + received.len()];
            for (((a, b), r), f) in yr[pad..].iter_mut().zip(&mut yi[pad..]).zip(received).zip(ph) {
                let v = r * f;
                (*a, *b) = (v.re, v.im);
            }
            zr.fill(0.0);
            zi.fill(0.0);
            for chunk in (0..idx.len()).step_by(LANES) {
                let lanes = (idx.len() - chunk).min(LANES);
                let (mut dr, mut di) = ([0.0; LANES], [0.0; LANES]);
                let (mut ur, mut ui) = ([0.0; LANES], [0.0; LANES]);
                for k in 0..LANES {
                    if k >= lanes {
                        er.chunks_exact_mut(LANES).for_each(|e| e[k] = 0.0);
                        ei.chunks_exact_mut(LANES).for_each(|e| e[k] = 0.0);
                        continue;
                    }
                    let m = idx[chunk + k];
                    let (up, wrap) = self.tone_rot[m];
                    (ur[k], ui[k]) = (up.re, up.im);
                    let base = (pad as i64 + ((chunk + k) * p) as i64 + self.first_lag) as usize;
                    let mut d = ZERO;
                    for ((a, b), c) in yr[base..base + p].iter().zip(&yi[base..base + p]).zip(&self.tone_conj[m]) {
                        d += Complex64::new(*a, *b) * c;
                    }
                    (dr[k], di[k]) = (d.re, d.im);
                    let n = nlags - 1;
                    let lo = yr[base..base + n].iter().zip(&yi[base..base + n]);
                    let hi = yr[base + p..base + p + n].iter().zip(&yi[base + p..base + p + n]);
                    let es = er.chunks_exact_mut(LANES).zip(ei.chunks_exact_mut(LANES));
                    for ((e, (ar, ai)), (br, bi)) in es.zip(lo).zip(hi) {
                        e.0[k] = br * wrap.re - bi * wrap.im - ar;
                        e.1[k] = br * wrap.im + bi * wrap.re - ai;
                    }
                }
                zr[0] += dr.iter().sum::<f64>();
                zi[0] += di.iter().sum::<f64>();
                let zs = zr[1..].iter_mut().zip(&mut zi[1..]);
                let es = er.chunks_exact(LANES).zip(ei.chunks_exact(LANES));
                for ((zr, zi), (er, ei)) in zs.zip(es) {
                    let (mut sr, mut si) = ([0.0; LANES], [0.0; LANES]);
                    for k in 0..LANES {
                        let tr = dr[k] + er[k];
                        let ti = di[k] + ei[k];
                        dr[k] = ur[k] * tr - ui[k] * ti;
                        di[k] = ur[k] * ti + ui[k] * tr;
                        sr[k] = dr[k];
                        si[k] = di[k];
                    }
                    *zr += sr.iter().sum::<f64>();
                    *zi += si.iter().sum::<f64>();
                }
            }
            let step = self.lag_step as usize;
            out.push(
                (0..self.grid.delay_count)
                    .map(|i| {
                        let (re, im) = (zr[i * step], zi[i * step]);
                        re * re + im * im
                    })
                    .collect(),
            );
        }
        Ok(out)
    }

    /// Grid maximiser with the same tie-break as [`ml_estimate`].
    pub fn estimate(&self, seq: &FrequencySequence, received: &[Complex64]) -> Result<EstimationResult> {
        let s = self.surface(seq, received)?;
        let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
        for i in 0..self.grid.delay_count {
            for (j, row) in s.iter().enumerate() {
                if row[i] > best.0 {
                    best = (row[i], i, j);
                }
            }
        }
        Ok(EstimationResult {
            tau_hat: self.grid.delay(best.1),
            omega_hat: self.grid.doppler(best.2),
            peak_metric: best.0,
        })
    }
}

/// Noncoherent symbol decision: `argmax_m |Σ r[n] conj(tone_m[n])|`.
pub fn detect_symbol(samples: &[Complex64], params: &WaveformParams) -> Result<usize> {
    if samples.len() != params.samples_per_subpulse {
        return invalid(format!(
            "detector needs {} samples, got {}",
            params.samples_per_subpulse,
            samples.len()
        ));
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for m in 0..params.m {
        let c: Complex64 = samples.iter().zip(tone(params, m)).map(|(r, t)| r * t.conj()).sum();
        if c.norm_sqr() > best.0 {
            best = (c.norm_sqr(), m);
        }
    }
    Ok(best.1)
}

/// What to do with a dynamic realisation whose natural length falls outside
/// the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundPolicy {
    /// Discard and draw a fresh waveform.
    Exclude,
    /// Apply the bounds inside the stopping rule (cap is a forced stop).
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scheme {
    Fixed { l: usize },
    Dynamic {
        gamma2: f64,
        min_len: u64,
        max_len: Option<u64>,
        policy: BoundPolicy,
    },
}

impl Scheme {
    pub fn label(&self) -> String {
        match self {
            Scheme::Fixed { l } => format!("fixed{l}"),
            Scheme::Dynamic { max_len: None, min_len: 1, .. } => "dynamic".into(),
            Scheme::Dynamic { .. } => "bounded".into(),
        }
    }

    fn tag(&self) -> u64 {
        match self {
            Scheme::Fixed { l } => *l as u64,
            Scheme::Dynamic { gamma2, min_len, max_len, policy } => {
                (1 << 40) ^ gamma2.to_bits().rotate_left(7) ^ (min_len << 20) ^ max_len.unwrap_or(0) ^ ((*policy as u64) << 50)
            }
        }
    }

    /// One waveform realisation and the number of discarded draws.
    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R, m: usize) -> Result<(FrequencySequence, u32)> {
        match *self {
            Scheme::Fixed { l } => Ok((crate::fsk::random_sequence(rng, m, l)?, 0)),
            Scheme::Dynamic { gamma2, min_len, max_len, policy } => match policy {
                BoundPolicy::Stop => {
                    let cfg = StoppingConfig::new(min_len as f64, gamma2, 1.0, max_len)?;
                    Ok((generate_waveform(rng, m, &cfg)?.0, 0))
                }
                BoundPolicy::Exclude => {
                    let cfg = StoppingConfig::flatness_only(gamma2)?;
                    let hi = max_len.unwrap_or(u64::MAX);
                    for rejected in 0..100_000u32 {
                        let (seq, d) = generate_waveform(rng, m, &cfg)?;
                        if d.length >= min_len && d.length <= hi {
                            return Ok((seq, rejected));
                        }
                    }
                    invalid("length bounds reject essentially every realisation")
                }
            },
        }
    }

    pub fn max_len(&self) -> Option<u64> {
        match *self {
            Scheme::Fixed { l } => Some(l as u64),
            Scheme::Dynamic { max_len, .. } => max_len,
        }
    }
}

/// Everything the MSE harness needs besides the scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseSetup {
    pub params: WaveformParams,
    pub tau: f64,
    pub omega: f64,
    pub sigma_b_sq: f64,
    /// Delay search half-span in units of T.
    pub delay_span_t: f64,
    /// Length used for the Doppler grid step; also caps unbounded dynamic
    /// realisations when sizing the observation window.
    pub l_max: usize,
    pub realizations: usize,
    pub trials: usize,
    pub seed: u64,
}

impl MseSetup {
    pub fn grid(&self) -> Result<SearchGrid> {
        SearchGrid::standard(&self.params, self.tau, self.omega, self.delay_span_t, self.l_max)
    }

    fn window(&self, grid: &SearchGrid, l: usize) -> usize {
        let fs = self.params.sample_rate();
        let extra = (grid.delay_max() * fs).ceil().max(0.0) as usize;
        l * self.params.samples_per_subpulse + extra
    }
}

/// Per-realisation outcome at one SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizationRecord {
    pub realization: usize,
    pub l: usize,
    pub sigma_w_sq: f64,
    pub snr_db: f64,
    /// Mean of `((τ̂ - τ)/T)²` over the noise trials.
    pub delay_mse: f64,
    /// Mean of `(ω̂ - ω)²` over the noise trials, (rad/s)².
    pub doppler_mse: f64,
}

const LABEL_WAVE: u64 = 0x5741_5645;
const LABEL_TRIAL: u64 = 0x5452_4941;

/// Waveform realisations of `scheme` (shared by every SNR).
pub fn realizations(setup: &MseSetup, scheme: &Scheme) -> Result<Vec<FrequencySequence>> {
    (0..setup.realizations)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(setup.seed, LABEL_WAVE ^ scheme.tag(), r as u64, 0);
            Ok(scheme.realize(&mut rng, setup.params.m)?.0)
        })
        .collect()
}

/// Run every realisation at every SNR. Returns one record list per SNR.
pub fn run_mse(setup: &MseSetup, scheme: &Scheme, snrs_db: &[f64]) -> Result<Vec<Vec<RealizationRecord>>> {
    if setup.trials == 0 || setup.realizations == 0 {
        return invalid("need at least one realisation and one trial");
    }
    let grid = setup.grid()?;
    let seqs = realizations(setup, scheme)?;
    let longest = seqs.iter().map(|s| s.len()).max().unwrap_or(1);
    let bank = MatchedFilterBank::new(&setup.params, &grid, setup.window(&grid, longest))?;
    let bw = default_bandwidth(&setup.params);
    let t = setup.params.subpulse_interval;
    let per_real: Vec<Vec<RealizationRecord>> = seqs
        .par_iter()
        .enumerate()
        .map(|(r, seq)| {
            let w = synthesize(&setup.params, seq)?;
            let sigma_w_sq = rms_bw_sq(seq, &setup.params, bw)?;
            let window = setup.window(&grid, seq.len());
            snrs_db
                .iter()
                .enumerate()
                .map(|(si, &snr_db)| {
                    let scen = ChannelScenario::with_snr(setup.tau, setup.omega, setup.sigma_b_sq, db_to_linear(snr_db), seq.len(), t)?;
                    let (mut sd, mut so) = (0.0, 0.0);
                    for trial in 0..setup.trials {
                        let mut rng = substream(setup.seed, LABEL_TRIAL ^ scheme.tag(), r as u64, ((si as u64) << 32) | trial as u64);
                        let rx = apply_channel(&w, &scen, window, &mut rng)?;
                        let est = bank.estimate(seq, &rx)?;
                        sd += ((est.tau_hat - setup.tau) / t).powi(2);
                        so += (est.omega_hat - setup.omega).powi(2);
                    }
                    let n = setup.trials as f64;
                    Ok(RealizationRecord {
                        realization: r,
                        l: seq.len(),
                        sigma_w_sq,
                        snr_db,
                        delay_mse: sd / n,
                        doppler_mse: so / n,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..snrs_db.len())
        .map(|si| per_real.iter().map(|v| v[si]).collect())
        .collect())
}

/// Averages and best/worst realisations at one SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseSummary {
    pub snr_db: f64,
    pub delay_mse: f64,
    pub doppler_mse: f64,
    /// Delay MSE of the realisation with the largest RMS bandwidth.
    pub delay_best: f64,
    /// Delay MSE of the realisation with the smallest RMS bandwidth.
    pub delay_worst: f64,
    /// Doppler MSE of the longest realisation.
    pub doppler_best: f64,
    /// Doppler MSE of the shortest realisation.
    pub doppler_worst: f64,
}

pub fn summarize(records: &[RealizationRecord]) -> Result<MseSummary> {
    let Some(first) = records.first() else {
        return invalid("no records");
    };
    let n = records.len() as f64;
    // ties resolve to the lowest realisation index
    let pick = |key: &dyn Fn(&RealizationRecord) -> f64, largest: bool| -> RealizationRecord {
        let mut best = *first;
        for rec in &records[1..] {
            let (a, b) = (key(rec), key(&best));
            if (largest && a > b) || (!largest && a < b) {
                best = *rec;
            }
        }
        best
    };
    Ok(MseSummary {
        snr_db: first.snr_db,
        delay_mse: records.iter().map(|r| r.delay_mse).sum::<f64>() / n,
        doppler_mse: records.iter().map(|r| r.doppler_mse).sum::<f64>() / n,
        delay_best: pick(&|r| r.sigma_w_sq, true).delay_mse,
        delay_worst: pick(&|r| r.sigma_w_sq, false).delay_mse,
        doppler_best: pick(&|r| r.l as f64, true).doppler_mse,
        doppler_worst: pick(&|r| r.l as f64, false).doppler_mse,
    })
}

/// `mse_sweep`: one summary per SNR.
pub fn mse_sweep(setup: &MseSetup, scheme: &Scheme, snrs_db: &[f64]) -> Result<Vec<MseSummary>> {
    run_mse(setup, scheme, snrs_db)?.iter().map(|r| summarize(r)).collect()
}

/// Per-realisation CDFs at one SNR.
#[derive(Debug, Clone)]
pub struct MseCdf {
    pub delay: EmpiricalCdf,
    pub doppler: EmpiricalCdf,
    pub latency: EmpiricalCdf,
    pub records: Vec<RealizationRecord>,
}

pub fn mse_cdf(setup: &MseSetup, scheme: &Scheme, snr_db: f64) -> Result<MseCdf> {
    let records = run_mse(setup, scheme, &[snr_db])?.remove(0);
    Ok(cdf_from_records(records))
}

pub fn cdf_from_records(records: Vec<RealizationRecord>) -> MseCdf {
    MseCdf {
        delay: EmpiricalCdf::new(records.iter().map(|r| r.delay_mse).collect()),
        doppler: EmpiricalCdf::new(records.iter().map(|r| r.doppler_mse).collect()),
        latency: EmpiricalCdf::new(records.iter().map(|r| r.l as f64).collect()),
        records,
    }
}

/// Fixed-scheme delay-MSE CDF evaluated at the dynamic scheme's quantiles:
/// `out[i][j] = F_fixed_i(Q_dynamic(q_j))`.
pub fn table_one(dynamic: &EmpiricalCdf, fixed: &[&EmpiricalCdf], quantiles: &[f64]) -> Result<Vec<Vec<f64>>> {
    let points = quantiles
        .iter()
        .map(|&q| dynamic.quantile(q).ok_or_else(|| crate::Error::InvalidParameter(format!("bad quantile {q}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(fixed.iter().map(|f| points.iter().map(|&x| f.eval(x)).collect()).collect())
}
