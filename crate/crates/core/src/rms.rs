//! RMS time duration, RMS bandwidth and the CRLBs they bound.

use crate::error::invalid;
use crate::fsk::{FrequencySequence, WaveformParams};
use crate::Result;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmsReport {
    /// Squared RMS time duration, s².
    pub sigma_t_sq: f64,
    /// Squared RMS bandwidth, (rad/s)².
    pub sigma_w_sq: f64,
    /// Limiting bandwidth used for the pulse-shape term, Hz.
    pub bandwidth: f64,
}

/// `L² T² / 12`.
pub fn rms_time_sq(l: usize, t: f64) -> Result<f64> {
    if l == 0 || !(t > 0.0) {
        return invalid(format!("need L >= 1 and T > 0, got L = {l}, T = {t}"));
    }
    let lt = l as f64 * t;
    Ok(lt * lt / 12.0)
}

/// Sine integral `Si(x) = ∫₀ˣ sin(u)/u du`, odd in `x`.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x <= 4.0 {
        si_series(x)
    } else {
        si_continued_fraction(x)
    }
}

fn si_series(x: f64) -> f64 {
    // Σ (-1)^n x^{2n+1} / ((2n+1)(2n+1)!)
    let x2 = x * x;
    let mut term = x; // x^{2n+1}/(2n+1)!
    let mut sum = x;
    let mut n = 0u32;
    loop {
        let a = (2 * n + 2) as f64;
        let b = (2 * n + 3) as f64;
        term *= -x2 / (a * b);
        let add = term / b;
        sum += add;
        n += 1;
        if add.abs() < 1e-17 * sum.abs() || n > 60 {
            return sum;
        }
    }
}

fn si_continued_fraction(x: f64) -> f64 {
    // E1(ix) by modified Lentz; Si(x) = π/2 + Im E1(ix)
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..10_000 {
        let a = -((i - 1) as f64).powi(2);
        b += 2.0;
        d = Complex64::new(1.0, 0.0) / (d * a + b);
        c = b + Complex64::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    let e1 = Complex64::from_polar(1.0, -x) * h;
    FRAC_PI_2 + e1.im
}

/// Pulse-shape term `(πB)² / (πBT·Si(πBT) + cos(πBT) - 1)`.
pub fn pulse_bandwidth_term(bandwidth: f64, t: f64) -> Result<f64> {
    if !(bandwidth > 0.0 && t > 0.0) {
        return invalid(format!("need B > 0 and T > 0, got B = {bandwidth}, T = {t}"));
    }
    let pb = PI * bandwidth;
    let x = pb * t;
    Ok(pb * pb / (x * sine_integral(x) + x.cos() - 1.0))
}

/// `Σ_{m<n} N_m N_n (m - n)² = L Σ N_m m² - (Σ N_m m)²`.
pub fn tone_spread(counts: &[u64]) -> f64 {
    let (mut l, mut s1, mut s2) = (0u128, 0u128, 0u128);
    for (m, &n) in counts.iter().enumerate() {
        let (m, n) = (m as u128, n as u128);
        l += n;
        s1 += n * m;
        s2 += n * m * m;
    }
    (l * s2 - s1 * s1) as f64
}

/// Squared RMS bandwidth from tone counts.
pub fn rms_bw_sq_from_counts(counts: &[u64], params: &WaveformParams, bandwidth: f64) -> Result<f64> {
    let l: u64 = counts.iter().sum();
    if l == 0 {
        return invalid("empty tone histogram");
    }
    let first = pulse_bandwidth_term(bandwidth, params.subpulse_interval)?;
    let step = 2.0 * PI * params.delta_f / l as f64;
    Ok(first + step * step * tone_spread(counts))
}

pub fn rms_bw_sq(seq: &FrequencySequence, params: &WaveformParams, bandwidth: f64) -> Result<f64> {
    if seq.is_empty() {
        return invalid("empty frequency sequence");
    }
    rms_bw_sq_from_counts(&seq.counts(), params, bandwidth)
}

/// Default limiting bandwidth: the tone span `M Δf`.
pub fn default_bandwidth(params: &WaveformParams) -> f64 {
    params.m as f64 * params.delta_f.abs()
}

pub fn rms_report(seq: &FrequencySequence, params: &WaveformParams, bandwidth: f64) -> Result<RmsReport> {
    Ok(RmsReport {
        sigma_t_sq: rms_time_sq(seq.len(), params.subpulse_interval)?,
        sigma_w_sq: rms_bw_sq(seq, params, bandwidth)?,
        bandwidth,
    })
}

/// Mean and variance of the squared RMS bandwidth over i.i.d. uniform
/// tones. The tone term is `(2πΔf)²` times the biased sample variance of
/// `L` uniform draws on `{0..M-1}`, so both moments are exact.
pub fn rms_bw_stats(l: usize, m: usize, delta_f: f64, t: f64, bandwidth: f64) -> Result<(f64, f64)> {
    if l == 0 || m < 2 {
        return invalid(format!("need L >= 1 and M >= 2, got L = {l}, M = {m}"));
    }
    let first = pulse_bandwidth_term(bandwidth, t)?;
    let (lf, mf) = (l as f64, m as f64);
    let w2 = (2.0 * PI * delta_f).powi(2);
    let m2 = mf * mf;
    let mean = first + w2 * (lf - 1.0) * (m2 - 1.0) / (12.0 * lf);
    let var = w2 * w2 * (lf - 1.0) * (m2 - 1.0) * (2.0 * lf * m2 - 8.0 * lf + 3.0 * m2 + 3.0)
        / (360.0 * lf.powi(3));
    Ok((mean, var))
}

/// Squared RMS bandwidth of a perfectly flat spectrum, the `L → ∞` mean.
pub fn rms_bw_sq_uniform(m: usize, delta_f: f64, t: f64, bandwidth: f64) -> Result<f64> {
    if m < 2 {
        return invalid(format!("need M >= 2, got {m}"));
    }
    let m2 = (m * m) as f64;
    Ok(pulse_bandwidth_term(bandwidth, t)? + (2.0 * PI * delta_f).powi(2) * (m2 - 1.0) / 12.0)
}

/// Delay CRLB `1 / (C σ_ω²)`.
pub fn crlb_delay(c: f64, sigma_w_sq: f64) -> Result<f64> {
    if !(c > 0.0 && sigma_w_sq > 0.0) {
        return invalid("CRLB needs C > 0 and σ_ω² > 0");
    }
    Ok(1.0 / (c * sigma_w_sq))
}

/// Doppler CRLB `1 / (C σ_t²)`.
pub fn crlb_doppler(c: f64, sigma_t_sq: f64) -> Result<f64> {
    if !(c > 0.0 && sigma_t_sq > 0.0) {
        return invalid("CRLB needs C > 0 and σ_t² > 0");
    }
    Ok(1.0 / (c * sigma_t_sq))
}
