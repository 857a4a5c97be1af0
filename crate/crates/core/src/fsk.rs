//! M-ary FSK subpulse trains: parameters, frequency sequences and
//! complex-envelope synthesis.
//!
//! Subpulse `l` carries the tone `2π(f0 + m_l Δf)` for one interval `T`
//! and restarts at zero phase, i.e. the envelope is
//! `Σ_l p(t - lT) exp(j ω_l (t - lT))` with a rectangular `p`.

use crate::error::invalid;
use crate::Result;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const INTEGER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformParams {
    /// Alphabet size M.
    pub m: usize,
    /// Subpulse repetition interval T in seconds.
    pub subpulse_interval: f64,
    /// Tone separation Δf in Hz.
    pub delta_f: f64,
    /// Lowest tone f0 in Hz.
    pub f0: f64,
    pub samples_per_subpulse: usize,
}

impl WaveformParams {
    /// Baseband parameters (`f0 = 0`) sampled at four times the minimal
    /// rate, `4 M Δf T` samples per subpulse.
    pub fn new(m: usize, subpulse_interval: f64, delta_f: f64) -> Result<Self> {
        let cycles = delta_f * subpulse_interval;
        let sps = (4.0 * m as f64 * cycles).round().max(1.0) as usize;
        let params = Self {
            m,
            subpulse_interval,
            delta_f,
            f0: 0.0,
            samples_per_subpulse: sps,
        };
        params.validate()?;
        Ok(params)
    }

    /// The normalised setup used throughout the experiments: `T = 1`,
    /// `Δf = 1/T`.
    pub fn normalized(m: usize) -> Result<Self> {
        Self::new(m, 1.0, 1.0)
    }

    pub fn with_f0(mut self, f0: f64) -> Self {
        self.f0 = f0;
        self
    }

    pub fn with_samples_per_subpulse(mut self, sps: usize) -> Self {
        self.samples_per_subpulse = sps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return invalid(format!("alphabet size M = {} must be at least 2", self.m));
        }
        if !(self.subpulse_interval > 0.0 && self.subpulse_interval.is_finite()) {
            return invalid(format!("subpulse interval T = {} must be positive", self.subpulse_interval));
        }
        if !self.f0.is_finite() {
            return invalid("f0 must be finite");
        }
        let cycles = self.delta_f * self.subpulse_interval;
        if !cycles.is_finite() || cycles.round() == 0.0 || (cycles - cycles.round()).abs() > INTEGER_TOL {
            return invalid(format!(
                "Δf·T = {cycles} must be a nonzero integer for orthogonal tones"
            ));
        }
        if self.samples_per_subpulse == 0 {
            return invalid("samples per subpulse must be at least 1");
        }
        Ok(())
    }

    /// Checks the sampling rate covers the baseband tone span.
    pub fn validate_for_synthesis(&self) -> Result<()> {
        self.validate()?;
        let needed = 2.0 * self.m as f64 * self.tone_cycles().unsigned_abs() as f64;
        if (self.samples_per_subpulse as f64) < needed {
            return invalid(format!(
                "{} samples per subpulse is below the {needed} needed for M = {}",
                self.samples_per_subpulse, self.m
            ));
        }
        Ok(())
    }

    /// Δf·T as an integer.
    pub fn tone_cycles(&self) -> i64 {
        (self.delta_f * self.subpulse_interval).round() as i64
    }

    pub fn sample_rate(&self) -> f64 {
        self.samples_per_subpulse as f64 / self.subpulse_interval
    }

    pub fn sample_period(&self) -> f64 {
        self.subpulse_interval / self.samples_per_subpulse as f64
    }

    /// Angular frequency of tone `index` in rad/s.
    pub fn tone_omega(&self, index: usize) -> f64 {
        2.0 * PI * (self.f0 + index as f64 * self.delta_f)
    }

    /// Number of bits carried by one subpulse, when M is a power of two.
    pub fn bits_per_symbol(&self) -> Option<u32> {
        bits_per_symbol(self.m)
    }
}

fn bits_per_symbol(m: usize) -> Option<u32> {
    (m >= 2 && m.is_power_of_two()).then(|| m.trailing_zeros())
}

/// Tone indices `m_l`, one per subpulse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrequencySequence {
    m: usize,
    indices: Vec<usize>,
}

impl FrequencySequence {
    pub fn new(m: usize, indices: Vec<usize>) -> Result<Self> {
        if m < 2 {
            return invalid(format!("alphabet size M = {m} must be at least 2"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= m) {
            return invalid(format!("tone index {bad} out of range for M = {m}"));
        }
        Ok(Self { m, indices })
    }

    pub fn alphabet(&self) -> usize {
        self.m
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Tone usage counts `N_m`.
    pub fn counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.m];
        for &i in &self.indices {
            counts[i] += 1;
        }
        counts
    }

    pub fn into_indices(self) -> Vec<usize> {
        self.indices
    }
}

/// I.i.d. uniform tone indices.
pub fn random_sequence<R: Rng + ?Sized>(rng: &mut R, m: usize, l: usize) -> Result<FrequencySequence> {
    if m < 2 {
        return invalid(format!("alphabet size M = {m} must be at least 2"));
    }
    if l == 0 {
        return invalid("sequence length must be at least 1");
    }
    let indices = (0..l).map(|_| rng.random_range(0..m)).collect();
    Ok(FrequencySequence { m, indices })
}

/// Map a bit stream onto tone indices, `log2 M` bits per symbol, most
/// significant bit first.
pub fn bits_to_sequence(bits: &[bool], m: usize) -> Result<FrequencySequence> {
    let Some(k) = bits_per_symbol(m) else {
        return invalid(format!("M = {m} is not a power of two"));
    };
    let k = k as usize;
    if bits.len() % k != 0 {
        return invalid(format!("{} bits do not split into {k}-bit symbols", bits.len()));
    }
    let indices = bits
        .chunks(k)
        .map(|group| group.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize))
        .collect();
    Ok(FrequencySequence { m, indices })
}

pub fn sequence_to_bits(seq: &FrequencySequence, m: usize) -> Result<Vec<bool>> {
    let Some(k) = bits_per_symbol(m) else {
        return invalid(format!("M = {m} is not a power of two"));
    };
    let mut bits = Vec::with_capacity(seq.len() * k as usize);
    for &idx in seq.indices() {
        if idx >= m {
            return invalid(format!("tone index {idx} out of range for M = {m}"));
        }
        bits.extend((0..k).rev().map(|shift| (idx >> shift) & 1 == 1));
    }
    Ok(bits)
}

/// Sampled complex envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
    pub samples_per_subpulse: usize,
}

impl SampledWaveform {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.sample_rate
    }
}

/// One subpulse of tone `index`, starting at zero phase.
pub fn tone(params: &WaveformParams, index: usize) -> Vec<Complex64> {
    let fs = params.sample_rate();
    let omega = params.tone_omega(index);
    (0..params.samples_per_subpulse)
        .map(|n| Complex64::from_polar(1.0, omega * n as f64 / fs))
        .collect()
}

pub fn synthesize(params: &WaveformParams, seq: &FrequencySequence) -> Result<SampledWaveform> {
    params.validate_for_synthesis()?;
    if seq.alphabet() != params.m {
        return invalid(format!(
            "sequence alphabet {} does not match M = {}",
            seq.alphabet(),
            params.m
        ));
    }
    let tones: Vec<Vec<Complex64>> = (0..params.m).map(|i| tone(params, i)).collect();
    let mut samples = Vec::with_capacity(seq.len() * params.samples_per_subpulse);
    for &idx in seq.indices() {
        samples.extend_from_slice(&tones[idx]);
    }
    Ok(SampledWaveform {
        samples,
        sample_rate: params.sample_rate(),
        samples_per_subpulse: params.samples_per_subpulse,
    })
}
