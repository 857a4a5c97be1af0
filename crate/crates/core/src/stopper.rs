//! Running spectrum-flatness state and the dynamic stopping rule.
//!
//! The flatness of the tone histogram after `L` subpulses is
//!
//! ```text
//! U(L) = Σ_m (N_m/L - 1/M)² / M = (Σ_m N_m² - L²/M) / (L² M)
//! ```
//!
//! so keeping `Σ_m N_m²` alongside the counts makes each update and each
//! evaluation O(1) regardless of M.

use crate::error::invalid;
use crate::fsk::FrequencySequence;
use crate::Result;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumState {
    len: u64,
    counts: Vec<u64>,
    sum_sq: u64,
}

impl SpectrumState {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return invalid(format!("alphabet size M = {m} must be at least 2"));
        }
        Ok(Self {
            len: 0,
            counts: vec![0; m],
            sum_sq: 0,
        })
    }

    pub fn from_sequence(seq: &FrequencySequence) -> Result<Self> {
        let mut state = Self::new(seq.alphabet())?;
        for &s in seq.indices() {
            state.update(s)?;
        }
        Ok(state)
    }

    pub fn alphabet(&self) -> usize {
        self.counts.len()
    }

    /// Number of subpulses seen, `L`.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn sum_sq(&self) -> u64 {
        self.sum_sq
    }

    pub fn update(&mut self, symbol: usize) -> Result<()> {
        let Some(count) = self.counts.get_mut(symbol) else {
            return invalid(format!(
                "symbol {symbol} out of range for M = {}",
                self.counts.len()
            ));
        };
        // (N + 1)² - N² = 2N + 1
        self.sum_sq += 2 * *count + 1;
        *count += 1;
        self.len += 1;
        Ok(())
    }

    /// `M Σ N_m² - L²`, which is `L·χ²(L)` and never negative.
    fn scaled_deviation(&self) -> u128 {
        let m = self.counts.len() as u128;
        let l = self.len as u128;
        m * self.sum_sq as u128 - l * l
    }

    /// Flatness `U(L)`; requires `L >= 1`.
    pub fn flatness(&self) -> Result<f64> {
        if self.len == 0 {
            return invalid("flatness is undefined for an empty state");
        }
        let m = self.counts.len() as f64;
        let l = self.len as f64;
        Ok(self.scaled_deviation() as f64 / (l * l * m * m))
    }

    /// Chi-squared statistic `Σ (N_m - L/M)² / (L/M) = L M² U(L)`.
    pub fn chi2(&self) -> Result<f64> {
        if self.len == 0 {
            return invalid("chi-squared is undefined for an empty state");
        }
        Ok(self.scaled_deviation() as f64 / self.len as f64)
    }
}

/// Thresholds γ₁…γ₄ of the stopping rule.
///
/// `gamma1` and `gamma3` are lower bounds on the length (compared as
/// `L >= ceil(γ)`), `gamma2` bounds the flatness and `gamma4` caps the
/// length; `None` means no cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingConfig {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: Option<u64>,
}

impl StoppingConfig {
    pub fn new(gamma1: f64, gamma2: f64, gamma3: f64, gamma4: Option<u64>) -> Result<Self> {
        let cfg = Self {
            gamma1,
            gamma2,
            gamma3,
            gamma4,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Stop on flatness alone.
    pub fn flatness_only(gamma2: f64) -> Result<Self> {
        Self::new(1.0, gamma2, 1.0, None)
    }

    /// Flatness with the length held inside `[min_len, max_len]`.
    pub fn bounded(gamma2: f64, min_len: u64, max_len: u64) -> Result<Self> {
        Self::new(min_len as f64, gamma2, 1.0, Some(max_len))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma2 > 0.0 && self.gamma2.is_finite()) {
            return invalid(format!("γ₂ = {} must be positive", self.gamma2));
        }
        if !(self.gamma1.is_finite() && self.gamma3.is_finite()) {
            return invalid("γ₁ and γ₃ must be finite");
        }
        if let Some(cap) = self.gamma4 {
            if cap < self.min_length() {
                return invalid(format!(
                    "γ₄ = {cap} is below the lower bound {}",
                    self.min_length()
                ));
            }
        }
        Ok(())
    }

    /// `max(ceil γ₁, ceil γ₃, 1)`.
    pub fn min_length(&self) -> u64 {
        ceil_len(self.gamma1).max(ceil_len(self.gamma3)).max(1)
    }
}

// Ceiling that forgives the last-ulp noise of sqrt and division, so that a
// bound computed as 299.99999999999994 still means 300.
fn ceil_len(gamma: f64) -> u64 {
    if gamma <= 0.0 {
        return 0;
    }
    let nearest = gamma.round();
    if (gamma - nearest).abs() <= 1e-9 * gamma.max(1.0) {
        nearest as u64
    } else {
        gamma.ceil() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopDecision {
    pub stopped: bool,
    pub length: u64,
    /// Stopped only because the cap γ₄ was reached with flatness unmet.
    pub forced: bool,
}

/// `γ₁ = sqrt(12 σ_req² / T²)`: the shortest waveform meeting an RMS
/// time-duration requirement.
pub fn gamma1_from_rms_requirement(sigma_t_sq_req: f64, t: f64) -> Result<f64> {
    if !(sigma_t_sq_req > 0.0 && t > 0.0) {
        return invalid("RMS time requirement and T must be positive");
    }
    Ok((12.0 * sigma_t_sq_req / (t * t)).sqrt())
}

/// `γ₃ = (M-1)(M²-M+1) / (M⁴ σ_req)`: the shortest waveform whose largest
/// grid-point sidelobe variance, at `(k, r) = (0, 1)`, is below `σ_req`.
pub fn gamma3_from_af_variance(sigma_a_sq_req: f64, m: usize) -> Result<f64> {
    if !(sigma_a_sq_req > 0.0) {
        return invalid("sidelobe variance requirement must be positive");
    }
    if m < 2 {
        return invalid(format!("alphabet size M = {m} must be at least 2"));
    }
    let m = m as f64;
    Ok((m - 1.0) * (m * m - m + 1.0) / (m.powi(4) * sigma_a_sq_req))
}

pub fn decide(state: &SpectrumState, config: &StoppingConfig) -> StopDecision {
    let length = state.len();
    let flat = state.flatness().map(|u| u <= config.gamma2).unwrap_or(false);
    let natural = length >= config.min_length() && flat;
    let capped = config.gamma4.is_some_and(|cap| length >= cap);
    StopDecision {
        stopped: natural || capped,
        length,
        forced: capped && !natural,
    }
}

/// Feed symbols until the rule fires. Returns the consumed prefix and the
/// decision, or `None` when the stream ends first.
pub fn stop_on_stream<I>(m: usize, config: &StoppingConfig, symbols: I) -> Result<Option<(FrequencySequence, StopDecision)>>
where
    I: IntoIterator<Item = usize>,
{
    config.validate()?;
    let mut state = SpectrumState::new(m)?;
    let mut taken = Vec::new();
    for s in symbols {
        state.update(s)?;
        taken.push(s);
        let decision = decide(&state, config);
        if decision.stopped {
            return Ok(Some((FrequencySequence::new(m, taken)?, decision)));
        }
    }
    Ok(None)
}

/// Emit i.i.d. uniform subpulses until the stopping rule fires.
pub fn generate_waveform<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    config: &StoppingConfig,
) -> Result<(FrequencySequence, StopDecision)> {
    let symbols = std::iter::repeat_with(|| rng.random_range(0..m));
    Ok(stop_on_stream(m, config, symbols)?.expect("an endless stream always stops"))
}

/// Length at which the rule would fire, without keeping the sequence.
pub fn stopping_length<R: Rng + ?Sized>(rng: &mut R, m: usize, config: &StoppingConfig) -> Result<StopDecision> {
    config.validate()?;
    let mut state = SpectrumState::new(m)?;
    loop {
        state.update(rng.random_range(0..m))?;
        let decision = decide(&state, config);
        if decision.stopped {
            return Ok(decision);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsk::random_sequence;
    use crate::rng::substream;
    use proptest::prelude::*;

    fn direct_flatness(counts: &[u64]) -> f64 {
        let l: u64 = counts.iter().sum();
        let m = counts.len() as f64;
        counts
            .iter()
            .map(|&n| (n as f64 / l as f64 - 1.0 / m).powi(2))
            .sum::<f64>()
            / m
    }

    fn direct_chi2(counts: &[u64]) -> f64 {
        let l: u64 = counts.iter().sum();
        let e = l as f64 / counts.len() as f64;
        counts.iter().map(|&n| (n as f64 - e).powi(2)).sum::<f64>() / e
    }

    #[test]
    fn single_update() {
        let mut s = SpectrumState::new(8).unwrap();
        s.update(3).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.counts()[3], 1);
        assert_eq!(s.sum_sq(), 1);
        assert!(s.update(8).is_err());
        assert!(SpectrumState::new(8).unwrap().flatness().is_err());
        assert!(SpectrumState::new(8).unwrap().chi2().is_err());
    }

    #[test]
    fn distinct_symbols_are_perfectly_flat() {
        let mut s = SpectrumState::new(5).unwrap();
        for i in 0..5 {
            s.update(i).unwrap();
        }
        assert_eq!(s.flatness().unwrap(), 0.0);
        assert_eq!(s.chi2().unwrap(), 0.0);
    }

    #[test]
    fn two_tone_examples() {
        let flat = SpectrumState::from_sequence(&FrequencySequence::new(2, vec![0, 1]).unwrap()).unwrap();
        assert_eq!(flat.flatness().unwrap(), 0.0);
        let lopsided = SpectrumState::from_sequence(&FrequencySequence::new(2, vec![0, 0]).unwrap()).unwrap();
        assert_eq!(lopsided.flatness().unwrap(), 0.25);
        assert_eq!(direct_flatness(lopsided.counts()), 0.25);
        assert_eq!(lopsided.chi2().unwrap(), 2.0);
    }

    #[test]
    fn incremental_sum_sq_matches_recount() {
        let seq = random_sequence(&mut substream(5, 0, 0, 0), 32, 10_000).unwrap();
        let state = SpectrumState::from_sequence(&seq).unwrap();
        let recount: u64 = seq.counts().iter().map(|c| c * c).sum();
        assert_eq!(state.sum_sq(), recount);
        assert_eq!(state.counts(), seq.counts().as_slice());
    }

    proptest! {
        #[test]
        fn o1_flatness_matches_direct(m in 2usize..40, l in 1usize..400, seed in any::<u64>()) {
            let seq = random_sequence(&mut substream(seed, 0, 0, 0), m, l).unwrap();
            let state = SpectrumState::from_sequence(&seq).unwrap();
            let u = state.flatness().unwrap();
            prop_assert!((u - direct_flatness(state.counts())).abs() < 1e-15);
            let chi = state.chi2().unwrap();
            let direct = direct_chi2(state.counts());
            prop_assert!((chi - direct).abs() <= 1e-12 * direct.max(1.0));
            let scaled = l as f64 * (m * m) as f64 * u;
            prop_assert!((chi - scaled).abs() <= 1e-12 * chi.max(1.0));
            let umax = (m as f64 - 1.0) / (m * m) as f64;
            prop_assert!(u >= 0.0 && u <= umax * (1.0 + 1e-12));
            prop_assert_eq!(state.counts().iter().sum::<u64>(), l as u64);
        }
    }

    #[test]
    fn flatness_zero_iff_balanced() {
        let m = 3usize;
        for l in 1..=8u32 {
            for code in 0..m.pow(l) {
                let mut c = code;
                let idx: Vec<usize> = (0..l).map(|_| { let d = c % m; c /= m; d }).collect();
                let state = SpectrumState::from_sequence(&FrequencySequence::new(m, idx).unwrap()).unwrap();
                let balanced = state.counts().iter().all(|&n| n == state.counts()[0]);
                assert_eq!(state.flatness().unwrap() == 0.0, balanced);
            }
        }
    }

    #[test]
    fn derived_thresholds() {
        assert_eq!(gamma1_from_rms_requirement(7500.0, 1.0).unwrap(), 300.0);
        assert!((gamma1_from_rms_requirement(4.0 / 12.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(gamma1_from_rms_requirement(0.0, 1.0).is_err());
        let g3 = gamma3_from_af_variance(2.936e-5, 32).unwrap();
        assert!((g3 - 30783.0 / (1_048_576.0 * 2.936e-5)).abs() < 1e-9);
        assert!((g3 - 1000.0).abs() < 1.0);
        assert!((gamma3_from_af_variance(3.0 / 16.0, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!(gamma3_from_af_variance(1e300, 32).unwrap() < 1e-290);
        assert!(gamma3_from_af_variance(0.0, 32).is_err());
    }

    #[test]
    fn decide_bounds() {
        let flat = SpectrumState::from_sequence(&FrequencySequence::new(2, vec![0, 1]).unwrap()).unwrap();
        let cfg = StoppingConfig::new(3.0, 0.01, 1.0, Some(10)).unwrap();
        assert!(!decide(&flat, &cfg).stopped);
        let cfg = StoppingConfig::new(1.0, 0.01, 2.0, None).unwrap();
        assert_eq!(decide(&flat, &cfg), StopDecision { stopped: true, length: 2, forced: false });

        let lopsided = SpectrumState::from_sequence(&FrequencySequence::new(2, vec![0, 0]).unwrap()).unwrap();
        let capped = StoppingConfig::new(1.0, 0.01, 1.0, Some(2)).unwrap();
        assert_eq!(decide(&lopsided, &capped), StopDecision { stopped: true, length: 2, forced: true });
        assert!(StoppingConfig::new(5.0, 0.01, 1.0, Some(4)).is_err());
        assert!(StoppingConfig::new(1.0, 0.0, 1.0, None).is_err());
    }

    #[test]
    fn stop_time_matches_replay_scan() {
        for run in 0..50u64 {
            let m = 8;
            let stream = random_sequence(&mut substream(17, run, 0, 0), m, 5000).unwrap();
            let cfg = StoppingConfig::flatness_only(2e-3).unwrap();
            let (seq, d) = stop_on_stream(m, &cfg, stream.indices().iter().copied()).unwrap().unwrap();
            // scalar replay: recount from scratch at every prefix
            let mut first = None;
            for l in 1..=stream.len() {
                let mut counts = vec![0u64; m];
                for &s in &stream.indices()[..l] {
                    counts[s] += 1;
                }
                if direct_flatness(&counts) <= 2e-3 {
                    first = Some(l as u64);
                    break;
                }
            }
            assert_eq!(Some(d.length), first);
            assert_eq!(seq.len() as u64, d.length);
            assert_eq!(seq.indices(), &stream.indices()[..seq.len()]);
        }
    }

    #[test]
    fn loosest_threshold_stops_after_one_subpulse() {
        let m = 32;
        let cfg = StoppingConfig::flatness_only((m as f64 - 1.0) / (m * m) as f64).unwrap();
        for run in 0..200 {
            let (seq, d) = generate_waveform(&mut substream(2, run, 0, 0), m, &cfg).unwrap();
            assert_eq!(d.length, 1);
            assert_eq!(seq.len(), 1);
            assert!(!d.forced);
        }
    }

    #[test]
    fn every_prefix_before_stop_is_undecided() {
        let cfg = StoppingConfig::bounded(1e-3, 20, 60).unwrap();
        for run in 0..100 {
            let (seq, d) = generate_waveform(&mut substream(9, run, 0, 0), 16, &cfg).unwrap();
            assert_eq!(seq.len() as u64, d.length);
            assert!((20..=60).contains(&d.length));
            if d.forced {
                assert_eq!(d.length, 60);
            }
            let mut state = SpectrumState::new(16).unwrap();
            for (i, &s) in seq.indices().iter().enumerate() {
                state.update(s).unwrap();
                let stopped = decide(&state, &cfg).stopped;
                assert_eq!(stopped, i + 1 == seq.len());
            }
        }
    }
}
