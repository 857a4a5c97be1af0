//! Grid-point ambiguity sidelobes of FSK waveforms.
//!
//! At `(τ, ω) = (kT, 2πrΔf)` the ambiguity function of a rectangular-subpulse
//! FSK waveform collapses to a count of subpulse pairs `k` apart whose tone
//! indices differ by `r`:
//!
//! ```text
//! Ã(k, r) = #{ l ∈ [k, L) : m_{l-k} - m_l = r } / L
//! ```
//!
//! [`af_stats`] gives the binomial-model mean and variance of `Ã(k, r)` for
//! i.i.d. uniform tones. The mean is exact for `k >= 1`. The variance is
//! exact only when the counted pairs do not chain, which fails for `r != 0`
//! once `L > 2k`, and at `k = 0` every `r != 0` sidelobe is identically zero.
//! [`exact_stats`] computes the true moments for comparison.

use crate::error::{invalid, Error};
use crate::fsk::{FrequencySequence, SampledWaveform};
use crate::Result;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Delay index `k` (in subpulses) and Doppler index `r` (in tone steps).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridPoint {
    pub k: usize,
    pub r: i64,
}

impl GridPoint {
    pub fn new(k: usize, r: i64) -> Self {
        Self { k, r }
    }

    /// Membership in `D = {0..L-1} × {-(M-1)..M-1} \ {(0, 0)}`.
    pub fn in_domain(&self, l: usize, m: usize) -> bool {
        self.k < l && self.r.unsigned_abs() < m as u64 && !(self.k == 0 && self.r == 0)
    }

    fn check(&self, l: usize, m: usize) -> Result<()> {
        if self.in_domain(l, m) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                k: self.k,
                r: self.r,
                l,
                m,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidelobeStats {
    pub mean: f64,
    pub variance: f64,
}

/// Every grid point of `D` in `(k, r)` lexicographic order.
pub fn domain(l: usize, m: usize) -> impl Iterator<Item = GridPoint> {
    let rmax = m as i64 - 1;
    (0..l).flat_map(move |k| (-rmax..=rmax).map(move |r| GridPoint::new(k, r)))
        .filter(|p| !(p.k == 0 && p.r == 0))
}

/// `|D| = L(2M - 1) - 1`.
pub fn domain_size(l: usize, m: usize) -> usize {
    (l * (2 * m - 1)).saturating_sub(1)
}

/// Number of matching subpulse pairs, `L·Ã(k, r)`.
pub fn af_sidelobe_count(seq: &FrequencySequence, point: GridPoint) -> Result<usize> {
    point.check(seq.len(), seq.alphabet())?;
    let idx = seq.indices();
    let k = point.k;
    Ok((k..idx.len())
        .filter(|&l| idx[l - k] as i64 - idx[l] as i64 == point.r)
        .count())
}

pub fn af_sidelobe(seq: &FrequencySequence, point: GridPoint) -> Result<f64> {
    Ok(af_sidelobe_count(seq, point)? as f64 / seq.len() as f64)
}

/// Binomial-model moments: `L·Ã ~ B(L - k, (M - |r|)/M²)`.
pub fn af_stats(l: usize, m: usize, point: GridPoint) -> Result<SidelobeStats> {
    point.check(l, m)?;
    let (lf, mf) = (l as f64, m as f64);
    let k = point.k as f64;
    let r = point.r.unsigned_abs() as f64;
    let m2 = mf * mf;
    Ok(SidelobeStats {
        mean: (lf - k) / lf * (mf - r) / m2,
        variance: (lf - k) / (lf * lf) * (mf - r) * (m2 - mf + r) / (m2 * m2),
    })
}

/// Exact moments of `Ã(k, r)` under i.i.d. uniform tones.
///
/// Pairs `k` apart only interact through a shared symbol, so the count is a
/// sum over `k` independent chains, and each chain is a Markov walk over the
/// current symbol. The moments follow from a transfer-matrix sweep.
pub fn exact_stats(l: usize, m: usize, point: GridPoint) -> Result<SidelobeStats> {
    point.check(l, m)?;
    if point.k == 0 {
        return Ok(SidelobeStats {
            mean: 0.0,
            variance: 0.0,
        });
    }
    let k = point.k;
    let mut mean = 0.0;
    let mut var = 0.0;
    // chain c holds symbols c, c + k, c + 2k, ... (< L)
    for c in 0..k {
        let nodes = (l - c).div_ceil(k);
        let (mu, v) = chain_moments(nodes, m, point.r);
        mean += mu;
        var += v;
    }
    let lf = l as f64;
    Ok(SidelobeStats {
        mean: mean / lf,
        variance: var / (lf * lf),
    })
}

// Mean and variance of #{i : x_i - x_{i+1} = r} over `nodes` uniform symbols.
fn chain_moments(nodes: usize, m: usize, r: i64) -> (f64, f64) {
    // per end symbol: probability mass, E[S·1], E[S²·1]
    let p0 = 1.0 / m as f64;
    let mut a = vec![p0; m];
    let mut b = vec![0.0; m];
    let mut c = vec![0.0; m];
    for _ in 1..nodes {
        let mut na = vec![0.0; m];
        let mut nb = vec![0.0; m];
        let mut nc = vec![0.0; m];
        for (x, ((&ax, &bx), &cx)) in a.iter().zip(&b).zip(&c).enumerate() {
            for y in 0..m {
                let hit = (x as i64 - y as i64 == r) as u8 as f64;
                na[y] += p0 * ax;
                nb[y] += p0 * (bx + hit * ax);
                nc[y] += p0 * (cx + 2.0 * hit * bx + hit * ax);
            }
        }
        (a, b, c) = (na, nb, nc);
    }
    let mean: f64 = b.iter().sum();
    let second: f64 = c.iter().sum();
    (mean, second - mean * mean)
}

/// Grid point of largest binomial-model variance, found by scanning `D`,
/// returned with `|D|`.
///
/// Ties (within 1e-12 relative) keep the earlier point in `(k, r)` order,
/// except that `r > 0` beats its mirror `-r`.
///
/// The variance falls with `|r|` at fixed `k`, and with `k` at fixed `r`, so
/// only `(0, 1)` and `(1, 0)` compete. `(0, 1)` wins while `L(M - 1) <= M²`;
/// any longer waveform peaks at `(1, 0)`.
pub fn af_variance_argmax(l: usize, m: usize) -> Result<(GridPoint, usize)> {
    if l == 0 || m < 2 {
        return invalid(format!("need L >= 1 and M >= 2, got L = {l}, M = {m}"));
    }
    let mut best: Option<(GridPoint, f64)> = None;
    let mut count = 0;
    for p in domain(l, m) {
        count += 1;
        let v = af_stats(l, m, p)?.variance;
        let better = match best {
            None => true,
            Some((q, bv)) => {
                v > bv * (1.0 + 1e-12) || (v >= bv * (1.0 - 1e-12) && q.k == p.k && q.r == -p.r && p.r > 0)
            }
        };
        if better {
            best = Some((p, v));
        }
    }
    let (p, _) = best.ok_or_else(|| Error::InvalidParameter("empty domain".into()))?;
    Ok((p, count))
}

/// Normalised histogram of sidelobe samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    /// `bins + 1` edges; a single bin when all samples coincide.
    pub edges: Vec<f64>,
    pub mass: Vec<f64>,
    pub sample_mean: f64,
    pub samples: usize,
}

pub fn histogram(values: &[f64], bins: usize) -> Result<Pmf> {
    if values.is_empty() {
        return invalid("cannot build a PMF from no samples");
    }
    if bins == 0 {
        return invalid("need at least one bin");
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = values.len() as f64;
    let sample_mean = values.iter().sum::<f64>() / n;
    if hi <= lo {
        return Ok(Pmf {
            edges: vec![lo, hi],
            mass: vec![1.0],
            sample_mean,
            samples: values.len(),
        });
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    Ok(Pmf {
        edges: (0..=bins).map(|i| lo + i as f64 * width).collect(),
        mass: counts.iter().map(|&c| c as f64 / n).collect(),
        sample_mean,
        samples: values.len(),
    })
}

pub fn empirical_pmf(realizations: &[FrequencySequence], point: GridPoint, bins: usize) -> Result<Pmf> {
    if realizations.is_empty() {
        return invalid("no realizations");
    }
    let values = realizations
        .iter()
        .map(|s| af_sidelobe(s, point))
        .collect::<Result<Vec<_>>>()?;
    histogram(&values, bins)
}

fn delayed(w: &SampledWaveform, shift: f64, n: usize) -> Complex64 {
    // s(t_n - τ) with τ in samples; linear interpolation, zero outside support
    let pos = n as f64 - shift;
    let i0 = pos.floor();
    let frac = pos - i0;
    let at = |i: f64| -> Complex64 {
        if i < 0.0 || i >= w.samples.len() as f64 {
            Complex64::new(0.0, 0.0)
        } else {
            w.samples[i as usize]
        }
    };
    if frac == 0.0 {
        at(i0)
    } else {
        at(i0) * (1.0 - frac) + at(i0 + 1.0) * frac
    }
}

/// `|Σ_n s[n] s*(t_n - τ) e^{-jω t_n}| / Σ_n |s[n]|²` on a delay (seconds) by
/// Doppler (rad/s) grid. Row `i` is `delays[i]`.
pub fn cross_ambiguity(w: &SampledWaveform, delays: &[f64], dopplers: &[f64]) -> Result<Vec<Vec<f64>>> {
    if delays.is_empty() || dopplers.is_empty() {
        return invalid("empty delay or Doppler grid");
    }
    if w.is_empty() {
        return invalid("empty waveform");
    }
    let energy: f64 = w.samples.iter().map(|s| s.norm_sqr()).sum();
    let fs = w.sample_rate;
    let mut surface = Vec::with_capacity(delays.len());
    for &tau in delays {
        let shift = tau * fs;
        let prod: Vec<Complex64> = (0..w.len())
            .map(|n| w.samples[n] * delayed(w, shift, n).conj())
            .collect();
        let row = dopplers
            .iter()
            .map(|&omega| {
                let acc: Complex64 = prod
                    .iter()
                    .enumerate()
                    .map(|(n, p)| p * Complex64::from_polar(1.0, -omega * n as f64 / fs))
                    .sum();
                acc.norm() / energy
            })
            .collect();
        surface.push(row);
    }
    Ok(surface)
}
