//! Hitting-time model for the dynamic waveform length.
//!
//! With `K = M - 1` and `a = γ₂M²`, the flatness condition `U(L) <= γ₂` is
//! `χ²(L) <= a L`. Replacing `χ²(t)` by the Brownian equivalent
//!
//! ```text
//! χ²_BM(t) = K + sqrt(2K(1 - 1/t)) W(t²) / t
//! ```
//!
//! turns it into `W(x) <= b(x)` with `x = t²` and
//!
//! ```text
//! b(x) = (a x - K sqrt(x)) / sqrt(2K (1 - 1/sqrt(x)))
//! ```
//!
//! For `t < K/a` the boundary is negative, so the event is a downward
//! crossing. By the symmetry of `W` it has the same law as the upward
//! crossing of `-b`, and the tangent approximation is applied to that
//! upper boundary.

use crate::error::{invalid, Error};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use crate::rng::substream;
use crate::stopper::{stopping_length, StoppingConfig};
use crate::Result;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Lower integration limit: the density vanishes as `t → 1⁺`.
pub const T_START: f64 = 1.0 + 1e-9;

const CDF_TOL: f64 = 1e-8;

/// `E[χ²(L)] = M - 1`.
pub fn chi2_mean(m: usize) -> f64 {
    m as f64 - 1.0
}

/// `Var[χ²(L)] = 2(M - 1)(1 - 1/L)`.
pub fn chi2_var(m: usize, l: u64) -> f64 {
    2.0 * (m as f64 - 1.0) * (1.0 - 1.0 / l as f64)
}

/// Exact correlation of `χ²(L)` and `χ²(L + k)`.
pub fn chi2_corr_exact(l: u64, k: u64) -> f64 {
    let (l, lk) = (l as f64, (l + k) as f64);
    (l - 1.0) / lk / ((1.0 - 1.0 / l) * (1.0 - 1.0 / lk)).sqrt()
}

/// Large-`L` correlation `L / (L + k)`.
pub fn chi2_corr_approx(l: u64, k: u64) -> f64 {
    l as f64 / (l + k) as f64
}

/// One first-passage outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitSample {
    pub l0: u64,
    /// No crossing up to the horizon; `l0` is the horizon.
    pub forced: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingModel {
    m: usize,
    gamma2: f64,
}

impl HittingModel {
    pub fn new(m: usize, gamma2: f64) -> Result<Self> {
        if m < 2 {
            return invalid(format!("alphabet size M = {m} must be at least 2"));
        }
        if !(gamma2 > 0.0 && gamma2.is_finite()) {
            return invalid(format!("γ₂ = {gamma2} must be positive"));
        }
        Ok(Self { m, gamma2 })
    }

    pub fn alphabet(&self) -> usize {
        self.m
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    fn k(&self) -> f64 {
        self.m as f64 - 1.0
    }

    fn a(&self) -> f64 {
        self.gamma2 * (self.m * self.m) as f64
    }

    /// Length at which the mean of `χ²` meets the threshold line, `K/a`.
    pub fn mean_crossing(&self) -> f64 {
        self.k() / self.a()
    }

    fn check_x(x: f64) -> Result<()> {
        if x > 1.0 {
            Ok(())
        } else {
            invalid(format!("boundary is defined for x > 1, got {x}"))
        }
    }

    /// `b(x)`, the boundary on `W(x)`.
    pub fn boundary(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        let (a, k) = (self.a(), self.k());
        let s = x.sqrt();
        Ok((a * x - k * s) / (2.0 * k * (1.0 - 1.0 / s)).sqrt())
    }

    /// `db/dx` in closed form.
    pub fn boundary_derivative(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        let (a, k) = (self.a(), self.k());
        let s = x.sqrt();
        let num = a * x - (1.25 * a + 0.5 * k) * s + 0.75 * k;
        Ok(num / ((2.0 * k).sqrt() * (1.0 - 1.0 / s).powf(1.5) * x))
    }

    /// Tangent approximation to the density of the crossing time `t₀`
    /// (in subpulses), for `t > 1`.
    pub fn tangent_pdf(&self, t: f64) -> Result<f64> {
        if !(t > 1.0) {
            return invalid(format!("tangent density is defined for t > 1, got {t}"));
        }
        Ok(self.pdf_unchecked(t))
    }

    fn pdf_unchecked(&self, t: f64) -> f64 {
        let (a, k) = (self.a(), self.k());
        let q = 1.0 - 1.0 / t;
        let num = (k - 0.5 * a) * t - 0.5 * k;
        let den = (2.0 * PI).sqrt() * (2.0 * k).sqrt() * q.powf(1.5) * t * t;
        let expo = -(a * t - k).powi(2) / (4.0 * k * q);
        if expo < -745.0 {
            return 0.0;
        }
        num / den * expo.exp()
    }

    /// `∫_{1⁺}^t f(s) ds`, zero for `t <= 1`.
    pub fn tangent_cdf(&self, t: f64) -> Result<f64> {
        if t.is_nan() {
            return invalid("t is NaN");
        }
        if t <= T_START {
            return Ok(0.0);
        }
        if t.is_infinite() {
            return self.total_mass();
        }
        self.integrate_pdf(T_START, t, CDF_TOL)
    }

    /// `∫_a^b f`, split at multiples of the mean crossing. The density is a
    /// narrow bump there, and one panel spanning a long range can step over it.
    fn integrate_pdf(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        let c = self.mean_crossing();
        let mut cuts = vec![a];
        cuts.extend([0.25, 0.5, 1.0, 2.0, 4.0, 8.0].iter().map(|f| f * c).filter(|&x| x > a && x < b));
        cuts.push(b);
        let opts = QuadOptions::abs(tol / (cuts.len() - 1) as f64);
        cuts.windows(2)
            .map(|w| Ok(integrate(|s| self.pdf_unchecked(s), w[0], w[1], opts)?.value))
            .sum()
    }

    /// CDF at ascending points, integrating panel by panel.
    pub fn tangent_cdf_table(&self, ts: &[f64]) -> Result<Vec<f64>> {
        if ts.windows(2).any(|w| w[1] < w[0]) {
            return invalid("evaluation points must be ascending");
        }
        let mut out = Vec::with_capacity(ts.len());
        let mut acc = 0.0;
        let mut prev = T_START;
        for &t in ts {
            if t > prev {
                acc += self.integrate_pdf(prev, t, CDF_TOL / ts.len().max(1) as f64)?;
                prev = t;
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// `∫_{1⁺}^∞ f`. The tangent approximation is not normalised.
    pub fn total_mass(&self) -> Result<f64> {
        // finite part past the bump so the peak is not squeezed by the map
        let mid = 8.0 * self.mean_crossing().max(2.0);
        let head = self.integrate_pdf(T_START, mid, CDF_TOL)?;
        let tail = integrate_to_infinity(|s| self.pdf_unchecked(s), mid, QuadOptions::abs(CDF_TOL))?.value;
        Ok(head + tail)
    }

    /// Upper boundary `β(t) = -b(t²)` for the mirrored path, `t >= 2`.
    pub fn mirrored_boundary(&self, t: u64) -> f64 {
        let tf = t as f64;
        let (a, k) = (self.a(), self.k());
        -(a * tf * tf - k * tf) / (2.0 * k * (1.0 - 1.0 / tf)).sqrt()
    }

    /// First integer `t >= 2` at which the Brownian path crosses.
    pub fn simulate_brownian_hit<R: Rng + ?Sized>(&self, rng: &mut R, t_max: u64) -> Result<HitSample> {
        simulate_first_passage(rng, t_max, |t| self.mirrored_boundary(t))
    }
}

/// Run `W` on `x = t²` for integer `t`, starting from `W(1) ~ N(0, 1)`, and
/// return the first `t` in `2..=t_max` with `W(t²) >= beta(t)`.
pub fn simulate_first_passage<R, B>(rng: &mut R, t_max: u64, beta: B) -> Result<HitSample>
where
    R: Rng + ?Sized,
    B: Fn(u64) -> f64,
{
    if t_max < 2 {
        return invalid(format!("horizon t_max = {t_max} must be at least 2"));
    }
    let mut w: f64 = rng.sample(StandardNormal);
    for t in 2..=t_max {
        // Var[W(t²) - W((t-1)²)] = 2t - 1
        let z: f64 = rng.sample(StandardNormal);
        w += z * ((2 * t - 1) as f64).sqrt();
        if w >= beta(t) {
            return Ok(HitSample { l0: t, forced: false });
        }
    }
    Ok(HitSample {
        l0: t_max,
        forced: true,
    })
}

/// Path of `χ²_BM(t)` at `t = 1..=t_max`.
pub fn simulate_chi2_bm_path<R: Rng + ?Sized>(rng: &mut R, m: usize, t_max: u64) -> Vec<f64> {
    let k = m as f64 - 1.0;
    let mut w: f64 = rng.sample(StandardNormal);
    let mut out = Vec::with_capacity(t_max as usize);
    for t in 1..=t_max {
        if t > 1 {
            let z: f64 = rng.sample(StandardNormal);
            w += z * ((2 * t - 1) as f64).sqrt();
        }
        let tf = t as f64;
        out.push(k + (2.0 * k * (1.0 - 1.0 / tf)).sqrt() * w / tf);
    }
    out
}

const LABEL_EMPIRICAL: u64 = 0x4849_5401;
const LABEL_BROWNIAN: u64 = 0x4849_5402;

/// First-passage lengths of real FSK streams under the flatness-only rule,
/// one independent stream per run. `cap` bounds pathological runs.
pub fn empirical_hitting_times(seed: u64, model: &HittingModel, runs: usize, cap: Option<u64>) -> Result<Vec<HitSample>> {
    let config = match cap {
        Some(c) => StoppingConfig::new(1.0, model.gamma2, 1.0, Some(c))?,
        None => StoppingConfig::flatness_only(model.gamma2)?,
    };
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, LABEL_EMPIRICAL, i as u64, 0);
            let d = stopping_length(&mut rng, model.m, &config)?;
            Ok(HitSample {
                l0: d.length,
                forced: d.forced,
            })
        })
        .collect()
}

pub fn brownian_hitting_times(seed: u64, model: &HittingModel, runs: usize, t_max: u64) -> Result<Vec<HitSample>> {
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, LABEL_BROWNIAN, i as u64, 0);
            model.simulate_brownian_hit(&mut rng, t_max)
        })
        .collect()
}

/// `γ₂` at which the tangent CDF reaches `1 - α` at `L₁`, by log-space
/// bisection over `[γ_max·1e-8, γ_max]` with `γ_max = (M - 1)/M²`.
///
/// A log-spaced scan locates the first crossing of `1 - α`. The CDF must be
/// nondecreasing in `γ₂` up to that crossing. Past it the unnormalised
/// tangent CDF can fall again, which does not affect the root.
pub fn gamma2_for_quantile(l1: u64, alpha: f64, m: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("α = {alpha} must lie in (0, 1)"));
    }
    if l1 < 2 {
        return invalid(format!("L₁ = {l1} must exceed 1"));
    }
    if m < 2 {
        return invalid(format!("alphabet size M = {m} must be at least 2"));
    }
    let target = 1.0 - alpha;
    let cdf = |lg: f64| HittingModel::new(m, lg.exp())?.tangent_cdf(l1 as f64);
    let lhi = ((m as f64 - 1.0) / (m * m) as f64).ln();
    let llo = lhi - 8.0 * std::f64::consts::LN_10;
    const SCAN: usize = 64;
    let mut prev = f64::NEG_INFINITY;
    let mut bracket = None;
    for i in 0..=SCAN {
        let lg = llo + (lhi - llo) * i as f64 / SCAN as f64;
        let v = cdf(lg)?;
        if v < prev - 1e-7 {
            return Err(Error::NoBracket(format!(
                "CDF at L₁ = {l1} decreases in γ₂ near {:e} before reaching {target}",
                lg.exp()
            )));
        }
        if v >= target {
            if i == 0 {
                return Err(Error::NoBracket(format!("CDF at L₁ = {l1} already exceeds {target} at γ₂ = {:e}", lg.exp())));
            }
            bracket = Some((llo + (lhi - llo) * (i - 1) as f64 / SCAN as f64, lg));
            break;
        }
        prev = v;
    }
    let Some((mut a, mut b)) = bracket else {
        return Err(Error::NoBracket(format!("CDF at L₁ = {l1} never reaches {target}")));
    };
    // 1e-8 relative in γ₂
    while b - a > 1e-9 {
        let mid = 0.5 * (a + b);
        if cdf(mid)? < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((0.5 * (a + b)).exp())
}
