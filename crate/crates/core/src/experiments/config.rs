//! Flat key/value experiment configuration (TOML).

use crate::error::Error;
use crate::fsk::WaveformParams;
use crate::sim::{BoundPolicy, MseSetup, Scheme};
use crate::stopper::{gamma1_from_rms_requirement, gamma3_from_af_variance, StoppingConfig};
use crate::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Every knob any experiment reads. Unknown keys are rejected so typos fail
/// loudly instead of silently running the default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: usize,
    pub t: f64,
    pub delta_f: f64,
    pub f0: f64,
    /// Defaults to `4·M·Δf·T`.
    pub samples_per_subpulse: Option<usize>,

    /// Lower length bound of the unbounded scheme; overrides `sigma_t_sq_req`.
    pub gamma1: Option<f64>,
    pub sigma_t_sq_req: Option<f64>,
    pub gamma2: f64,
    /// Second lower length bound; overrides `sigma_a_sq_req`.
    pub gamma3: Option<f64>,
    pub sigma_a_sq_req: Option<f64>,
    /// Forced stop of the unbounded scheme.
    pub gamma4: Option<u64>,
    /// Thresholds compared by the flatness and hitting-time experiments.
    pub gamma2_list: Vec<f64>,

    /// Length bounds of the "bounded" scheme.
    pub min_len: u64,
    pub max_len: u64,
    pub bound_policy: BoundPolicy,
    /// Fixed length compared against the dynamic scheme over SNR.
    pub fixed_l: usize,
    /// Fixed lengths compared in the CDF experiment.
    pub fixed_lengths: Vec<usize>,

    pub af_l_max: usize,
    pub af_realizations: usize,
    pub af_traces: usize,
    pub pmf_realizations: usize,
    pub pmf_bins: usize,
    /// Length at which the analytic sidelobe variance is quoted next to the PMF.
    pub af_reference_l: usize,

    pub flatness_runs: usize,
    pub flatness_l_max: usize,

    pub hitting_runs: usize,
    pub brownian_runs: usize,
    /// Cap on a single empirical stream.
    pub hit_cap: u64,
    /// Horizon of the Brownian simulation.
    pub hit_t_max: u64,
    /// Rows of the CDF table.
    pub hit_l_max: u64,
    /// Lower edge of the range on which empirical and tangent CDFs are compared.
    pub hit_compare_from: u64,
    /// `[lo, hi]` band whose probability is reported.
    pub hit_band: (u64, u64),

    pub snr_db: Vec<f64>,
    pub cdf_snr_db: f64,
    pub quantiles: Vec<f64>,
    pub mse_realizations: usize,
    pub mse_trials: usize,
    pub cdf_realizations: usize,
    pub cdf_trials: usize,
    pub tau: f64,
    pub omega: f64,
    pub sigma_b_sq: f64,
    /// Delay search half-span in units of T.
    pub delay_span_t: f64,
    /// Length that sets the Doppler grid step.
    pub doppler_l_max: usize,

    pub l1: u64,
    pub alpha: f64,

    pub seed: u64,
    pub out_dir: PathBuf,
    /// Multiply run and realisation counts by 10.
    pub paper_scale: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            m: 32,
            t: 1.0,
            delta_f: 1.0,
            f0: 0.0,
            samples_per_subpulse: None,
            gamma1: None,
            sigma_t_sq_req: None,
            gamma2: 1e-4,
            gamma3: None,
            sigma_a_sq_req: None,
            gamma4: None,
            gamma2_list: vec![5e-5, 1e-4],
            min_len: 200,
            max_len: 400,
            bound_policy: BoundPolicy::Exclude,
            fixed_l: 300,
            fixed_lengths: vec![200, 300, 400],
            af_l_max: 400,
            af_realizations: 1000,
            af_traces: 5,
            pmf_realizations: 1000,
            pmf_bins: 30,
            af_reference_l: 150,
            flatness_runs: 1000,
            flatness_l_max: 600,
            hitting_runs: 10_000,
            brownian_runs: 10_000,
            hit_cap: 100_000,
            hit_t_max: 100_000,
            hit_l_max: 1200,
            hit_compare_from: 200,
            hit_band: (150, 450),
            snr_db: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            cdf_snr_db: 20.0,
            quantiles: vec![0.90, 0.95, 0.99],
            mse_realizations: 200,
            mse_trials: 50,
            cdf_realizations: 1000,
            cdf_trials: 100,
            tau: 1.0,
            omega: 0.0,
            sigma_b_sq: 1.0,
            delay_span_t: 2.0,
            doppler_l_max: 400,
            l1: 450,
            alpha: 0.1,
            seed: 1,
            out_dir: PathBuf::from("results"),
            paper_scale: false,
        }
    }
}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.params().map_err(|e| Error::Config(e.to_string()))?;
        self.stopping_config().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.gamma2 > 0.0) || self.gamma2_list.iter().any(|g| !(*g > 0.0)) {
            return cfg_err("flatness thresholds must be positive");
        }
        if self.gamma2_list.is_empty() {
            return cfg_err("gamma2_list is empty");
        }
        if self.min_len < 1 || self.min_len > self.max_len {
            return cfg_err(format!("bad length bounds [{}, {}]", self.min_len, self.max_len));
        }
        if self.fixed_l == 0 || self.fixed_lengths.is_empty() || self.fixed_lengths.contains(&0) {
            return cfg_err("fixed lengths must be positive");
        }
        let counts = [
            ("af_realizations", self.af_realizations),
            ("pmf_realizations", self.pmf_realizations),
            ("pmf_bins", self.pmf_bins),
            ("flatness_runs", self.flatness_runs),
            ("hitting_runs", self.hitting_runs),
            ("brownian_runs", self.brownian_runs),
            ("mse_realizations", self.mse_realizations),
            ("mse_trials", self.mse_trials),
            ("cdf_realizations", self.cdf_realizations),
            ("cdf_trials", self.cdf_trials),
        ];
        for (name, v) in counts {
            if v == 0 {
                return cfg_err(format!("{name} must be at least 1"));
            }
        }
        if self.af_l_max < 2 || self.flatness_l_max < 2 || self.af_reference_l < 2 {
            return cfg_err("length grids need L >= 2");
        }
        if self.hit_t_max < 2 || self.hit_l_max < 2 || self.hit_cap < 1 {
            return cfg_err("hitting horizons must be at least 2");
        }
        if self.hit_band.0 > self.hit_band.1 {
            return cfg_err("hit_band is reversed");
        }
        if self.snr_db.is_empty() || self.snr_db.iter().chain([&self.cdf_snr_db]).any(|s| !s.is_finite()) {
            return cfg_err("SNR list must be nonempty and finite");
        }
        if self.quantiles.is_empty() || self.quantiles.iter().any(|q| !(*q > 0.0 && *q < 1.0)) {
            return cfg_err("quantiles must lie in (0, 1)");
        }
        if !(self.sigma_b_sq > 0.0) || !(self.delay_span_t > 0.0) || self.doppler_l_max == 0 {
            return cfg_err("channel parameters must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) || self.l1 < 2 {
            return cfg_err("need 0 < alpha < 1 and l1 >= 2");
        }
        Ok(())
    }

    /// Counts multiplied by 10 when `paper_scale` is set.
    pub fn effective(&self) -> Self {
        if !self.paper_scale {
            return self.clone();
        }
        Self {
            af_realizations: self.af_realizations * 10,
            pmf_realizations: self.pmf_realizations * 10,
            flatness_runs: self.flatness_runs * 10,
            hitting_runs: self.hitting_runs * 10,
            brownian_runs: self.brownian_runs * 10,
            mse_realizations: self.mse_realizations * 10,
            cdf_realizations: self.cdf_realizations * 10,
            ..self.clone()
        }
    }

    pub fn params(&self) -> Result<WaveformParams> {
        let mut p = WaveformParams::new(self.m, self.t, self.delta_f)?.with_f0(self.f0);
        if let Some(sps) = self.samples_per_subpulse {
            p = p.with_samples_per_subpulse(sps);
        }
        p.validate()?;
        Ok(p)
    }

    pub fn gamma1(&self) -> Result<f64> {
        match (self.gamma1, self.sigma_t_sq_req) {
            (Some(g), _) => Ok(g),
            (None, Some(req)) => gamma1_from_rms_requirement(req, self.t),
            (None, None) => Ok(1.0),
        }
    }

    pub fn gamma3(&self) -> Result<f64> {
        match (self.gamma3, self.sigma_a_sq_req) {
            (Some(g), _) => Ok(g),
            (None, Some(req)) => gamma3_from_af_variance(req, self.m),
            (None, None) => Ok(1.0),
        }
    }

    /// Stopping rule of the unbounded dynamic scheme.
    pub fn stopping_config(&self) -> Result<StoppingConfig> {
        StoppingConfig::new(self.gamma1()?, self.gamma2, self.gamma3()?, self.gamma4)
    }

    pub fn dynamic_scheme(&self) -> Result<Scheme> {
        let cfg = self.stopping_config()?;
        Ok(Scheme::Dynamic {
            gamma2: self.gamma2,
            min_len: cfg.min_length(),
            max_len: self.gamma4,
            policy: BoundPolicy::Stop,
        })
    }

    pub fn bounded_scheme(&self) -> Scheme {
        Scheme::Dynamic {
            gamma2: self.gamma2,
            min_len: self.min_len,
            max_len: Some(self.max_len),
            policy: self.bound_policy,
        }
    }

    pub fn mse_setup(&self, realizations: usize, trials: usize) -> Result<MseSetup> {
        Ok(MseSetup {
            params: self.params()?,
            tau: self.tau,
            omega: self.omega,
            sigma_b_sq: self.sigma_b_sq,
            delay_span_t: self.delay_span_t,
            l_max: self.doppler_l_max,
            realizations,
            trials,
            seed: self.seed,
        })
    }

    /// SHA-256 of the canonical JSON form, ignoring the output directory so
    /// the hash only tracks what changes the numbers.
    pub fn hash(&self) -> String {
        let canon = Self {
            out_dir: PathBuf::new(),
            ..self.clone()
        };
        let json = serde_json::to_string(&canon).expect("config serialises");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
