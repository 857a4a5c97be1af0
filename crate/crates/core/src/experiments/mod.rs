//! Named experiments. Each runner turns an [`ExperimentConfig`] into one or
//! more [`ResultTable`] panels; [`write_outputs`] persists them as
//! `<experiment>_<panel>.csv` plus a `<experiment>_manifest.json`.

mod config;
mod table;

pub use config::ExperimentConfig;
pub use table::ResultTable;

use crate::ambiguity::{af_sidelobe, af_stats, exact_stats, histogram, GridPoint};
use crate::error::Error;
use crate::fsk::random_sequence;
use crate::hitting::{brownian_hitting_times, empirical_hitting_times, gamma2_for_quantile, HitSample, HittingModel};
use crate::rng::substream;
use crate::sim::{cdf_from_records, run_mse, summarize, table_one, RealizationRecord, Scheme};
use crate::stats::{mean_var, EmpiricalCdf};
use crate::stopper::SpectrumState;
use crate::Result;
use rayon::prelude::*;
use serde::Serialize;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    AfVsL,
    FlatnessStats,
    HitCdf,
    AfPmf,
    MseVsSnr,
    CdfAtSnr,
    Gamma2Solve,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::AfVsL,
        Experiment::FlatnessStats,
        Experiment::HitCdf,
        Experiment::AfPmf,
        Experiment::MseVsSnr,
        Experiment::CdfAtSnr,
        Experiment::Gamma2Solve,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::AfVsL => "af-vs-l",
            Experiment::FlatnessStats => "flatness-stats",
            Experiment::HitCdf => "hitcdf",
            Experiment::AfPmf => "af-pmf",
            Experiment::MseVsSnr => "mse-vs-snr",
            Experiment::CdfAtSnr => "cdf-at-snr",
            Experiment::Gamma2Solve => "gamma2-solve",
        }
    }

    pub fn run(&self, cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
        let cfg = cfg.effective();
        let mut tables = match self {
            Experiment::AfVsL => run_af_vs_l(&cfg)?,
            Experiment::FlatnessStats => run_flatness_stats(&cfg)?,
            Experiment::HitCdf => run_hitcdf(&cfg)?,
            Experiment::AfPmf => run_af_pmf(&cfg)?,
            Experiment::MseVsSnr => run_mse_vs_snr(&cfg)?,
            Experiment::CdfAtSnr => run_cdf_at_snr(&cfg)?,
            Experiment::Gamma2Solve => run_gamma2_solve(&cfg)?,
        };
        let hash = cfg.hash();
        for t in &mut tables {
            let extra = std::mem::take(&mut t.metadata);
            t.metadata = vec![
                ("config_sha256".into(), hash.clone()),
                ("seed".into(), cfg.seed.to_string()),
                ("version".into(), version()),
            ];
            t.metadata.extend(extra);
        }
        Ok(tables)
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

pub fn version() -> String {
    format!("fskjcr {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    version: String,
    config_sha256: String,
    seed: u64,
    files: Vec<String>,
    wall_clock_s: f64,
    config: &'a ExperimentConfig,
}

/// Run `experiment` and write its panels and manifest to `cfg.out_dir`.
pub fn run_and_write(experiment: Experiment, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let start = Instant::now();
    let tables = experiment.run(cfg)?;
    write_outputs(experiment, cfg, &tables, start.elapsed().as_secs_f64())
}

pub fn write_outputs(experiment: Experiment, cfg: &ExperimentConfig, tables: &[ResultTable], wall_clock_s: f64) -> Result<Vec<PathBuf>> {
    let mut paths = tables.iter().map(|t| t.write_csv(&cfg.out_dir)).collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        experiment: experiment.name(),
        version: version(),
        config_sha256: cfg.effective().hash(),
        seed: cfg.seed,
        files: tables.iter().map(|t| t.file_name()).collect(),
        wall_clock_s,
        config: cfg,
    };
    let path = cfg.out_dir.join(format!("{}_manifest.json", experiment.name()));
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    std::fs::write(&path, json)?;
    paths.push(path);
    Ok(paths)
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn g_label(g: f64) -> String {
    format!("{g:e}")
}

const LABEL_AF: u64 = 0x4146_0001;
const LABEL_FLAT: u64 = 0x464c_0001;
const LABEL_PMF: u64 = 0x504d_0001;

/// `Ã(1, 0)` over every prefix of one stream, for prefix lengths `2..=l_max`.
fn prefix_sidelobes(indices: &[usize]) -> Vec<f64> {
    let mut hits = 0usize;
    (1..indices.len())
        .map(|l| {
            if indices[l] == indices[l - 1] {
                hits += 1;
            }
            hits as f64 / (l + 1) as f64
        })
        .collect()
}

/// Sidelobe at `(τ, ω) = (T, 0)` against the prefix length.
pub fn run_af_vs_l(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let name = Experiment::AfVsL.name();
    let m = cfg.m;
    let traces: Vec<Vec<f64>> = (0..cfg.af_realizations)
        .into_par_iter()
        .map(|r| {
            let seq = random_sequence(&mut substream(cfg.seed, LABEL_AF, r as u64, 0), m, cfg.af_l_max)?;
            Ok(prefix_sidelobes(seq.indices()))
        })
        .collect::<Result<_>>()?;
    let p10 = GridPoint::new(1, 0);
    let mut curve = ResultTable::new(
        name,
        "curve",
        cols(&["l", "analytic_mean", "analytic_var", "exact_var", "sample_mean", "sample_var"]),
    );
    let ntr = cfg.af_traces.min(cfg.af_realizations);
    let mut tr_cols = vec!["l".to_string()];
    tr_cols.extend((0..ntr).map(|i| format!("trace_{i}")));
    let mut tr = ResultTable::new(name, "traces", tr_cols);
    for l in 2..=cfg.af_l_max {
        let a = af_stats(l, m, p10)?;
        let e = exact_stats(l, m, p10)?;
        let xs: Vec<f64> = traces.iter().map(|t| t[l - 2]).collect();
        let (sm, sv) = mean_var(&xs).expect("at least one realisation");
        curve.push(vec![l as f64, a.mean, a.variance, e.variance, sm, sv])?;
        let mut row = vec![l as f64];
        row.extend(traces[..ntr].iter().map(|t| t[l - 2]));
        tr.push(row)?;
    }
    Ok(vec![curve, tr])
}

/// First `L` at which `curve(L) <= gamma2`, scanning upward.
fn first_below(gamma2: f64, curve: impl Fn(u64) -> f64) -> f64 {
    (1..=100_000_000u64).find(|&l| curve(l) <= gamma2).map_or(f64::INFINITY, |l| l as f64)
}

fn u_mean(m: usize, l: u64) -> f64 {
    (m as f64 - 1.0) / (l as f64 * (m * m) as f64)
}

fn u_std(m: usize, l: u64) -> f64 {
    let k = m as f64 - 1.0;
    (2.0 * k * (1.0 - 1.0 / l as f64)).sqrt() / (l as f64 * (m * m) as f64)
}

/// Spectrum flatness statistics against `L`, plus where the mean ± 2σ band
/// meets each threshold.
pub fn run_flatness_stats(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let name = Experiment::FlatnessStats.name();
    let (m, lmax) = (cfg.m, cfg.flatness_l_max);
    let paths: Vec<Vec<f64>> = (0..cfg.flatness_runs)
        .into_par_iter()
        .map(|r| {
            let seq = random_sequence(&mut substream(cfg.seed, LABEL_FLAT, r as u64, 0), m, lmax)?;
            let mut st = SpectrumState::new(m)?;
            seq.indices()
                .iter()
                .map(|&s| {
                    st.update(s)?;
                    st.flatness()
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut stats = ResultTable::new(
        name,
        "stats",
        cols(&["l", "empirical_mean", "empirical_std", "analytic_mean", "analytic_std", "lower_2sd", "upper_2sd"]),
    );
    for l in 1..=lmax {
        let xs: Vec<f64> = paths.iter().map(|p| p[l - 1]).collect();
        let (em, ev) = mean_var(&xs).expect("at least one run");
        let (am, sd) = (u_mean(m, l as u64), u_std(m, l as u64));
        stats.push(vec![l as f64, em, ev.sqrt(), am, sd, am - 2.0 * sd, am + 2.0 * sd])?;
    }
    let mut crossing = ResultTable::new(name, "crossing", cols(&["gamma2", "l_lower", "l_upper", "mean_crossing"]));
    for &g in &cfg.gamma2_list {
        crossing.push(vec![
            g,
            first_below(g, |l| u_mean(m, l) - 2.0 * u_std(m, l)),
            first_below(g, |l| u_mean(m, l) + 2.0 * u_std(m, l)),
            first_below(g, |l| u_mean(m, l)),
        ])?;
    }
    Ok(vec![stats, crossing])
}

/// Empirical, Brownian and tangent hitting-time distributions for one threshold.
#[derive(Debug, Clone)]
pub struct HitComparison {
    pub gamma2: f64,
    /// `1..=l_max`.
    pub ls: Vec<u64>,
    pub empirical: Vec<f64>,
    pub brownian: Vec<f64>,
    pub tangent: Vec<f64>,
    /// Mean over the runs that crossed.
    pub mean_l0: f64,
    pub p_below: f64,
    pub p_band: f64,
    /// `sup |F_emp - F_tan|` over `L >= compare_from`.
    pub sup_emp_tangent: f64,
    /// `sup |F_tan - F_bm|` over every tabulated `L`.
    pub sup_tangent_brownian: f64,
    pub tangent_mass: f64,
    pub forced_empirical: usize,
    pub forced_brownian: usize,
}

/// Forced samples never crossed, so they count as `+∞`.
fn hit_cdf(samples: &[HitSample]) -> EmpiricalCdf {
    EmpiricalCdf::new(
        samples
            .iter()
            .map(|s| if s.forced { f64::INFINITY } else { s.l0 as f64 })
            .collect(),
    )
}

pub struct HitSettings {
    pub seed: u64,
    pub m: usize,
    pub runs: usize,
    pub brownian_runs: usize,
    pub cap: u64,
    pub t_max: u64,
    pub l_max: u64,
    pub compare_from: u64,
    pub band: (u64, u64),
}

impl HitSettings {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            seed: cfg.seed,
            m: cfg.m,
            runs: cfg.hitting_runs,
            brownian_runs: cfg.brownian_runs,
            cap: cfg.hit_cap,
            t_max: cfg.hit_t_max,
            l_max: cfg.hit_l_max,
            compare_from: cfg.hit_compare_from,
            band: cfg.hit_band,
        }
    }
}

pub fn hit_comparison(s: &HitSettings, gamma2: f64) -> Result<HitComparison> {
    let model = HittingModel::new(s.m, gamma2)?;
    let emp = empirical_hitting_times(s.seed, &model, s.runs, Some(s.cap))?;
    let bm = brownian_hitting_times(s.seed, &model, s.brownian_runs, s.t_max)?;
    let (fe, fb) = (hit_cdf(&emp), hit_cdf(&bm));
    let ls: Vec<u64> = (1..=s.l_max).collect();
    let lf: Vec<f64> = ls.iter().map(|&l| l as f64).collect();
    let tangent = model.tangent_cdf_table(&lf)?;
    let empirical: Vec<f64> = lf.iter().map(|&l| fe.eval(l)).collect();
    let brownian: Vec<f64> = lf.iter().map(|&l| fb.eval(l)).collect();
    let from = ((s.compare_from.max(1) - 1) as usize).min(ls.len());
    let sup = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let crossed: Vec<f64> = emp.iter().filter(|h| !h.forced).map(|h| h.l0 as f64).collect();
    Ok(HitComparison {
        gamma2,
        mean_l0: crossed.iter().sum::<f64>() / crossed.len().max(1) as f64,
        p_below: fe.eval(s.compare_from as f64 - 0.5),
        p_band: fe.eval(s.band.1 as f64) - fe.eval(s.band.0 as f64 - 0.5),
        sup_emp_tangent: sup(&empirical[from..], &tangent[from..]),
        sup_tangent_brownian: sup(&tangent, &brownian),
        tangent_mass: model.total_mass()?,
        forced_empirical: emp.len() - crossed.len(),
        forced_brownian: bm.iter().filter(|h| h.forced).count(),
        ls,
        empirical,
        brownian,
        tangent,
    })
}

pub fn run_hitcdf(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let name = Experiment::HitCdf.name();
    let settings = HitSettings::from_config(cfg);
    let comps = cfg
        .gamma2_list
        .iter()
        .map(|&g| hit_comparison(&settings, g))
        .collect::<Result<Vec<_>>>()?;
    let mut c = vec!["l".to_string()];
    for h in &comps {
        let g = g_label(h.gamma2);
        c.extend([format!("empirical_{g}"), format!("brownian_{g}"), format!("tangent_{g}")]);
    }
    let mut cdf = ResultTable::new(name, "cdf", c);
    for (i, &l) in comps[0].ls.iter().enumerate() {
        let mut row = vec![l as f64];
        for h in &comps {
            row.extend([h.empirical[i], h.brownian[i], h.tangent[i]]);
        }
        cdf.push(row)?;
    }
    let mut summary = ResultTable::new(
        name,
        "summary",
        cols(&[
            "gamma2",
            "runs",
            "mean_l0",
            "p_below",
            "p_band",
            "sup_emp_tangent",
            "sup_tangent_brownian",
            "tangent_mass",
            "forced_empirical",
            "forced_brownian",
        ]),
    )
    .with_meta("p_below", format!("P(L0 < {})", cfg.hit_compare_from))
    .with_meta("p_band", format!("P({} <= L0 <= {})", cfg.hit_band.0, cfg.hit_band.1))
    .with_meta("sup_emp_tangent", format!("over L >= {}", cfg.hit_compare_from));
    for h in &comps {
        summary.push(vec![
            h.gamma2,
            cfg.hitting_runs as f64,
            h.mean_l0,
            h.p_below,
            h.p_band,
            h.sup_emp_tangent,
            h.sup_tangent_brownian,
            h.tangent_mass,
            h.forced_empirical as f64,
            h.forced_brownian as f64,
        ])?;
    }
    Ok(vec![cdf, summary])
}

/// `Ã(1, 0)` of dynamic realisations, their lengths and the sidelobe PMF.
pub fn run_af_pmf(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let name = Experiment::AfPmf.name();
    let scheme = cfg.dynamic_scheme()?;
    let p10 = GridPoint::new(1, 0);
    let seqs: Vec<_> = (0..cfg.pmf_realizations)
        .into_par_iter()
        .map(|r| Ok(scheme.realize(&mut substream(cfg.seed, LABEL_PMF, r as u64, 0), cfg.m)?.0))
        .collect::<Result<_>>()?;
    let values = seqs.iter().map(|s| af_sidelobe(s, p10)).collect::<Result<Vec<_>>>()?;
    let pmf = histogram(&values, cfg.pmf_bins)?;
    let mut t = ResultTable::new(name, "pmf", cols(&["bin_lo", "bin_hi", "mass"]));
    for (i, &mass) in pmf.mass.iter().enumerate() {
        t.push(vec![pmf.edges[i], pmf.edges[i + 1], mass])?;
    }
    let mut samples = ResultTable::new(name, "samples", cols(&["realization", "l", "sidelobe"]));
    for (i, (s, v)) in seqs.iter().zip(&values).enumerate() {
        samples.push(vec![i as f64, s.len() as f64, *v])?;
    }
    let (mean, var) = mean_var(&values).expect("at least one realisation");
    let lens: Vec<f64> = seqs.iter().map(|s| s.len() as f64).collect();
    let mut summary = ResultTable::new(
        name,
        "summary",
        cols(&["realizations", "sample_mean", "sample_var", "reference_mean", "reference_l", "analytic_var_at_reference_l", "mean_l"]),
    );
    summary.push(vec![
        values.len() as f64,
        mean,
        var,
        1.0 / cfg.m as f64,
        cfg.af_reference_l as f64,
        af_stats(cfg.af_reference_l, cfg.m, p10)?.variance,
        lens.iter().sum::<f64>() / lens.len() as f64,
    ])?;
    Ok(vec![t, samples, summary])
}

fn record_rows(t: &mut ResultTable, id: usize, recs: &[RealizationRecord]) -> Result<()> {
    for r in recs {
        t.push(vec![id as f64, r.realization as f64, r.l as f64, r.sigma_w_sq, r.snr_db, r.delay_mse, r.doppler_mse])?;
    }
    Ok(())
}

fn record_table(experiment: &str, schemes: &[(String, Scheme)]) -> ResultTable {
    let ids: Vec<String> = schemes.iter().enumerate().map(|(i, (n, _))| format!("{i}={n}")).collect();
    ResultTable::new(
        experiment,
        "realizations",
        cols(&["scheme", "realization", "l", "sigma_w_sq", "snr_db", "delay_mse", "doppler_mse"]),
    )
    .with_meta("schemes", ids.join(" "))
}

/// Average and best/worst MSEs against SNR for the unbounded dynamic,
/// bounded dynamic and fixed schemes.
pub fn run_mse_vs_snr(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let name = Experiment::MseVsSnr.name();
    let setup = cfg.mse_setup(cfg.mse_realizations, cfg.mse_trials)?;
    let schemes = vec![
        ("dynamic".to_string(), cfg.dynamic_scheme()?),
        ("bounded".to_string(), cfg.bounded_scheme()),
        (format!("fixed{}", cfg.fixed_l), Scheme::Fixed { l: cfg.fixed_l }),
    ];
    let mut c = vec!["snr_db".to_string()];
    for (n, _) in &schemes {
        for f in ["delay_mse", "delay_best", "delay_worst", "doppler_mse", "doppler_best", "doppler_worst"] {
            c.push(format!("{n}_{f}"));
        }
    }
    let mut summary = ResultTable::new(name, "summary", c);
    let mut recs = record_table(name, &schemes);
    let mut per_scheme = Vec::new();
    for (id, (_, s)) in schemes.iter().enumerate() {
        let r = run_mse(&setup, s, &cfg.snr_db)?;
        for snr_recs in &r {
            record_rows(&mut recs, id, snr_recs)?;
        }
        per_scheme.push(r);
    }
    for (si, &snr) in cfg.snr_db.iter().enumerate() {
        let mut row = vec![snr];
        for r in &per_scheme {
            let s = summarize(&r[si])?;
            row.extend([s.delay_mse, s.delay_best, s.delay_worst, s.doppler_mse, s.doppler_best, s.doppler_worst]);
        }
        summary.push(row)?;
    }
    Ok(vec![summary, recs])
}

/// Per-realisation CDFs at one SNR for the bounded scheme and the fixed
/// lengths, and the fixed CDFs evaluated at the bounded delay quantiles.
pub fn run_cdf_at_snr(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let name = Experiment::CdfAtSnr.name();
    let setup = cfg.mse_setup(cfg.cdf_realizations, cfg.cdf_trials)?;
    let mut schemes = vec![("bounded".to_string(), cfg.bounded_scheme())];
    schemes.extend(cfg.fixed_lengths.iter().map(|&l| (format!("fixed{l}"), Scheme::Fixed { l })));
    let mut recs = record_table(name, &schemes);
    let mut cdfs = Vec::new();
    for (id, (_, s)) in schemes.iter().enumerate() {
        let r = run_mse(&setup, s, &[cfg.cdf_snr_db])?.remove(0);
        record_rows(&mut recs, id, &r)?;
        cdfs.push(cdf_from_records(r));
    }
    let mut c = vec!["p".to_string()];
    c.extend(schemes.iter().map(|(n, _)| n.clone()));
    let n = setup.realizations;
    let mut panels = Vec::new();
    for (panel, pick) in [("delay", 0usize), ("doppler", 1), ("latency", 2)] {
        // quantile function: row i holds the (i+1)-th smallest value of each scheme
        let mut t = ResultTable::new(name, panel, c.clone()).with_meta("snr_db", cfg.cdf_snr_db);
        for i in 0..n {
            let mut row = vec![(i + 1) as f64 / n as f64];
            for cd in &cdfs {
                let e = [&cd.delay, &cd.doppler, &cd.latency][pick];
                row.push(e.samples()[i]);
            }
            t.push(row)?;
        }
        panels.push(t);
    }
    let mut c1 = vec!["fixed_l".to_string()];
    c1.extend(cfg.quantiles.iter().map(|q| format!("cdf_at_q{}", (q * 1e8).round() / 1e6)));
    let mut t1 = ResultTable::new(name, "table1", c1);
    let fixed: Vec<&EmpiricalCdf> = cdfs[1..].iter().map(|c| &c.delay).collect();
    let cells = table_one(&cdfs[0].delay, &fixed, &cfg.quantiles)?;
    let points: Vec<f64> = cfg.quantiles.iter().map(|&q| cdfs[0].delay.quantile(q).unwrap_or(f64::NAN)).collect();
    for (l, row) in cfg.fixed_lengths.iter().zip(cells) {
        let mut r = vec![*l as f64];
        r.extend(row);
        t1.push(r)?;
    }
    let t1 = t1.with_meta("bounded_delay_quantiles", format!("{points:?}"));
    let mut summary = ResultTable::new(
        name,
        "summary",
        cols(&["scheme", "delay_mean", "delay_std", "doppler_mean", "doppler_std", "latency_mean", "latency_std"]),
    )
    .with_meta("schemes", recs.meta("schemes").unwrap_or_default());
    for (id, cd) in cdfs.iter().enumerate() {
        let mut row = vec![id as f64];
        for e in [&cd.delay, &cd.doppler, &cd.latency] {
            let (m, v) = mean_var(e.samples()).expect("at least one realisation");
            row.extend([m, v.sqrt()]);
        }
        summary.push(row)?;
    }
    panels.extend([t1, summary, recs]);
    Ok(panels)
}

/// `γ₂` for `P(L₀ > L₁) = α` under the tangent model, and the CDF at `L₁`
/// over a log grid of thresholds.
pub fn run_gamma2_solve(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let name = Experiment::Gamma2Solve.name();
    let g = gamma2_for_quantile(cfg.l1, cfg.alpha, cfg.m)?;
    let model = HittingModel::new(cfg.m, g)?;
    let mut sol = ResultTable::new(name, "solution", cols(&["m", "l1", "alpha", "gamma2", "tangent_cdf_at_l1"]));
    sol.push(vec![cfg.m as f64, cfg.l1 as f64, cfg.alpha, g, model.tangent_cdf(cfg.l1 as f64)?])?;
    let mut scan = ResultTable::new(name, "scan", cols(&["gamma2", "tangent_cdf_at_l1"]));
    for i in 0..=40 {
        let gi = g * 10f64.powf((i as f64 - 20.0) / 20.0);
        let v = HittingModel::new(cfg.m, gi)?.tangent_cdf(cfg.l1 as f64)?;
        scan.push(vec![gi, v])?;
    }
    Ok(vec![sol, scan])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!(matches!("fig9".parse::<Experiment>(), Err(Error::Config(_))));
    }

    #[test]
    fn prefix_sidelobes_match_direct_count() {
        let seq = random_sequence(&mut substream(4, 0, 0, 0), 3, 40).unwrap();
        let pre = prefix_sidelobes(seq.indices());
        for l in 2..=40 {
            let s = crate::FrequencySequence::new(3, seq.indices()[..l].to_vec()).unwrap();
            assert_eq!(pre[l - 2], af_sidelobe(&s, GridPoint::new(1, 0)).unwrap());
        }
    }

    #[test]
    fn crossing_band_for_default_threshold() {
        assert_eq!(first_below(1e-4, |l| u_mean(32, l) - 2.0 * u_std(32, l)), 150.0);
        assert_eq!(first_below(1e-4, |l| u_mean(32, l) + 2.0 * u_std(32, l)), 457.0);
    }
}
