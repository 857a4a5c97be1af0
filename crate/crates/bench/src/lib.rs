//! Criterion benchmarks for the hot kernels. `benches/kernels.rs` is the
//! harness entry point; the groups live here so they can share fixtures.

use criterion::{BenchmarkId, Criterion, Throughput};
use fskjcr::ambiguity::{af_sidelobe, GridPoint};
use fskjcr::fsk::{random_sequence, synthesize};
use fskjcr::rng::substream;
use fskjcr::sim::{apply_channel, ChannelScenario, MatchedFilterBank, SearchGrid};
use fskjcr::{FrequencySequence, HittingModel, SpectrumState, WaveformParams};
use std::hint::black_box;

pub fn sequence(m: usize, l: usize) -> FrequencySequence {
    random_sequence(&mut substream(7, 0, m as u64, l as u64), m, l).unwrap()
}

pub fn flatness(c: &mut Criterion) {
    let seq = sequence(32, 10_000);
    let mut g = c.benchmark_group("flatness_update");
    g.throughput(Throughput::Elements(seq.len() as u64));
    g.bench_function("m32_l10000", |b| {
        b.iter(|| {
            let mut st = SpectrumState::new(32).unwrap();
            for &s in seq.indices() {
                st.update(s).unwrap();
                black_box(st.flatness().unwrap());
            }
        })
    });
    g.finish();
}

pub fn sidelobe(c: &mut Criterion) {
    let mut g = c.benchmark_group("af_sidelobe");
    for l in [100, 300, 1000] {
        let seq = sequence(32, l);
        g.bench_with_input(BenchmarkId::from_parameter(l), &seq, |b, s| {
            b.iter(|| af_sidelobe(black_box(s), GridPoint::new(1, 0)).unwrap())
        });
    }
    g.finish();
}

pub fn tangent(c: &mut Criterion) {
    let model = HittingModel::new(32, 1e-4).unwrap();
    let ls: Vec<f64> = (1..=1200).map(f64::from).collect();
    let mut g = c.benchmark_group("tangent_cdf");
    g.bench_function("single_l300", |b| b.iter(|| model.tangent_cdf(black_box(300.0)).unwrap()));
    g.bench_function("table_1200", |b| b.iter(|| model.tangent_cdf_table(black_box(&ls)).unwrap()));
    g.sample_size(20);
    g.bench_function("total_mass", |b| b.iter(|| model.total_mass().unwrap()));
    g.finish();
}

pub fn matched_filter(c: &mut Criterion) {
    let p = WaveformParams::normalized(32).unwrap();
    let seq = sequence(32, 300);
    let w = synthesize(&p, &seq).unwrap();
    let grid = SearchGrid::standard(&p, 1.0, 0.0, 2.0, 400).unwrap();
    let window = w.len() + 3 * p.samples_per_subpulse;
    let bank = MatchedFilterBank::new(&p, &grid, window).unwrap();
    let scen = ChannelScenario::with_snr(1.0, 0.0, 1.0, 100.0, seq.len(), 1.0).unwrap();
    let rx = apply_channel(&w, &scen, window, &mut substream(8, 0, 0, 0)).unwrap();
    let mut g = c.benchmark_group("matched_filter");
    g.sample_size(10);
    g.bench_function("channel_m32_l300", |b| {
        let mut rng = substream(9, 0, 0, 0);
        b.iter(|| apply_channel(&w, &scen, window, &mut rng).unwrap())
    });
    g.bench_function("estimate_m32_l300", |b| b.iter(|| bank.estimate(&seq, black_box(&rx)).unwrap()));
    g.finish();
}

pub fn benchmarks(c: &mut Criterion) {
    flatness(c);
    sidelobe(c);
    tangent(c);
    matched_filter(c);
}
