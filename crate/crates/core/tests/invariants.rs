use fskjcr::ambiguity::{af_sidelobe_count, GridPoint};
use fskjcr::rms::{rms_bw_sq, default_bandwidth};
use fskjcr::stopper::{stop_on_stream, StoppingConfig};
use fskjcr::{FrequencySequence, HittingModel, SpectrumState, WaveformParams};
use proptest::prelude::*;

fn sequence(max_m: usize, max_l: usize) -> impl Strategy<Value = FrequencySequence> {
    (2..=max_m).prop_flat_map(move |m| {
        prop::collection::vec(0..m, 1..=max_l).prop_map(move |idx| FrequencySequence::new(m, idx).unwrap())
    })
}

proptest! {
    #[test]
    fn sidelobe_counts_partition_each_lag(seq in sequence(6, 40)) {
        let (l, m) = (seq.len(), seq.alphabet());
        for k in 0..l {
            let total: usize = (-(m as i64 - 1)..m as i64)
                .filter(|&r| k > 0 || r != 0)
                .map(|r| af_sidelobe_count(&seq, GridPoint::new(k, r)).unwrap())
                .sum();
            // every pair (l - k, l) has exactly one tone difference; lag 0 only has r = 0
            prop_assert_eq!(total, if k == 0 { 0 } else { l - k });
        }
    }

    #[test]
    fn flatness_is_bounded(seq in sequence(8, 200)) {
        let m = seq.alphabet() as f64;
        let u = SpectrumState::from_sequence(&seq).unwrap().flatness().unwrap();
        prop_assert!(u >= 0.0);
        prop_assert!(u <= (m - 1.0) / (m * m) * (1.0 + 1e-12));
    }

    #[test]
    fn rms_bandwidth_ignores_order(seq in sequence(8, 60), seed in any::<u64>()) {
        let p = WaveformParams::normalized(seq.alphabet()).unwrap();
        let mut idx = seq.indices().to_vec();
        let n = idx.len();
        // deterministic shuffle from the seed
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            idx.swap(i, (s >> 33) as usize % (i + 1));
        }
        let shuffled = FrequencySequence::new(seq.alphabet(), idx).unwrap();
        let b = default_bandwidth(&p);
        let (x, y) = (rms_bw_sq(&seq, &p, b).unwrap(), rms_bw_sq(&shuffled, &p, b).unwrap());
        prop_assert!((x - y).abs() <= 1e-12 * x.abs());
    }

    #[test]
    fn stop_respects_bounds(
        stream in prop::collection::vec(0..4usize, 1..400),
        gamma2 in 1e-4f64..0.2,
        min in 1u64..50,
        extra in 0u64..100,
    ) {
        let max = min + extra;
        let cfg = StoppingConfig::new(min as f64, gamma2, 1.0, Some(max)).unwrap();
        if let Some((seq, d)) = stop_on_stream(4, &cfg, stream.iter().copied()).unwrap() {
            prop_assert!(d.stopped);
            prop_assert_eq!(seq.len() as u64, d.length);
            prop_assert!(d.length >= min && d.length <= max);
            prop_assert_eq!(seq.indices(), &stream[..seq.len()]);
            if !d.forced {
                prop_assert!(SpectrumState::from_sequence(&seq).unwrap().flatness().unwrap() <= gamma2);
            }
        } else {
            prop_assert!((stream.len() as u64) < max);
        }
    }

    #[test]
    fn tangent_cdf_is_monotone(gamma2 in 1e-5f64..1e-2, t in 1.5f64..3000.0) {
        let h = HittingModel::new(32, gamma2).unwrap();
        let (a, b) = (h.tangent_cdf(t).unwrap(), h.tangent_cdf(t * 1.1).unwrap());
        prop_assert!(a >= 0.0);
        prop_assert!(b >= a - 1e-8);
    }
}
