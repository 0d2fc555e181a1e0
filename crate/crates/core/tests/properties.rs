use polarrate::bdmc::{self, random_channel};
use polarrate::polarcode::{construct, encode, encode_in_place, sc_decode_bec};
use polarrate::stats::trial_rng;
use polarrate::zprocess::{domination_check_word, exact_distribution, step};
use polarrate::{BranchWord, Channel, ErasureSymbol, RuleKind, ZState};
use proptest::prelude::*;

fn rule() -> impl Strategy<Value = RuleKind> {
    prop_oneof![
        Just(RuleKind::Extremal),
        Just(RuleKind::Lower),
        Just(RuleKind::Doubling)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn steps_are_monotone(a in 1e-6f64..0.999, b in 1e-6f64..0.999, bit: bool, r in rule()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (s, t) = (ZState::new(lo).unwrap(), ZState::new(hi).unwrap());
        prop_assert!(step(s, bit, r) <= step(t, bit, r));
    }

    #[test]
    fn order_follows_value(a in 1e-9f64..0.999_999, b in 1e-9f64..0.999_999) {
        let (s, t) = (ZState::new(a).unwrap(), ZState::new(b).unwrap());
        prop_assert_eq!(s.cmp(&t), a.partial_cmp(&b).unwrap());
    }

    #[test]
    fn processes_stay_ordered(
        lo in 0.01f64..0.99,
        gap in 0.0f64..0.5,
        bits in prop::collection::vec(any::<bool>(), 0..60),
    ) {
        let hi = (lo + gap).min(0.99);
        prop_assert!(domination_check_word(lo, hi, &BranchWord::new(bits)).unwrap());
    }

    #[test]
    fn extremal_law_is_a_martingale(z0 in 0.01f64..0.99, n in 0u32..11) {
        let d = exact_distribution(z0, n, RuleKind::Extremal).unwrap();
        prop_assert!((d.total_probability() - 1.0).abs() < 1e-12);
        prop_assert!((d.mean() - z0).abs() < 1e-12);
    }

    #[test]
    fn lower_law_never_exceeds_extremal(z0 in 0.01f64..0.99, n in 1u32..10, t in 0.0f64..1.0) {
        let ext = exact_distribution(z0, n, RuleKind::Extremal).unwrap();
        let low = exact_distribution(z0, n, RuleKind::Lower).unwrap();
        prop_assert!(low.cdf_at(t) + 1e-12 >= ext.cdf_at(t));
    }

    #[test]
    fn branch_words_round_trip(n in 0u32..40, raw: u64) {
        let idx = if n == 0 { 0 } else { raw >> (64 - n) };
        prop_assert_eq!(BranchWord::from_index(idx, n).to_index(), idx);
    }

    #[test]
    fn encoder_is_an_involution(bits in prop::collection::vec(0u8..2, 1..9usize)
        .prop_flat_map(|v| prop::collection::vec(0u8..2, 1usize << v.len()))) {
        let mut x = bits.clone();
        encode_in_place(&mut x);
        encode_in_place(&mut x);
        prop_assert_eq!(x, bits);
    }

    #[test]
    fn noiseless_round_trip(eps in 0.05f64..0.95, n in 1u32..11, rate in 0.05f64..1.0, seed: u64) {
        let spec = construct(eps, n, rate).unwrap();
        let mut rng = trial_rng(seed, 0);
        let msg: Vec<u8> = (0..spec.message_len()).map(|_| rand::Rng::random_range(&mut rng, 0..2)).collect();
        let x = encode(&spec, &msg).unwrap();
        let rx: Vec<ErasureSymbol> = x.iter().map(|&b| ErasureSymbol::from_bit(b)).collect();
        prop_assert_eq!(sc_decode_bec(&spec, &rx).unwrap().unwrap(), msg);
    }

    #[test]
    fn erasures_never_produce_wrong_bits(eps in 0.05f64..0.95, n in 1u32..9, seed: u64) {
        // whatever the erasure pattern, a successful decode is correct
        let spec = construct(eps, n, 0.5).unwrap();
        let mut rng = trial_rng(seed, 1);
        let msg: Vec<u8> = (0..spec.message_len()).map(|_| rand::Rng::random_range(&mut rng, 0..2)).collect();
        let x = encode(&spec, &msg).unwrap();
        let rx: Vec<ErasureSymbol> = x
            .iter()
            .map(|&b| if rand::Rng::random_bool(&mut rng, eps) { ErasureSymbol::Erased } else { ErasureSymbol::from_bit(b) })
            .collect();
        if let Ok(out) = sc_decode_bec(&spec, &rx).unwrap() {
            prop_assert_eq!(out, msg);
        }
    }

    #[test]
    fn channel_json_round_trip(seed: u64, k in 1usize..12) {
        let mut rng = trial_rng(seed, 2);
        let ch = random_channel(&mut rng, k);
        let back = Channel::from_json(&ch.to_json()).unwrap();
        prop_assert_eq!(back.num_outputs(), ch.num_outputs());
        for (a, b) in back.outputs().iter().zip(ch.outputs()) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn synthesized_capacity_is_conserved(seed: u64, k in 2usize..5, n in 1u32..4) {
        let mut rng = trial_rng(seed, 3);
        let ch = random_channel(&mut rng, k);
        let chans = bdmc::synthesized_channels(&ch, n, 1e-12, 1 << 20).unwrap();
        let total: f64 = chans.iter().map(|c| c.params().capacity).sum();
        prop_assert!((total - (1u64 << n) as f64 * ch.params().capacity).abs() < 1e-9);
    }
}
