use proptest::prelude::*;

use sortkernel::featurize::{
    phi_concat, phi_enum, phi_merge, phi_mid, phi_shift, phi_slide, reconstruct_merge, FeaturizerConfig,
};
use sortkernel::perm::{cayley_distance, kendall_tau};
use sortkernel::problems::{parse_qaplib, parse_tsplib};
use sortkernel::Permutation;

fn perm(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Permutation> {
    n.prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
}

fn triple(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    n.prop_flat_map(|n| {
        let one = || Just((0..n).collect::<Vec<_>>()).prop_shuffle();
        (one(), one(), one())
    })
    .prop_map(|(a, b, c)| (Permutation::new(a).unwrap(), Permutation::new(b).unwrap(), Permutation::new(c).unwrap()))
}

proptest! {
    #[test]
    fn kendall_is_a_metric((a, b, c) in triple(1..=12)) {
        let ab = kendall_tau(&a, &b).unwrap();
        prop_assert_eq!(ab, kendall_tau(&b, &a).unwrap());
        prop_assert_eq!(ab == 0, a == b);
        prop_assert!(ab <= kendall_tau(&a, &c).unwrap() + kendall_tau(&c, &b).unwrap());
        let n = a.len();
        prop_assert!(ab <= n * (n - 1) / 2);
    }

    #[test]
    fn cayley_is_a_metric((a, b, c) in triple(1..=12)) {
        let ab = cayley_distance(&a, &b).unwrap();
        prop_assert_eq!(ab == 0, a == b);
        prop_assert!(ab <= cayley_distance(&a, &c).unwrap() + cayley_distance(&c, &b).unwrap());
        prop_assert!(ab <= kendall_tau(&a, &b).unwrap());
    }

    #[test]
    fn hamming_of_comparisons_is_kendall((a, b, t) in triple(2..=14)) {
        let (x, y) = (phi_enum(&a), phi_enum(&b));
        let hamming = x.0.iter().zip(&y.0).filter(|(u, v)| u != v).count();
        let d = kendall_tau(&a, &b).unwrap();
        prop_assert_eq!(hamming, d);
        prop_assert_eq!(x.squared_distance(&y), 4.0 * d as f64);
        let dt = kendall_tau(&a.compose(&t).unwrap(), &b.compose(&t).unwrap()).unwrap();
        prop_assert_eq!(dt, d);
    }

    #[test]
    fn inverse_and_compose(a in perm(1..=16)) {
        let id = Permutation::identity(a.len()).unwrap();
        prop_assert_eq!(a.compose(&a.inverse()).unwrap(), id.clone());
        prop_assert_eq!(a.inverse().compose(&a).unwrap(), id);
        prop_assert_eq!(a.inverse().inverse(), a);
    }

    #[test]
    fn merge_trace_round_trips(a in perm(1..=40)) {
        let trace = phi_merge(&a);
        prop_assert!(trace.0.iter().all(|&x| x == 1.0 || x == -1.0));
        prop_assert_eq!(reconstruct_merge(&trace, a.len()).unwrap(), a);
    }

    #[test]
    fn slide_is_rotation_invariant(a in perm(6..=20), k in 0usize..20, w in 2usize..=6) {
        let base = phi_slide(&a, w).unwrap();
        prop_assert_eq!(phi_slide(&a.rotate(k), w).unwrap(), base.clone());
        prop_assert_eq!(base.0.iter().sum::<f64>(), a.len() as f64);
    }

    #[test]
    fn shift_mass_and_clipping(a in perm(1..=20), s in 1usize..8) {
        let h = phi_shift(&a, s).unwrap();
        prop_assert_eq!(h.len(), 2 * s + 1);
        prop_assert_eq!(h.0.iter().sum::<f64>(), a.len() as f64);
    }

    #[test]
    fn mid_and_concat_lengths(a in perm(4..=20)) {
        let cfg = FeaturizerConfig::default();
        let n = a.len();
        prop_assert_eq!(phi_mid(&a).len(), n / 2);
        let v = phi_concat(&a, &cfg).unwrap();
        prop_assert_eq!(v.len(), phi_merge(&a).len() + n / 2 + 24 + 11);
    }

    #[test]
    fn parsers_never_panic(text in "\\PC{0,400}") {
        let _ = parse_qaplib(&text);
        let _ = parse_tsplib(&text);
    }

    #[test]
    fn parsers_never_panic_on_near_valid_input(
        n in 0usize..6,
        body in proptest::collection::vec("-?[0-9]{1,3}|x|1e400|NaN", 0..80),
        head in prop::sample::select(vec!["EUC_2D", "EXPLICIT", "GEO"]),
    ) {
        let nums = body.join(" ");
        let _ = parse_qaplib(&format!("{n}\n{nums}"));
        let coords: Vec<String> = body.chunks(3).map(|c| c.join(" ")).collect();
        let tsp = format!(
            "NAME: t\nTYPE: TSP\nDIMENSION: {n}\nEDGE_WEIGHT_TYPE: {head}\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\nNODE_COORD_SECTION\n{}\nEDGE_WEIGHT_SECTION\n{nums}\nEOF\n",
            coords.join("\n")
        );
        let _ = parse_tsplib(&tsp);
    }
}
