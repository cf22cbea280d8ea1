mod common;

use cbm_core::inference::{bp_sweep, marginals, BpState};
use cbm_core::model::{alpha_detect, beta0, overlap, parse_instance, render_instance, Labeling};
use cbm_core::operators::{build_bethe_hessian, build_bprime};
use cbm_core::OperatorBundle;
use proptest::prelude::*;

use common::small_planted;

fn labels(len: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn overlap_is_flip_symmetric_and_bounded((t, g) in (1usize..200).prop_flat_map(|n| (labels(n), labels(n)))) {
        let t = Labeling::new(t).unwrap();
        let g = Labeling::new(g).unwrap();
        let q = overlap(&t, &g).unwrap();
        prop_assert!((0.0..=1.0).contains(&q));
        prop_assert!((q - overlap(&t, &g.flipped()).unwrap()).abs() < 1e-12);
        prop_assert_eq!(q, overlap(&g, &t).unwrap());
        prop_assert_eq!(overlap(&t, &t).unwrap(), 1.0);
    }

    #[test]
    fn threshold_times_gap_is_one(eps in 0.0f64..0.4999) {
        let a = alpha_detect(eps).unwrap();
        prop_assert!((a * (1.0 - 2.0 * eps).powi(2) - 1.0).abs() < 1e-12);
        prop_assert!(a >= 1.0);
    }

    #[test]
    fn coupling_is_antisymmetric_about_a_half(eps in 1e-6f64..0.5) {
        let b = beta0(eps).unwrap();
        prop_assert!(b >= 0.0);
        prop_assert!((b + beta0(1.0 - eps).unwrap()).abs() < 1e-9);
        prop_assert!((b.tanh() - (1.0 - 2.0 * eps)).abs() < 1e-9);
    }

    #[test]
    fn instances_round_trip_through_text(seed in any::<u64>()) {
        let inst = small_planted(seed);
        let text = render_instance(&inst);
        let back = parse_instance(&text, "mem").unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(render_instance(&back), text);
    }

    #[test]
    fn directed_edges_are_a_bijection(seed in any::<u64>()) {
        let inst = small_planted(seed);
        let bundle = OperatorBundle::new(&inst);
        let edges = bundle.edges();
        prop_assert_eq!(edges.len(), 2 * inst.m());
        for k in 0..edges.len() {
            let r = edges.reverse(k);
            prop_assert_eq!(edges.reverse(r), k);
            prop_assert_eq!((edges.source(r), edges.target(r)), (edges.target(k), edges.source(k)));
            prop_assert_eq!(edges.index_of(edges.source(k), edges.target(k)), Some(k));
            prop_assert_eq!(edges.weight(k), edges.weight(r));
        }
    }

    #[test]
    fn bethe_hessian_is_exactly_symmetric(seed in any::<u64>(), x in -4.0f64..4.0) {
        let inst = small_planted(seed);
        let h = build_bethe_hessian(&OperatorBundle::new(&inst), x);
        prop_assert!(h.is_symmetric());
        let d = h.to_dense();
        for i in 0..inst.n() {
            for j in 0..inst.n() {
                prop_assert_eq!(d[(i, j)].to_bits(), d[(j, i)].to_bits());
            }
        }
    }

    #[test]
    fn bprime_has_the_block_layout(seed in any::<u64>()) {
        let inst = small_planted(seed);
        let bundle = OperatorBundle::new(&inst);
        let bp = build_bprime(&bundle).to_dense();
        let n = inst.n();
        let deg = inst.degrees();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(bp[(i, j)], 0.0);
                prop_assert_eq!(bp[(i, n + j)], if i == j { deg[i] as f64 - 1.0 } else { 0.0 });
                prop_assert_eq!(bp[(n + i, j)], if i == j { -1.0 } else { 0.0 });
                prop_assert_eq!(bp[(n + i, n + j)], bundle.coupling().get(i, j));
            }
        }
    }

    #[test]
    fn bp_messages_stay_bounded(
        seed in any::<u64>(),
        eps in 1e-9f64..0.5,
        damping in 0.0f64..0.99,
        init in prop::collection::vec(-1.0f64..=1.0, 1..64),
    ) {
        let inst = small_planted(seed);
        let bundle = OperatorBundle::new(&inst);
        let mut state = BpState::zeros(bundle.edges(), beta0(eps).unwrap());
        for (k, m) in state.messages.iter_mut().enumerate() {
            *m = init[k % init.len()];
        }
        for _ in 0..5 {
            let delta = bp_sweep(&bundle, &mut state, damping);
            prop_assert!(delta.is_finite());
            prop_assert!(state.messages.iter().all(|m| m.is_finite() && m.abs() <= 1.0));
        }
        prop_assert!(marginals(&bundle, &state).iter().all(|m| m.is_finite() && m.abs() <= 1.0));
    }
}
