use proptest::prelude::*;
use sfp_core::coarse_grain::Chunking;
use sfp_core::concentration::{bernstein_bound, fuk_nagaev_bound, wilson_interval, Z99};
use sfp_core::experiment_harness::{phase_predict, Phase};
use sfp_core::flows::geodesic_flow;
use sfp_core::graph_model::{self, generate, link_probability, pareto_quantile};
use sfp_core::structure_stats::cut_points;
use sfp_core::walk_analysis::tv_curve;
use sfp_core::{Params, Topology};

fn params() -> impl Strategy<Value = Params> {
    (0.3f64..4.0, 1.05f64..4.0).prop_map(|(a, t)| Params::new(a, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bernstein_decreases_in_u(n in 1usize..10_000, s2 in 0.0f64..10.0, m in 0.1f64..10.0, u in 0.01f64..1e3, du in 0.01f64..1e3) {
        let a = bernstein_bound(u, n, s2, m).unwrap();
        let b = bernstein_bound(u + du, n, s2, m).unwrap();
        prop_assert!(b <= a);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn fuk_nagaev_decreases_in_x_below_one(n in 10usize..10_000, g in 1.1f64..3.0, y in 1.0f64..1e3, r in 1.0f64..20.0, dr in 0.01f64..20.0, c in 0.1f64..10.0) {
        let a = fuk_nagaev_bound(n, g, r * y, y, c).unwrap();
        let b = fuk_nagaev_bound(n, g, (r + dr) * y, y, c).unwrap();
        if a < 1.0 {
            prop_assert!(b <= a * (1.0 + 1e-12));
        }
    }

    #[test]
    fn wilson_brackets_the_frequency(n in 1u64..100_000, frac in 0.0f64..=1.0) {
        let k = (frac * n as f64).floor() as u64;
        let (lo, hi) = wilson_interval(k, n, Z99);
        let p = k as f64 / n as f64;
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
        prop_assert!(0.0 <= lo && hi <= 1.0);
    }

    #[test]
    fn link_probability_is_monotone(w1 in 1.0f64..1e4, w2 in 1.0f64..1e4, dw in 0.0f64..1e3, d in 1usize..10_000, dd in 1usize..100, alpha in 0.1f64..5.0) {
        let p = link_probability(w1, w2, d, alpha).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(link_probability(w1, w2, d + dd, alpha).unwrap() <= p);
        prop_assert!(link_probability(w1 + dw, w2, d, alpha).unwrap() >= p);
    }

    #[test]
    fn pareto_quantile_is_monotone(u in 0.0f64..0.999, du in 0.0f64..0.001, tau in 1.05f64..5.0) {
        let a = pareto_quantile(u, tau);
        prop_assert!(a >= 1.0);
        prop_assert!(pareto_quantile(u + du, tau) >= a);
    }

    #[test]
    fn phase_predict_is_total(alpha in 0.01f64..6.0, tau in 1.001f64..6.0) {
        let p = phase_predict(alpha, tau).unwrap();
        prop_assert!((p.gamma - alpha * (tau - 1.0)).abs() < 1e-12);
        match p.phase {
            Phase::I => prop_assert_eq!(p.slope, Some(0.0)),
            Phase::Ii => prop_assert!((p.slope.unwrap() - (p.gamma - 1.0)).abs() < 1e-12),
            Phase::Iii => prop_assert!((p.slope.unwrap() - (alpha - 1.0)).abs() < 1e-12),
            Phase::Iv => prop_assert_eq!(p.slope, Some(2.0)),
            Phase::Unclassified => prop_assert!(p.slope.is_none()),
        }
    }

    #[test]
    fn chunking_partitions(n in 3usize..5000, len in 1usize..200) {
        if let Ok(c) = Chunking::new(n, len) {
            let mut next = 0;
            for j in 0..c.count {
                let r = c.range(j);
                prop_assert_eq!(r.start, next);
                prop_assert!(r.len() >= len);
                for x in r.clone() {
                    prop_assert_eq!(c.chunk_of(x), j);
                }
                next = r.end;
            }
            prop_assert_eq!(next, n);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn good_cut_points_are_cut_points(p in params(), n in 5usize..400, seed in any::<u64>()) {
        let g = generate(&p, Topology::segment(n).unwrap(), seed).unwrap();
        let r = cut_points(&g).unwrap();
        prop_assert!(r.good.iter().all(|x| r.cut_points.binary_search(x).is_ok()));
        prop_assert!(r.good_density <= r.cut_density);
    }

    #[test]
    fn tv_distance_never_increases(p in params(), n in 3usize..40, seed in any::<u64>()) {
        let g = generate(&p, Topology::torus(n).unwrap(), seed).unwrap();
        let d = tv_curve::<f64>(&g.graph, 200).unwrap();
        prop_assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        prop_assert!(d.iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn geodesic_flow_is_feasible(p in params(), n in 3usize..60, seed in any::<u64>()) {
        let g = generate(&p, Topology::torus(n).unwrap(), seed).unwrap();
        let f = geodesic_flow::<f64>(&g.graph).unwrap();
        prop_assert!(f.feasibility_residual() < 1e-12);
    }

    #[test]
    fn graph_files_round_trip(p in params(), n in 3usize..200, seed in any::<u64>(), segment in any::<bool>()) {
        let top = if segment { Topology::segment(n).unwrap() } else { Topology::torus(n).unwrap() };
        let g = generate(&p, top, seed).unwrap();
        let back = graph_model::deserialize(&graph_model::serialize(&g)).unwrap();
        prop_assert_eq!(&back.graph, &g.graph);
        prop_assert_eq!(&back.weights, &g.weights);
        prop_assert_eq!(back.topology, g.topology);
        prop_assert_eq!(back.params, g.params);
    }
}
