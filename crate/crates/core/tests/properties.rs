use proptest::prelude::*;

use celltraffic::analytics::{
    mean_delay, solve_busy_probability, success_probability, unstable_probability, DelayResult,
    NetworkParameters, PopulationModel, SirModel, DEFAULT_SERIES_TOL,
};
use celltraffic::geometry::{sample_pcp, sample_ppp, Metric, NearestIndex, PcpParams, Point, PointPattern, Window};
use celltraffic::harness::{Estimate, Source, SweepRow, SweepTable};
use celltraffic::traffic::ArrivalRateDistribution;

fn sir() -> impl Strategy<Value = SirModel> {
    (1e-2f64..1e3, 2.1f64..6.0).prop_map(|(t, a)| SirModel::new(t, a).unwrap())
}

fn rate_law() -> impl Strategy<Value = ArrivalRateDistribution> {
    prop_oneof![
        (1e-4f64..1.0).prop_map(|u| ArrivalRateDistribution::uniform(u).unwrap()),
        (1e-4f64..0.5).prop_map(|m| ArrivalRateDistribution::exponential_mean(m).unwrap()),
    ]
}

fn metric() -> impl Strategy<Value = Metric> {
    prop_oneof![Just(Metric::Toroidal), Just(Metric::EuclideanTruncated)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn busy_probability_in_unit_interval_and_monotone(
        sir in sir(), n in 1u32..200, a in 0.0f64..1.0, b in 0.0f64..1.0,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let q_lo = solve_busy_probability(n, lo, &sir).unwrap();
        let q_hi = solve_busy_probability(n, hi, &sir).unwrap();
        prop_assert!((0.0..=1.0).contains(&q_lo));
        prop_assert!((0.0..=1.0).contains(&q_hi));
        prop_assert!(q_lo <= q_hi + 1e-12);
        prop_assert!(q_lo >= (n as f64 * lo).min(1.0) - 1e-12);
    }

    #[test]
    fn success_probability_decreases_with_load(sir in sir(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let p_lo = success_probability(lo, &sir).unwrap();
        let p_hi = success_probability(hi, &sir).unwrap();
        prop_assert!(p_hi <= p_lo);
        prop_assert!(p_hi > 0.0 && p_lo <= 1.0);
    }

    #[test]
    fn delay_finite_exactly_below_threshold(sir in sir(), n in 1u32..100, xi0 in 1e-6f64..0.5) {
        let s = sir.sinc_delta();
        let load = n as f64 * xi0 * (s + sir.theta_delta()) / s;
        prop_assume!((load - 1.0).abs() > 1e-9);
        match mean_delay(n, xi0, &sir).unwrap() {
            DelayResult::Finite(d) => {
                prop_assert!(load < 1.0);
                prop_assert!(d >= 1.0 && d.is_finite());
            }
            DelayResult::Unstable => prop_assert!(load > 1.0),
        }
    }

    #[test]
    fn toroidal_distance_symmetric_and_bounded(
        w in 1.0f64..1e4, h in 1.0f64..1e4,
        ax in 0.0f64..1.0, ay in 0.0f64..1.0, bx in 0.0f64..1.0, by in 0.0f64..1.0,
    ) {
        let win = Window::new(w, h, Metric::Toroidal).unwrap();
        let a = Point::new(ax * w, ay * h);
        let b = Point::new(bx * w, by * h);
        prop_assert_eq!(win.distance(a, b), win.distance(b, a));
        prop_assert!(win.distance(a, b) <= 0.5 * (w * w + h * h).sqrt() + 1e-9);
        prop_assert_eq!(win.distance(a, a), 0.0);
    }

    #[test]
    fn rate_cdf_monotone_and_bounded(dist in rate_law(), a in -1.0f64..3.0, b in -1.0f64..3.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(dist.cdf(lo) <= dist.cdf(hi));
        prop_assert!((0.0..=1.0).contains(&dist.cdf(lo)));
        prop_assert_eq!(dist.cdf(-1e-12), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nearest_index_equals_brute_force(
        metric in metric(), seed in any::<u64>(), intensity in 1e-4f64..5e-2,
        queries in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..50),
    ) {
        let window = Window::new(120.0, 80.0, metric).unwrap();
        let bss = sample_ppp(intensity, &window, seed).unwrap();
        prop_assume!(!bss.is_empty());
        let index = NearestIndex::new(&bss.points, &window).unwrap();
        for (x, y) in queries {
            let q = Point::new(x * 120.0, y * 80.0);
            let (got, d2) = index.nearest(q);
            let best = bss.points.iter().map(|&b| window.distance_squared(q, b)).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(window.distance_squared(q, bss.points[got]), best);
            prop_assert!((d2 - best).abs() <= 1e-9 * best.max(1.0));
        }
    }

    #[test]
    fn unstable_probability_in_unit_interval(
        sir in sir(), dist in rate_law(), ratio in 0.5f64..20.0, s in 1.0f64..20.0, clustered in any::<bool>(),
    ) {
        let lambda_b = 1e-4;
        let mut params = NetworkParameters::new(lambda_b, ratio * lambda_b, sir.theta(), sir.alpha()).unwrap();
        let model = if clustered {
            let pcp = PcpParams::new(ratio * lambda_b / 3.0, 3.0 / 100.0, 1.0 / std::f64::consts::PI.sqrt() * 10.0).unwrap();
            params = params.with_pcp(pcp).unwrap();
            PopulationModel::Pcp
        } else {
            PopulationModel::Ppp
        };
        let p = unstable_probability(&dist, model, &params, s / lambda_b, DEFAULT_SERIES_TOL).unwrap();
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&p), "{p}");
    }

    #[test]
    fn point_csv_round_trips(seed in any::<u64>(), clustered in any::<bool>()) {
        let window = Window::square(60.0).unwrap();
        let pattern = if clustered {
            sample_pcp(&PcpParams::new(0.01, 0.2, 4.0).unwrap(), &window, seed).unwrap()
        } else {
            sample_ppp(0.02, &window, seed).unwrap()
        };
        let mut buf = Vec::new();
        pattern.write_csv(&mut buf).unwrap();
        let back = PointPattern::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(&back.points, &pattern.points);
        if clustered && !pattern.is_empty() {
            prop_assert_eq!(&back.cluster_of, &pattern.cluster_of);
        }
    }

    #[test]
    fn sweep_csv_round_trips(
        rows in prop::collection::vec(
            (any::<f64>().prop_filter("finite", |v| v.is_finite()),
             prop::option::of(any::<f64>().prop_filter("finite", |v| v.is_finite())),
             0.0f64..1e3, any::<bool>(), 0usize..3),
            0..30),
    ) {
        let metrics = ["delay", "tau[alpha=4]", "p_us[alpha=3;model=pcp]"];
        let table = SweepTable {
            rows: rows
                .into_iter()
                .map(|(value, est, stderr, sim, m)| SweepRow {
                    sweep_var: "xi0".into(),
                    value,
                    metric: metrics[m].into(),
                    estimate: est.map_or(Estimate::Unstable, Estimate::Value),
                    stderr,
                    source: if sim { Source::Simulated } else { Source::Analytic },
                })
                .collect(),
        };
        let back = SweepTable::parse(&table.to_csv()).unwrap();
        prop_assert_eq!(back, table);
    }
}
