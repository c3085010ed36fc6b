//! Closed forms checked against independent numerical routes and sampling.

use approx::assert_abs_diff_eq;

use celltraffic::analytics::{
    pmf_users_pcp, pmf_users_ppp, success_probability, total_arrival_moments, NetworkParameters,
    PopulationModel, SirModel, DEFAULT_SERIES_TOL,
};
use celltraffic::geometry::{
    associate, cell_area_density, estimate_cell_areas, nearest_distance_density, sample_pcp,
    sample_ppp, AssociationMode, Metric, NearestIndex, PcpParams, Point, Window,
};
use celltraffic::rng::rng_from_seed;
use celltraffic::traffic::ArrivalRateDistribution;
use rand::Rng;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// One-sample KS statistic against a continuous CDF.
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

const KS_CRITICAL_1PCT: f64 = 1.628;

#[test]
fn cell_area_density_moments_by_quadrature() {
    let lb = 2e-4;
    let m0 = simpson(|x| cell_area_density(x, lb).unwrap(), 0.0, 25.0 / lb, 100_000);
    let m1 = simpson(|x| x * cell_area_density(x, lb).unwrap(), 0.0, 25.0 / lb, 100_000);
    let m2 = simpson(|x| x * x * cell_area_density(x, lb).unwrap(), 0.0, 25.0 / lb, 100_000);
    assert_abs_diff_eq!(m0, 1.0, epsilon = 1e-8);
    assert_abs_diff_eq!(m1 * lb, 1.0, epsilon = 1e-8);
    assert_abs_diff_eq!(m2 * lb * lb, 4.5 / 3.5, epsilon = 1e-8);
}

#[test]
fn nearest_distance_density_mean_by_quadrature() {
    let lb = 1e-3;
    let mean = simpson(|l| l * nearest_distance_density(l, lb).unwrap(), 0.0, 300.0, 100_000);
    // mean of a Rayleigh nearest distance: 1/(2√λ)
    assert_abs_diff_eq!(mean, 0.5 / lb.sqrt(), epsilon = 1e-6);
}

#[test]
fn sampled_nearest_distances_pass_ks() {
    let lb = 1e-4;
    let window = Window::for_mean_count(lb, 100.0).unwrap();
    let center = window.center();
    let dists: Vec<f64> = (0..2_000)
        .map(|s| {
            let bss = sample_ppp(lb, &window, 10_000 + s).unwrap();
            bss.points
                .iter()
                .map(|&b| window.distance(center, b))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let n = dists.len() as f64;
    let d = ks_statistic(dists, |l| 1.0 - (-lb * std::f64::consts::PI * l * l).exp());
    assert!(d * n.sqrt() < KS_CRITICAL_1PCT, "KS {d}");
}

#[test]
fn ppp_counts_have_poisson_mean_and_variance() {
    let window = Window::square(100.0).unwrap();
    let counts: Vec<f64> = (0..4_000)
        .map(|s| sample_ppp(0.003, &window, s).unwrap().len() as f64)
        .collect();
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((mean - 30.0).abs() < 0.4, "{mean}");
    assert!((var - 30.0).abs() < 3.0, "{var}");
}

#[test]
fn pcp_counts_match_neyman_scott_moments() {
    let window = Window::square(40.0).unwrap();
    let pcp = PcpParams::new(0.01, 0.5, 2.0).unwrap();
    let m = pcp.mean_cluster_size();
    let counts: Vec<f64> = (0..4_000)
        .map(|s| sample_pcp(&pcp, &window, s).unwrap().len() as f64)
        .collect();
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let parents = 0.01 * window.area();
    assert!((mean - parents * m).abs() < 0.04 * parents * m, "{mean}");
    let expected_var = parents * (m + m * m);
    assert!((var - expected_var).abs() < 0.1 * expected_var, "{var} vs {expected_var}");
}

#[test]
fn daughters_stay_in_their_disc() {
    let window = Window::square(50.0).unwrap();
    let pcp = PcpParams::new(0.02, 0.3, 3.0).unwrap();
    let users = sample_pcp(&pcp, &window, 5).unwrap();
    let parents = users.parents.as_ref().unwrap();
    for (p, &c) in users.points.iter().zip(users.cluster_of.as_ref().unwrap()) {
        assert!(window.distance(*p, parents[c]) <= 3.0 + 1e-9);
    }
}

/// Compound Poisson by Panjer recursion: parents Poisson(λ), each with a
/// Poisson(m) number of daughters.
fn panjer_pmf(lambda: f64, m: f64, kmax: usize) -> Vec<f64> {
    let f: Vec<f64> = (0..=kmax)
        .scan(m.exp().recip(), |p, j| {
            let out = *p;
            *p *= m / (j + 1) as f64;
            Some(out)
        })
        .collect();
    let mut p = vec![0.0; kmax + 1];
    p[0] = (lambda * (f[0] - 1.0)).exp();
    for k in 1..=kmax {
        p[k] = lambda / k as f64 * (1..=k).map(|j| j as f64 * f[j] * p[k - j]).sum::<f64>();
    }
    p
}

#[test]
fn pcp_pmf_matches_panjer_recursion() {
    for (lp, lc, r, s) in [(0.289, 2.2, 1.0, 10.0), (0.1, 1.1, 1.5, 5.0), (2.0, 0.3, 0.5, 3.0)] {
        let pcp = PcpParams::new(lp, lc, r).unwrap();
        let reference = panjer_pmf(lp * s, pcp.mean_cluster_size(), 120);
        for (k, &want) in reference.iter().enumerate() {
            let got = pmf_users_pcp(k as u64, &pcp, s, DEFAULT_SERIES_TOL).unwrap();
            assert!((got - want).abs() < 1e-9, "k={k}: {got} vs {want}");
        }
    }
}

#[test]
fn ppp_pmf_matches_recurrence() {
    let mean: f64 = 12.5;
    let mut p = (-mean).exp();
    for k in 0..80u64 {
        let got = pmf_users_ppp(k, 2.5, 5.0).unwrap();
        assert!((got - p).abs() < 1e-12 * p.max(1e-300) + 1e-300, "k={k}");
        p *= mean / (k + 1) as f64;
    }
}

#[test]
fn success_probability_matches_laplace_quadrature() {
    // P(h r^-α > θ I) averaged over r with an independent thinned PPP of
    // interferers: E_r[exp(-λ q π r² θ^δ Γ(1+δ)Γ(1-δ))] with r Rayleigh.
    for (alpha, theta, q) in [(4.0, 10.0, 0.5), (3.0, 2.0, 0.3), (2.5, 0.5, 1.0)] {
        let sir = SirModel::new(theta, alpha).unwrap();
        let delta: f64 = 2.0 / alpha;
        let c = std::f64::consts::PI * delta / (std::f64::consts::PI * delta).sin();
        let lb: f64 = 1.0;
        let integrand = |r: f64| {
            let pdf = nearest_distance_density(r, lb).unwrap();
            let laplace = (-lb * q * std::f64::consts::PI * r * r * theta.powf(delta) * c).exp();
            pdf * laplace
        };
        let want = simpson(integrand, 0.0, 10.0, 200_000);
        let got = success_probability(q, &sir).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
}

#[test]
fn nearest_index_matches_brute_force() {
    let mut rng = rng_from_seed(77);
    for metric in [Metric::Toroidal, Metric::EuclideanTruncated] {
        let window = Window::new(300.0, 200.0, metric).unwrap();
        let bss = sample_ppp(0.002, &window, 3).unwrap();
        let index = NearestIndex::new(&bss.points, &window).unwrap();
        for _ in 0..5_000 {
            let q = Point::new(rng.random::<f64>() * 300.0, rng.random::<f64>() * 200.0);
            let brute = bss
                .points
                .iter()
                .map(|&b| window.distance_squared(q, b))
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert_eq!(index.nearest(q).0, brute.0);
        }
    }
}

#[test]
fn cell_areas_tile_the_window() {
    let window = Window::square(500.0).unwrap();
    let bss = sample_ppp(2e-4, &window, 9).unwrap();
    let areas = estimate_cell_areas(&bss, &window, 200_000, 1).unwrap();
    assert_abs_diff_eq!(areas.iter().sum::<f64>(), window.area(), epsilon = 1e-6);
}

#[test]
fn association_covers_every_user_once() {
    let window = Window::square(400.0).unwrap();
    let bss = sample_ppp(1e-4, &window, 1).unwrap();
    let users = sample_pcp(&PcpParams::new(2e-4, 0.05, 10.0).unwrap(), &window, 2).unwrap();
    for mode in [AssociationMode::PerUser, AssociationMode::PerCluster] {
        let map = associate(&users, &bss, &window, mode).unwrap();
        assert_eq!(map.cell_sizes().iter().sum::<usize>(), users.len());
        for (b, members) in map.cell_members.iter().enumerate() {
            for &u in members {
                assert_eq!(map.serving_bs[u], b);
            }
        }
    }
}

#[test]
fn pcp_variance_excess_equals_cluster_term() {
    let dist = ArrivalRateDistribution::deterministic(1.5).unwrap();
    let base = NetworkParameters::new(1e-5, 1e-4, 10.0, 4.0).unwrap();
    let pcp = PcpParams::new(1e-4 / (0.004 * std::f64::consts::PI * 400.0), 0.004, 20.0).unwrap();
    let clustered = base.with_pcp(pcp).unwrap();
    let v_ppp = total_arrival_moments(&dist, &base, PopulationModel::Ppp).unwrap().variance;
    let v_pcp = total_arrival_moments(&dist, &clustered, PopulationModel::Pcp).unwrap().variance;
    let expected = 1.5 * 1.5 * 10.0 * pcp.mean_cluster_size();
    assert!((v_pcp - v_ppp - expected).abs() < 1e-9 * expected);
    // PPP at ratio 10 and E[ξ] = 1.5: 2.25 (2/7 · 100 + 10)
    assert_abs_diff_eq!(v_ppp, 2.25 * (200.0 / 7.0 + 10.0), epsilon = 1e-9);
}
