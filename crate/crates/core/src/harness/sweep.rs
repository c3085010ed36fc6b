//! Analytic and Monte Carlo sweeps over a config grid.

use rayon::prelude::*;

use crate::analytics::{
    achievable_rate, approx_success_probability, mean_delay, pmf_users_pcp, pmf_users_ppp,
    service_rate, solve_busy_probability, success_probability, total_arrival_moments,
    unstable_probability, PopulationModel, DEFAULT_SERIES_TOL,
};
use crate::error::{Error, Result};
use crate::harness::config::{AnalysisKind, ExperimentConfig, Scenario, SimulationControls};
use crate::harness::table::{metric_name, Estimate, Source, SweepRow, SweepTable};
use crate::simulator::{
    estimate_total_arrival_variance, run_coupled, run_delay_oracle, run_sir_static,
};

type Metrics = Vec<(&'static str, Estimate)>;

/// Closed-form metrics of one scenario.
pub fn analytic_metrics(kind: AnalysisKind, s: &Scenario) -> Result<Metrics> {
    let v = Estimate::Value;
    Ok(match kind {
        AnalysisKind::Pmf => {
            let k = s.k()?;
            let area = s.s()?;
            let p = match s.model {
                PopulationModel::Ppp => pmf_users_ppp(k, s.lambda_u, area)?,
                PopulationModel::Pcp => pmf_users_pcp(k, &s.pcp()?, area, DEFAULT_SERIES_TOL)?,
            };
            vec![("pmf", v(p))]
        }
        AnalysisKind::Variance => {
            let m = total_arrival_moments(&s.rate()?, &s.network()?, s.model)?;
            vec![("mean_total", v(m.mean)), ("var_total", v(m.variance))]
        }
        AnalysisKind::Rate => {
            vec![("tau", v(achievable_rate(s.n()?, s.xi0()?, &s.network()?.sir())?))]
        }
        AnalysisKind::Delay => {
            vec![("delay", mean_delay(s.n()?, s.xi0()?, &s.network()?.sir())?.into())]
        }
        AnalysisKind::Unstable => {
            let p = unstable_probability(&s.rate()?, s.model, &s.network()?, s.s()?, DEFAULT_SERIES_TOL)?;
            vec![("p_us", v(p))]
        }
        AnalysisKind::Link => {
            let sir = s.network()?.sir();
            let (n, xi0) = (s.n()?, s.xi0()?);
            vec![
                ("busy_prob", v(solve_busy_probability(n, xi0, &sir)?)),
                ("success_prob", v(approx_success_probability(n, xi0, &sir)?)),
                ("service_rate", v(service_rate(n, xi0, &sir)?)),
                ("delay", mean_delay(n, xi0, &sir)?.into()),
            ]
        }
        AnalysisKind::Sir => {
            vec![("success_prob", v(success_probability(s.q()?, &s.network()?.sir())?))]
        }
        AnalysisKind::Network => {
            let params = s.network()?;
            let sir = params.sir();
            let n = users_per_cell(s)?;
            let xi0 = s.rate()?.mean();
            vec![
                ("busy_prob", v(solve_busy_probability(n, xi0, &sir)?)),
                ("success_prob", v(approx_success_probability(n, xi0, &sir)?)),
                ("delay", mean_delay(n, xi0, &sir)?.into()),
            ]
        }
    })
}

fn users_per_cell(s: &Scenario) -> Result<u32> {
    let r = (s.lambda_u / s.lambda_b).round();
    if r < 1.0 {
        return Err(Error::param("lambda_u", "fewer than one user per cell on average"));
    }
    Ok(r as u32)
}

/// One Monte Carlo replication: metric, estimate and the estimator's own
/// standard error when it has one.
pub fn simulated_metrics(
    kind: AnalysisKind,
    s: &Scenario,
    sim: &SimulationControls,
    seed: u64,
) -> Result<Vec<(&'static str, Estimate, f64)>> {
    Ok(match kind {
        AnalysisKind::Sir => {
            let est = run_sir_static(&s.network()?, s.q()?, sim.samples, seed, sim.field)?;
            vec![("success_prob", Estimate::Value(est.success), est.std_error)]
        }
        AnalysisKind::Delay => {
            let (n, xi0) = (s.n()?, s.xi0()?);
            let mu = service_rate(n, xi0, &s.network()?.sir())?;
            let est = run_delay_oracle(sim.queues, xi0, mu, sim.horizon, seed)?;
            vec![("delay", est.delay.into(), est.std_error)]
        }
        AnalysisKind::Variance => {
            let m = estimate_total_arrival_variance(&s.network()?, &s.rate()?, sim.samples, seed)?;
            vec![
                ("mean_total", Estimate::Value(m.mean), f64::NAN),
                ("var_total", Estimate::Value(m.variance), f64::NAN),
            ]
        }
        AnalysisKind::Network => {
            let r = run_coupled(&s.network()?, &s.rate()?, sim.horizon, sim.warmup(), seed)?;
            let opt = |v: Option<f64>| v.map_or(Estimate::Unstable, Estimate::Value);
            let mut out = vec![
                ("busy_prob", Estimate::Value(r.empirical_busy_prob), f64::NAN),
                ("success_prob", opt(r.empirical_success_prob), f64::NAN),
                ("delay", opt(r.per_user_mean_delay), f64::NAN),
            ];
            if let Some(u) = r.unstable_fraction {
                out.push(("unstable_fraction", Estimate::Value(u), f64::NAN));
            }
            out
        }
        other => {
            return Err(Error::param(
                "kind",
                format!("no simulator for `{other}` (use sir, delay, variance or network)"),
            ))
        }
    })
}

/// Grid points as (series label, grid value, scenario), grid-major.
fn points(config: &ExperimentConfig) -> Result<Vec<(String, f64, Scenario)>> {
    config.validate()?;
    let series = config.series_points()?;
    let mut out = Vec::with_capacity(series.len() * config.sweep.values.len());
    for &value in &config.sweep.values {
        for p in &series {
            out.push((p.label.clone(), value, config.at(p, value)?));
        }
    }
    Ok(out)
}

fn grid_context(config: &ExperimentConfig, label: &str, value: f64) -> String {
    let series = if label.is_empty() {
        String::new()
    } else {
        format!(" [{label}]")
    };
    format!("{}={value}{series}", config.sweep.var)
}

/// Closed-form values at every grid point.
pub fn run_analytic_sweep(config: &ExperimentConfig) -> Result<SweepTable> {
    let pts = points(config)?;
    let chunks: Vec<Vec<SweepRow>> = pts
        .par_iter()
        .map(|(label, value, scenario)| {
            let metrics = analytic_metrics(config.kind, scenario)
                .map_err(|e| e.context(grid_context(config, label, *value)))?;
            Ok(metrics
                .into_iter()
                .map(|(m, est)| SweepRow {
                    sweep_var: config.sweep.var.clone(),
                    value: *value,
                    metric: metric_name(m, label),
                    estimate: est,
                    stderr: 0.0,
                    source: Source::Analytic,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(SweepTable {
        rows: chunks.into_iter().flatten().collect(),
    })
}

/// Monte Carlo estimates at every grid point. Replication `i` uses seed
/// `seed + i`; with several replications the standard error is that of the
/// replication mean, otherwise the estimator's own.
pub fn run_simulation_sweep(config: &ExperimentConfig) -> Result<SweepTable> {
    let pts = points(config)?;
    let sim = config.simulation;
    let chunks: Vec<Vec<SweepRow>> = pts
        .par_iter()
        .map(|(label, value, scenario)| {
            let ctx = |e: Error| e.context(grid_context(config, label, *value));
            let reps: Vec<_> = (0..sim.replications as u64)
                .map(|i| simulated_metrics(config.kind, scenario, &sim, sim.seed.wrapping_add(i)))
                .collect::<Result<_>>()
                .map_err(ctx)?;
            Ok(aggregate(&reps)
                .into_iter()
                .map(|(m, est, se)| SweepRow {
                    sweep_var: config.sweep.var.clone(),
                    value: *value,
                    metric: metric_name(m, label),
                    estimate: est,
                    stderr: se,
                    source: Source::Simulated,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(SweepTable {
        rows: chunks.into_iter().flatten().collect(),
    })
}

fn aggregate(reps: &[Vec<(&'static str, Estimate, f64)>]) -> Vec<(&'static str, Estimate, f64)> {
    let Some(first) = reps.first() else {
        return Vec::new();
    };
    if reps.len() == 1 {
        return first.clone();
    }
    first
        .iter()
        .map(|&(metric, _, _)| {
            let values: Vec<Estimate> = reps
                .iter()
                .filter_map(|r| r.iter().find(|m| m.0 == metric).map(|m| m.1))
                .collect();
            let finite: Vec<f64> = values.iter().filter_map(Estimate::value).collect();
            if finite.len() < values.len() || finite.is_empty() {
                return (metric, Estimate::Unstable, f64::NAN);
            }
            let n = finite.len() as f64;
            let mean = finite.iter().sum::<f64>() / n;
            let var = finite.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (metric, Estimate::Value(mean), (var / n).sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::parse_config;

    fn cfg(text: &str) -> ExperimentConfig {
        parse_config(text, "test").unwrap()
    }

    #[test]
    fn single_point_gives_one_row() {
        let c = cfg("[scenario]\nname=a\nkind=delay\n[traffic]\nn=20\n[sweep]\nvar=xi0\nvalues=0.005\n[simulation]\nseed=1\n");
        let t = run_analytic_sweep(&c).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!((t.rows[0].estimate.value().unwrap() - 49.3465).abs() < 1e-3);
    }

    #[test]
    fn delay_sweep_reports_unstable() {
        let c = cfg("[scenario]\nname=a\nkind=delay\n[traffic]\nn=20\n[sweep]\nvar=xi0\nvalues=0.005,0.02\n[series]\nalpha=3,4\n[simulation]\nseed=1\n");
        let t = run_analytic_sweep(&c).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.rows[1].metric, "delay[alpha=4]");
        assert_eq!(t.rows[3].estimate, Estimate::Unstable);
        assert!(t.to_csv().contains("unstable"));
    }

    #[test]
    fn errors_carry_grid_context() {
        let c = cfg("[scenario]\nname=a\nkind=rate\n[sweep]\nvar=xi0\nvalues=0.005\n[simulation]\nseed=1\n");
        let e = run_analytic_sweep(&c).unwrap_err().to_string();
        assert!(e.contains("xi0=0.005"), "{e}");
    }

    #[test]
    fn zero_rate_network_is_idle() {
        let c = cfg("[scenario]\nname=z\nkind=network\n[network]\nlambda_b=1e-4\nlambda_u=3e-4\n[traffic]\nrate=det:0\n[sweep]\nvar=alpha\nvalues=3,4\n[simulation]\nseed=2\nhorizon=2000\n");
        let t = run_simulation_sweep(&c).unwrap();
        for r in t.rows.iter().filter(|r| r.base_metric() == "busy_prob") {
            assert_eq!(r.estimate, Estimate::Value(0.0));
        }
    }

    #[test]
    fn replications_aggregate() {
        let reps = vec![
            vec![("x", Estimate::Value(1.0), 0.0)],
            vec![("x", Estimate::Value(3.0), 0.0)],
        ];
        let a = aggregate(&reps);
        assert_eq!(a[0].1, Estimate::Value(2.0));
        assert!((a[0].2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_has_no_simulator() {
        let c = cfg("[scenario]\nname=a\nkind=pmf\n[traffic]\ns=10\n[network]\nlambda_u=1\n[sweep]\nvar=k\nvalues=0,1\n[simulation]\nseed=1\n");
        assert!(run_simulation_sweep(&c).is_err());
        assert_eq!(run_analytic_sweep(&c).unwrap().rows.len(), 2);
    }
}
