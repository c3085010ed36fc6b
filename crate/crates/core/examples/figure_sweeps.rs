//! Run a canned figure config, then an analytic-vs-simulated comparison on a
//! small static-SIR grid.

use celltraffic::harness::{
    compare, parse_config, run_analytic_sweep, run_simulation_sweep, Figure, TolerancePolicy,
};

const SIR_GRID: &str = "
[scenario]
name = sir_check
kind = sir

[network]
lambda_b = 1e-4
lambda_u = 1e-3
theta = 10
alpha = 4

[sweep]
var = q
values = 0.2, 0.5, 1.0

[simulation]
seed = 3
samples = 200000
";

fn main() -> celltraffic::Result<()> {
    for config in Figure::Fig11.configs()? {
        let table = run_analytic_sweep(&config)?;
        println!("{}: {} rows, first lines:", config.name, table.rows.len());
        for line in table.to_csv().lines().take(4) {
            println!("  {line}");
        }
    }

    let config = parse_config(SIR_GRID, "inline")?;
    let analytic = run_analytic_sweep(&config)?;
    let simulated = run_simulation_sweep(&config)?;
    let policy: TolerancePolicy = "0.03".parse()?;
    let report = compare(&analytic, &simulated, &policy)?;
    print!("{}", report.to_csv());
    print!("{}", report.summary());
    Ok(())
}
