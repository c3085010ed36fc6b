//! Simulated Geo/Geo/1 queue against the closed-form mean delay.

use celltraffic::analytics::{geo_queue_delay, mean_delay, service_rate, SirModel};
use celltraffic::simulator::run_delay_oracle;

fn main() -> celltraffic::Result<()> {
    let sir = SirModel::new(10.0, 4.0)?;
    for (n, xi0) in [(20, 0.005), (10, 0.01), (5, 0.02), (40, 0.005)] {
        let mu = service_rate(n, xi0, &sir)?;
        let est = run_delay_oracle(1, xi0, mu, 2_000_000, 5)?;
        println!(
            "N = {n:>2}, ξ0 = {xi0}: μ = {mu:.5}, closed {} (Geo/Geo/1 {}), simulated {} ± {:.3}, drift {:.2e}",
            mean_delay(n, xi0, &sir)?,
            geo_queue_delay(xi0, mu),
            est.delay,
            est.std_error,
            est.max_drift
        );
    }
    Ok(())
}
