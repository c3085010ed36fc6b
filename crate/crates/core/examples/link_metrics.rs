//! Busy probability, success probability, rate, service rate, delay and
//! stability thresholds of the typical cell.

use celltraffic::analytics::{
    achievable_rate, approx_success_probability, iterate_busy_probability, mean_delay,
    service_rate, solve_busy_probability, stability_thresholds, SirModel,
};

fn main() -> celltraffic::Result<()> {
    let sir = SirModel::new(10.0, 4.0)?;
    let n = 20;
    println!("θ = 10, α = 4, N = {n}, B0 = {:.5}", sir.branch_point(n));
    println!("{:>7} {:>8} {:>8} {:>8} {:>9} {:>10}", "ξ0", "q*", "Ps", "τ", "μ", "D");
    for xi0 in [0.001, 0.002, 0.004, 0.005, 0.006, 0.008, 0.01] {
        println!(
            "{xi0:>7} {:>8.5} {:>8.5} {:>8.5} {:>9.6} {:>10}",
            solve_busy_probability(n, xi0, &sir)?,
            approx_success_probability(n, xi0, &sir)?,
            achievable_rate(n, xi0, &sir)?,
            service_rate(n, xi0, &sir)?,
            mean_delay(n, xi0, &sir)?.to_string(),
        );
    }

    let it = iterate_busy_probability(n, 0.005, &sir, 1e-12)?;
    println!("fixed-point iteration: q = {:.10} after {} steps", it.q, it.iterations);

    let t = stability_thresholds(0.005, &sir, 100.0)?;
    println!("ξ0 = 0.005: finite delay for N < {:.2}, delay ≤ 100 slots for N < {:.2}", t.a1, t.a2);
    Ok(())
}
