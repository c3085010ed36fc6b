//! Full slotted network: BS activity follows the queues, interference is
//! computed from the BSs actually transmitting.

use celltraffic::analytics::{solve_busy_probability, NetworkParameters};
use celltraffic::simulator::{simulate_network, CoupledConfig, Network};
use celltraffic::traffic::ArrivalRateDistribution;

fn main() -> celltraffic::Result<()> {
    let params = NetworkParameters::new(1e-4, 5e-4, 10.0, 4.0)?;
    let dist = ArrivalRateDistribution::deterministic(0.005)?;
    let mut config = CoupledConfig::new(200_000, 21);
    config.mean_bs_count = 60.0;
    let network = Network::sample(&params, &dist, &config)?;
    let run = simulate_network(&network, &params.sir(), &config)?;

    println!(
        "{} BSs, {} users, horizon {} slots",
        network.bss.len(),
        network.users.len(),
        config.horizon
    );
    print!("{}", run.report);
    println!("mean-field busy probability q* = {:.5}", solve_busy_probability(5, 0.005, &params.sir())?);
    let conserved = run.queues.iter().all(|q| q.arrivals == q.departures + q.final_len);
    println!("packet conservation holds: {conserved}");
    Ok(())
}
