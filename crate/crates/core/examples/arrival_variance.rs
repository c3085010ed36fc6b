//! Summed arrival rate of a typical cell: spatial Monte Carlo against the
//! closed-form mean and variance.

use celltraffic::analytics::{total_arrival_moments, NetworkParameters, PopulationModel};
use celltraffic::geometry::PcpParams;
use celltraffic::simulator::estimate_total_arrival_variance;
use celltraffic::traffic::ArrivalRateDistribution;

fn main() -> celltraffic::Result<()> {
    let lambda_b = 1e-5;
    let lambda_u = 1e-4;
    let dist = ArrivalRateDistribution::deterministic(1.5)?;
    let ppp = NetworkParameters::new(lambda_b, lambda_u, 10.0, 4.0)?;
    let lambda_c = 0.004;
    let r_c = 20.0;
    let lambda_p = lambda_u / (lambda_c * std::f64::consts::PI * r_c * r_c);
    let pcp = ppp.with_pcp(PcpParams::new(lambda_p, lambda_c, r_c)?)?;

    for (name, params, model) in [("PPP", ppp, PopulationModel::Ppp), ("PCP", pcp, PopulationModel::Pcp)] {
        let closed = total_arrival_moments(&dist, &params, model)?;
        let sim = estimate_total_arrival_variance(&params, &dist, 5_000, 8)?;
        println!(
            "{name}: mean {:.3} vs {:.3}, variance {:.2} vs {:.2}",
            sim.mean, closed.mean, sim.variance, closed.variance
        );
    }
    Ok(())
}
