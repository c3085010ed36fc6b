//! Probability that the typical queue is unstable as users get denser.

use celltraffic::analytics::{unstable_probability, NetworkParameters, PopulationModel, DEFAULT_SERIES_TOL};
use celltraffic::geometry::PcpParams;
use celltraffic::traffic::ArrivalRateDistribution;

fn main() -> celltraffic::Result<()> {
    let dist: ArrivalRateDistribution = "exp-mean:0.01".parse()?;
    let s = 10.0;
    let lambda_p = 1.0 / (1.1 * std::f64::consts::PI);
    println!("rate law {dist}, S = {s}");
    println!("{:>5} {:>10} {:>10}", "λu", "PPP", "PCP");
    for i in 1..=10 {
        let lambda_u = 0.3 * i as f64;
        let ppp = NetworkParameters::new(1e-5, lambda_u, 10.0, 4.0)?;
        let pcp = ppp.with_pcp(PcpParams::new(lambda_p, 1.1 * lambda_u, 1.0)?)?;
        println!(
            "{lambda_u:>5.1} {:>10.6} {:>10.6}",
            unstable_probability(&dist, PopulationModel::Ppp, &ppp, s, DEFAULT_SERIES_TOL)?,
            unstable_probability(&dist, PopulationModel::Pcp, &pcp, s, DEFAULT_SERIES_TOL)?
        );
    }
    Ok(())
}
