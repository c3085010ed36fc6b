//! Monte Carlo success probability with independently active interferers,
//! for both interferer fields, against the closed form.

use celltraffic::analytics::{success_probability, NetworkParameters};
use celltraffic::simulator::{run_sir_static, InterfererField};

fn main() -> celltraffic::Result<()> {
    let params = NetworkParameters::new(1e-4, 1e-3, 10.0, 4.0)?;
    let sir = params.sir();
    println!("{:>4} {:>9} {:>18} {:>18}", "q", "closed", "independent PPP", "other BSs");
    for q in [0.2, 0.5, 1.0] {
        let ind = run_sir_static(&params, q, 200_000, 11, InterfererField::IndependentPpp)?;
        let oth = run_sir_static(&params, q, 200_000, 11, InterfererField::OtherBaseStations)?;
        println!(
            "{q:>4} {:>9.5} {:>10.5} ± {:.4} {:>10.5} ± {:.4}",
            success_probability(q, &sir)?,
            ind.success,
            ind.std_error,
            oth.success,
            oth.std_error
        );
    }
    Ok(())
}
