//! Users in a cell of fixed area: PPP versus PCP at the same intensity.

use celltraffic::analytics::{pmf_users_pcp, pmf_users_ppp, DEFAULT_SERIES_TOL};
use celltraffic::geometry::PcpParams;

fn main() -> celltraffic::Result<()> {
    let s = 10.0;
    let lambda_u = 1.0;
    let lambda_p = 1.0 / (1.1 * std::f64::consts::PI);
    let pcp = PcpParams::new(lambda_p, 1.1 * lambda_u, 1.0)?;
    println!("S = {s}, λu = {lambda_u}, mean cluster size {:.3}", pcp.mean_cluster_size());
    println!("{:>3} {:>10} {:>10}", "k", "PPP", "PCP");
    for k in (0..=30).step_by(2) {
        println!(
            "{k:>3} {:>10.6} {:>10.6}",
            pmf_users_ppp(k, lambda_u, s)?,
            pmf_users_pcp(k, &pcp, s, DEFAULT_SERIES_TOL)?
        );
    }
    Ok(())
}
