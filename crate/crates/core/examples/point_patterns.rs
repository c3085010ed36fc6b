//! Sample BSs and clustered users, attach users to BSs both ways and write
//! the users as CSV.

use celltraffic::geometry::{associate, sample_pcp, sample_ppp, AssociationMode, PcpParams, Window};

fn main() -> celltraffic::Result<()> {
    let lambda_b = 1e-4;
    let window = Window::for_mean_count(lambda_b, 50.0)?;
    let bss = sample_ppp(lambda_b, &window, 1)?;
    let pcp = PcpParams::new(2e-4, 0.01, 15.0)?;
    let users = sample_pcp(&pcp, &window, 2)?;

    println!(
        "window {:.0} x {:.0} m, {} BSs, {} users in {} clusters (mean size {:.2})",
        window.width(),
        window.height(),
        bss.len(),
        users.len(),
        users.parents.as_ref().map_or(0, Vec::len),
        pcp.mean_cluster_size()
    );

    for mode in [AssociationMode::PerUser, AssociationMode::PerCluster] {
        let sizes = associate(&users, &bss, &window, mode)?.cell_sizes();
        let max = sizes.iter().max().copied().unwrap_or(0);
        let empty = sizes.iter().filter(|&&s| s == 0).count();
        println!("{mode:?}: largest cell {max} users, {empty} empty cells");
    }

    let path = std::env::temp_dir().join("celltraffic_users.csv");
    users.write_csv(std::fs::File::create(&path)?)?;
    println!("users written to {}", path.display());
    Ok(())
}
