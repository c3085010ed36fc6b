//! Voronoi cell areas by probe counting, against the gamma-type area law.

use celltraffic::geometry::{cell_area_density, estimate_cell_areas, sample_ppp, Window};

fn main() -> celltraffic::Result<()> {
    let lambda_b = 1e-4;
    let window = Window::for_mean_count(lambda_b, 200.0)?;
    let bss = sample_ppp(lambda_b, &window, 3)?;
    let areas = estimate_cell_areas(&bss, &window, 1_000_000, 4)?;
    let scale = bss.len() as f64 / window.area();

    let n = areas.len() as f64;
    let m1 = areas.iter().map(|a| a * scale).sum::<f64>() / n;
    let m2 = areas.iter().map(|a| (a * scale).powi(2)).sum::<f64>() / n;
    println!("{} cells: E[S]λ = {m1:.4} (1), E[S²]λ² = {m2:.4} (9/7 = {:.4})", areas.len(), 9.0 / 7.0);

    println!("{:>6} {:>10} {:>10}", "x·λ", "empirical", "density");
    let width = 0.25;
    for i in 0..12 {
        let lo = i as f64 * width;
        let hits = areas.iter().filter(|&&a| (lo..lo + width).contains(&(a * scale))).count();
        let mid = (lo + width / 2.0) / lambda_b;
        let density = cell_area_density(mid, lambda_b)? / lambda_b;
        println!("{:>6.3} {:>10.4} {:>10.4}", lo + width / 2.0, hits as f64 / n / width, density);
    }
    Ok(())
}
