use rotorsim_core::model::*;

fn main() {
    for boundary in [Boundary::Periodic, Boundary::Open] {
        let params = ModelParams { boundary, ..ModelParams::default() };
        let spec = exact_spectrum(&params).unwrap();
        let m = spec.gap();
        println!("== boundary {boundary:?}: m_cont = {m:.6} ==");
        println!("E0 = {:.6}, E_peak = {:.6}", spec.eigenvalues[spec.ground_index], spec.eigenvalues[spec.peak_index]);
        for dt in [0.1, 0.2, 0.235, 0.3, 0.36, 0.4, 0.5, 0.6, 0.7, 0.8] {
            match theoretical_mass(&params, dt) {
                Ok(mt) => println!(
                    "  dt={dt:<5}: m_Tr = {:.5}, rel shift = {:+.4}",
                    mt,
                    (mt - m) / m
                ),
                Err(e) => println!("  dt={dt}: {e}"),
            }
        }
        let dt_grid: Vec<f64> = (4..=64).map(|i| i as f64 * 0.0125).collect();
        let n_grid: Vec<usize> = (5..=200).map(|i| i * 2).collect();
        let region = systematic_region(&params, &dt_grid, &n_grid).unwrap();
        for (level, dt_max, n_min) in &region.bounds {
            println!(
                "  level {:>4}%: dt_max = {:?}, n_min = {:?}",
                level * 100.0,
                dt_max,
                n_min
            );
        }
    }
    // reference values at the working point
    let params = ModelParams::default();
    let m235 = theoretical_mass(&params, 0.235).unwrap();
    println!("m_Tr(0.235) = {m235:.6} (reference mass for sweeps)");
    println!("bin(N=200) = {:.6}", 2.0 * std::f64::consts::PI / (0.235 * 200.0));
}
