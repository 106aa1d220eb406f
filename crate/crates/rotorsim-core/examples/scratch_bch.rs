use rotorsim_core::model::*;

fn main() {
    let params = ModelParams::default();
    let m = exact_spectrum(&params).unwrap().gap();
    println!("m_cont = {m:.6}");
    println!("{:>6} {:>12} {:>12} {:>12} {:>14}", "dt", "eig_shift", "bch_shift", "|diff|", "diff/dt^3");
    for dt in [0.05, 0.1, 0.15, 0.2, 0.235, 0.3, 0.36, 0.4, 0.5, 0.6] {
        let m_eig = theoretical_mass(&params, dt).unwrap();
        let bch = bch_hamiltonian(&params, dt).unwrap();
        let m_bch = weighted_spectrum_of(&params, &bch).unwrap().gap();
        let d = (m_bch - m_eig).abs();
        println!(
            "{:>6} {:>12.5} {:>12.5} {:>12.3e} {:>14.4}",
            dt,
            (m_eig - m) / m,
            (m_bch - m) / m,
            d,
            d / dt.powi(3)
        );
    }
}
