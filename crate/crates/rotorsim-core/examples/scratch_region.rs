use rotorsim_core::model::*;

fn main() {
    let params = ModelParams::default();
    let region =
        systematic_region(&params, &default_dt_grid(), &default_n_grid()).unwrap();
    println!("m_cont = {:.6}", region.m_cont);
    for (level, dt_max, n_min) in &region.bounds {
        println!("level {:>4}%: dt_max = {:?}, n_min = {:?}", level * 100.0, dt_max, n_min);
    }
}
