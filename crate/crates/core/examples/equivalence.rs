//! Slab membrane versus its padded thin-scatterer replacement.

use std::f64::consts::PI;

use mtmm::membrane::verify_equivalence;
use mtmm::SlabMembrane;

fn main() -> mtmm::Result<()> {
    let m = SlabMembrane::new(2.0, 100.0)?;
    println!("lambda_nm,zeta,padding_phase,max_abs_diff");
    for lam in [250.0, 333.3, 400.0, 532.0, 800.0, 1064.0] {
        let k = 2.0 * PI / lam;
        println!(
            "{lam},{},{},{:e}",
            m.polarizability(k),
            m.padding_phase(k),
            verify_equivalence(&m, k)
        );
    }
    Ok(())
}
