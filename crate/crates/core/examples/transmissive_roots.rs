//! Unit-transmission wavelengths of two- and four-membrane arrays.

use mtmm::{MembraneArray, MembraneModel, RootSearch, SlabMembrane};

fn main() -> mtmm::Result<()> {
    let m = SlabMembrane::new(2.0, 100.0)?;
    for count in [2, 4] {
        let a = MembraneArray::new(m, count, 9000.0, MembraneModel::FullSlab)?;
        let roots = a.find_transmissive_wavelengths(380.0, 420.0, &RootSearch::default())?;
        println!("N = {count}: {} roots in [380, 420] nm", roots.len());
        for r in roots {
            let flag = if r.degenerate { " (degenerate)" } else { "" };
            println!(
                "  {:.6} nm  {}  zeta {:+.4}{flag}",
                r.wavelength, r.branch, r.zeta_at
            );
        }
    }
    Ok(())
}
