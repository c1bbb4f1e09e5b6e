//! Resonances, linewidth and parity of an empty and a loaded cavity.

use std::f64::consts::PI;

use mtmm::{CavityConfig, MembraneArray, MembraneModel, SlabMembrane};

fn main() -> mtmm::Result<()> {
    let empty = CavityConfig::with_finesse(5.0e6, 3000.0, None)?;
    let k0 = 2.0 * PI / 600.0;
    let fsr = empty.free_spectral_range();
    let res = empty.find_resonances(k0, 3.0 * fsr)?;
    let width = empty.linewidth(res[0].k_res)?;
    println!(
        "empty: FSR {fsr:e} 1/nm, finesse {:.1} from linewidth",
        fsr / width
    );

    let a = MembraneArray::new(
        SlabMembrane::new(2.0, 100.0)?,
        2,
        9000.0,
        MembraneModel::FullSlab,
    )?;
    let loaded = CavityConfig::with_finesse(5.0e6, 3000.0, Some(a))?;
    for r in loaded.find_resonances(k0, 4.0 * fsr)? {
        println!(
            "  {:.9} nm  mode {}  {}  T {:.6}",
            r.wavelength(),
            r.mode_number,
            r.parity,
            r.peak_transmittance
        );
    }
    Ok(())
}
