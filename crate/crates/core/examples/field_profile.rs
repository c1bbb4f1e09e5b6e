//! Intensity along a loaded cavity at one resonance of each parity.

use std::f64::consts::PI;

use mtmm::optomech::resonance_pair;
use mtmm::{CavityConfig, MembraneArray, MembraneModel, SlabMembrane};

fn main() -> mtmm::Result<()> {
    let a = MembraneArray::new(
        SlabMembrane::new(2.0, 100.0)?,
        2,
        9000.0,
        MembraneModel::FullSlab,
    )?;
    let c = CavityConfig::with_finesse(5.0e6, 3000.0, Some(a))?;
    for r in resonance_pair(&c, 2.0 * PI / 602.714)? {
        let gaps = c.gap_mean_intensities(r.k_res)?;
        println!(
            "{:.9} nm {}: mean |E|^2 outer {:.3e}, between membranes {:.3e}, outer {:.3e}",
            r.wavelength(),
            r.parity,
            gaps[0],
            gaps[1],
            gaps[2]
        );
    }
    Ok(())
}
