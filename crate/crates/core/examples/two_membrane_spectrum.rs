//! Transmittance of a two-membrane array from both models.

use mtmm::{MembraneArray, MembraneModel, SlabMembrane};

fn main() -> mtmm::Result<()> {
    let full = MembraneArray::new(
        SlabMembrane::new(2.0, 100.0)?,
        2,
        9000.0,
        MembraneModel::FullSlab,
    )?;
    let thin = full.with_model(MembraneModel::ThinPadded);
    let a = full.transmittance_spectrum(200.0, 1000.0, 20001)?;
    let b = thin.transmittance_spectrum(200.0, 1000.0, 20001)?;
    let worst = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x.1 - y.1).abs())
        .fold(0.0, f64::max);
    let min_t = a.iter().map(|p| p.1).fold(1.0, f64::min);
    println!(
        "samples {}, min T {min_t:.4}, max |T_full - T_thin| {worst:e}",
        a.len()
    );
    println!("T(400 nm) = {}", full.transmittance(400.0)?);
    Ok(())
}
