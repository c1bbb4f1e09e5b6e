//! Numerical optomechanical couplings against the two-scatterer prediction.

use mtmm::optomech::compare_numeric_analytic;
use mtmm::{CavityConfig, CouplingOptions, MembraneArray, MembraneModel, RootSearch, SlabMembrane};

fn main() -> mtmm::Result<()> {
    let a = MembraneArray::new(
        SlabMembrane::new(2.0, 100.0)?,
        2,
        9000.0,
        MembraneModel::FullSlab,
    )?;
    let c = CavityConfig::with_finesse(5.0e6, 3000.0, Some(a))?;
    let cmp = compare_numeric_analytic(
        &c,
        500.0,
        700.0,
        &RootSearch::default(),
        &CouplingOptions::default(),
    )?;
    println!("lambda_nm,branch,parity,g_num,g_ana,rel_dev,center_enhancement");
    for r in &cmp.rows {
        println!(
            "{:.6},{},{},{:.6},{:.6},{:.2e},{:.3}",
            r.wavelength,
            r.branch,
            r.parity,
            r.g_numeric,
            r.g_analytic,
            r.rel_dev,
            r.center_enhancement
        );
    }
    println!("max relative deviation {:.3e}", cmp.max_rel_dev());
    Ok(())
}
