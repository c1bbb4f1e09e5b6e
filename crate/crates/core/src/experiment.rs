//! Experiment configuration and the four table-producing commands behind
//! the `mtmm` binary.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::array::{Branch, MembraneArray, MembraneModel, RootSearch, DEFAULT_SAMPLES_PER_DECADE};
use crate::cavity::{CavityConfig, Parity, ResonanceRecord};
use crate::error::{Error, Result};
use crate::membrane::SlabMembrane;
use crate::optomech::{
    compare_numeric_analytic, extract_couplings, resonance_pair, CouplingOptions,
};
use crate::search::linspace;
use crate::tmm::{Element, StackLayout};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Transmissive,
    Couplings,
    FieldProfile,
}

impl Command {
    pub const ALL: [Command; 4] = [
        Command::Spectrum,
        Command::Transmissive,
        Command::Couplings,
        Command::FieldProfile,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Transmissive => "transmissive",
            Command::Couplings => "couplings",
            Command::FieldProfile => "field-profile",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown command `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembraneSection {
    pub n: f64,
    pub l_nm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySection {
    /// Number of membranes; 0 leaves the cavity empty.
    pub count: usize,
    /// Vacuum gap between adjacent membranes. Required for `count >= 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing_nm: Option<f64>,
    #[serde(default)]
    pub model: MembraneModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub length_nm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finesse: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror_zeta: Option<f64>,
    #[serde(default)]
    pub center_offset_nm: f64,
}

fn default_samples() -> usize {
    1001
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    pub fd_step_fraction: f64,
    pub root_tol: f64,
    pub degeneracy_eps: f64,
    pub root_samples_per_decade: usize,
}

impl Default for NumericsSection {
    fn default() -> Self {
        NumericsSection {
            fd_step_fraction: 1e-6,
            root_tol: 1e-9,
            degeneracy_eps: 1e-3,
            root_samples_per_decade: DEFAULT_SAMPLES_PER_DECADE,
        }
    }
}

/// Which field to sample in `field-profile`.
///
/// Without a cavity the array is driven at `lambda_nm`. With a cavity the
/// resonances within 1.5 free spectral ranges of `lambda_nm` are found and
/// one is picked by `resonance` (ordinal in that window), by `parity` or
/// `branch` among the two nearest, or else the nearest one.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldProfileSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<Parity>,
}

impl FieldProfileSection {
    fn is_empty(&self) -> bool {
        *self == FieldProfileSection::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub membrane: MembraneSection,
    pub array: ArraySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity: Option<CavitySection>,
    pub scan: ScanSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default, skip_serializing_if = "FieldProfileSection::is_empty")]
    pub field_profile: FieldProfileSection,
}

fn positive(path: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::config(
            path,
            format!("must be a finite number > 0, got {x}"),
        ))
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.membrane;
        if !(m.n.is_finite() && m.n >= 1.0) {
            return Err(Error::config(
                "membrane.n",
                format!("must be >= 1, got {}", m.n),
            ));
        }
        positive("membrane.l_nm", m.l_nm)?;
        match (self.array.count, self.array.spacing_nm) {
            (0 | 1, Some(d)) | (2.., Some(d)) => positive("array.spacing_nm", d)?,
            (2.., None) => {
                return Err(Error::config(
                    "array.spacing_nm",
                    "required when array.count >= 2",
                ))
            }
            _ => {}
        }
        if let Some(c) = &self.cavity {
            positive("cavity.length_nm", c.length_nm)?;
            match (c.finesse, c.mirror_zeta) {
                (Some(f), None) => {
                    if !(f.is_finite() && f > 1.0) {
                        return Err(Error::config(
                            "cavity.finesse",
                            format!("must be > 1, got {f}"),
                        ));
                    }
                }
                (None, Some(z)) => positive("cavity.mirror_zeta", z)?,
                _ => {
                    return Err(Error::config(
                        "cavity",
                        "give exactly one of `finesse` and `mirror_zeta`",
                    ))
                }
            }
            if !c.center_offset_nm.is_finite() {
                return Err(Error::config("cavity.center_offset_nm", "must be finite"));
            }
        }
        let s = &self.scan;
        positive("scan.lambda_min_nm", s.lambda_min_nm)?;
        positive("scan.lambda_max_nm", s.lambda_max_nm)?;
        if !(s.lambda_min_nm < s.lambda_max_nm) {
            return Err(Error::config(
                "scan",
                format!(
                    "lambda_min_nm {} must be below lambda_max_nm {}",
                    s.lambda_min_nm, s.lambda_max_nm
                ),
            ));
        }
        if s.samples < 2 {
            return Err(Error::config(
                "scan.samples",
                format!("must be >= 2, got {}", s.samples),
            ));
        }
        let n = &self.numerics;
        if !(n.fd_step_fraction > 0.0 && n.fd_step_fraction < crate::optomech::MAX_STEP_FRACTION) {
            return Err(Error::config(
                "numerics.fd_step_fraction",
                format!(
                    "must lie in (0, {}), got {}",
                    crate::optomech::MAX_STEP_FRACTION,
                    n.fd_step_fraction
                ),
            ));
        }
        positive("numerics.root_tol", n.root_tol)?;
        if !(n.degeneracy_eps.is_finite() && n.degeneracy_eps >= 0.0) {
            return Err(Error::config("numerics.degeneracy_eps", "must be >= 0"));
        }
        if n.root_samples_per_decade < 2 {
            return Err(Error::config(
                "numerics.root_samples_per_decade",
                "must be >= 2",
            ));
        }
        if let Some(l) = self.field_profile.lambda_nm {
            positive("field_profile.lambda_nm", l)?;
        }
        // surface geometry errors with the section they belong to
        self.cavity_config().map_err(|e| match e {
            Error::Geometry(msg) => Error::config("cavity", msg),
            other => other,
        })?;
        Ok(())
    }

    pub fn membrane(&self) -> Result<SlabMembrane> {
        SlabMembrane::new(self.membrane.n, self.membrane.l_nm)
    }

    /// The array, or `None` for `count = 0`.
    pub fn membrane_array(&self) -> Result<Option<MembraneArray>> {
        if self.array.count == 0 {
            return Ok(None);
        }
        // the spacing of a single membrane never enters
        let spacing = self.array.spacing_nm.unwrap_or(1.0);
        MembraneArray::new(
            self.membrane()?,
            self.array.count,
            spacing,
            self.array.model,
        )
        .map(Some)
    }

    fn require_array(&self) -> Result<MembraneArray> {
        self.membrane_array()?
            .ok_or_else(|| Error::config("array.count", "this command needs at least one membrane"))
    }

    pub fn cavity_config(&self) -> Result<Option<CavityConfig>> {
        let Some(c) = &self.cavity else {
            return Ok(None);
        };
        let array = self.membrane_array()?;
        let cav = match (c.finesse, c.mirror_zeta) {
            (Some(f), _) => CavityConfig::with_finesse(c.length_nm, f, array)?,
            (None, Some(z)) => CavityConfig::new(c.length_nm, z, array)?,
            (None, None) => {
                return Err(Error::config(
                    "cavity",
                    "give exactly one of `finesse` and `mirror_zeta`",
                ))
            }
        };
        cav.with_offset(c.center_offset_nm).map(Some)
    }

    fn require_cavity(&self) -> Result<CavityConfig> {
        self.cavity_config()?
            .ok_or_else(|| Error::config("cavity", "this command needs a cavity section"))
    }

    pub fn root_search(&self) -> RootSearch {
        RootSearch {
            samples_per_decade: self.numerics.root_samples_per_decade,
            bracket_tol: self.numerics.root_tol,
            degeneracy_eps: self.numerics.degeneracy_eps,
        }
    }

    pub fn coupling_options(&self) -> CouplingOptions {
        CouplingOptions {
            step_fraction: self.numerics.fd_step_fraction,
            ..CouplingOptions::default()
        }
    }
}

/// A table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Shortest decimal that round-trips, in exponent form outside
/// `[1e-5, 1e16)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// The table with its command and resolved configuration.
    pub fn to_json(&self, command: Command, config: &ExperimentConfig) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let record = json!({
            "schema_version": SCHEMA_VERSION,
            "command": command.as_str(),
            "config_echo": config.to_json_value(),
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&record).expect("record serializes");
        s.push('\n');
        s
    }
}

pub fn run(command: Command, config: &ExperimentConfig) -> Result<Table> {
    config.validate()?;
    match command {
        Command::Spectrum => cmd_spectrum(config),
        Command::Transmissive => cmd_transmissive(config),
        Command::Couplings => cmd_couplings(config),
        Command::FieldProfile => cmd_field_profile(config),
    }
}

/// `lambda_nm, T_full, T_thin_padded, abs_diff` on the uniform scan grid.
pub fn cmd_spectrum(config: &ExperimentConfig) -> Result<Table> {
    let a = config.require_array()?;
    let s = &config.scan;
    let full = a
        .with_model(MembraneModel::FullSlab)
        .transmittance_spectrum(s.lambda_min_nm, s.lambda_max_nm, s.samples)?;
    let thin = a
        .with_model(MembraneModel::ThinPadded)
        .transmittance_spectrum(s.lambda_min_nm, s.lambda_max_nm, s.samples)?;
    let mut t = Table::new(&["lambda_nm", "T_full", "T_thin_padded", "abs_diff"]);
    for ((lam, tf), (_, tt)) in full.into_iter().zip(thin) {
        t.push(vec![
            lam.into(),
            tf.into(),
            tt.into(),
            (tf - tt).abs().into(),
        ]);
    }
    Ok(t)
}

/// `lambda_nm, branch, zeta, degenerate` for every transmissive wavelength.
pub fn cmd_transmissive(config: &ExperimentConfig) -> Result<Table> {
    let a = config.require_array()?;
    let roots = a.find_transmissive_wavelengths(
        config.scan.lambda_min_nm,
        config.scan.lambda_max_nm,
        &config.root_search(),
    )?;
    let mut t = Table::new(&["lambda_nm", "branch", "zeta", "degenerate"]);
    for r in roots {
        t.push(vec![
            r.wavelength.into(),
            r.branch.to_string().into(),
            r.zeta_at.into(),
            r.degenerate.to_string().into(),
        ]);
    }
    Ok(t)
}

/// Numeric couplings at both resonances next to every transmissive
/// wavelength. Two-membrane rows carry the signed breathing coupling and
/// its analytic counterpart; other arrays report the collective coupling.
pub fn cmd_couplings(config: &ExperimentConfig) -> Result<Table> {
    let c = config.require_cavity()?;
    let a = config.require_array()?;
    let mut columns = vec![
        "lambda_nm",
        "branch",
        "parity",
        "g_num_over_g",
        "g_ana_over_g",
        "rel_dev",
    ];
    let per: Vec<String> = (1..=a.count).map(|j| format!("g{j}_over_g")).collect();
    columns.extend(per.iter().map(String::as_str));
    let mut t = Table::new(&columns);
    let per_cells = |norm: Option<&[f64]>| -> Vec<Cell> {
        (0..a.count)
            .map(|j| Cell::from(norm.map(|v| v[j])))
            .collect()
    };
    let (lo, hi) = (config.scan.lambda_min_nm, config.scan.lambda_max_nm);
    let options = config.coupling_options();

    if a.count == 2 {
        let cmp = compare_numeric_analytic(&c, lo, hi, &config.root_search(), &options)?;
        let mut rows: Vec<(f64, Vec<Cell>)> = Vec::new();
        for r in &cmp.rows {
            let mut row = vec![
                r.wavelength.into(),
                r.branch.to_string().into(),
                r.parity.to_string().into(),
                r.g_numeric.into(),
                r.g_analytic.into(),
                r.rel_dev.into(),
            ];
            row.extend(per_cells(Some(&r.couplings.normalized)));
            rows.push((r.wavelength, row));
        }
        for d in &cmp.degenerate {
            let mut row = vec![
                d.wavelength.into(),
                "degenerate".into(),
                d.parity.to_string().into(),
                d.g_numeric.into(),
                Cell::Empty,
                Cell::Empty,
            ];
            row.extend(per_cells(
                d.couplings.as_ref().map(|c| c.normalized.as_slice()),
            ));
            rows.push((d.wavelength, row));
        }
        // stable: keeps the plus-first order within a wavelength
        rows.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (_, row) in rows {
            t.push(row);
        }
        return Ok(t);
    }

    let roots = a.find_transmissive_wavelengths(lo, hi, &config.root_search())?;
    for root in roots {
        for r in resonance_pair(&c, 2.0 * PI / root.wavelength)? {
            let label = if root.degenerate {
                "degenerate"
            } else {
                "unclassified"
            };
            let (g, norm) = match extract_couplings(&c, &r, &options) {
                Ok(cr) => (Some(cr.g_collective / cr.g_reference), Some(cr.normalized)),
                Err(Error::StepDegenerate { .. }) if root.degenerate => (None, None),
                Err(e) => return Err(e),
            };
            let mut row = vec![
                root.wavelength.into(),
                label.into(),
                r.parity.to_string().into(),
                g.into(),
                Cell::Empty,
                Cell::Empty,
            ];
            row.extend(per_cells(norm.as_deref()));
            t.push(row);
        }
    }
    Ok(t)
}

/// Sample positions: at least 50 per local wavelength inside slabs, near
/// every interface and around the stack center, sparse in long gaps.
pub fn adaptive_positions(layout: &StackLayout, k: f64) -> Vec<f64> {
    const PER_WAVELENGTH: f64 = 50.0;
    const HALO_WAVELENGTHS: f64 = 5.0;
    const SPARSE: usize = 2000;
    let lambda = 2.0 * PI / k;
    let fine = lambda / PER_WAVELENGTH;
    let halo = HALO_WAVELENGTHS * lambda;
    let bounds = layout.boundaries();
    let extent = bounds[bounds.len() - 1];

    let mut xs = Vec::new();
    let uniform = |a: f64, b: f64, h: f64, xs: &mut Vec<f64>| {
        let n = ((b - a) / h).ceil().max(1.0) as usize;
        xs.extend(linspace(a, b, n + 1));
    };
    for (i, e) in layout.elements().iter().enumerate() {
        let (a, b) = (bounds[i], bounds[i + 1]);
        match *e {
            Element::Slab { index, .. } => uniform(a, b, fine / index, &mut xs),
            Element::Gap { .. } if b - a <= 4.0 * halo => uniform(a, b, fine, &mut xs),
            Element::Gap { .. } => {
                uniform(a, a + halo, fine, &mut xs);
                xs.extend(linspace(a + halo, b - halo, SPARSE));
                uniform(b - halo, b, fine, &mut xs);
            }
            Element::Scatterer { .. } | Element::Mirror { .. } => xs.push(a),
        }
    }
    let c = 0.5 * extent;
    uniform((c - halo).max(0.0), (c + halo).min(extent), fine, &mut xs);
    xs.retain(|x| (0.0..=extent).contains(x));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn select_resonance(
    c: &CavityConfig,
    sel: &FieldProfileSection,
    k0: f64,
    options: &CouplingOptions,
) -> Result<ResonanceRecord> {
    if let Some(i) = sel.resonance {
        let res = c.find_resonances(k0, 3.0 * c.free_spectral_range())?;
        let n = res.len();
        return res.into_iter().nth(i).ok_or_else(|| {
            Error::config(
                "field_profile.resonance",
                format!("index {i} out of range, window holds {n}"),
            )
        });
    }
    let pair = resonance_pair(c, k0)?;
    let mut picked: Vec<ResonanceRecord> = pair.clone();
    if let Some(p) = sel.parity {
        picked.retain(|r| r.parity == p);
    }
    if let Some(b) = sel.branch {
        if c.membrane_count() != 2 {
            return Err(Error::config(
                "field_profile.branch",
                "branch selection needs a two-membrane array",
            ));
        }
        let mut kept = Vec::new();
        for r in picked {
            if extract_couplings(c, &r, options)?.branch == b {
                kept.push(r);
            }
        }
        picked = kept;
    }
    if sel.parity.is_none() && sel.branch.is_none() {
        picked.sort_by(|a, b| (a.k_res - k0).abs().total_cmp(&(b.k_res - k0).abs()));
        picked.truncate(1);
    }
    match picked.len() {
        1 => Ok(picked[0]),
        n => Err(Error::config(
            "field_profile",
            format!(
                "selector matches {n} of the resonances nearest λ = {} nm",
                2.0 * PI / k0
            ),
        )),
    }
}

/// `position_nm, re, im, intensity` of the field for unit incident
/// amplitude, either in the cavity at a selected resonance or around the
/// bare array at `field_profile.lambda_nm`.
pub fn cmd_field_profile(config: &ExperimentConfig) -> Result<Table> {
    let sel = &config.field_profile;
    let lambda = sel
        .lambda_nm
        .ok_or_else(|| Error::config("field_profile.lambda_nm", "required for field-profile"))?;
    let k0 = 2.0 * PI / lambda;
    let (layout, k) = match config.cavity_config()? {
        Some(c) => {
            let r = select_resonance(&c, sel, k0, &config.coupling_options())?;
            (c.layout(r.k_res, &vec![0.0; c.membrane_count()])?, r.k_res)
        }
        None => {
            if sel.resonance.is_some() || sel.parity.is_some() || sel.branch.is_some() {
                return Err(Error::config(
                    "field_profile",
                    "resonance selectors need a cavity section",
                ));
            }
            let a = config.require_array()?;
            let margin = 2.0 * lambda;
            let mut stack = StackLayout::new().gap(margin);
            for e in a.layout(k0).elements() {
                stack.push(*e);
            }
            stack.push(Element::Gap { length: margin });
            (stack, k0)
        }
    };
    let positions = adaptive_positions(&layout, k);
    let samples = layout.field_profile(k, &positions)?;
    let mut t = Table::new(&["position_nm", "re", "im", "intensity"]);
    for s in samples {
        t.push(vec![
            s.position.into(),
            s.amplitude.re.into(),
            s.amplitude.im.into(),
            s.intensity.into(),
        ]);
    }
    Ok(t)
}
