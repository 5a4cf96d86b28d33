use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::audit::sized_half_width;
use crate::geodesic::{OrbitSense, RandomNullSpec};
use crate::geometry::{Family, GeneratorField, SpacetimeChart};
use crate::modewave::{MultiplierProfile, WavePacket};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Geodesic,
    Wave,
    Trapped,
    ScanTchi,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Geodesic => "geodesic",
            ScenarioKind::Wave => "wave",
            ScenarioKind::Trapped => "trapped",
            ScenarioKind::ScanTchi => "scan-tchi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartConfig {
    pub family: Family,
    #[serde(default = "unit")]
    pub mass: f64,
    #[serde(default)]
    pub spin: f64,
}

fn unit() -> f64 {
    1.0
}

impl ChartConfig {
    pub fn build(&self) -> Result<SpacetimeChart, HarnessError> {
        SpacetimeChart::new(self.family, self.mass, self.spin)
            .map_err(|e| HarnessError::constraint("chart", e.to_string()))
    }

    /// Length unit for spans and radii: `M`, or 1 on flat space.
    pub fn length_unit(&self) -> f64 {
        if self.family == Family::Minkowski {
            1.0
        } else {
            self.mass
        }
    }
}

/// Named generator in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorName {
    T,
    Phi,
    R,
    A,
    #[serde(rename = "T_chi")]
    TChi,
}

impl GeneratorName {
    pub fn build(&self, chart: &SpacetimeChart) -> Result<GeneratorField, HarnessError> {
        Ok(match self {
            GeneratorName::T => GeneratorField::Time,
            GeneratorName::Phi => GeneratorField::Rotation,
            GeneratorName::R => GeneratorField::Radial,
            GeneratorName::A => GeneratorField::photon_sphere(chart.mass()),
            GeneratorName::TChi => GeneratorField::corotating(chart)
                .map_err(|e| HarnessError::constraint("geodesic.generators", e.to_string()))?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeodesicPreset {
    /// Equatorial circular photon orbit at `r = 3M`.
    PhotonOrbit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicConfig {
    #[serde(default)]
    pub preset: Option<GeodesicPreset>,
    /// Explicit start `(t, r, theta, phi)`.
    #[serde(default)]
    pub position: Option<[f64; 4]>,
    /// Spatial direction `(v^r, v^theta, v^phi)`.
    #[serde(default)]
    pub direction: Option<[f64; 3]>,
    /// Random batch drawn with the scenario seed.
    #[serde(default)]
    pub random: Option<RandomBatch>,
    /// Affine span in units of `M`.
    #[serde(default = "default_span")]
    pub span: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub sample_spacing: Option<f64>,
    #[serde(default = "default_generators")]
    pub generators: Vec<GeneratorName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomBatch {
    pub count: usize,
    pub r_lo: f64,
    pub r_hi: f64,
    #[serde(default)]
    pub min_azimuthal: f64,
}

fn default_span() -> f64 {
    200.0
}
fn default_tol() -> f64 {
    1e-10
}
fn default_generators() -> Vec<GeneratorName> {
    vec![GeneratorName::T, GeneratorName::Phi]
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        GeodesicConfig {
            preset: None,
            position: None,
            direction: None,
            random: None,
            span: default_span(),
            tol: default_tol(),
            sample_spacing: None,
            generators: default_generators(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveConfig {
    #[serde(default)]
    pub spin: u8,
    /// One job per multipole.
    pub modes: Vec<u32>,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "unit")]
    pub bump_width: f64,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    #[serde(default = "default_courant")]
    pub courant: f64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    /// Grid is `[-half_width, half_width]`; sized from the packet when absent.
    #[serde(default)]
    pub half_width: Option<f64>,
    pub packet: WavePacket,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub multiplier: Option<MultiplierProfile>,
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    #[serde(default)]
    pub weighted: bool,
    /// Bound on `|balance_residual| / E(0)` checked after each run.
    #[serde(default = "default_balance_tol")]
    pub balance_tol: f64,
    /// Bound on `|morawetz_residual| / E(0)` when a multiplier is set.
    #[serde(default = "default_morawetz_tol")]
    pub morawetz_tol: f64,
}

fn default_spacing() -> f64 {
    0.05
}
fn default_courant() -> f64 {
    crate::modewave::DEFAULT_COURANT
}
fn default_t_final() -> f64 {
    200.0
}
fn default_stride() -> usize {
    10
}
fn default_balance_tol() -> f64 {
    1e-4
}
fn default_morawetz_tol() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrappedConfig {
    #[serde(default = "default_senses")]
    pub senses: [bool; 2],
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub seed_interval: Option<(f64, f64)>,
}

fn default_senses() -> [bool; 2] {
    [true, true]
}

impl TrappedConfig {
    pub fn selected(&self) -> Vec<OrbitSense> {
        let mut v = vec![];
        if self.senses[0] {
            v.push(OrbitSense::Prograde);
        }
        if self.senses[1] {
            v.push(OrbitSense::Retrograde);
        }
        v
    }
}

impl Default for TrappedConfig {
    fn default() -> Self {
        TrappedConfig { senses: default_senses(), eta: 0.0, seed_interval: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    /// Outer radius in units of `M`.
    #[serde(default = "default_scan_r")]
    pub r_hi: f64,
    #[serde(default = "default_nr")]
    pub nr: usize,
    #[serde(default = "default_nth")]
    pub nth: usize,
}

fn default_scan_r() -> f64 {
    60.0
}
fn default_nr() -> usize {
    600
}
fn default_nth() -> usize {
    61
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { r_hi: default_scan_r(), nr: default_nr(), nth: default_nth() }
    }
}

/// A complete scenario description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub chart: ChartConfig,
    #[serde(default)]
    pub geodesic: Option<GeodesicConfig>,
    #[serde(default)]
    pub wave: Option<WaveConfig>,
    #[serde(default)]
    pub trapped: Option<TrappedConfig>,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
}

fn line_col(raw: &str, offset: usize) -> (usize, usize) {
    let upto = &raw[..offset.min(raw.len())];
    let line = upto.matches('\n').count() + 1;
    let col = upto.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

/// Parses, fills defaults and checks every constraint.
pub fn validate_config(raw: &str) -> Result<ScenarioConfig, HarnessError> {
    if raw.trim().is_empty() {
        return Err(HarnessError::Parse { line: 1, column: 1, message: "configuration is empty".into() });
    }
    let mut cfg: ScenarioConfig = toml::from_str(raw).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(raw, s.start));
        HarnessError::Parse { line, column, message: e.message().to_string() }
    })?;
    cfg.normalize()?;
    Ok(cfg)
}

fn require(ok: bool, key: &str, constraint: impl Into<String>) -> Result<(), HarnessError> {
    if ok {
        Ok(())
    } else {
        Err(HarnessError::constraint(key, constraint))
    }
}

impl ScenarioConfig {
    /// Fills the section for `kind` with defaults when absent and validates.
    pub fn normalize(&mut self) -> Result<(), HarnessError> {
        if self.chart.family == Family::Minkowski {
            // flat space has no length scale; the mass entry is ignored
            self.chart.mass = 0.0;
        }
        let c = self.chart;
        require(c.mass.is_finite() && c.spin.is_finite(), "chart", "mass and spin must be finite")?;
        match c.family {
            Family::Minkowski => {
                require(c.spin == 0.0, "chart.spin", "flat space has no spin")?;
            }
            Family::Schwarzschild => {
                require(c.mass > 0.0, "chart.mass", "M > 0")?;
                require(c.spin == 0.0, "chart.spin", "a = 0 for schwarzschild; use kerr")?;
            }
            Family::Kerr => {
                require(c.mass > 0.0, "chart.mass", "M > 0")?;
                require(c.spin.abs() < c.mass, "chart.spin", format!("|a| < M (got a = {}, M = {})", c.spin, c.mass))?;
            }
        }
        let chart = c.build()?;
        match self.kind {
            ScenarioKind::Geodesic => {
                let g = self.geodesic.get_or_insert_with(GeodesicConfig::default);
                require(g.span.is_finite() && g.span > 0.0, "geodesic.span", "finite and > 0")?;
                require(g.tol > 0.0 && g.tol <= 1e-3, "geodesic.tol", "in (0, 1e-3]")?;
                if let Some(h) = g.sample_spacing {
                    require(h > 0.0 && h.is_finite(), "geodesic.sample_spacing", "finite and > 0")?;
                }
                let sources = g.preset.is_some() as u8 + g.position.is_some() as u8 + g.random.is_some() as u8;
                if sources == 0 {
                    g.preset = Some(GeodesicPreset::PhotonOrbit);
                }
                require(sources <= 1, "geodesic", "give exactly one of preset, position or random")?;
                require(
                    g.position.is_some() == g.direction.is_some(),
                    "geodesic.direction",
                    "position and direction go together",
                )?;
                if g.preset == Some(GeodesicPreset::PhotonOrbit) {
                    require(c.family == Family::Schwarzschild, "geodesic.preset", "photon-orbit needs schwarzschild")?;
                }
                if let Some(b) = g.random {
                    require(b.count >= 1, "geodesic.random.count", ">= 1")?;
                    require(
                        b.r_lo * c.length_unit() > chart.r_min() && b.r_hi >= b.r_lo,
                        "geodesic.random.r_lo",
                        "r_lo above the chart floor and r_lo <= r_hi",
                    )?;
                    require((0.0..1.0).contains(&b.min_azimuthal), "geodesic.random.min_azimuthal", "in [0, 1)")?;
                }
                for gen in &g.generators {
                    gen.build(&chart)?.check_family(&chart).map_err(|e| HarnessError::constraint("geodesic.generators", e.to_string()))?;
                }
            }
            ScenarioKind::Wave => {
                require(c.family == Family::Schwarzschild, "chart.family", "mode evolution runs on schwarzschild")?;
                let Some(w) = self.wave.as_mut() else {
                    return Err(HarnessError::constraint("wave", "section required for wave scenarios"));
                };
                require(w.spin <= 2, "wave.spin", "in {0, 1, 2}")?;
                require(!w.modes.is_empty(), "wave.modes", "at least one multipole")?;
                for &l in &w.modes {
                    require(l >= w.spin as u32, "wave.modes", format!("l >= s (l = {l}, s = {})", w.spin))?;
                }
                let mut sorted = w.modes.clone();
                sorted.sort_unstable();
                sorted.dedup();
                require(sorted.len() == w.modes.len(), "wave.modes", "no repeated multipoles")?;
                require(w.spacing > 0.0 && w.spacing.is_finite(), "wave.spacing", "finite and > 0")?;
                require(w.courant > 0.0 && w.courant <= 1.0, "wave.courant", "in (0, 1]")?;
                require(w.t_final > 0.0 && w.t_final.is_finite(), "wave.t_final", "finite and > 0")?;
                require(w.stride >= 1, "wave.stride", ">= 1")?;
                require(w.packet.width > 0.0 && w.packet.width.is_finite(), "wave.packet.width", "finite and > 0")?;
                require(
                    w.packet.center.is_finite() && w.packet.amplitude.is_finite() && w.packet.wavenumber.is_finite(),
                    "wave.packet",
                    "finite center, amplitude and wavenumber",
                )?;
                require(w.epsilon.is_finite(), "wave.epsilon", "finite")?;
                require(w.bump_width > 0.0, "wave.bump_width", "> 0")?;
                require(w.balance_tol > 0.0, "wave.balance_tol", "> 0")?;
                require(w.morawetz_tol > 0.0, "wave.morawetz_tol", "> 0")?;
                if let Some(m) = &w.multiplier {
                    m.check(c.mass).map_err(|e| HarnessError::constraint("wave.multiplier", e.to_string()))?;
                }
                let hw = *w.half_width.get_or_insert_with(|| sized_half_width(&w.packet, w.t_final));
                require(hw > 2.0 * w.spacing && hw.is_finite(), "wave.half_width", "finite and wider than two cells")?;
                if let Some((lo, hi)) = w.window {
                    require(-hw <= lo && lo < hi && hi <= hw, "wave.window", format!("lo < hi inside [-{hw}, {hw}]"))?;
                }
            }
            ScenarioKind::Trapped => {
                require(c.family != Family::Minkowski, "chart.family", "trapping needs a black-hole chart")?;
                let t = self.trapped.get_or_insert_with(TrappedConfig::default);
                require(t.eta >= 0.0 && t.eta.is_finite(), "trapped.eta", ">= 0")?;
                require(t.senses.iter().any(|&s| s), "trapped.senses", "select at least one branch")?;
            }
            ScenarioKind::ScanTchi => {
                require(c.family == Family::Kerr, "chart.family", "T_chi is defined on kerr")?;
                let s = self.scan.get_or_insert_with(ScanConfig::default);
                require(s.r_hi > 6.0, "scan.r_hi", "> 6 (beyond the blend window)")?;
                require(s.nr >= 2 && s.nth >= 1, "scan.nr", "nr >= 2 and nth >= 1")?;
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    /// Random batch spec with radii converted to chart units.
    pub fn random_spec(&self) -> Option<RandomNullSpec> {
        let g = self.geodesic.as_ref()?;
        let b = g.random?;
        let u = self.chart.length_unit();
        Some(RandomNullSpec {
            min_azimuthal: b.min_azimuthal,
            ..RandomNullSpec::new(b.count, self.seed, b.r_lo * u, b.r_hi * u)
        })
    }
}

/// Built-in scenario for each kind, used when no config file is given.
pub fn preset(kind: ScenarioKind) -> ScenarioConfig {
    let raw = match kind {
        ScenarioKind::Geodesic => {
            "kind = \"geodesic\"\n[chart]\nfamily = \"schwarzschild\"\n[geodesic]\npreset = \"photon-orbit\"\nspan = 20.0\nsample_spacing = 0.1\n"
        }
        ScenarioKind::Wave => {
            "kind = \"wave\"\n[chart]\nfamily = \"schwarzschild\"\n[wave]\nspin = 1\nmodes = [1]\nmultiplier = { kind = \"photon-sphere\" }\nwindow = [-20.0, 20.0]\n[wave.packet]\ncenter = 80.0\nwidth = 10.0\nwavenumber = 0.5\nmotion = \"ingoing\"\n"
        }
        ScenarioKind::Trapped => "kind = \"trapped\"\n[chart]\nfamily = \"kerr\"\nspin = 0.3\n",
        ScenarioKind::ScanTchi => "kind = \"scan-tchi\"\n[chart]\nfamily = \"kerr\"\nspin = 0.1\n",
    };
    validate_config(raw).expect("presets are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kerr_overspin_names_constraint() {
        let raw = "kind = \"geodesic\"\n[chart]\nfamily = \"kerr\"\nmass = 1.0\nspin = 1.2\n";
        match validate_config(raw) {
            Err(HarnessError::Constraint { key, constraint }) => {
                assert_eq!(key, "chart.spin");
                assert!(constraint.contains("|a| < M"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_file_is_parse_error() {
        assert!(matches!(validate_config("  \n"), Err(HarnessError::Parse { line: 1, column: 1, .. })));
    }

    #[test]
    fn syntax_error_has_position() {
        let raw = "kind = \"geodesic\"\n[chart]\nfamily = = 3\n";
        match validate_config(raw) {
            Err(HarnessError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minimal_geodesic_defaults() {
        let cfg = validate_config("kind = \"geodesic\"\n[chart]\nfamily = \"schwarzschild\"\n").unwrap();
        let g = cfg.geodesic.unwrap();
        assert_eq!(g.tol, 1e-10);
        assert_eq!(g.span, 200.0);
        assert_eq!(g.preset, Some(GeodesicPreset::PhotonOrbit));
    }

    #[test]
    fn unknown_key_rejected() {
        let raw = "kind = \"trapped\"\nsped = 3\n[chart]\nfamily = \"kerr\"\nspin = 0.2\n";
        assert!(matches!(validate_config(raw), Err(HarnessError::Parse { .. })));
    }

    #[test]
    fn presets_round_trip() {
        for kind in [ScenarioKind::Geodesic, ScenarioKind::Wave, ScenarioKind::Trapped, ScenarioKind::ScanTchi] {
            let cfg = preset(kind);
            let back = validate_config(&cfg.to_toml()).unwrap();
            assert_eq!(cfg, back);
        }
    }

    #[test]
    fn wave_rejects_l_below_spin() {
        let mut cfg = preset(ScenarioKind::Wave);
        cfg.wave.as_mut().unwrap().modes = vec![0];
        assert!(matches!(cfg.normalize(), Err(HarnessError::Constraint { key, .. }) if key == "wave.modes"));
    }
}
