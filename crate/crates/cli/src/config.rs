//! Run configuration, read from TOML. Every section rejects unknown keys and
//! every value is checked before any computation starts.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use stark_cap::cap::{EpsilonSchedule, SolverConfig, StabilizeOptions, Window};
use stark_cap::distort::{ConeParams, DistortionField};
use stark_cap::grid::{FdOrder, Grid1D, PotentialSpec};
use stark_cap::Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSection,
    pub grid: GridSection,
    #[serde(default)]
    pub method: MethodSection,
    pub spectrum: Option<SpectrumSection>,
    pub cap: Option<CapSection>,
    pub distortion: Option<DistortionSection>,
    pub probe: Option<ProbeSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub potential: PotentialSpec,
    #[serde(default = "yes")]
    pub include_stark: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub a: f64,
    pub b: f64,
    pub m: usize,
    #[serde(default = "second_order")]
    pub fd_order: FdOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodSection {
    Dense,
    /// `sigma` is `[re, im]`. In sweeps `sigma` is ignored (each window is
    /// searched from its centre) and `k` is the first request size.
    Arnoldi {
        #[serde(default)]
        sigma: [f64; 2],
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_restarts")]
        max_restarts: usize,
        #[serde(default = "default_seed")]
        seed: u64,
    },
}

impl Default for MethodSection {
    fn default() -> Self {
        MethodSection::Arnoldi {
            sigma: [0.0, 0.0],
            k: default_k(),
            tol: default_tol(),
            max_restarts: default_restarts(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapSection {
    #[serde(default = "default_eps0")]
    pub eps0: f64,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_threshold")]
    pub speed_threshold: f64,
    #[serde(default)]
    pub accept_boundary: bool,
    /// Distance within which an estimate and a distorted eigenvalue pair up.
    #[serde(default = "default_match_tol")]
    pub match_tol: f64,
    pub window: Window,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistortionSection {
    pub k: f64,
    pub rho: f64,
    #[serde(default = "unit")]
    pub mollifier_radius: f64,
    /// θ = -iδ.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub eps: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
    pub window: Window,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_stem")]
    pub stem: String,
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default = "yes")]
    pub json: bool,
    #[serde(default = "yes")]
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            stem: default_stem(),
            csv: true,
            json: true,
            svg: true,
        }
    }
}

fn yes() -> bool {
    true
}
fn unit() -> f64 {
    1.0
}
fn second_order() -> FdOrder {
    FdOrder::Second
}
fn default_k() -> usize {
    6
}
fn default_tol() -> f64 {
    1e-9
}
fn default_restarts() -> usize {
    300
}
fn default_seed() -> u64 {
    0x5eed
}
fn default_eps0() -> f64 {
    EpsilonSchedule::default().eps0
}
fn default_ratio() -> f64 {
    EpsilonSchedule::default().ratio
}
fn default_count() -> usize {
    EpsilonSchedule::default().count
}
fn default_threshold() -> f64 {
    StabilizeOptions::default().speed_threshold
}
fn default_match_tol() -> f64 {
    1e-3
}
fn default_stem() -> String {
    "run".to_string()
}

/// A rejected configuration, with the dotted path of the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error at `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn error(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.into(),
        message: message.into(),
    }
}

/// Re-labels a parameter error from the core crate under a section prefix.
fn scoped(prefix: &str, e: stark_cap::Error) -> ConfigError {
    match e {
        stark_cap::Error::InvalidParameter { name, reason } => error(format!("{prefix}.{name}"), reason),
        other => error(prefix, other.to_string()),
    }
}

fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, ConfigError> {
    section
        .as_ref()
        .ok_or_else(|| error(name, "section is required for this command"))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| {
            let key = e
                .message()
                .split('`')
                .nth(1)
                .filter(|_| e.message().starts_with("unknown field"))
                .unwrap_or("<document>")
                .to_string();
            error(key, e.to_string().trim().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| error("<file>", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks the sections present; commands call the `require_*` helpers
    /// for the sections they need.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid()?;
        self.problem
            .potential
            .validate()
            .map_err(|e| scoped("problem.potential", e))?;
        match self.method {
            MethodSection::Dense => {}
            MethodSection::Arnoldi { sigma, k, tol, .. } => {
                if k == 0 {
                    return Err(error("method.k", "must be at least 1"));
                }
                if !(tol > 0.0 && tol.is_finite()) {
                    return Err(error("method.tol", format!("must be positive, got {tol}")));
                }
                if !sigma.iter().all(|s| s.is_finite()) {
                    return Err(error("method.sigma", "must be finite"));
                }
            }
        }
        if let Some(s) = &self.spectrum {
            if !(s.eps >= 0.0 && s.eps.is_finite()) {
                return Err(error("spectrum.eps", format!("must be finite and >= 0, got {}", s.eps)));
            }
        }
        if let Some(cap) = &self.cap {
            self.schedule_of(cap)?;
            cap.window.validate().map_err(|e| scoped("cap.window", e))?;
            self.stabilize_of(cap).validate().map_err(|e| scoped("cap", e))?;
            if !(cap.match_tol > 0.0 && cap.match_tol.is_finite()) {
                return Err(error(
                    "cap.match_tol",
                    format!("must be positive, got {}", cap.match_tol),
                ));
            }
        }
        if let Some(d) = &self.distortion {
            ConeParams::new(d.k, d.rho, d.mollifier_radius).map_err(|e| scoped("distortion", e))?;
            if !(d.delta > 0.0 && d.delta.is_finite()) {
                return Err(error("distortion.delta", format!("must be positive, got {}", d.delta)));
            }
        }
        if let Some(p) = &self.probe {
            if p.eps.is_empty() || !p.eps.iter().all(|e| *e >= 0.0 && e.is_finite()) {
                return Err(error("probe.eps", "needs at least one finite value >= 0"));
            }
            if p.nx == 0 || p.ny == 0 {
                return Err(error("probe.nx", "lattice needs nx, ny >= 1"));
            }
            p.window.validate().map_err(|e| scoped("probe.window", e))?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid1D, ConfigError> {
        Grid1D::new(self.grid.a, self.grid.b, self.grid.m).map_err(|e| scoped("grid", e))
    }

    fn schedule_of(&self, cap: &CapSection) -> Result<EpsilonSchedule, ConfigError> {
        EpsilonSchedule::new(cap.eps0, cap.ratio, cap.count).map_err(|e| scoped("cap", e))
    }

    fn stabilize_of(&self, cap: &CapSection) -> StabilizeOptions {
        StabilizeOptions {
            speed_threshold: cap.speed_threshold,
            accept_boundary: cap.accept_boundary,
        }
    }

    pub fn require_spectrum(&self) -> Result<&SpectrumSection, ConfigError> {
        require(&self.spectrum, "spectrum")
    }

    pub fn require_cap(&self) -> Result<(&CapSection, EpsilonSchedule, StabilizeOptions), ConfigError> {
        let cap = require(&self.cap, "cap")?;
        Ok((cap, self.schedule_of(cap)?, self.stabilize_of(cap)))
    }

    pub fn require_distortion(&self) -> Result<(DistortionField, Complex64), ConfigError> {
        let d = require(&self.distortion, "distortion")?;
        Ok(self.distortion_of(d))
    }

    pub fn optional_distortion(&self) -> Option<(DistortionField, Complex64)> {
        self.distortion.as_ref().map(|d| self.distortion_of(d))
    }

    fn distortion_of(&self, d: &DistortionSection) -> (DistortionField, Complex64) {
        let params = ConeParams {
            k: d.k,
            rho: d.rho,
            mollifier_radius: d.mollifier_radius,
        };
        (DistortionField::new(params), Complex64::new(0.0, -d.delta))
    }

    pub fn require_probe(&self) -> Result<&ProbeSection, ConfigError> {
        require(&self.probe, "probe")
    }

    pub fn solver(&self) -> SolverConfig {
        match self.method {
            MethodSection::Dense => SolverConfig::Dense,
            MethodSection::Arnoldi {
                k,
                tol,
                max_restarts,
                seed,
                ..
            } => SolverConfig::Arnoldi {
                tol,
                max_restarts,
                seed,
                initial_k: k,
            },
        }
    }

    /// SHA-256 of the canonical JSON form, in hex.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[problem]
potential = { kind = "gaussian_well", depth = 2.0, width = 1.0, center = 0.0 }

[grid]
a = -40.0
b = 15.0
m = 1000

[cap]
window = { re_min = -2.0, re_max = 1.0, im_min = -0.45, im_max = 0.0 }
"#;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::from_toml(BASE).unwrap();
        assert!(c.problem.include_stark);
        assert_eq!(c.grid.fd_order, FdOrder::Second);
        let (cap, schedule, stab) = c.require_cap().unwrap();
        assert_eq!(schedule, EpsilonSchedule::default());
        assert_eq!(stab, StabilizeOptions::default());
        assert_eq!(cap.match_tol, 1e-3);
        assert_eq!(c.output.stem, "run");
        assert!(matches!(c.solver(), SolverConfig::Arnoldi { initial_k: 6, .. }));
    }

    #[test]
    fn bad_values_name_their_key() {
        let cases = [
            (BASE.replace("[cap]", "[cap]\nratio = 1.5"), "cap.ratio"),
            (BASE.replace("m = 1000", "m = 2"), "grid.m"),
            (BASE.replace("width = 1.0", "width = -1.0"), "problem.potential.width"),
            (BASE.replace("im_min = -0.45", "im_min = 0.5"), "cap.window.im_min"),
            (
                format!("{BASE}\n[distortion]\nk = 1.0\nrho = 5.0\ndelta = 0.0\n"),
                "distortion.delta",
            ),
            (
                format!("{BASE}\n[distortion]\nk = 0.0\nrho = 5.0\ndelta = 0.3\n"),
                "distortion.k",
            ),
            (format!("{BASE}\n[spectrum]\neps = -1.0\n"), "spectrum.eps"),
            (format!("{BASE}\n[method]\nkind = \"arnoldi\"\nk = 0\n"), "method.k"),
        ];
        for (text, key) in cases {
            let e = RunConfig::from_toml(&text).unwrap_err();
            assert_eq!(e.key, key, "{e}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = RunConfig::from_toml(&BASE.replace("m = 1000", "m = 1000\nmm = 3")).unwrap_err();
        assert_eq!(e.key, "mm");
        let e = RunConfig::from_toml(&format!("{BASE}\n[extras]\nx = 1\n")).unwrap_err();
        assert_eq!(e.key, "extras");
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::from_toml(BASE).unwrap();
        let b = RunConfig::from_toml(&BASE.replace("m = 1000", "m = 1001")).unwrap();
        assert_eq!(a.hash(), RunConfig::from_toml(BASE).unwrap().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
