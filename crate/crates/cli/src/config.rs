//! Run configurations. Each subcommand resolves its configuration as
//! defaults, then an optional JSON file, then command-line flags.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// Overlays `flags` (unset flags serialize to null and are skipped) on the
/// optional config file and the defaults of `C`.
pub fn resolve<C, F>(file: Option<&Path>, flags: &F) -> Result<C, CliError>
where
    C: Default + Serialize + DeserializeOwned,
    F: Serialize,
{
    let mut base = serde_json::to_value(C::default()).expect("defaults serialize");
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let v: Value =
            serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        overlay(&mut base, v);
    }
    let f = serde_json::to_value(flags).expect("flags serialize");
    overlay(&mut base, f);
    serde_json::from_value(base).map_err(|e| CliError::Validation(format!("configuration: {e}")))
}

fn overlay(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                if !v.is_null() {
                    b.insert(k, v);
                }
            }
        }
        (b, t) => *b = t,
    }
}

pub fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{name} must be positive, got {x}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KwongConfig {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    /// Bisection tolerance on `w(0)`.
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl Default for KwongConfig {
    fn default() -> Self {
        KwongConfig { n: 256, l: 16.0, tol: 1e-12, out: None, report: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsiConfig {
    /// `1`, `2`, `aniso`, `I`, `3`, `4`, `5` or `all`.
    pub which: String,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub kwong_tol: f64,
    pub out_dir: PathBuf,
}

impl Default for PsiConfig {
    fn default() -> Self {
        PsiConfig { which: "all".into(), lambda: 0.8, n: 256, l: 16.0, kwong_tol: 1e-12, out_dir: PathBuf::from(".") }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub kwong_tol: f64,
    pub report: Option<PathBuf>,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig { lambda: 0.8, n: 256, l: 16.0, kwong_tol: 1e-12, report: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimizeConfig {
    pub a: Option<f64>,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    /// `physical` or `rescaled`.
    pub frame: String,
    pub n: usize,
    /// Half-width; defaults to 16 in the rescaled frame and 6 in the physical one.
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub dt: f64,
    /// Residual tolerance.
    pub tol: f64,
    pub tol_energy: f64,
    pub max_steps: usize,
    /// `gaussian`, `kwong-seeded` or a field file path.
    pub init: String,
    pub newton_switch: f64,
    pub max_newton: usize,
    pub kwong_tol: f64,
    /// Rescaled grid of the Townes profile used for `a*` and seeding.
    pub profile_n: usize,
    #[serde(rename = "profile_L")]
    pub profile_l: f64,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        MinimizeConfig {
            a: None,
            lambda: 0.8,
            omega: 0.0,
            frame: "rescaled".into(),
            n: 256,
            l: None,
            dt: 1e-3,
            tol: 1e-9,
            tol_energy: 1e-12,
            max_steps: 2_000_000,
            init: "kwong-seeded".into(),
            newton_switch: 1e-2,
            max_newton: 40,
            kwong_tol: 1e-12,
            profile_n: 256,
            profile_l: 16.0,
            out: None,
            report: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub a: Option<f64>,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub kwong_tol: f64,
    /// Minimizer field; computed in the rescaled frame when absent.
    pub field: Option<PathBuf>,
    /// Frame of `field`.
    pub frame: String,
    /// Report of the run that produced `field`, cross-checked against the parameters.
    pub min_report: Option<PathBuf>,
    /// Directory written by `psi --which all`; rebuilt when absent.
    pub psi_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            a: None,
            lambda: 0.8,
            omega: 0.0,
            n: 256,
            l: 16.0,
            kwong_tol: 1e-12,
            field: None,
            frame: "rescaled".into(),
            min_report: None,
            psi_dir: None,
            out: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub a_list: Option<Vec<f64>>,
    /// Offsets `a* - a`, an alternative to `a_list`.
    pub da_list: Option<Vec<f64>>,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub kwong_tol: f64,
    pub workers: usize,
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            a_list: None,
            da_list: None,
            lambda: 0.8,
            omega: 0.0,
            n: 256,
            l: 16.0,
            kwong_tol: 1e-12,
            workers: 1,
            csv: None,
            report: None,
        }
    }
}
