//! JSON file formats and CSV emission.
//!
//! Game files: `{"kappa": r, "tau": r}` or
//! `{"uA": [16 reals], "uB": [16 reals], "prior": [4 reals]}` with index
//! order `(x_A, x_B, y_A, y_B)` row-major.
//!
//! Box files: `{"format": "full", "p": [16 reals]}` (same index order) or
//! `{"format": "canonical", "m": [m0,m1], "n": [n0,n1],
//!   "c": [c00,c01,c10,c11]}`.
//!
//! State files: `{"pure_a": r}` | `{"werner_p": r}` |
//! `{"rho": [[re,im] x 16]}` row-major. Strategy files add
//! `"alice": [[theta,phi],[theta,phi]]`, `"bob": [...]` and an optional
//! `"povm": {"alpha": r, "mu": r}`.

use std::path::Path;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::GisinPoint;
use crate::error::{Error, Result};
use crate::game::{GameParams, UtilityTable};
use crate::nsbox::{box_from_canonical, CanonicalBox, NsBox};
use crate::quantum::{MeasDirection, PovmParams, QuantumStrategy, TwoQubitState};

/// Formats with 9 significant digits, the precision used for all printed
/// floats so that logs stay diffable.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (8 - exp).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Malformed(format!("cannot read {}: {e}", path.display())))
}

// --- game files -------------------------------------------------------------

#[derive(Deserialize)]
#[serde(untagged)]
enum GameFile {
    Params { kappa: f64, tau: f64 },
    Table {
        #[serde(rename = "uA")]
        u_a: Vec<f64>,
        #[serde(rename = "uB")]
        u_b: Vec<f64>,
        prior: Vec<f64>,
    },
}

/// A utility table loaded from file, with the defining parameters when the
/// file used the parametric form.
#[derive(Debug, Clone)]
pub struct LoadedGame {
    pub table: UtilityTable,
    pub params: Option<GameParams>,
}

pub fn parse_game(text: &str) -> Result<LoadedGame> {
    let file: GameFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("game file: {e}")))?;
    match file {
        GameFile::Params { kappa, tau } => {
            let params = GameParams::new(kappa, tau)?;
            Ok(LoadedGame { table: UtilityTable::from_params(&params), params: Some(params) })
        }
        GameFile::Table { u_a, u_b, prior } => {
            let u_a: [f64; 16] = u_a
                .try_into()
                .map_err(|v: Vec<f64>| Error::Malformed(format!("uA needs 16 entries, got {}", v.len())))?;
            let u_b: [f64; 16] = u_b
                .try_into()
                .map_err(|v: Vec<f64>| Error::Malformed(format!("uB needs 16 entries, got {}", v.len())))?;
            let prior: [f64; 4] = prior
                .try_into()
                .map_err(|v: Vec<f64>| Error::Malformed(format!("prior needs 4 entries, got {}", v.len())))?;
            Ok(LoadedGame { table: UtilityTable::new(u_a, u_b, prior)?, params: None })
        }
    }
}

pub fn load_game(path: &Path) -> Result<LoadedGame> {
    parse_game(&read(path)?)
}

// --- box files ---------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "format")]
enum BoxFile {
    #[serde(rename = "full")]
    Full { p: Vec<f64> },
    #[serde(rename = "canonical")]
    Canonical { m: [f64; 2], n: [f64; 2], c: [f64; 4] },
}

pub fn parse_box(text: &str) -> Result<NsBox> {
    let file: BoxFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("box file: {e}")))?;
    match file {
        BoxFile::Full { p } => {
            let p: [f64; 16] = p
                .try_into()
                .map_err(|v: Vec<f64>| Error::Malformed(format!("p needs 16 entries, got {}", v.len())))?;
            NsBox::new(p)
        }
        BoxFile::Canonical { m, n, c } => {
            let c = CanonicalBox::new(m, n, [[c[0], c[1]], [c[2], c[3]]])?;
            Ok(box_from_canonical(&c))
        }
    }
}

pub fn load_box(path: &Path) -> Result<NsBox> {
    parse_box(&read(path)?)
}

/// Serializes a box in the full format.
pub fn box_to_json(b: &NsBox) -> String {
    serde_json::to_string_pretty(&BoxFile::Full { p: b.entries().to_vec() })
        .expect("box serialization cannot fail")
}

// --- state / strategy files ---------------------------------------------------

#[derive(Deserialize)]
struct PovmFile {
    alpha: f64,
    mu: f64,
}

#[derive(Deserialize)]
struct StrategyFile {
    pure_a: Option<f64>,
    werner_p: Option<f64>,
    rho: Option<Vec<[f64; 2]>>,
    alice: Option<[[f64; 2]; 2]>,
    bob: Option<[[f64; 2]; 2]>,
    povm: Option<PovmFile>,
}

fn state_from_file(f: &StrategyFile) -> Result<TwoQubitState> {
    let sources =
        f.pure_a.is_some() as u8 + f.werner_p.is_some() as u8 + f.rho.is_some() as u8;
    if sources != 1 {
        return Err(Error::Malformed(
            "state requires exactly one of pure_a, werner_p, rho".into(),
        ));
    }
    if let Some(a) = f.pure_a {
        return TwoQubitState::pure(a);
    }
    if let Some(p) = f.werner_p {
        return TwoQubitState::werner(p);
    }
    let rho = f.rho.as_ref().expect("checked above");
    if rho.len() != 16 {
        return Err(Error::Malformed(format!(
            "rho needs 16 [re,im] pairs, got {}",
            rho.len()
        )));
    }
    let mut m = Matrix4::zeros();
    for (k, [re, im]) in rho.iter().enumerate() {
        m[(k / 4, k % 4)] = Complex64::new(*re, *im);
    }
    TwoQubitState::from_density(m)
}

pub fn parse_state(text: &str) -> Result<TwoQubitState> {
    let file: StrategyFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("state file: {e}")))?;
    state_from_file(&file)
}

pub fn load_state(path: &Path) -> Result<TwoQubitState> {
    parse_state(&read(path)?)
}

fn dirs(angles: [[f64; 2]; 2]) -> Result<[MeasDirection; 2]> {
    Ok([
        MeasDirection::new(angles[0][0], angles[0][1])?,
        MeasDirection::new(angles[1][0], angles[1][1])?,
    ])
}

pub fn parse_strategy(text: &str) -> Result<QuantumStrategy> {
    let file: StrategyFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("strategy file: {e}")))?;
    let state = state_from_file(&file)?;
    let alice = file
        .alice
        .ok_or_else(|| Error::Malformed("strategy file needs alice angle pairs".into()))?;
    let bob = file
        .bob
        .ok_or_else(|| Error::Malformed("strategy file needs bob angle pairs".into()))?;
    let povm = match file.povm {
        Some(p) => Some(PovmParams::new(p.alpha, p.mu)?),
        None => None,
    };
    Ok(QuantumStrategy { state, alice: dirs(alice)?, bob: dirs(bob)?, povm })
}

pub fn load_strategy(path: &Path) -> Result<QuantumStrategy> {
    parse_strategy(&read(path)?)
}

// --- CSV ----------------------------------------------------------------------

/// Curve CSV with header `a,F_A,F_B`, values at 9 significant digits.
pub fn curve_to_csv(points: &[GisinPoint]) -> String {
    let mut out = String::from("a,F_A,F_B\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_sig9(p.a),
            fmt_sig9(p.f_a),
            fmt_sig9(p.f_b)
        ));
    }
    out
}
