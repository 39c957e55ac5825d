//! JSON inputs: model, rates and initial state, plus the configuration digest.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gksl::RateSet;
use crate::hilbert::{BasisIndex, LevelConfig, LevelStructure, State, STATE_TOL};
use crate::operator::{c64, Operator, Vector};

/// Model file. Energies are optional as a group; when all three are absent
/// the default ladder of [`LevelStructure::with_default_energies`] is used.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub dims: Vec<usize>,
    #[serde(default)]
    pub energy_minus: Option<f64>,
    #[serde(default)]
    pub energy_plus: Option<f64>,
    #[serde(default)]
    pub energies: Option<Vec<f64>>,
}

impl ModelFile {
    pub fn levels(&self) -> Result<LevelStructure> {
        match (self.energy_minus, self.energy_plus, &self.energies) {
            (None, None, None) => LevelStructure::with_default_energies(&self.dims),
            (Some(em), Some(ep), Some(e)) => LevelStructure::new(&self.dims, em, ep, e),
            _ => Err(Error::Config(
                "energy_minus, energy_plus and energies must be given together".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RatesFile {
    Thermal {
        thermal_beta: f64,
    },
    Explicit(RateSet),
}

/// Where the rates come from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatesSpec {
    Thermal { beta: f64 },
    Explicit(RateSet),
}

impl RatesSpec {
    pub fn resolve(&self, levels: &LevelStructure) -> Result<RateSet> {
        let rates = match self {
            RatesSpec::Thermal { beta } => {
                if !beta.is_finite() {
                    return Err(Error::Rate(format!("thermal beta {beta} is not finite")));
                }
                RateSet::thermal(levels, *beta)
            }
            RatesSpec::Explicit(r) => r.clone(),
        };
        rates.validate(levels)?;
        Ok(rates)
    }
}

/// Initial-state file: a density matrix in the operator wire format, a ket,
/// or a canonical basis state.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum StateFile {
    Ket { ket: KetWire },
    Basis { basis: BasisSpec },
    Density(Operator),
}

#[derive(Clone, Debug, Deserialize)]
struct KetWire {
    re: Vec<f64>,
    #[serde(default)]
    im: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum BasisSpec {
    Named(String),
    Level { level: usize, index: usize },
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("cannot parse {}: {e}", path.display())))
}

pub fn load_model(path: &Path) -> Result<LevelStructure> {
    let text = read_text(path)?;
    parse::<ModelFile>(path, &text)?.levels()
}

pub fn parse_model(text: &str) -> Result<LevelStructure> {
    parse::<ModelFile>(Path::new("<model>"), text)?.levels()
}

pub fn load_rates(path: &Path) -> Result<RatesSpec> {
    let text = read_text(path)?;
    Ok(match parse::<RatesFile>(path, &text)? {
        RatesFile::Thermal { thermal_beta } => RatesSpec::Thermal { beta: thermal_beta },
        RatesFile::Explicit(r) => RatesSpec::Explicit(r),
    })
}

pub fn load_state(path: &Path, levels: &LevelStructure) -> Result<State> {
    let text = read_text(path)?;
    parse_state(&text, levels).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_state(text: &str, levels: &LevelStructure) -> Result<State> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("cannot parse state: {e}")))?;
    let d = levels.total_dim();
    match file {
        StateFile::Density(rho) => {
            if rho.rows() != d || rho.cols() != d {
                return Err(Error::Shape {
                    expected: format!("{d}x{d}"),
                    found: format!("{}x{}", rho.rows(), rho.cols()),
                });
            }
            State::new(rho, STATE_TOL)
        }
        StateFile::Ket { ket } => {
            let im = ket.im.unwrap_or_else(|| vec![0.0; ket.re.len()]);
            if ket.re.len() != d || im.len() != d {
                return Err(Error::Shape {
                    expected: format!("ket of length {d}"),
                    found: format!("{} real and {} imaginary parts", ket.re.len(), im.len()),
                });
            }
            let psi = Vector::from_fn(d, |i| c64::new(ket.re[i], im[i]));
            State::pure(&psi)
        }
        StateFile::Basis { basis } => {
            let index = match basis {
                BasisSpec::Named(s) if s == "minus" || s == "-" => BasisIndex::Minus,
                BasisSpec::Named(s) if s == "plus" || s == "+" => BasisIndex::Plus,
                BasisSpec::Named(s) => {
                    return Err(Error::Config(format!(
                        "unknown basis state '{s}' (expected minus, plus or {{level, index}})"
                    )))
                }
                BasisSpec::Level { level, index } => BasisIndex::Level { k: level, a: index },
            };
            State::pure(&levels.basis_vector(index)?)
        }
    }
}

/// Everything that determines a run, in canonical form for digesting.
#[derive(Clone, Debug, Serialize)]
pub struct ResolvedConfig {
    pub levels: LevelConfig,
    pub rates: RateSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<Operator>,
    pub params: serde_json::Value,
}

impl ResolvedConfig {
    pub fn digest(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("serializable").as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
