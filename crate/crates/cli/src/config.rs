//! JSON scenario files.
//!
//! ```json
//! {
//!   "n": 4,
//!   "l0": 1,
//!   "initial_state": "uniform_minus",
//!   "schedule": "Q:0 P",
//!   "unitaries": ["diffusion", {"rotation": 3.14159}],
//!   "oracle_mode": "pseudo",
//!   "seed": 7,
//!   "outputs": {"trace": "trace.json", "summary": "summary.csv"}
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows.
//! Setting `baseline` (with `tau_c`/`tau_q`) replaces the explicit circuit.

use std::path::{Path, PathBuf};

use hsl_core::baselines::{self, BaselineKind};
use hsl_core::runner::{AnswerMap, HybridAlgorithm, OracleMode, Schedule, UnitarySpec};
use hsl_core::statespace::{RegisterShape, StateVector};
use hsl_core::{Error, C64};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::CliError;

pub type Matrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    #[serde(default)]
    pub l0: usize,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub schedule: String,
    #[serde(default)]
    pub unitaries: Vec<UnitaryConfig>,
    #[serde(default)]
    pub answer_map: AnswerConfig,
    #[serde(default)]
    pub detection_map: Option<AnswerConfig>,
    #[serde(default)]
    pub baseline: Option<String>,
    #[serde(default)]
    pub tau_c: usize,
    #[serde(default)]
    pub tau_q: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub oracle_mode: ModeConfig,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub trace: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModeConfig {
    #[default]
    Classical,
    Pseudo,
}

impl ModeConfig {
    pub fn mode(self) -> OracleMode {
        match self {
            ModeConfig::Classical => OracleMode::UseClassical,
            ModeConfig::Pseudo => OracleMode::UsePseudoClassical,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModeConfig::Classical => "classical",
            ModeConfig::Pseudo => "pseudo",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// Uniform over indices, workspace all zero.
    #[default]
    Uniform,
    /// Uniform over indices, last workspace qubit in `(|0⟩ - |1⟩)/√2`.
    UniformMinus,
    Basis {
        index: usize,
        workspace: usize,
    },
    Amplitudes(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum UnitaryConfig {
    Identity,
    Diffusion,
    Rotation(f64),
    Index(Matrix),
    Explicit(Matrix),
    Embedded { qubits: Vec<usize>, matrix: Matrix },
    ControlledOnZero { control: usize, inner: Box<UnitaryConfig> },
    Sequence(Vec<UnitaryConfig>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AnswerConfig {
    #[default]
    Index,
    Constant(u32),
    AnyWorkspaceOne,
    IndexInSet(Vec<usize>),
    Table(Vec<u32>),
}

impl AnswerConfig {
    pub fn build(&self) -> AnswerMap {
        match self {
            AnswerConfig::Index => AnswerMap::Index,
            AnswerConfig::Constant(a) => AnswerMap::Constant(*a),
            AnswerConfig::AnyWorkspaceOne => AnswerMap::AnyWorkspaceOne,
            AnswerConfig::IndexInSet(s) => AnswerMap::IndexInSet(s.clone()),
            AnswerConfig::Table(t) => AnswerMap::Table(t.clone()),
        }
    }
}

fn matrix(m: &Matrix) -> Result<DMatrix<C64>, String> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if let Some(r) = m.iter().position(|row| row.len() != cols) {
        return Err(format!("matrix row {r} has {} entries, row 0 has {cols}", m[r].len()));
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| C64::new(m[i][j][0], m[i][j][1])))
}

impl UnitaryConfig {
    pub fn build(&self) -> Result<UnitarySpec, String> {
        Ok(match self {
            UnitaryConfig::Identity => UnitarySpec::Identity,
            UnitaryConfig::Diffusion => UnitarySpec::Diffusion,
            UnitaryConfig::Rotation(angle) => UnitarySpec::PhaseRotation { angle: *angle },
            UnitaryConfig::Index(m) => UnitarySpec::IndexMatrix(matrix(m)?),
            UnitaryConfig::Explicit(m) => UnitarySpec::Explicit(matrix(m)?),
            UnitaryConfig::Embedded { qubits, matrix: m } => UnitarySpec::Embedded {
                qubits: qubits.clone(),
                matrix: matrix(m)?,
            },
            UnitaryConfig::ControlledOnZero { control, inner } => UnitarySpec::ControlledOnZero {
                control: *control,
                inner: Box::new(inner.build()?),
            },
            UnitaryConfig::Sequence(items) => {
                UnitarySpec::Sequence(items.iter().map(UnitaryConfig::build).collect::<Result<_, _>>()?)
            }
        })
    }
}

/// A parsed scenario together with its source text, for error anchoring.
#[derive(Debug, Clone, Default)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub origin: String,
    source: String,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let source =
            std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        Self::parse(&source, &path.display().to_string())
    }

    pub fn parse(source: &str, origin: &str) -> Result<Self, CliError> {
        let config = serde_json::from_str(source).map_err(|e| {
            let msg = e.to_string();
            let msg = msg.split(" at line ").next().unwrap_or(&msg);
            CliError::Invalid(format!("{origin}:{}:{}: {msg}", e.line(), e.column()))
        })?;
        Ok(Self {
            config,
            origin: origin.to_string(),
            source: source.to_string(),
        })
    }

    /// A scenario assembled from flags alone.
    pub fn from_flags(n: usize) -> Self {
        Self {
            config: ScenarioConfig {
                n,
                ..Default::default()
            },
            origin: "<flags>".into(),
            source: String::new(),
        }
    }

    /// Prefixes `msg` with the line of the first occurrence of `"key"`.
    fn error(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        let needle = format!("\"{key}\"");
        match self.source.find(&needle) {
            Some(pos) => {
                let line = self.source[..pos].matches('\n').count() + 1;
                CliError::Invalid(format!("{}:{line}: {msg}", self.origin))
            }
            None => CliError::Invalid(format!("{}: {msg}", self.origin)),
        }
    }

    fn core_error(&self, e: Error) -> CliError {
        let key = match &e {
            Error::InvalidRegister(_) => "n",
            Error::InvalidSchedule(_) | Error::MissingQubit { .. } => "schedule",
            Error::InvalidUnitary { .. } | Error::NotUnitary(_) => "unitaries",
            Error::AnswerSet(_) => "answer_map",
            Error::NotNormalized(_) | Error::NonFinite(_) | Error::NormTooLarge(_) | Error::IndexOutOfRange { .. } => {
                "initial_state"
            }
            Error::InvalidParameter(_) if self.config.baseline.is_some() => "baseline",
            _ => "n",
        };
        self.error(key, e)
    }

    pub fn baseline(&self) -> Result<Option<BaselineKind>, CliError> {
        let c = &self.config;
        c.baseline
            .as_deref()
            .map(|name| BaselineKind::from_name(name, c.tau_c, c.tau_q))
            .transpose()
            .map_err(|e| self.core_error(e))
    }

    pub fn algorithm(&self) -> Result<HybridAlgorithm, CliError> {
        let c = &self.config;
        if let Some(kind) = self.baseline()? {
            return baselines::build_seeded(kind, c.n, c.seed).map_err(|e| self.core_error(e));
        }
        let schedule: Schedule = c.schedule.parse().map_err(|e| self.core_error(e))?;
        if c.unitaries.len() != schedule.tau() && !(c.unitaries.is_empty()) {
            return Err(self.error(
                "unitaries",
                format!(
                    "{} unitaries given, schedule has {} steps",
                    c.unitaries.len(),
                    schedule.tau()
                ),
            ));
        }
        let unitaries = if c.unitaries.is_empty() {
            vec![UnitarySpec::Identity; schedule.tau()]
        } else {
            c.unitaries
                .iter()
                .enumerate()
                .map(|(t, u)| {
                    u.build()
                        .map_err(|e| self.error("unitaries", format!("unitary {t}: {e}")))
                })
                .collect::<Result<_, _>>()?
        };
        let shape = RegisterShape::new(c.n, c.l0).map_err(|e| self.core_error(e))?;
        let initial = self.initial(shape)?;
        HybridAlgorithm::new(initial, schedule, unitaries, c.answer_map.build()).map_err(|e| self.core_error(e))
    }

    fn initial(&self, shape: RegisterShape) -> Result<StateVector, CliError> {
        match &self.config.initial_state {
            InitialState::Uniform => Ok(StateVector::uniform(shape)),
            InitialState::UniformMinus => {
                if shape.workspace_qubits() == 0 {
                    return Err(self.error("initial_state", "uniform_minus needs l0 >= 1"));
                }
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let base =
                    RegisterShape::new(shape.n(), shape.workspace_qubits() - 1).map_err(|e| self.core_error(e))?;
                Ok(StateVector::uniform(base).tensor_qubit(C64::new(h, 0.0), C64::new(-h, 0.0)))
            }
            InitialState::Basis { index, workspace } => {
                StateVector::basis(shape, *index, *workspace).map_err(|e| self.core_error(e))
            }
            InitialState::Amplitudes(a) => StateVector::new(shape, a.iter().map(|z| C64::new(z[0], z[1])).collect())
                .map_err(|e| self.core_error(e)),
        }
    }

    pub fn detection_map(&self) -> Option<AnswerMap> {
        self.config.detection_map.as_ref().map(AnswerConfig::build)
    }
}
