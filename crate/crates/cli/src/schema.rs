//! On-disk scenario documents.
//!
//! Scenarios are JSON files tagged by `kind`. Complex numbers are
//! two-element `[re, im]` arrays and matrices are arrays of rows, so any
//! JSON tooling can produce or inspect them. Reading is parse → validate →
//! construct: every structural problem is reported with the block it lives
//! in, and the core type invariants run before a scenario reaches a command.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use causalview::{
    BipartiteShape, CausalScenario, ComplexMatrix, DensityMatrix, KrausChannel, Povm,
    SpacelikeScenario, TripartiteCausalScenario, TripartiteSpacelikeScenario, C64, DEFAULT_TOL,
};

/// Complex scalar as stored on disk.
pub type Cx = [f64; 2];
/// Matrix as stored on disk: rows of `[re, im]` pairs.
pub type MatrixData = Vec<Vec<Cx>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmBlock {
    pub labels: Vec<String>,
    pub effects: Vec<MatrixData>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DimsAb {
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DimsAbc {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

/// The document root. `kind` selects the variant.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioFile {
    Causal {
        dims: DimsAb,
        rho: MatrixData,
        kraus: Vec<MatrixData>,
        povm_a: PovmBlock,
        povm_b: PovmBlock,
    },
    Spacelike {
        dims: DimsAb,
        tau: MatrixData,
        povm_a: PovmBlock,
        povm_b: PovmBlock,
    },
    TripartiteCausal {
        dims: DimsAbc,
        rho: MatrixData,
        kraus: Vec<MatrixData>,
        povm_a: PovmBlock,
        povm_b: PovmBlock,
        povm_c: PovmBlock,
    },
    TripartiteSpacelike {
        dims: DimsAbc,
        tau: MatrixData,
        povm_a: PovmBlock,
        povm_b: PovmBlock,
        povm_c: PovmBlock,
    },
}

/// A fully validated scenario of any kind.
#[derive(Debug, Clone)]
pub enum Scenario {
    Causal(CausalScenario),
    Spacelike(SpacelikeScenario),
    TripartiteCausal(TripartiteCausalScenario),
    TripartiteSpacelike(TripartiteSpacelikeScenario),
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Causal(_) => "causal",
            Scenario::Spacelike(_) => "spacelike",
            Scenario::TripartiteCausal(_) => "tripartite_causal",
            Scenario::TripartiteSpacelike(_) => "tripartite_spacelike",
        }
    }
}

fn matrix_from(data: &MatrixData, rows: usize, cols: usize, block: &str) -> Result<ComplexMatrix> {
    if data.len() != rows {
        bail!("block '{block}': {} rows, expected {rows}", data.len());
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, row) in data.iter().enumerate() {
        if row.len() != cols {
            bail!(
                "block '{block}': row {i} has {} entries, expected {cols}",
                row.len()
            );
        }
        entries.extend(row.iter().map(|&[re, im]| C64::new(re, im)));
    }
    ComplexMatrix::new(rows, cols, entries).with_context(|| format!("block '{block}'"))
}

fn matrix_to(m: &ComplexMatrix) -> MatrixData {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let z = m[(i, j)];
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

fn povm_from(block: &PovmBlock, dim: usize, name: &str, tol: f64) -> Result<Povm> {
    if block.labels.len() != block.effects.len() {
        bail!(
            "block '{name}': {} labels for {} effects",
            block.labels.len(),
            block.effects.len()
        );
    }
    let effects = block
        .effects
        .iter()
        .enumerate()
        .map(|(k, e)| matrix_from(e, dim, dim, &format!("{name}[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    Povm::with_tol(block.labels.clone(), effects, tol).with_context(|| format!("block '{name}'"))
}

fn povm_to(povm: &Povm) -> PovmBlock {
    PovmBlock {
        labels: povm.labels().to_vec(),
        effects: povm.effects().iter().map(matrix_to).collect(),
    }
}

fn kraus_from(data: &[MatrixData], d_out: usize, d_in: usize, tol: f64) -> Result<KrausChannel> {
    if data.is_empty() {
        bail!("block 'kraus': at least one Kraus operator required");
    }
    let ops = data
        .iter()
        .enumerate()
        .map(|(m, k)| matrix_from(k, d_out, d_in, &format!("kraus[{m}]")))
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::with_tol(ops, tol).context("block 'kraus'")
}

/// Builds the validated scenario a document describes, checking every
/// structural invariant at the default tolerance.
pub fn scenario_from_file(file: &ScenarioFile) -> Result<Scenario> {
    scenario_from_file_with_tol(file, DEFAULT_TOL)
}

/// `scenario_from_file` with the structural tolerance under caller control.
pub fn scenario_from_file_with_tol(file: &ScenarioFile, tol: f64) -> Result<Scenario> {
    match file {
        ScenarioFile::Causal {
            dims,
            rho,
            kraus,
            povm_a,
            povm_b,
        } => {
            let rho = DensityMatrix::with_tol(matrix_from(rho, dims.a, dims.a, "rho")?, tol)
                .context("block 'rho'")?;
            let channel = kraus_from(kraus, dims.b, dims.a, tol)?;
            let povm_a = povm_from(povm_a, dims.a, "povm_a", tol)?;
            let povm_b = povm_from(povm_b, dims.b, "povm_b", tol)?;
            Ok(Scenario::Causal(
                CausalScenario::new(rho, channel, povm_a, povm_b).context("scenario")?,
            ))
        }
        ScenarioFile::Spacelike {
            dims,
            tau,
            povm_a,
            povm_b,
        } => {
            let total = dims.a * dims.b;
            let tau = DensityMatrix::with_tol(matrix_from(tau, total, total, "tau")?, tol)
                .context("block 'tau'")?;
            let povm_a = povm_from(povm_a, dims.a, "povm_a", tol)?;
            let povm_b = povm_from(povm_b, dims.b, "povm_b", tol)?;
            Ok(Scenario::Spacelike(
                SpacelikeScenario::new(tau, BipartiteShape::new(dims.a, dims.b), povm_a, povm_b)
                    .context("scenario")?,
            ))
        }
        ScenarioFile::TripartiteCausal {
            dims,
            rho,
            kraus,
            povm_a,
            povm_b,
            povm_c,
        } => {
            let rho = DensityMatrix::with_tol(matrix_from(rho, dims.c, dims.c, "rho")?, tol)
                .context("block 'rho'")?;
            let channel = kraus_from(kraus, dims.a * dims.b, dims.c, tol)?;
            let povm_a = povm_from(povm_a, dims.a, "povm_a", tol)?;
            let povm_b = povm_from(povm_b, dims.b, "povm_b", tol)?;
            let povm_c = povm_from(povm_c, dims.c, "povm_c", tol)?;
            Ok(Scenario::TripartiteCausal(
                TripartiteCausalScenario::new(rho, channel, dims.a, dims.b, povm_a, povm_b, povm_c)
                    .context("scenario")?,
            ))
        }
        ScenarioFile::TripartiteSpacelike {
            dims,
            tau,
            povm_a,
            povm_b,
            povm_c,
        } => {
            let total = dims.a * dims.b * dims.c;
            let tau = DensityMatrix::with_tol(matrix_from(tau, total, total, "tau")?, tol)
                .context("block 'tau'")?;
            let povm_a = povm_from(povm_a, dims.a, "povm_a", tol)?;
            let povm_b = povm_from(povm_b, dims.b, "povm_b", tol)?;
            let povm_c = povm_from(povm_c, dims.c, "povm_c", tol)?;
            Ok(Scenario::TripartiteSpacelike(
                TripartiteSpacelikeScenario::new(
                    tau,
                    [dims.a, dims.b, dims.c],
                    povm_a,
                    povm_b,
                    povm_c,
                )
                .context("scenario")?,
            ))
        }
    }
}

/// Serializes a validated scenario back into a document.
pub fn file_from_scenario(scenario: &Scenario) -> ScenarioFile {
    match scenario {
        Scenario::Causal(s) => ScenarioFile::Causal {
            dims: DimsAb {
                a: s.dim_a(),
                b: s.dim_b(),
            },
            rho: matrix_to(s.rho().mat()),
            kraus: s.channel().kraus_ops().iter().map(matrix_to).collect(),
            povm_a: povm_to(s.povm_a()),
            povm_b: povm_to(s.povm_b()),
        },
        Scenario::Spacelike(s) => ScenarioFile::Spacelike {
            dims: DimsAb {
                a: s.shape().dim_a,
                b: s.shape().dim_b,
            },
            tau: matrix_to(s.tau().mat()),
            povm_a: povm_to(s.povm_a()),
            povm_b: povm_to(s.povm_b()),
        },
        Scenario::TripartiteCausal(s) => ScenarioFile::TripartiteCausal {
            dims: DimsAbc {
                a: s.dim_a(),
                b: s.dim_b(),
                c: s.dim_c(),
            },
            rho: matrix_to(s.rho_c().mat()),
            kraus: s.channel().kraus_ops().iter().map(matrix_to).collect(),
            povm_a: povm_to(s.povm_a()),
            povm_b: povm_to(s.povm_b()),
            povm_c: povm_to(s.povm_c()),
        },
        Scenario::TripartiteSpacelike(s) => ScenarioFile::TripartiteSpacelike {
            dims: DimsAbc {
                a: s.dims()[0],
                b: s.dims()[1],
                c: s.dims()[2],
            },
            tau: matrix_to(s.tau().mat()),
            povm_a: povm_to(s.povm_a()),
            povm_b: povm_to(s.povm_b()),
            povm_c: povm_to(s.povm_c()),
        },
    }
}

/// Parses and validates a scenario file at the default tolerance.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    load_scenario_with_tol(path, DEFAULT_TOL)
}

pub fn load_scenario_with_tol(path: &Path, tol: f64) -> Result<Scenario> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let file: ScenarioFile =
        serde_json::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    scenario_from_file_with_tol(&file, tol).with_context(|| format!("{}", path.display()))
}

/// Writes a scenario document. Floats are emitted in shortest
/// round-trip-exact form, so reading the file back reproduces every entry
/// bit for bit.
pub fn save_scenario(path: &Path, scenario: &Scenario) -> Result<()> {
    let file = file_from_scenario(scenario);
    let mut text = serde_json::to_string_pretty(&file).context("serializing scenario")?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
