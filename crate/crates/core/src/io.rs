//! JSON file formats for models, gambles and certificates, plus certificate
//! verification reports.
//!
//! States are named in files and indexed in memory; situations are spelled
//! as state names joined by dots, with the empty string for the root. All
//! files carry `"schema": "icek/1"`. Floats are written in the shortest
//! form that parses back to the same value, so write-then-parse is exact.

use crate::chain::{ChainModel, Dynamics, LowerTransitionOperator};
use crate::credal::{CredalSet, Pmf, PMF_TOL};
use crate::error::Error;
use crate::tree::{sequences, NGamble, Selection, Situation};
use crate::witness::{check_almost_desirable, domination_report, Certificate, AD_TOL, DOM_TOL};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SCHEMA: &str = "icek/1";

/// Largest deviation of a probability row's sum from one before the file is
/// rejected; smaller deviations beyond the pmf tolerance are renormalized
/// with a warning.
pub const ROW_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema: String,
    pub states: Vec<String>,
    /// Extreme points of the first-state credal set, one row per point.
    pub initial: Vec<Vec<f64>>,
    pub dynamics: DynamicsFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DynamicsFile {
    /// `rows[x]` lists the extreme points for current state `x`.
    Stationary { rows: Vec<Vec<Vec<f64>>> },
    /// `steps[n-1]` is the operator for step `n`; the last repeats.
    TimeVarying { steps: Vec<Vec<Vec<Vec<f64>>>> },
    /// Explicit histories (dot-joined state names) with a Markov fallback.
    General {
        map: BTreeMap<String, Vec<Vec<f64>>>,
        default: Vec<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GambleFile {
    pub schema: String,
    pub states: Vec<String>,
    pub depth: usize,
    /// One value per length-`depth` sequence, lexicographic, first state
    /// most significant.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionFile {
    pub depth: usize,
    /// Situation key (dot-joined names, empty for the root) to gamble.
    /// Missing situations carry the zero gamble.
    pub gambles: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub schema: String,
    pub states: Vec<String>,
    pub alpha: f64,
    pub horizon: usize,
    pub selection: SelectionFile,
}

/// A parsed model together with its state names and any repairs made.
#[derive(Debug, Clone)]
pub struct ModelDocument {
    pub model: ChainModel,
    pub names: Vec<String>,
    pub warnings: Vec<String>,
}

fn check_schema(s: &str) -> Result<()> {
    if s != SCHEMA {
        return Err(Error::Parse(format!("unsupported schema `{s}`, expected `{SCHEMA}`")));
    }
    Ok(())
}

fn validate_names(names: &[String]) -> Result<()> {
    if names.is_empty() {
        return Err(Error::InvalidInput("no states listed".into()));
    }
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::InvalidInput(format!("state {i} has an empty name")));
        }
        if name.contains('.') {
            return Err(Error::InvalidInput(format!(
                "state name `{name}` contains `.`, which separates situation keys"
            )));
        }
        if names[..i].contains(name) {
            return Err(Error::InvalidInput(format!("duplicate state name `{name}`")));
        }
    }
    Ok(())
}

fn check_names_match(expected: &[String], got: &[String]) -> Result<()> {
    if expected != got {
        return Err(Error::InvalidInput(format!(
            "state spaces differ: expected {expected:?}, got {got:?}"
        )));
    }
    Ok(())
}

fn pmf_from_row(row: &[f64], n: usize, what: &str, warnings: &mut Vec<String>) -> Result<Pmf> {
    if row.len() != n {
        return Err(Error::InvalidInput(format!(
            "{what}: row has {} entries, expected {n}",
            row.len()
        )));
    }
    for &v in row {
        if !v.is_finite() || v < -PMF_TOL {
            return Err(Error::InvalidInput(format!("{what}: weight {v} is invalid")));
        }
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::InvalidInput(format!("{what}: weights sum to {sum}")));
    }
    if (sum - 1.0).abs() > PMF_TOL {
        warnings.push(format!("{what}: weights sum to {sum}; renormalized"));
        let fixed: Vec<f64> = row.iter().map(|&v| v / sum).collect();
        return Pmf::new(fixed);
    }
    Pmf::new(row.to_vec())
}

fn credal_from_rows(
    rows: &[Vec<f64>],
    n: usize,
    what: &str,
    warnings: &mut Vec<String>,
) -> Result<CredalSet> {
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{what}: no extreme points")));
    }
    let extremes = rows
        .iter()
        .enumerate()
        .map(|(i, row)| pmf_from_row(row, n, &format!("{what}, point {i}"), warnings))
        .collect::<Result<Vec<_>>>()?;
    CredalSet::new(extremes)
}

fn operator_from_rows(
    rows: &[Vec<Vec<f64>>],
    n: usize,
    what: &str,
    warnings: &mut Vec<String>,
) -> Result<LowerTransitionOperator> {
    if rows.len() != n {
        return Err(Error::InvalidInput(format!(
            "{what}: {} rows, expected {n}",
            rows.len()
        )));
    }
    let sets = rows
        .iter()
        .enumerate()
        .map(|(x, r)| credal_from_rows(r, n, &format!("{what}, state {x}"), warnings))
        .collect::<Result<Vec<_>>>()?;
    LowerTransitionOperator::new(sets)
}

/// Index of `name` in the state list.
pub fn state_index(names: &[String], name: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown state `{name}`")))
}

/// Parses a dot-joined situation key; the empty string is the root.
pub fn parse_situation(names: &[String], key: &str) -> Result<Vec<usize>> {
    if key.is_empty() {
        return Ok(Vec::new());
    }
    key.split('.').map(|part| state_index(names, part)).collect()
}

/// Renders a situation as a dot-joined key.
pub fn situation_key(names: &[String], s: &[usize]) -> String {
    s.iter()
        .map(|&x| names[x].as_str())
        .collect::<Vec<_>>()
        .join(".")
}

/// Parses a model file, renormalizing slightly-off rows with a warning.
pub fn parse_model(text: &str) -> Result<ModelDocument> {
    let file: ModelFile = serde_json::from_str(text)?;
    check_schema(&file.schema)?;
    validate_names(&file.states)?;
    let n = file.states.len();
    let mut warnings = Vec::new();
    let initial = credal_from_rows(&file.initial, n, "initial model", &mut warnings)?;
    let dynamics = match &file.dynamics {
        DynamicsFile::Stationary { rows } => Dynamics::Stationary(operator_from_rows(
            rows,
            n,
            "transition operator",
            &mut warnings,
        )?),
        DynamicsFile::TimeVarying { steps } => {
            if steps.is_empty() {
                return Err(Error::InvalidInput("no transition operators listed".into()));
            }
            let ops = steps
                .iter()
                .enumerate()
                .map(|(k, rows)| {
                    operator_from_rows(rows, n, &format!("operator for step {}", k + 1), &mut warnings)
                })
                .collect::<Result<Vec<_>>>()?;
            Dynamics::TimeVarying(ops)
        }
        DynamicsFile::General { map, default } => {
            let default = operator_from_rows(default, n, "fallback operator", &mut warnings)?;
            let mut situations = BTreeMap::new();
            for (key, rows) in map {
                if key.is_empty() {
                    return Err(Error::InvalidInput(
                        "history map may not key the root; use the initial model".into(),
                    ));
                }
                let s = parse_situation(&file.states, key)?;
                situations.insert(
                    Situation::from(s),
                    credal_from_rows(rows, n, &format!("history `{key}`"), &mut warnings)?,
                );
            }
            Dynamics::General {
                map: situations,
                default,
            }
        }
    };
    Ok(ModelDocument {
        model: ChainModel::new(initial, dynamics)?,
        names: file.states,
        warnings,
    })
}

fn credal_to_rows(set: &CredalSet) -> Vec<Vec<f64>> {
    set.extremes().iter().map(|p| p.weights().to_vec()).collect()
}

fn operator_to_rows(op: &LowerTransitionOperator) -> Vec<Vec<Vec<f64>>> {
    op.rows().iter().map(credal_to_rows).collect()
}

/// Renders a model back into file form.
pub fn write_model(model: &ChainModel, names: &[String]) -> Result<String> {
    validate_names(names)?;
    if names.len() != model.num_states() {
        return Err(Error::DimensionMismatch {
            expected: model.num_states(),
            got: names.len(),
        });
    }
    let dynamics = match model.dynamics() {
        Dynamics::Stationary(op) => DynamicsFile::Stationary {
            rows: operator_to_rows(op),
        },
        Dynamics::TimeVarying(ops) => DynamicsFile::TimeVarying {
            steps: ops.iter().map(operator_to_rows).collect(),
        },
        Dynamics::General { map, default } => DynamicsFile::General {
            map: map
                .iter()
                .map(|(s, set)| (situation_key(names, s), credal_to_rows(set)))
                .collect(),
            default: operator_to_rows(default),
        },
    };
    let file = ModelFile {
        schema: SCHEMA.into(),
        states: names.to_vec(),
        initial: credal_to_rows(model.initial()),
        dynamics,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Parses a gamble file against the model's state list.
pub fn parse_gamble(text: &str, names: &[String]) -> Result<NGamble> {
    let file: GambleFile = serde_json::from_str(text)?;
    check_schema(&file.schema)?;
    validate_names(&file.states)?;
    check_names_match(names, &file.states)?;
    for &v in &file.values {
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("gamble value {v} is not finite")));
        }
    }
    NGamble::new(names.len(), file.depth, file.values)
}

/// Renders a gamble into file form.
pub fn write_gamble(f: &NGamble, names: &[String]) -> Result<String> {
    validate_names(names)?;
    if names.len() != f.num_states() {
        return Err(Error::DimensionMismatch {
            expected: f.num_states(),
            got: names.len(),
        });
    }
    let file = GambleFile {
        schema: SCHEMA.into(),
        states: names.to_vec(),
        depth: f.depth(),
        values: f.values().to_vec(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Parses a certificate file against the model's state list.
pub fn parse_certificate(text: &str, names: &[String]) -> Result<Certificate> {
    let file: CertificateFile = serde_json::from_str(text)?;
    check_schema(&file.schema)?;
    validate_names(&file.states)?;
    check_names_match(names, &file.states)?;
    let n = names.len();
    let mut sel = Selection::zeros(n, file.selection.depth)?;
    for (key, g) in &file.selection.gambles {
        let s = parse_situation(names, key)?;
        if s.len() >= file.selection.depth {
            return Err(Error::InvalidInput(format!(
                "situation `{key}` lies at or beyond the selection depth {}",
                file.selection.depth
            )));
        }
        if g.len() != n {
            return Err(Error::InvalidInput(format!(
                "gamble at `{key}` has {} payoffs, expected {n}",
                g.len()
            )));
        }
        for &v in g {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "gamble at `{key}` has non-finite payoff {v}"
                )));
            }
        }
        sel.set_gamble(&s, g)?;
    }
    Certificate::new(file.alpha, sel, file.horizon)
}

/// Renders a certificate into file form, listing every situation densely.
pub fn write_certificate(cert: &Certificate, names: &[String]) -> Result<String> {
    validate_names(names)?;
    let sel = &cert.selection;
    if names.len() != sel.num_states() {
        return Err(Error::DimensionMismatch {
            expected: sel.num_states(),
            got: names.len(),
        });
    }
    let mut gambles = BTreeMap::new();
    for k in 0..sel.depth() {
        for s in sequences(sel.num_states(), k) {
            let g = sel.gamble_at(&s).expect("within depth");
            gambles.insert(situation_key(names, &s), g.to_vec());
        }
    }
    let file = CertificateFile {
        schema: SCHEMA.into(),
        states: names.to_vec(),
        alpha: cert.alpha,
        horizon: cert.horizon,
        selection: SelectionFile {
            depth: sel.depth(),
            gambles,
        },
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Both halves of a certificate check, with the worst case of each.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub valid: bool,
    pub alpha: f64,
    pub horizon: usize,
    pub almost_desirable: bool,
    pub min_lower_expectation: f64,
    pub worst_situation: String,
    pub dominates: bool,
    pub domination_margin: f64,
    pub worst_path: Vec<String>,
}

/// Checks a certificate against a model and gamble.
pub fn verify_certificate(
    model: &ChainModel,
    names: &[String],
    f: &NGamble,
    cert: &Certificate,
) -> Result<VerificationReport> {
    let desirability = check_almost_desirable(model, &cert.selection)?;
    let (margin, worst_path) = domination_report(f, cert)?;
    let almost_desirable = desirability.violations == 0;
    let dominates = margin >= -DOM_TOL;
    debug_assert!(desirability.min_value >= -AD_TOL || !almost_desirable);
    Ok(VerificationReport {
        valid: almost_desirable && dominates,
        alpha: cert.alpha,
        horizon: cert.horizon,
        almost_desirable,
        min_lower_expectation: desirability.min_value,
        worst_situation: situation_key(names, &desirability.worst),
        dominates,
        domination_margin: margin,
        worst_path: worst_path.iter().map(|&x| names[x].clone()).collect(),
    })
}
