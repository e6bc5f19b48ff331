//! Imprecise chain models: an initial credal set plus transition dynamics.
//!
//! Dynamics come in three flavors. Stationary and time-varying ones are
//! Markov: the local model for the next state depends only on the current
//! state (and, when time-varying, on the step). General dynamics attach a
//! credal set to explicit histories and fall back to a Markov operator
//! elsewhere, which covers processes that are not Markov at all.

use crate::credal::{CredalSet, Pmf};
use crate::error::Error;
use crate::tree::Situation;
use crate::Result;
use std::collections::BTreeMap;

/// One credal set per current state: the imprecise analogue of a transition
/// matrix. Applying it to a gamble takes the row-wise lower expectation.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTransitionOperator {
    num_states: usize,
    rows: Vec<CredalSet>,
}

impl LowerTransitionOperator {
    pub fn new(rows: Vec<CredalSet>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("operator needs at least one row".into()));
        }
        let num_states = rows.len();
        for row in &rows {
            if row.num_states() != num_states {
                return Err(Error::DimensionMismatch {
                    expected: num_states,
                    got: row.num_states(),
                });
            }
        }
        Ok(LowerTransitionOperator { num_states, rows })
    }

    /// The operator whose every row is vacuous.
    pub fn vacuous(num_states: usize) -> Result<Self> {
        let rows = (0..num_states)
            .map(|_| CredalSet::vacuous(num_states))
            .collect::<Result<Vec<_>>>()?;
        LowerTransitionOperator::new(rows)
    }

    /// The operator of a precise chain with the given transition rows.
    pub fn precise(rows: Vec<Pmf>) -> Result<Self> {
        let rows = rows.into_iter().map(CredalSet::precise).collect();
        LowerTransitionOperator::new(rows)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn rows(&self) -> &[CredalSet] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &CredalSet {
        &self.rows[x]
    }

    /// `(T f)(x)`: the lower expectation of `f` from each current state.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.rows.iter().map(|row| row.lower_expectation(f)).collect()
    }

    pub fn is_precise(&self) -> bool {
        self.rows.iter().all(CredalSet::is_precise)
    }
}

/// Transition dynamics of a chain model.
#[derive(Debug, Clone, PartialEq)]
pub enum Dynamics {
    /// One operator for every step.
    Stationary(LowerTransitionOperator),
    /// `operators[n-1]` governs step `n`; the last one repeats beyond the
    /// list.
    TimeVarying(Vec<LowerTransitionOperator>),
    /// Explicit local models for listed histories, a Markov fallback for all
    /// others. Keys are non-root situations.
    General {
        map: BTreeMap<Situation, CredalSet>,
        default: LowerTransitionOperator,
    },
}

/// An imprecise chain: a credal set for the first state plus [`Dynamics`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChainModel {
    num_states: usize,
    initial: CredalSet,
    dynamics: Dynamics,
}

impl ChainModel {
    pub fn new(initial: CredalSet, dynamics: Dynamics) -> Result<Self> {
        let num_states = initial.num_states();
        let check = |op: &LowerTransitionOperator| -> Result<()> {
            if op.num_states() != num_states {
                return Err(Error::DimensionMismatch {
                    expected: num_states,
                    got: op.num_states(),
                });
            }
            Ok(())
        };
        match &dynamics {
            Dynamics::Stationary(op) => check(op)?,
            Dynamics::TimeVarying(ops) => {
                if ops.is_empty() {
                    return Err(Error::InvalidArgument(
                        "time-varying dynamics need at least one operator".into(),
                    ));
                }
                for op in ops {
                    check(op)?;
                }
            }
            Dynamics::General { map, default } => {
                check(default)?;
                for (s, k) in map {
                    if s.is_root() {
                        return Err(Error::InvalidArgument(
                            "history map may not key the root; use the initial model".into(),
                        ));
                    }
                    if s.iter().any(|&x| x >= num_states) {
                        return Err(Error::InvalidArgument(format!(
                            "history `{s}` mentions a state out of range"
                        )));
                    }
                    if k.num_states() != num_states {
                        return Err(Error::DimensionMismatch {
                            expected: num_states,
                            got: k.num_states(),
                        });
                    }
                }
            }
        }
        Ok(ChainModel {
            num_states,
            initial,
            dynamics,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> &CredalSet {
        &self.initial
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    /// Whether the local model never depends on more than the current state
    /// and step.
    pub fn is_markov(&self) -> bool {
        match &self.dynamics {
            Dynamics::Stationary(_) | Dynamics::TimeVarying(_) => true,
            Dynamics::General { map, .. } => map.is_empty(),
        }
    }

    /// The operator governing step `step` (at least 1) of Markov dynamics.
    pub fn operator_at(&self, step: usize) -> Result<&LowerTransitionOperator> {
        if step == 0 {
            return Err(Error::InvalidArgument(
                "transition steps are counted from 1".into(),
            ));
        }
        match &self.dynamics {
            Dynamics::Stationary(op) => Ok(op),
            Dynamics::TimeVarying(ops) => Ok(&ops[(step - 1).min(ops.len() - 1)]),
            Dynamics::General { map, default } => {
                if map.is_empty() {
                    Ok(default)
                } else {
                    Err(Error::RequiresMarkov(
                        "dynamics carry history-dependent local models".into(),
                    ))
                }
            }
        }
    }

    /// The credal set for the state following history `s`; the initial model
    /// at the root.
    pub fn local_model(&self, s: &[usize]) -> Result<&CredalSet> {
        for &x in s {
            if x >= self.num_states {
                return Err(Error::InvalidArgument(format!(
                    "state {x} out of range for {} states",
                    self.num_states
                )));
            }
        }
        if s.is_empty() {
            return Ok(&self.initial);
        }
        let last = s[s.len() - 1];
        match &self.dynamics {
            Dynamics::Stationary(op) => Ok(op.row(last)),
            Dynamics::TimeVarying(ops) => Ok(ops[(s.len() - 1).min(ops.len() - 1)].row(last)),
            Dynamics::General { map, default } => match map.get(&Situation::from(s)) {
                Some(k) => Ok(k),
                None => Ok(default.row(last)),
            },
        }
    }

    /// Applies the step-`step` operator to a gamble on the next state.
    pub fn apply_transition(&self, step: usize, f: &[f64]) -> Result<Vec<f64>> {
        self.operator_at(step)?.apply(f)
    }

    /// The model of the future process after history `s`: the local model at
    /// `s` becomes the initial one and the dynamics are shifted accordingly.
    pub fn reroot(&self, s: &[usize]) -> Result<ChainModel> {
        let initial = self.local_model(s)?.clone();
        if s.is_empty() {
            return Ok(self.clone());
        }
        let shift = s.len();
        let dynamics = match &self.dynamics {
            Dynamics::Stationary(op) => Dynamics::Stationary(op.clone()),
            Dynamics::TimeVarying(ops) => {
                let start = shift.min(ops.len() - 1);
                Dynamics::TimeVarying(ops[start..].to_vec())
            }
            Dynamics::General { map, default } => {
                let mut shifted = BTreeMap::new();
                for (key, k) in map {
                    if key.len() > shift && key[..shift] == *s {
                        shifted.insert(Situation::from(&key[shift..]), k.clone());
                    }
                }
                Dynamics::General {
                    map: shifted,
                    default: default.clone(),
                }
            }
        };
        ChainModel::new(initial, dynamics)
    }

    /// Whether every local model is a singleton, i.e. the chain is precise.
    pub fn is_precise(&self) -> bool {
        if !self.initial.is_precise() {
            return false;
        }
        match &self.dynamics {
            Dynamics::Stationary(op) => op.is_precise(),
            Dynamics::TimeVarying(ops) => ops.iter().all(LowerTransitionOperator::is_precise),
            Dynamics::General { map, default } => {
                default.is_precise() && map.values().all(CredalSet::is_precise)
            }
        }
    }

    /// Transition rows of a precise Markov chain at the given step.
    pub fn transition_matrix(&self, step: usize) -> Result<Vec<Pmf>> {
        let op = self.operator_at(step)?;
        if !op.is_precise() {
            return Err(Error::InvalidArgument(
                "transition operator is not a single matrix".into(),
            ));
        }
        Ok(op.rows().iter().map(|row| row.extremes()[0].clone()).collect())
    }

    /// The initial pmf of a precise chain.
    pub fn initial_pmf(&self) -> Result<&Pmf> {
        if !self.initial.is_precise() {
            return Err(Error::InvalidArgument("initial model is not a single pmf".into()));
        }
        Ok(&self.initial.extremes()[0])
    }
}
