//! Random instances for tests, benchmarks and search commands.
//!
//! Everything takes the generator explicitly so callers can freeze seeds.

use crate::chain::{ChainModel, Dynamics, LowerTransitionOperator};
use crate::credal::{CredalSet, Pmf};
use crate::tree::{sequences, NGamble, Selection, Situation};
use crate::Result;
use rand::Rng;
use std::collections::BTreeMap;

/// A pmf drawn from the flat Dirichlet distribution.
pub fn random_pmf<R: Rng + ?Sized>(rng: &mut R, num_states: usize) -> Result<Pmf> {
    random_pmf_with_floor(rng, num_states, 0.0)
}

/// A random pmf with every weight at least `floor`.
pub fn random_pmf_with_floor<R: Rng + ?Sized>(
    rng: &mut R,
    num_states: usize,
    floor: f64,
) -> Result<Pmf> {
    let mut raw: Vec<f64> = (0..num_states)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let sum: f64 = raw.iter().sum();
    let spread = 1.0 - floor * num_states as f64;
    for v in raw.iter_mut() {
        *v = floor + spread * (*v / sum);
    }
    Pmf::new(raw)
}

/// A credal set with between one and `max_extremes` random extreme points.
pub fn random_credal_set<R: Rng + ?Sized>(
    rng: &mut R,
    num_states: usize,
    max_extremes: usize,
) -> Result<CredalSet> {
    let k = rng.gen_range(1..=max_extremes.max(1));
    let extremes = (0..k)
        .map(|_| random_pmf(rng, num_states))
        .collect::<Result<Vec<_>>>()?;
    CredalSet::new(extremes)
}

/// A stationary model with random credal sets everywhere.
pub fn random_markov_model<R: Rng + ?Sized>(
    rng: &mut R,
    num_states: usize,
    max_extremes: usize,
) -> Result<ChainModel> {
    let initial = random_credal_set(rng, num_states, max_extremes)?;
    let rows = (0..num_states)
        .map(|_| random_credal_set(rng, num_states, max_extremes))
        .collect::<Result<Vec<_>>>()?;
    ChainModel::new(
        initial,
        Dynamics::Stationary(LowerTransitionOperator::new(rows)?),
    )
}

/// A model whose local models depend on the full history up to `map_depth`.
pub fn random_general_model<R: Rng + ?Sized>(
    rng: &mut R,
    num_states: usize,
    max_extremes: usize,
    map_depth: usize,
) -> Result<ChainModel> {
    let initial = random_credal_set(rng, num_states, max_extremes)?;
    let default_rows = (0..num_states)
        .map(|_| random_credal_set(rng, num_states, max_extremes))
        .collect::<Result<Vec<_>>>()?;
    let mut map = BTreeMap::new();
    for k in 1..=map_depth {
        for s in sequences(num_states, k) {
            map.insert(
                Situation::from(s),
                random_credal_set(rng, num_states, max_extremes)?,
            );
        }
    }
    ChainModel::new(
        initial,
        Dynamics::General {
            map,
            default: LowerTransitionOperator::new(default_rows)?,
        },
    )
}

/// A precise stationary chain whose probabilities all stay above `floor`,
/// which keeps absorption fast and oracles well conditioned.
pub fn random_precise_chain<R: Rng + ?Sized>(
    rng: &mut R,
    num_states: usize,
    floor: f64,
) -> Result<ChainModel> {
    let initial = CredalSet::precise(random_pmf_with_floor(rng, num_states, floor)?);
    let rows = (0..num_states)
        .map(|_| random_pmf_with_floor(rng, num_states, floor))
        .collect::<Result<Vec<_>>>()?;
    ChainModel::new(
        initial,
        Dynamics::Stationary(LowerTransitionOperator::precise(rows)?),
    )
}

/// A gamble with values drawn uniformly from `[lo, hi]`.
pub fn random_ngamble<R: Rng + ?Sized>(
    rng: &mut R,
    num_states: usize,
    depth: usize,
    lo: f64,
    hi: f64,
) -> Result<NGamble> {
    NGamble::from_fn(num_states, depth, |_| rng.gen_range(lo..=hi))
}

/// A selection with gamble payoffs drawn uniformly from `[-scale, scale]`.
pub fn random_selection<R: Rng + ?Sized>(
    rng: &mut R,
    num_states: usize,
    depth: usize,
    scale: f64,
) -> Result<Selection> {
    let mut sel = Selection::zeros(num_states, depth)?;
    for k in 0..depth {
        for s in sequences(num_states, k) {
            let g: Vec<f64> = (0..num_states)
                .map(|_| rng.gen_range(-scale..=scale))
                .collect();
            sel.set_gamble(&s, &g)?;
        }
    }
    Ok(sel)
}

/// A random selection shifted gamble by gamble so that every local lower
/// expectation lands at zero, making it almost desirable by construction.
pub fn random_almost_desirable<R: Rng + ?Sized>(
    rng: &mut R,
    model: &ChainModel,
    depth: usize,
    scale: f64,
) -> Result<Selection> {
    let nx = model.num_states();
    let mut sel = random_selection(rng, nx, depth, scale)?;
    for k in 0..depth {
        for s in sequences(nx, k) {
            let local = model.local_model(&s)?;
            let g = sel.gamble_at(&s).expect("within depth").to_vec();
            let d = local.lower_expectation(&g)?;
            let shifted: Vec<f64> = g.iter().map(|v| v - d).collect();
            sel.set_gamble(&s, &shifted)?;
        }
    }
    Ok(sel)
}

/// Mixes every extreme point of the model toward fresh random pmfs.
pub fn perturb_model<R: Rng + ?Sized>(
    rng: &mut R,
    model: &ChainModel,
    eps: f64,
) -> Result<ChainModel> {
    let mut jitter = |set: &CredalSet| -> Result<CredalSet> {
        let extremes = set
            .extremes()
            .iter()
            .map(|p| {
                let q = random_pmf(rng, p.len())?;
                let mixed: Vec<f64> = p
                    .weights()
                    .iter()
                    .zip(q.weights())
                    .map(|(&a, &b)| (1.0 - eps) * a + eps * b)
                    .collect();
                Pmf::new(mixed)
            })
            .collect::<Result<Vec<_>>>()?;
        CredalSet::new(extremes)
    };
    let initial = jitter(model.initial())?;
    let dynamics = match model.dynamics() {
        Dynamics::Stationary(op) => {
            let rows = op.rows().iter().map(&mut jitter).collect::<Result<Vec<_>>>()?;
            Dynamics::Stationary(LowerTransitionOperator::new(rows)?)
        }
        Dynamics::TimeVarying(ops) => {
            let mut out = Vec::with_capacity(ops.len());
            for op in ops {
                let rows = op.rows().iter().map(&mut jitter).collect::<Result<Vec<_>>>()?;
                out.push(LowerTransitionOperator::new(rows)?);
            }
            Dynamics::TimeVarying(out)
        }
        Dynamics::General { map, default } => {
            let mut new_map = BTreeMap::new();
            for (s, set) in map {
                new_map.insert(s.clone(), jitter(set)?);
            }
            let rows = default
                .rows()
                .iter()
                .map(&mut jitter)
                .collect::<Result<Vec<_>>>()?;
            Dynamics::General {
                map: new_map,
                default: LowerTransitionOperator::new(rows)?,
            }
        }
    };
    ChainModel::new(initial, dynamics)
}
