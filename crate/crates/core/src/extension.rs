//! Lower expectations of gambles on the whole path.
//!
//! For a gamble depending on the first `n` states the two extensions agree
//! and are computed by backward recursion over the event tree. Events like
//! "ever hit a set" or "never leave a set" are limits of monotone sequences
//! of such gambles; their values are limits of per-horizon traces. Markov
//! dynamics admit a state-indexed recursion per horizon, so deep horizons
//! stay cheap; history-dependent dynamics fall back to the dense tree with a
//! size guard.

use crate::chain::{ChainModel, Dynamics};
use crate::error::Error;
use crate::tree::{guard_dense, num_sequences, sequences, NGamble, RealProcess};
use crate::Result;
use serde::Serialize;

/// Tolerance for checking that a per-horizon trace is monotone.
pub const MONOTONE_TOL: f64 = 1e-12;

/// Which way a sequence of gambles and its value trace move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    NonDecreasing,
    NonIncreasing,
}

/// Stopping rule for per-horizon traces.
#[derive(Debug, Clone)]
pub struct LimitOptions {
    /// A trace converges once three consecutive steps each move less than
    /// this.
    pub tol: f64,
    /// Largest horizon evaluated.
    pub max_horizon: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            tol: 1e-6,
            max_horizon: 64,
        }
    }
}

/// Outcome of a monotone limit evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct LimitResult {
    /// The last trace entry; the limit value when `converged`.
    pub value: f64,
    /// Number of horizons evaluated; horizons count from 1.
    pub horizon: usize,
    /// Value at each horizon, in order.
    pub trace: Vec<f64>,
    /// Whether the stopping rule fired before the horizon cap.
    pub converged: bool,
    pub direction: Direction,
    /// True when the value is certified for the limit-superior extension
    /// only, as happens for non-increasing sequences.
    pub vvs_only: bool,
}

/// Values of the backward recursion at every situation up to the gamble's
/// depth. The root value is the shared extension value of the gamble.
pub fn williams_values(model: &ChainModel, f: &NGamble) -> Result<RealProcess> {
    if f.num_states() != model.num_states() {
        return Err(Error::DimensionMismatch {
            expected: model.num_states(),
            got: f.num_states(),
        });
    }
    let nx = model.num_states();
    let depth = f.depth();
    let mut levels: Vec<Vec<f64>> = (0..=depth)
        .map(|k| vec![0.0; num_sequences(nx, k)])
        .collect();
    levels[depth].copy_from_slice(f.values());
    for k in (0..depth).rev() {
        for (si, s) in sequences(nx, k).enumerate() {
            let local = model.local_model(&s)?;
            let block = &levels[k + 1][si * nx..(si + 1) * nx];
            let v = local.lower_expectation(block)?;
            levels[k][si] = v;
        }
    }
    RealProcess::new(nx, levels)
}

/// Lower expectation of a finite-depth gamble under the dominate-at-a-fixed-
/// depth extension.
pub fn williams_nmeasurable(model: &ChainModel, f: &NGamble) -> Result<f64> {
    williams_values(model, f)?.value(&[])
}

/// Lower expectation of a finite-depth gamble under the limit-superior
/// extension. On such gambles the two extensions coincide: a certificate at
/// the gamble's depth has constant capital from there on, and conversely a
/// path along which the capital never rises caps what the limit superior can
/// certify.
pub fn vvs_nmeasurable(model: &ChainModel, f: &NGamble) -> Result<f64> {
    williams_nmeasurable(model, f)
}

fn state_mask(num_states: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; num_states];
    for &x in set {
        if x >= num_states {
            return Err(Error::InvalidArgument(format!(
                "state {x} out of range for {num_states} states"
            )));
        }
        mask[x] = true;
    }
    Ok(mask)
}

/// Indicator of "some of the first `depth` states lies in `target`".
pub fn reach_gamble(num_states: usize, target: &[usize], depth: usize) -> Result<NGamble> {
    let mask = state_mask(num_states, target)?;
    if depth == 0 {
        return NGamble::constant(num_states, 0.0);
    }
    guard_dense(num_states, depth)?;
    let mut vals: Vec<f64> = mask.iter().map(|&b| b as u8 as f64).collect();
    for _ in 2..=depth {
        let mut next = Vec::with_capacity(vals.len() * num_states);
        for &v in &vals {
            for x in 0..num_states {
                next.push(if v == 1.0 || mask[x] { 1.0 } else { 0.0 });
            }
        }
        vals = next;
    }
    NGamble::new(num_states, depth, vals)
}

/// Indicator of "all of the first `depth` states lie in `safe`".
pub fn safety_gamble(num_states: usize, safe: &[usize], depth: usize) -> Result<NGamble> {
    let mask = state_mask(num_states, safe)?;
    if depth == 0 {
        return NGamble::constant(num_states, 1.0);
    }
    guard_dense(num_states, depth)?;
    let mut vals: Vec<f64> = mask.iter().map(|&b| b as u8 as f64).collect();
    for _ in 2..=depth {
        let mut next = Vec::with_capacity(vals.len() * num_states);
        for &v in &vals {
            for x in 0..num_states {
                next.push(if v == 1.0 && mask[x] { 1.0 } else { 0.0 });
            }
        }
        vals = next;
    }
    NGamble::new(num_states, depth, vals)
}

/// The non-decreasing sequence of hitting indicators for horizons
/// `1..=max_depth`.
pub fn reach_sequence(num_states: usize, target: &[usize], max_depth: usize) -> Result<Vec<NGamble>> {
    (1..=max_depth)
        .map(|n| reach_gamble(num_states, target, n))
        .collect()
}

/// The non-increasing sequence of staying indicators for horizons
/// `1..=max_depth`.
pub fn safety_sequence(num_states: usize, safe: &[usize], max_depth: usize) -> Result<Vec<NGamble>> {
    (1..=max_depth)
        .map(|n| safety_gamble(num_states, safe, n))
        .collect()
}

struct TraceBuilder {
    direction: Direction,
    tol: f64,
    trace: Vec<f64>,
    small_steps: usize,
    converged: bool,
}

impl TraceBuilder {
    fn new(direction: Direction, tol: f64) -> Self {
        TraceBuilder {
            direction,
            tol,
            trace: Vec::new(),
            small_steps: 0,
            converged: false,
        }
    }

    /// Records the next value; true once the stopping rule has fired.
    fn push(&mut self, v: f64) -> Result<bool> {
        if let Some(&prev) = self.trace.last() {
            let step = match self.direction {
                Direction::NonDecreasing => v - prev,
                Direction::NonIncreasing => prev - v,
            };
            if step < -MONOTONE_TOL {
                return Err(Error::NotMonotone {
                    step: self.trace.len() + 1,
                    violation: step,
                });
            }
            if step.abs() < self.tol {
                self.small_steps += 1;
            } else {
                self.small_steps = 0;
            }
        }
        self.trace.push(v);
        if self.small_steps >= 3 {
            self.converged = true;
        }
        Ok(self.converged)
    }

    fn finish(self, vvs_only: bool) -> Result<LimitResult> {
        let value = *self
            .trace
            .last()
            .ok_or_else(|| Error::InvalidArgument("no horizons evaluated".into()))?;
        Ok(LimitResult {
            value,
            horizon: self.trace.len(),
            trace: self.trace,
            converged: self.converged,
            direction: self.direction,
            vvs_only,
        })
    }
}

/// Limit of extension values along a pointwise non-decreasing sequence of
/// gambles. The limit-superior extension is continuous here and the trace
/// value transfers to the fixed-depth extension as well, so `vvs_only` is
/// false.
pub fn monotone_limit_nondecreasing(
    model: &ChainModel,
    gambles: impl IntoIterator<Item = NGamble>,
    options: &LimitOptions,
) -> Result<LimitResult> {
    monotone_limit(model, gambles, options, Direction::NonDecreasing)
}

/// Limit of extension values along a pointwise non-increasing sequence.
/// Only the limit-superior extension is known to attain this limit, so the
/// result is flagged `vvs_only`.
pub fn monotone_limit_nonincreasing(
    model: &ChainModel,
    gambles: impl IntoIterator<Item = NGamble>,
    options: &LimitOptions,
) -> Result<LimitResult> {
    monotone_limit(model, gambles, options, Direction::NonIncreasing)
}

fn monotone_limit(
    model: &ChainModel,
    gambles: impl IntoIterator<Item = NGamble>,
    options: &LimitOptions,
    direction: Direction,
) -> Result<LimitResult> {
    let mut tb = TraceBuilder::new(direction, options.tol);
    for f in gambles.into_iter().take(options.max_horizon) {
        let v = williams_nmeasurable(model, &f)?;
        if tb.push(v)? {
            break;
        }
    }
    tb.finish(matches!(direction, Direction::NonIncreasing))
}

/// Hitting value at one horizon via the state-indexed recursion.
fn reach_value_markov(model: &ChainModel, mask: &[bool], horizon: usize) -> Result<f64> {
    let mut g: Vec<f64> = mask.iter().map(|&b| b as u8 as f64).collect();
    for k in (1..horizon).rev() {
        let tg = model.apply_transition(k + 1, &g)?;
        g = mask
            .iter()
            .zip(tg)
            .map(|(&hit, v)| if hit { 1.0 } else { v })
            .collect();
    }
    model.initial().lower_expectation(&g)
}

/// Staying value at one horizon via the state-indexed recursion.
fn safety_value_markov(model: &ChainModel, mask: &[bool], horizon: usize) -> Result<f64> {
    let mut g: Vec<f64> = mask.iter().map(|&b| b as u8 as f64).collect();
    for k in (1..horizon).rev() {
        let tg = model.apply_transition(k + 1, &g)?;
        g = mask
            .iter()
            .zip(tg)
            .map(|(&safe, v)| if safe { v } else { 0.0 })
            .collect();
    }
    model.initial().lower_expectation(&g)
}

/// Lower probability of ever entering `target`, as a converging trace of
/// per-horizon values.
pub fn reach_limit(model: &ChainModel, target: &[usize], options: &LimitOptions) -> Result<LimitResult> {
    event_limit(model, target, options, Direction::NonDecreasing)
}

/// Lower probability of never leaving `safe`, as a converging trace of
/// per-horizon values. Certified for the limit-superior extension.
pub fn safety_limit(model: &ChainModel, safe: &[usize], options: &LimitOptions) -> Result<LimitResult> {
    event_limit(model, safe, options, Direction::NonIncreasing)
}

fn event_limit(
    model: &ChainModel,
    set: &[usize],
    options: &LimitOptions,
    direction: Direction,
) -> Result<LimitResult> {
    let nx = model.num_states();
    let mask = state_mask(nx, set)?;
    let vvs_only = matches!(direction, Direction::NonIncreasing);
    let mut tb = TraceBuilder::new(direction, options.tol);
    if model.is_markov() {
        for n in 1..=options.max_horizon {
            let v = match direction {
                Direction::NonDecreasing => reach_value_markov(model, &mask, n)?,
                Direction::NonIncreasing => safety_value_markov(model, &mask, n)?,
            };
            if tb.push(v)? {
                break;
            }
        }
        return tb.finish(vvs_only);
    }
    // History-dependent dynamics: walk the dense tree while it fits.
    for n in 1..=options.max_horizon {
        if guard_dense(nx, n).is_err() {
            break;
        }
        let f = match direction {
            Direction::NonDecreasing => reach_gamble(nx, set, n)?,
            Direction::NonIncreasing => safety_gamble(nx, set, n)?,
        };
        let v = williams_nmeasurable(model, &f)?;
        if tb.push(v)? {
            break;
        }
    }
    tb.finish(vvs_only)
}

fn stationary_rows(model: &ChainModel) -> Result<Vec<Vec<f64>>> {
    let op = match model.dynamics() {
        Dynamics::Stationary(op) => op,
        Dynamics::TimeVarying(ops) if ops.len() == 1 => &ops[0],
        _ => {
            return Err(Error::RequiresMarkov(
                "closed-form chain values need one stationary operator".into(),
            ))
        }
    };
    if !op.is_precise() {
        return Err(Error::InvalidArgument(
            "chain is not precise; no single transition matrix".into(),
        ));
    }
    Ok(op
        .rows()
        .iter()
        .map(|row| row.extremes()[0].weights().to_vec())
        .collect())
}

/// Gaussian elimination with partial pivoting; `None` on a vanishing pivot.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Iterative fallback for `h = P h + b` started from zero.
fn iterate_affine(p: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut h = vec![0.0; n];
    for _ in 0..1_000_000 {
        let mut next = b.to_vec();
        for i in 0..n {
            for j in 0..n {
                next[i] += p[i][j] * h[j];
            }
        }
        let delta = h
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        h = next;
        if delta < 1e-10 {
            return Ok(h);
        }
    }
    Err(Error::Numerical("hitting system did not converge".into()))
}

/// States from which `goal` is reachable along positive-probability edges.
fn can_reach(rows: &[Vec<f64>], goal: &[bool], through: impl Fn(usize) -> bool) -> Vec<bool> {
    let n = rows.len();
    let mut reach = goal.to_vec();
    loop {
        let mut changed = false;
        for x in 0..n {
            if reach[x] || !through(x) {
                continue;
            }
            if (0..n).any(|y| rows[x][y] > 0.0 && reach[y]) {
                reach[x] = true;
                changed = true;
            }
        }
        if !changed {
            return reach;
        }
    }
}

/// Exact probability that a precise stationary chain ever enters `target`.
pub fn precise_reach_probability(model: &ChainModel, target: &[usize]) -> Result<f64> {
    let rows = stationary_rows(model)?;
    let pi = model.initial_pmf()?.weights().to_vec();
    let nx = rows.len();
    let mask = state_mask(nx, target)?;
    let reachable = can_reach(&rows, &mask, |_| true);
    let live: Vec<usize> = (0..nx).filter(|&x| !mask[x] && reachable[x]).collect();
    let h_live = absorbed_fraction(&rows, &live, &mask)?;
    let mut h = vec![0.0; nx];
    for (k, &x) in live.iter().enumerate() {
        h[x] = h_live[k];
    }
    for x in 0..nx {
        if mask[x] {
            h[x] = 1.0;
        }
    }
    Ok(pi.iter().zip(&h).map(|(p, v)| p * v).sum())
}

/// Exact probability that a precise stationary chain never leaves `safe`.
pub fn precise_safety_probability(model: &ChainModel, safe: &[usize]) -> Result<f64> {
    let rows = stationary_rows(model)?;
    let pi = model.initial_pmf()?.weights().to_vec();
    let nx = rows.len();
    let mask = state_mask(nx, safe)?;
    let outside: Vec<bool> = mask.iter().map(|&b| !b).collect();
    // Safe states that can leak out, even through other safe states.
    let leaky = can_reach(&rows, &outside, |x| mask[x]);
    let trapped: Vec<bool> = (0..nx).map(|x| mask[x] && !leaky[x]).collect();
    let live: Vec<usize> = (0..nx).filter(|&x| mask[x] && leaky[x]).collect();
    let h_live = absorbed_fraction(&rows, &live, &trapped)?;
    let mut h = vec![0.0; nx];
    for (k, &x) in live.iter().enumerate() {
        h[x] = h_live[k];
    }
    for x in 0..nx {
        if trapped[x] {
            h[x] = 1.0;
        }
    }
    Ok(pi.iter().zip(&h).map(|(p, v)| p * v).sum())
}

/// Solves `h = P_LL h + P_LG 1` on the `live` index set, goal states `goal`.
fn absorbed_fraction(rows: &[Vec<f64>], live: &[usize], goal: &[bool]) -> Result<Vec<f64>> {
    let m = live.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let p_ll: Vec<Vec<f64>> = live
        .iter()
        .map(|&x| live.iter().map(|&y| rows[x][y]).collect())
        .collect();
    let b: Vec<f64> = live
        .iter()
        .map(|&x| (0..rows.len()).filter(|&y| goal[y]).map(|y| rows[x][y]).sum())
        .collect();
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            a[i][j] = if i == j { 1.0 - p_ll[i][j] } else { -p_ll[i][j] };
        }
    }
    match solve_linear(a, b.clone()) {
        Some(h) => Ok(h),
        None => iterate_affine(&p_ll, &b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::LowerTransitionOperator;
    use crate::credal::{CredalSet, Pmf};

    fn precise_op(rows: &[&[f64]]) -> LowerTransitionOperator {
        LowerTransitionOperator::precise(
            rows.iter().map(|r| Pmf::new(r.to_vec()).unwrap()).collect(),
        )
        .unwrap()
    }

    fn absorb_chain() -> ChainModel {
        // From state 0, move to absorbing state 1 with probability one half.
        ChainModel::new(
            CredalSet::precise(Pmf::new(vec![1.0, 0.0]).unwrap()),
            Dynamics::Stationary(precise_op(&[&[0.5, 0.5], &[0.0, 1.0]])),
        )
        .unwrap()
    }

    fn mixed_model() -> ChainModel {
        let row0 = CredalSet::new(vec![
            Pmf::new(vec![0.3, 0.7]).unwrap(),
            Pmf::new(vec![0.6, 0.4]).unwrap(),
        ])
        .unwrap();
        let row1 = CredalSet::precise(Pmf::new(vec![1.0, 0.0]).unwrap());
        ChainModel::new(
            CredalSet::precise(Pmf::new(vec![0.5, 0.5]).unwrap()),
            Dynamics::Stationary(LowerTransitionOperator::new(vec![row0, row1]).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn backward_recursion_hand_example() {
        let model = mixed_model();
        let f = NGamble::new(2, 2, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let vals = williams_values(&model, &f).unwrap();
        assert!((vals.value(&[0]).unwrap() - 0.3).abs() < 1e-15);
        assert!((vals.value(&[1]).unwrap() - 1.0).abs() < 1e-15);
        assert!((vals.value(&[]).unwrap() - 0.65).abs() < 1e-15);
        assert_eq!(
            vvs_nmeasurable(&model, &f).unwrap(),
            williams_nmeasurable(&model, &f).unwrap()
        );
    }

    #[test]
    fn depth_one_gamble_is_initial_lower_expectation() {
        let model = mixed_model();
        let f = NGamble::new(2, 1, vec![1.0, 0.0]).unwrap();
        assert_eq!(williams_nmeasurable(&model, &f).unwrap(), 0.5);
    }

    #[test]
    fn hitting_trace_of_the_absorbing_chain() {
        let model = absorb_chain();
        let res = reach_limit(&model, &[1], &LimitOptions::default()).unwrap();
        assert!(res.converged);
        assert!(!res.vvs_only);
        for (k, &v) in res.trace.iter().enumerate() {
            let expect = 1.0 - 0.5_f64.powi(k as i32);
            assert!((v - expect).abs() < 1e-12, "horizon {} value {v}", k + 1);
        }
        assert!((res.value - 1.0).abs() < 1e-5);
    }

    #[test]
    fn full_target_set_saturates_at_one() {
        let model = absorb_chain();
        let res = reach_limit(&model, &[0, 1], &LimitOptions::default()).unwrap();
        assert!(res.converged);
        assert_eq!(res.value, 1.0);
        assert!(res.trace.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn staying_trace_of_the_absorbing_chain() {
        let model = absorb_chain();
        let res = safety_limit(&model, &[0], &LimitOptions::default()).unwrap();
        assert!(res.vvs_only);
        assert!(res.converged);
        for (k, &v) in res.trace.iter().enumerate() {
            let expect = 0.5_f64.powi(k as i32);
            assert!((v - expect).abs() < 1e-12);
        }
        assert!(res.value < 1e-5);
    }

    #[test]
    fn state_recursion_matches_dense_tree() {
        let row0 = CredalSet::new(vec![
            Pmf::new(vec![0.2, 0.8]).unwrap(),
            Pmf::new(vec![0.7, 0.3]).unwrap(),
        ])
        .unwrap();
        let row1 = CredalSet::new(vec![
            Pmf::new(vec![0.5, 0.5]).unwrap(),
            Pmf::new(vec![0.9, 0.1]).unwrap(),
        ])
        .unwrap();
        let model = ChainModel::new(
            CredalSet::vacuous(2).unwrap(),
            Dynamics::Stationary(LowerTransitionOperator::new(vec![row0, row1]).unwrap()),
        )
        .unwrap();
        for n in 1..=6 {
            let dense_reach =
                williams_nmeasurable(&model, &reach_gamble(2, &[1], n).unwrap()).unwrap();
            let fast = reach_value_markov(&model, &[false, true], n).unwrap();
            assert!((dense_reach - fast).abs() < 1e-12);
            let dense_safe =
                williams_nmeasurable(&model, &safety_gamble(2, &[0], n).unwrap()).unwrap();
            let fast = safety_value_markov(&model, &[true, false], n).unwrap();
            assert!((dense_safe - fast).abs() < 1e-12);
        }
    }

    #[test]
    fn gamble_sequences_are_pointwise_monotone() {
        let reach = reach_sequence(2, &[1], 4).unwrap();
        let safety = safety_sequence(2, &[0], 4).unwrap();
        for n in 1..4 {
            let r_lo = reach[n - 1].extend_to(n + 1).unwrap();
            let s_hi = safety[n - 1].extend_to(n + 1).unwrap();
            for (a, b) in r_lo.values().iter().zip(reach[n].values()) {
                assert!(a <= b);
            }
            for (a, b) in s_hi.values().iter().zip(safety[n].values()) {
                assert!(a >= b);
            }
        }
    }

    #[test]
    fn exact_hitting_probability_of_a_three_state_chain() {
        let model = ChainModel::new(
            CredalSet::precise(Pmf::new(vec![0.0, 1.0, 0.0]).unwrap()),
            Dynamics::Stationary(precise_op(&[
                &[1.0, 0.0, 0.0],
                &[0.3, 0.2, 0.5],
                &[0.0, 0.0, 1.0],
            ])),
        )
        .unwrap();
        let p = precise_reach_probability(&model, &[2]).unwrap();
        assert!((p - 0.625).abs() < 1e-12);
    }

    #[test]
    fn exact_staying_probability_with_a_trapped_class() {
        let model = ChainModel::new(
            CredalSet::precise(Pmf::new(vec![0.0, 1.0, 0.0]).unwrap()),
            Dynamics::Stationary(precise_op(&[
                &[1.0, 0.0, 0.0],
                &[0.5, 0.1, 0.4],
                &[0.0, 0.0, 1.0],
            ])),
        )
        .unwrap();
        let p = precise_safety_probability(&model, &[0, 1]).unwrap();
        assert!((p - 5.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn trace_approaches_the_exact_oracle() {
        let model = absorb_chain();
        let limit = reach_limit(&model, &[1], &LimitOptions::default()).unwrap();
        let exact = precise_reach_probability(&model, &[1]).unwrap();
        assert!((limit.value - exact).abs() < 1e-3);
        let stay = safety_limit(&model, &[0], &LimitOptions::default()).unwrap();
        let exact = precise_safety_probability(&model, &[0]).unwrap();
        assert!((stay.value - exact).abs() < 1e-3);
    }

    #[test]
    fn monotone_limit_rejects_a_dipping_trace() {
        let model = mixed_model();
        let up = reach_gamble(2, &[1], 2).unwrap();
        let down = NGamble::new(2, 2, vec![0.0; 4]).unwrap();
        let err = monotone_limit_nondecreasing(
            &model,
            vec![up, down],
            &LimitOptions::default(),
        )
        .unwrap_err();
        match err {
            Error::NotMonotone { step, .. } => assert_eq!(step, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
