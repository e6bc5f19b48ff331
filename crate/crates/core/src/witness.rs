//! Executable certificates for extension values.
//!
//! A certificate for a lower bound `alpha` on the value of a gamble is an
//! almost-desirable selection whose capital process is dominated by
//! `f - alpha` at a fixed horizon. Both halves of that claim are directly
//! checkable, and [`lp_witness_search`] produces certificates by linear
//! programming, independently of the backward recursion that computes the
//! same values.
//!
//! The remaining constructions transport certificates between horizons:
//! truncation caps a selection's depth, greedy paths exhibit a path along
//! which capital never falls, first-hit cutoffs freeze a selection once its
//! capital has dropped close to a limit gamble, and stitching assembles one
//! selection from a whole family while keeping its capital within a chosen
//! budget of the family's running maximum.

use crate::chain::ChainModel;
use crate::error::Error;
use crate::extension::{safety_limit, LimitOptions};
use crate::simplex::{self, Constraint, ConstraintKind, Lp};
use crate::tree::{guard_dense, num_sequences, seq_index, sequences, NGamble, RealProcess, Selection, Situation};
use crate::Result;
use serde::Serialize;

/// Slack allowed below zero in almost-desirability checks.
pub const AD_TOL: f64 = 1e-12;
/// Slack allowed below zero in domination checks.
pub const DOM_TOL: f64 = 1e-12;
/// A probe flags a gap when the certified upper bound sits this far under
/// the limit value.
pub const GAP_THRESHOLD: f64 = 0.01;

/// A claimed lower bound together with the selection that witnesses it.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub alpha: f64,
    pub selection: Selection,
    /// Depth at which domination is claimed; at least the selection depth.
    pub horizon: usize,
}

impl Certificate {
    pub fn new(alpha: f64, selection: Selection, horizon: usize) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("bound {alpha} is not finite")));
        }
        if selection.depth() > horizon {
            return Err(Error::InvalidArgument(format!(
                "selection depth {} exceeds horizon {horizon}",
                selection.depth()
            )));
        }
        Ok(Certificate {
            alpha,
            selection,
            horizon,
        })
    }
}

/// Worst local lower expectation of a selection's gambles.
#[derive(Debug, Clone)]
pub struct DesirabilityReport {
    /// Smallest local lower expectation over all situations with a gamble.
    pub min_value: f64,
    /// A situation attaining it.
    pub worst: Situation,
    /// Number of situations below `-AD_TOL`.
    pub violations: usize,
}

/// Evaluates every local lower expectation of the selection's gambles.
///
/// The selection is almost desirable when the minimum is at least `-AD_TOL`.
pub fn check_almost_desirable(model: &ChainModel, sel: &Selection) -> Result<DesirabilityReport> {
    if sel.num_states() != model.num_states() {
        return Err(Error::DimensionMismatch {
            expected: model.num_states(),
            got: sel.num_states(),
        });
    }
    if sel.depth() > 0 {
        guard_dense(sel.num_states(), sel.depth() - 1)?;
    }
    let mut min_value = f64::INFINITY;
    let mut worst = Situation::root();
    let mut violations = 0usize;
    for k in 0..sel.depth() {
        for s in sequences(sel.num_states(), k) {
            let local = model.local_model(&s)?;
            let g = sel.gamble_at(&s).expect("within selection depth");
            let v = local.lower_expectation(g)?;
            if v < min_value {
                min_value = v;
                worst = Situation::from(s.clone());
            }
            if v < -AD_TOL {
                violations += 1;
            }
        }
    }
    if sel.depth() == 0 {
        min_value = 0.0;
    }
    Ok(DesirabilityReport {
        min_value,
        worst,
        violations,
    })
}

/// Whether every local lower expectation of the selection is at least
/// `-AD_TOL`.
pub fn is_almost_desirable(model: &ChainModel, sel: &Selection) -> Result<bool> {
    Ok(check_almost_desirable(model, sel)?.violations == 0)
}

/// Smallest slack of `f - alpha >= capital` over all horizon-length paths,
/// along with a path attaining it.
pub fn domination_report(f: &NGamble, cert: &Certificate) -> Result<(f64, Vec<usize>)> {
    if f.num_states() != cert.selection.num_states() {
        return Err(Error::DimensionMismatch {
            expected: cert.selection.num_states(),
            got: f.num_states(),
        });
    }
    if cert.selection.depth() > cert.horizon {
        return Err(Error::InvalidArgument(format!(
            "selection depth {} exceeds horizon {}",
            cert.selection.depth(),
            cert.horizon
        )));
    }
    if f.depth() > cert.horizon {
        return Err(Error::InvalidArgument(format!(
            "gamble depth {} exceeds horizon {}",
            f.depth(),
            cert.horizon
        )));
    }
    guard_dense(f.num_states(), cert.horizon)?;
    let mut min_slack = f64::INFINITY;
    let mut worst = Vec::new();
    for w in sequences(f.num_states(), cert.horizon) {
        let slack = f.eval(&w)? - cert.alpha - cert.selection.capital(&w);
        if slack < min_slack {
            min_slack = slack;
            worst = w;
        }
    }
    Ok((min_slack, worst))
}

/// Whether `f - alpha` dominates the selection's capital at the horizon,
/// within `DOM_TOL`.
pub fn dominates(f: &NGamble, cert: &Certificate) -> Result<bool> {
    Ok(domination_report(f, cert)?.0 >= -DOM_TOL)
}

/// Searches for the best certificate at the given horizon by linear
/// programming.
///
/// Variables are the bound and one gamble per situation shorter than the
/// horizon. Almost-desirability is demanded extreme point by extreme point,
/// and domination path by path. The returned bound is re-derived from the
/// polished selection, so the certificate passes [`dominates`] and
/// [`check_almost_desirable`] as stated, not merely up to solver tolerance.
pub fn lp_witness_search(model: &ChainModel, f: &NGamble, horizon: usize) -> Result<Certificate> {
    let nx = model.num_states();
    if f.num_states() != nx {
        return Err(Error::DimensionMismatch {
            expected: nx,
            got: f.num_states(),
        });
    }
    if horizon < f.depth() {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} below gamble depth {}",
            f.depth()
        )));
    }
    guard_dense(nx, horizon)?;
    let fx = f.extend_to(horizon)?;
    let fmin = fx.values().iter().cloned().fold(f64::INFINITY, f64::min);

    // Variable 0 is the shifted bound; gambles follow level by level.
    let mut offsets = Vec::with_capacity(horizon);
    let mut next = 1usize;
    for k in 0..horizon {
        offsets.push(next);
        next += num_sequences(nx, k) * nx;
    }
    let num_vars = next;
    let svar = |k: usize, si: usize, x: usize| offsets[k] + si * nx + x;

    let mut constraints = Vec::new();
    for k in 0..horizon {
        for (si, s) in sequences(nx, k).enumerate() {
            let local = model.local_model(&s)?;
            for p in local.extremes() {
                let mut coeffs = vec![0.0; num_vars];
                for x in 0..nx {
                    coeffs[svar(k, si, x)] = -p[x];
                }
                constraints.push(Constraint {
                    coeffs,
                    kind: ConstraintKind::Le,
                    rhs: 0.0,
                });
            }
        }
    }
    for (wi, w) in sequences(nx, horizon).enumerate() {
        let mut coeffs = vec![0.0; num_vars];
        coeffs[0] = 1.0;
        for i in 0..horizon {
            coeffs[svar(i, seq_index(nx, &w[..i]), w[i])] += 1.0;
        }
        constraints.push(Constraint {
            coeffs,
            kind: ConstraintKind::Le,
            rhs: fx.values()[wi] - fmin,
        });
    }

    let mut objective = vec![0.0; num_vars];
    objective[0] = 1.0;
    let sol = simplex::solve(&Lp {
        num_vars,
        objective,
        constraints,
    })?;

    let mut sel = Selection::zeros(nx, horizon)?;
    for k in 0..horizon {
        for si in 0..num_sequences(nx, k) {
            let s = crate::tree::seq_from_index(nx, k, si);
            let g: Vec<f64> = (0..nx).map(|x| sol.values[svar(k, si, x)]).collect();
            sel.set_gamble(&s, &g)?;
        }
    }
    polish_selection(model, &mut sel)?;

    let mut alpha = f64::INFINITY;
    for (wi, w) in sequences(nx, horizon).enumerate() {
        let gap = fx.values()[wi] - sel.capital(&w);
        if gap < alpha {
            alpha = gap;
        }
    }
    Certificate::new(alpha, sel, horizon)
}

/// Lifts each gamble just enough that every local lower expectation clears
/// `-AD_TOL`; solver residuals are tiny, so the lift is too.
fn polish_selection(model: &ChainModel, sel: &mut Selection) -> Result<()> {
    let nx = sel.num_states();
    for k in 0..sel.depth() {
        for s in sequences(nx, k) {
            let local = model.local_model(&s)?;
            for _ in 0..4 {
                let g = sel.gamble_at(&s).expect("within depth").to_vec();
                let d = local.lower_expectation(&g)?;
                if d >= 0.0 {
                    break;
                }
                let lifted: Vec<f64> = g.iter().map(|v| v - d).collect();
                sel.set_gamble(&s, &lifted)?;
            }
            let d = local.lower_expectation(sel.gamble_at(&s).expect("within depth"))?;
            if d < -AD_TOL {
                return Err(Error::Numerical(format!(
                    "could not lift situation `{}` above tolerance: {d:e}",
                    Situation::from(s)
                )));
            }
        }
    }
    Ok(())
}

/// The selection with every gamble at depth `n` or deeper replaced by zero.
///
/// Its capital agrees with the original up to length `n` and is constant
/// afterwards, so its limit superior is the original capital at length `n`.
pub fn truncate_selection(sel: &Selection, n: usize) -> Selection {
    let keep = n.min(sel.depth());
    Selection::new(sel.num_states(), sel.levels()[..keep].to_vec())
        .expect("prefix of valid levels")
}

/// A path along which the selection's capital never decreases.
///
/// At each situation some payoff of the local gamble must be non-negative;
/// otherwise every pmf would give it negative expectation and the selection
/// could not be almost desirable. Payoffs down to `-AD_TOL` are accepted as
/// a numerical fallback; anything worse is reported as a refutation.
pub fn greedy_nonnegative_path(sel: &Selection, length: usize) -> Result<Vec<usize>> {
    let nx = sel.num_states();
    let mut path = Vec::with_capacity(length);
    for _ in 0..length {
        let x = match sel.gamble_at(&path) {
            None => 0,
            Some(g) => {
                match (0..nx).find(|&x| g[x] >= 0.0) {
                    Some(x) => x,
                    None => {
                        let best = (0..nx)
                            .max_by(|&a, &b| g[a].partial_cmp(&g[b]).unwrap())
                            .expect("non-empty state space");
                        if g[best] < -AD_TOL {
                            return Err(Error::NotAlmostDesirable {
                                situation: Situation::from(path.clone()).to_string(),
                                value: g[best],
                            });
                        }
                        best
                    }
                }
            }
        };
        path.push(x);
    }
    Ok(path)
}

/// First-hit data of a capital-versus-gamble stopping rule.
///
/// For each path of length `depth`, `n_star` holds the first step `n` at
/// which `capital_n - f_n <= beta`, or `None` when no step up to `depth`
/// qualifies.
#[derive(Debug, Clone)]
pub struct CutoffData {
    pub num_states: usize,
    pub depth: usize,
    pub beta: f64,
    pub n_star: Vec<Option<usize>>,
}

impl CutoffData {
    /// First-hit index of the path, which must have length `depth`.
    pub fn n_star_of(&self, w: &[usize]) -> Result<Option<usize>> {
        if w.len() != self.depth {
            return Err(Error::PathTooShort {
                need: self.depth,
                got: w.len(),
            });
        }
        Ok(self.n_star[seq_index(self.num_states, w)])
    }

    /// Whether every path hits the rule within `depth`.
    pub fn fully_resolved(&self) -> bool {
        self.n_star.iter().all(Option::is_some)
    }

    /// The largest first-hit index once all paths are resolved.
    pub fn emptiness_horizon(&self) -> Option<usize> {
        self.n_star
            .iter()
            .copied()
            .collect::<Option<Vec<_>>>()
            .map(|ns| ns.into_iter().max().unwrap_or(0))
    }

    /// Checks that the first-hit index is determined by the first `n` states
    /// whenever it equals `n`.
    pub fn is_cylinder_constant(&self) -> bool {
        let nx = self.num_states;
        for (wi, n) in self.n_star.iter().enumerate() {
            let Some(n) = *n else { continue };
            let tail = num_sequences(nx, self.depth - n);
            let lo = (wi / tail) * tail;
            for other in lo..lo + tail {
                if self.n_star[other] != Some(n) {
                    return false;
                }
            }
        }
        true
    }
}

/// Evaluates the first-hit rule `capital_n - f_n <= beta` on every path.
///
/// `f_seq[n]` must depend on at most the first `n` states, so each step of
/// the rule is decided by the path prefix it concerns.
pub fn compute_cutoff(
    f_seq: &[NGamble],
    sel: &Selection,
    beta: f64,
    depth: usize,
) -> Result<CutoffData> {
    if f_seq.is_empty() {
        return Err(Error::InvalidArgument("empty gamble sequence".into()));
    }
    let nx = sel.num_states();
    for (n, f) in f_seq.iter().enumerate() {
        if f.num_states() != nx {
            return Err(Error::DimensionMismatch {
                expected: nx,
                got: f.num_states(),
            });
        }
        if f.depth() > n {
            return Err(Error::InvalidArgument(format!(
                "gamble {n} of the sequence looks {} states ahead",
                f.depth()
            )));
        }
    }
    guard_dense(nx, depth)?;
    let last = depth.min(f_seq.len() - 1);
    let mut n_star = Vec::with_capacity(num_sequences(nx, depth));
    for w in sequences(nx, depth) {
        let mut hit = None;
        for n in 0..=last {
            let cap = sel.capital(&w[..n]);
            let fv = f_seq[n].eval(&w)?;
            if cap - fv <= beta {
                hit = Some(n);
                break;
            }
        }
        n_star.push(hit);
    }
    Ok(CutoffData {
        num_states: nx,
        depth,
        beta,
        n_star,
    })
}

/// Freezes the selection once the cutoff rule has fired along its history.
///
/// On a path whose first-hit index is `n`, the result's capital stops
/// changing at length `n`, so its limit superior is the original capital of
/// the length-`n` prefix.
pub fn cutoff_selection(sel: &Selection, cutoff: &CutoffData) -> Result<Selection> {
    if sel.num_states() != cutoff.num_states {
        return Err(Error::DimensionMismatch {
            expected: cutoff.num_states,
            got: sel.num_states(),
        });
    }
    let nx = sel.num_states();
    let depth = sel.depth().min(cutoff.depth);
    let mut out = Selection::zeros(nx, depth)?;
    for k in 0..depth {
        let tail = num_sequences(nx, cutoff.depth - k);
        for (si, s) in sequences(nx, k).enumerate() {
            let lo = si * tail;
            let fired = cutoff.n_star[lo..lo + tail]
                .iter()
                .map(|n| n.unwrap_or(usize::MAX))
                .min()
                .expect("non-empty block")
                <= k;
            if !fired {
                out.set_gamble(&s, sel.gamble_at(&s).expect("within depth"))?;
            }
        }
    }
    Ok(out)
}

/// Budget spent per tree level by the stitching construction.
pub fn stitch_margin(eps: f64, level: usize) -> f64 {
    eps * 0.5f64.powi(level as i32 + 2)
}

/// Output of [`stitch_selection`].
#[derive(Debug, Clone)]
pub struct StitchResult {
    /// The assembled selection.
    pub selection: Selection,
    /// Running maximum of the family's capitals, per situation.
    pub surrogate: RealProcess,
    /// `n_star[k][si]`: which family member the situation's gamble came from.
    pub n_star: Vec<Vec<usize>>,
    /// Smallest value of `surrogate + eps/2 - capital` over all full paths.
    pub bound_margin: f64,
}

/// Assembles one selection from a family so that its capital stays within
/// `eps/2` of the family's pointwise-maximum capital.
///
/// At each situation the first family member whose capital there comes
/// within the level's budget of the maximum lends its gamble. The resulting
/// capital increments telescope against the maximum, so the bound holds with
/// room to spare; it is still verified on every path before returning.
pub fn stitch_selection(family: &[Selection], eps: f64, depth: usize) -> Result<StitchResult> {
    let first = family
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty selection family".into()))?;
    let nx = first.num_states();
    for s in family {
        if s.num_states() != nx {
            return Err(Error::DimensionMismatch {
                expected: nx,
                got: s.num_states(),
            });
        }
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("budget {eps} must be positive")));
    }
    guard_dense(nx, depth)?;

    let surrogate = RealProcess::from_fn(nx, depth, |s| {
        family
            .iter()
            .map(|m| m.capital(s))
            .fold(f64::NEG_INFINITY, f64::max)
    })?;

    let mut selection = Selection::zeros(nx, depth)?;
    let mut n_star = Vec::with_capacity(depth);
    for k in 0..depth {
        let mut level = Vec::with_capacity(num_sequences(nx, k));
        for s in sequences(nx, k) {
            let target = surrogate.value(&s)? - stitch_margin(eps, k);
            let pick = family
                .iter()
                .position(|m| m.capital(&s) >= target)
                .expect("the maximizer qualifies");
            level.push(pick);
            if let Some(g) = family[pick].gamble_at(&s) {
                selection.set_gamble(&s, g)?;
            }
        }
        n_star.push(level);
    }

    let mut bound_margin = f64::INFINITY;
    for w in sequences(nx, depth) {
        let margin = surrogate.value(&w)? + eps / 2.0 - selection.capital(&w);
        if margin < bound_margin {
            bound_margin = margin;
        }
    }
    if bound_margin < -DOM_TOL {
        return Err(Error::Numerical(format!(
            "stitched capital exceeds its budget by {:e}",
            -bound_margin
        )));
    }
    Ok(StitchResult {
        selection,
        surrogate,
        n_star,
        bound_margin,
    })
}

/// One lower bound certified by a finite-horizon certificate.
#[derive(Debug, Clone, Serialize)]
pub struct HorizonBound {
    pub horizon: usize,
    pub alpha: f64,
}

/// Bounds gathered for one sampled stay-event instance.
#[derive(Debug, Clone, Serialize)]
pub struct GapProbe {
    pub trial: usize,
    pub safe: Vec<usize>,
    /// Limit of the per-horizon trace; the limit-superior extension's value.
    pub ev_limit: f64,
    pub converged: bool,
    /// Best upper bound on the fixed-depth extension from the trace.
    pub williams_upper: f64,
    /// Certified lower bounds from finite-horizon certificates on the
    /// worst-case envelope of the event.
    pub certified_lower: Vec<HorizonBound>,
    pub gap_flagged: bool,
}

/// Outcome of [`williams_gap_search`]. Finding no flagged probe is an
/// ordinary outcome: the trace bounds the fixed-depth extension from above
/// by values that never undercut the limit.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub threshold: f64,
    pub probes: Vec<GapProbe>,
    pub any_flagged: bool,
}

/// Probes sampled stay events for daylight between the two extensions.
///
/// For each instance the per-horizon trace gives upper bounds on the
/// fixed-depth extension, while certificates can only use each path's
/// worst-case envelope, which collapses to a constant once any state lies
/// outside the safe set. Both sides are reported; a probe is flagged when
/// the upper bound dips below the limit by more than the threshold.
pub fn williams_gap_search(
    trials: usize,
    mut instance: impl FnMut(usize) -> Result<(ChainModel, Vec<usize>)>,
    cert_horizons: &[usize],
    options: &LimitOptions,
) -> Result<GapReport> {
    let mut probes = Vec::with_capacity(trials);
    for trial in 0..trials {
        let (model, safe) = instance(trial)?;
        let limit = safety_limit(&model, &safe, options)?;
        let williams_upper = limit.trace.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut mask = vec![false; model.num_states()];
        for &x in &safe {
            mask[x] = true;
        }
        let env_value = if mask.iter().all(|&b| b) { 1.0 } else { 0.0 };
        let mut certified_lower = Vec::with_capacity(cert_horizons.len());
        for &h in cert_horizons {
            let env = NGamble::constant(model.num_states(), env_value)?;
            let cert = lp_witness_search(&model, &env, h)?;
            certified_lower.push(HorizonBound {
                horizon: h,
                alpha: cert.alpha,
            });
        }
        let gap_flagged = williams_upper < limit.value - GAP_THRESHOLD;
        probes.push(GapProbe {
            trial,
            safe,
            ev_limit: limit.value,
            converged: limit.converged,
            williams_upper,
            certified_lower,
            gap_flagged,
        });
    }
    let any_flagged = probes.iter().any(|p| p.gap_flagged);
    Ok(GapReport {
        threshold: GAP_THRESHOLD,
        probes,
        any_flagged,
    })
}
