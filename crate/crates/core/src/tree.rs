//! The event tree of a process on a finite state space.
//!
//! A situation is a finite sequence of states; the empty sequence is the root.
//! Gambles, processes and selections that depend on at most the first `depth`
//! states are stored densely, one value per sequence, with sequences of a
//! fixed length ordered lexicographically (first state most significant).
//! That order makes the subtree below a situation a contiguous block, which
//! `restrict` and `extend_to` exploit.

use crate::error::Error;
use crate::Result;
use std::fmt;

/// Number of length-`len` state sequences, `num_states^len`.
pub fn num_sequences(num_states: usize, len: usize) -> usize {
    checked_num_sequences(num_states, len).expect("sequence count overflows usize")
}

/// As [`num_sequences`], `None` when the count overflows `usize`.
pub fn checked_num_sequences(num_states: usize, len: usize) -> Option<usize> {
    let mut n = 1usize;
    for _ in 0..len {
        n = n.checked_mul(num_states)?;
    }
    Some(n)
}

/// Largest dense level accepted when enumerating the tree explicitly.
pub const MAX_DENSE_VALUES: usize = 1 << 22;

/// Errors out when a dense level of `num_states^depth` values is too large
/// to materialize.
pub fn guard_dense(num_states: usize, depth: usize) -> Result<()> {
    match checked_num_sequences(num_states, depth) {
        Some(n) if n <= MAX_DENSE_VALUES => Ok(()),
        _ => Err(Error::InvalidArgument(format!(
            "depth {depth} over {num_states} states exceeds the dense size guard"
        ))),
    }
}

/// Lexicographic rank of `seq` among sequences of its length.
///
/// The first state is the most significant digit. Panics if a state is out of
/// range.
pub fn seq_index(num_states: usize, seq: &[usize]) -> usize {
    let mut idx = 0usize;
    for &x in seq {
        assert!(x < num_states, "state {x} out of range for {num_states} states");
        idx = idx * num_states + x;
    }
    idx
}

/// Inverse of [`seq_index`]: the length-`len` sequence of the given rank.
pub fn seq_from_index(num_states: usize, len: usize, mut index: usize) -> Vec<usize> {
    let mut seq = vec![0usize; len];
    for slot in seq.iter_mut().rev() {
        *slot = index % num_states;
        index /= num_states;
    }
    debug_assert_eq!(index, 0, "rank out of range");
    seq
}

/// All length-`len` sequences in lexicographic order.
pub fn sequences(num_states: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..num_sequences(num_states, len)).map(move |i| seq_from_index(num_states, len, i))
}

/// A finite sequence of states; the empty sequence is the root situation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Situation(Vec<usize>);

impl Situation {
    pub fn root() -> Self {
        Situation(Vec::new())
    }

    pub fn new(states: Vec<usize>) -> Self {
        Situation(states)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn states(&self) -> &[usize] {
        &self.0
    }

    /// The situation extended by one more state.
    pub fn child(&self, x: usize) -> Situation {
        let mut states = self.0.clone();
        states.push(x);
        Situation(states)
    }

    /// The situation with the last state removed; `None` at the root.
    pub fn parent(&self) -> Option<Situation> {
        if self.0.is_empty() {
            None
        } else {
            Some(Situation(self.0[..self.0.len() - 1].to_vec()))
        }
    }
}

impl std::ops::Deref for Situation {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Situation {
    fn from(states: Vec<usize>) -> Self {
        Situation(states)
    }
}

impl From<&[usize]> for Situation {
    fn from(states: &[usize]) -> Self {
        Situation(states.to_vec())
    }
}

impl fmt::Display for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "\u{25a1}");
        }
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// A gamble that depends on at most the first `depth` states of a path.
///
/// `values[i]` is the payoff on every path whose first `depth` states form
/// the rank-`i` sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct NGamble {
    num_states: usize,
    depth: usize,
    values: Vec<f64>,
}

impl NGamble {
    pub fn new(num_states: usize, depth: usize, values: Vec<f64>) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::InvalidArgument("state space is empty".into()));
        }
        let expected = checked_num_sequences(num_states, depth)
            .ok_or(Error::InvalidArgument(format!("depth {depth} is too large")))?;
        if values.len() != expected {
            return Err(Error::SizeMismatch {
                expected,
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamble value {v} is not finite")));
        }
        Ok(NGamble {
            num_states,
            depth,
            values,
        })
    }

    /// The constant gamble, measurable at depth zero.
    pub fn constant(num_states: usize, value: f64) -> Result<Self> {
        NGamble::new(num_states, 0, vec![value])
    }

    /// Builds a gamble by evaluating `f` on every length-`depth` sequence.
    pub fn from_fn(num_states: usize, depth: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let values = sequences(num_states, depth).map(|s| f(&s)).collect();
        NGamble::new(num_states, depth, values)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Payoff on a path, read from its first `depth` states.
    pub fn eval(&self, path: &[usize]) -> Result<f64> {
        if path.len() < self.depth {
            return Err(Error::PathTooShort {
                need: self.depth,
                got: path.len(),
            });
        }
        Ok(self.values[seq_index(self.num_states, &path[..self.depth])])
    }

    /// The same gamble viewed as depending on `depth` states, `depth` at
    /// least the current one; each value is repeated over the deeper block.
    pub fn extend_to(&self, depth: usize) -> Result<Self> {
        if depth < self.depth {
            return Err(Error::InvalidArgument(format!(
                "cannot shrink depth {} to {depth}",
                self.depth
            )));
        }
        let block = num_sequences(self.num_states, depth - self.depth);
        let mut values = Vec::with_capacity(self.values.len() * block);
        for &v in &self.values {
            values.extend(std::iter::repeat(v).take(block));
        }
        NGamble::new(self.num_states, depth, values)
    }

    /// The gamble seen from situation `s`: first `s.len()` states fixed.
    ///
    /// If `s` is at least as long as the depth, the result is the constant
    /// gamble with the payoff already determined by `s`.
    pub fn restrict(&self, s: &[usize]) -> Result<Self> {
        if s.len() >= self.depth {
            return NGamble::constant(self.num_states, self.eval(s)?);
        }
        let tail = self.depth - s.len();
        let block = num_sequences(self.num_states, tail);
        let start = seq_index(self.num_states, s) * block;
        NGamble::new(self.num_states, tail, self.values[start..start + block].to_vec())
    }

    /// Pointwise minimum with another gamble of the same shape.
    pub fn min_with(&self, other: &NGamble) -> Result<Self> {
        self.zip_with(other, f64::min)
    }

    /// Pointwise maximum with another gamble of the same shape.
    pub fn max_with(&self, other: &NGamble) -> Result<Self> {
        self.zip_with(other, f64::max)
    }

    fn zip_with(&self, other: &NGamble, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if other.num_states != self.num_states || other.depth != self.depth {
            return Err(Error::SizeMismatch {
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        NGamble::new(self.num_states, self.depth, values)
    }
}

/// Payoff of `f` on `path`; the path must reveal at least `f.depth()` states.
pub fn eval_ngamble(f: &NGamble, path: &[usize]) -> Result<f64> {
    f.eval(path)
}

/// A real-valued function on all situations of length at most `depth`.
///
/// `levels[k]` holds one value per length-`k` sequence, in rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct RealProcess {
    num_states: usize,
    depth: usize,
    levels: Vec<Vec<f64>>,
}

impl RealProcess {
    pub fn new(num_states: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::InvalidArgument("state space is empty".into()));
        }
        if levels.is_empty() {
            return Err(Error::InvalidArgument("process needs a root level".into()));
        }
        for (k, level) in levels.iter().enumerate() {
            let expected = num_sequences(num_states, k);
            if level.len() != expected {
                return Err(Error::SizeMismatch {
                    expected,
                    got: level.len(),
                });
            }
        }
        Ok(RealProcess {
            num_states,
            depth: levels.len() - 1,
            levels,
        })
    }

    pub fn zeros(num_states: usize, depth: usize) -> Result<Self> {
        checked_num_sequences(num_states, depth)
            .ok_or(Error::InvalidArgument(format!("depth {depth} is too large")))?;
        let levels = (0..=depth)
            .map(|k| vec![0.0; num_sequences(num_states, k)])
            .collect();
        RealProcess::new(num_states, levels)
    }

    /// Builds a process by evaluating `f` on every situation up to `depth`.
    pub fn from_fn(
        num_states: usize,
        depth: usize,
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self> {
        let levels = (0..=depth)
            .map(|k| sequences(num_states, k).map(|s| f(&s)).collect())
            .collect();
        RealProcess::new(num_states, levels)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Largest situation length the process is defined on.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn value(&self, s: &[usize]) -> Result<f64> {
        if s.len() > self.depth {
            return Err(Error::InvalidArgument(format!(
                "situation length {} beyond process depth {}",
                s.len(),
                self.depth
            )));
        }
        Ok(self.levels[s.len()][seq_index(self.num_states, s)])
    }

    pub fn set(&mut self, s: &[usize], v: f64) -> Result<()> {
        if s.len() > self.depth {
            return Err(Error::InvalidArgument(format!(
                "situation length {} beyond process depth {}",
                s.len(),
                self.depth
            )));
        }
        self.levels[s.len()][seq_index(self.num_states, s)] = v;
        Ok(())
    }

    /// The process seen from situation `s`: value at `t` is the original
    /// value at `s` followed by `t`.
    pub fn restrict(&self, s: &[usize]) -> Result<Self> {
        if s.len() > self.depth {
            return Err(Error::InvalidArgument(format!(
                "situation length {} beyond process depth {}",
                s.len(),
                self.depth
            )));
        }
        let levels = (0..=self.depth - s.len())
            .map(|k| {
                let block = num_sequences(self.num_states, k);
                let start = seq_index(self.num_states, s) * block;
                self.levels[s.len() + k][start..start + block].to_vec()
            })
            .collect();
        RealProcess::new(self.num_states, levels)
    }
}

/// A depth-limited selection: a gamble on the next state for every situation
/// shorter than `depth`, and the zero gamble everywhere else.
///
/// `levels[k]` stores the gambles for length-`k` situations, concatenated in
/// rank order, `num_states` entries each.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    num_states: usize,
    depth: usize,
    levels: Vec<Vec<f64>>,
}

impl Selection {
    pub fn new(num_states: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::InvalidArgument("state space is empty".into()));
        }
        for (k, level) in levels.iter().enumerate() {
            let expected = num_sequences(num_states, k) * num_states;
            if level.len() != expected {
                return Err(Error::SizeMismatch {
                    expected,
                    got: level.len(),
                });
            }
        }
        Ok(Selection {
            num_states,
            depth: levels.len(),
            levels,
        })
    }

    /// The selection that is zero everywhere up to `depth`.
    pub fn zeros(num_states: usize, depth: usize) -> Result<Self> {
        checked_num_sequences(num_states, depth)
            .ok_or(Error::InvalidArgument(format!("depth {depth} is too large")))?;
        let levels = (0..depth)
            .map(|k| vec![0.0; num_sequences(num_states, k) * num_states])
            .collect();
        Selection::new(num_states, levels)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Situations of length `depth` and beyond carry the zero gamble.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// The gamble attached to `s`; `None` means the zero gamble beyond depth.
    pub fn gamble_at(&self, s: &[usize]) -> Option<&[f64]> {
        if s.len() >= self.depth {
            return None;
        }
        let start = seq_index(self.num_states, s) * self.num_states;
        Some(&self.levels[s.len()][start..start + self.num_states])
    }

    /// Payoff of the gamble at `s` when the next state is `x`.
    pub fn gamble_value(&self, s: &[usize], x: usize) -> f64 {
        assert!(x < self.num_states, "state {x} out of range");
        match self.gamble_at(s) {
            Some(g) => g[x],
            None => 0.0,
        }
    }

    pub fn set_gamble(&mut self, s: &[usize], g: &[f64]) -> Result<()> {
        if g.len() != self.num_states {
            return Err(Error::DimensionMismatch {
                expected: self.num_states,
                got: g.len(),
            });
        }
        if s.len() >= self.depth {
            return Err(Error::InvalidArgument(format!(
                "situation length {} beyond selection depth {}",
                s.len(),
                self.depth
            )));
        }
        let start = seq_index(self.num_states, s) * self.num_states;
        self.levels[s.len()][start..start + self.num_states].copy_from_slice(g);
        Ok(())
    }

    /// Accumulated capital along `path`: the sum over steps `i` of the gamble
    /// at the length-`i-1` prefix, paid at the state observed at step `i`.
    pub fn capital(&self, path: &[usize]) -> f64 {
        let mut total = 0.0;
        for i in 0..path.len().min(self.depth) {
            total += self.gamble_value(&path[..i], path[i]);
        }
        total
    }

    /// Capital as a process on situations up to `depth` levels deep.
    pub fn capital_process(&self, depth: usize) -> Result<RealProcess> {
        let mut levels: Vec<Vec<f64>> = Vec::with_capacity(depth + 1);
        levels.push(vec![0.0]);
        for k in 1..=depth {
            let prev = &levels[k - 1];
            let mut level = Vec::with_capacity(num_sequences(self.num_states, k));
            for (pi, prefix) in sequences(self.num_states, k - 1).enumerate() {
                for x in 0..self.num_states {
                    level.push(prev[pi] + self.gamble_value(&prefix, x));
                }
            }
            levels.push(level);
        }
        RealProcess::new(self.num_states, levels)
    }

    /// Limit superior of the capital along an infinite path through `path`.
    ///
    /// The capital is constant from length `depth` on, so any path revealing
    /// at least `depth` states determines the limit exactly.
    pub fn limsup_capital(&self, path: &[usize]) -> Result<f64> {
        if path.len() < self.depth {
            return Err(Error::PathTooShort {
                need: self.depth,
                got: path.len(),
            });
        }
        Ok(self.capital(path))
    }

    /// The selection seen from situation `s`, gambles re-indexed to the
    /// subtree below `s`.
    pub fn restrict(&self, s: &[usize]) -> Result<Self> {
        if s.len() >= self.depth {
            return Selection::zeros(self.num_states, 0);
        }
        let levels = (0..self.depth - s.len())
            .map(|k| {
                let block = num_sequences(self.num_states, k) * self.num_states;
                let start = seq_index(self.num_states, s) * block;
                self.levels[s.len() + k][start..start + block].to_vec()
            })
            .collect();
        Selection::new(self.num_states, levels)
    }

    /// Pointwise sum with another selection; depths may differ.
    pub fn add(&self, other: &Selection) -> Result<Self> {
        if other.num_states != self.num_states {
            return Err(Error::DimensionMismatch {
                expected: self.num_states,
                got: other.num_states,
            });
        }
        let depth = self.depth.max(other.depth);
        let mut out = Selection::zeros(self.num_states, depth)?;
        for k in 0..depth {
            let level = &mut out.levels[k];
            if let Some(a) = self.levels.get(k) {
                for (o, &v) in level.iter_mut().zip(a) {
                    *o += v;
                }
            }
            if let Some(b) = other.levels.get(k) {
                for (o, &v) in level.iter_mut().zip(b) {
                    *o += v;
                }
            }
        }
        Ok(out)
    }
}
