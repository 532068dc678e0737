//! Threshold antichains `Λ_{k,r}` on the word tree and their power sums.
//!
//! `Λ_{k,r}` collects the words `σ` with `h(σ⁻) ≥ η̲_r / k > h(σ)`, where
//! `σ⁻` drops the last symbol. Since `h` shrinks by at least the factor
//! `η̄_r < 1` per symbol, a depth-first descent from `θ` that stops at the
//! first word below the threshold visits exactly the ancestors of `Λ_{k,r}`.

mod lemmas;

pub use lemmas::{lemma_suite, CheckStatus, LemmaCheck, LemmaReport, LEMMA_REL_TOL};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{CondensationSystem, Word};
use crate::weights::{CylinderWeights, WeightKernel};

pub const DEFAULT_WORD_BUDGET: usize = 1_000_000;

/// Relative tolerance for `h(σ) ≥ η̲_r / k`. Exact ties are common (for
/// equal ratios every `h` on a level can hit the threshold) and rounding in
/// the products must not decide them.
pub const THRESHOLD_REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaBounds {
    /// `min_i min{p_0 t_i + p_i, t_i} s_i^r`
    pub lower: f64,
    /// `max_i max{p_0 t_i + p_i, t_i} s_i^r`
    pub upper: f64,
}

pub fn eta_bounds(system: &CondensationSystem, r: f64) -> EtaBounds {
    let ratios = system.ratios();
    let mut lower = f64::INFINITY;
    let mut upper = 0.0f64;
    for i in 0..system.n_maps() {
        let sr = ratios[i].powf(r);
        let t = system.t()[i];
        let mixed = system.p0() * t + system.p()[i];
        lower = lower.min(mixed.min(t) * sr);
        upper = upper.max(mixed.max(t) * sr);
    }
    EtaBounds { lower, upper }
}

/// A word together with the weights carried down to it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AntichainWord {
    pub word: Word,
    pub h1: f64,
    pub h2: f64,
    /// `t_σ s_σ^r`
    pub ts: f64,
}

impl AntichainWord {
    pub fn h(&self) -> f64 {
        self.h1 + self.h2
    }

    /// `p_σ s_σ^r`, which is `h⁽²⁾(σ)` itself.
    pub fn ps(&self) -> f64 {
        self.h2
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Antichain {
    pub k: u64,
    pub r: f64,
    pub eta_lower: f64,
    pub eta_upper: f64,
    pub threshold: f64,
    pub words: Vec<AntichainWord>,
    pub l1k: usize,
    pub l2k: usize,
}

impl Antichain {
    pub fn cardinality(&self) -> usize {
        self.words.len()
    }

    pub fn word_list(&self) -> Vec<Word> {
        self.words.iter().map(|w| w.word.clone()).collect()
    }

    /// `Σ h(σ)^{s/(s+r)}` in lexicographic order.
    pub fn power_sum(&self, s: f64) -> f64 {
        power_sum_of(self.words.iter().map(AntichainWord::h), s, self.r)
    }

    pub fn h_total(&self) -> f64 {
        self.words.iter().map(AntichainWord::h).sum()
    }

    /// `log(k / η̲²) / (−log η̄) + 1`, an a-priori bound on `l2k`.
    pub fn depth_bound(&self) -> f64 {
        (self.k as f64 / (self.eta_lower * self.eta_lower)).ln() / -self.eta_upper.ln() + 1.0
    }
}

fn above(h: f64, threshold: f64) -> bool {
    h >= threshold * (1.0 - THRESHOLD_REL_TOL)
}

/// Builds `Λ_{k,r}`, refusing to emit more than `word_budget` words.
pub fn build_lambda(system: &CondensationSystem, r: f64, k: u64, word_budget: usize) -> Result<Antichain> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("order r = {r} must be positive")));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let eta = eta_bounds(system, r);
    let threshold = eta.lower / k as f64;
    let kernel = WeightKernel::new(system, r);
    let n = system.n_maps();

    let mut words = Vec::new();
    let mut stack: Vec<(Vec<usize>, CylinderWeights, f64)> = vec![(Vec::new(), kernel.root(), 1.0)];
    while let Some((prefix, weights, ts)) = stack.pop() {
        debug_assert!(above(weights.h(), threshold));
        // children are pushed in reverse so they pop in lexicographic order
        for i in (0..n).rev() {
            let child = kernel.child(weights, i);
            let child_ts = ts * kernel.ts(i);
            let mut indices = Vec::with_capacity(prefix.len() + 1);
            indices.extend_from_slice(&prefix);
            indices.push(i);
            if above(child.h(), threshold) {
                stack.push((indices, child, child_ts));
            } else {
                words.push(AntichainWord {
                    word: Word::from_indices(indices),
                    h1: child.h1,
                    h2: child.h2,
                    ts: child_ts,
                });
                if words.len() > word_budget {
                    return Err(Error::BudgetExceeded { budget: word_budget, count: words.len() });
                }
            }
        }
    }
    // the pops interleave emitted siblings with descents, so restore order
    words.sort_by(|a, b| a.word.cmp(&b.word));
    let l1k = words.iter().map(AntichainWord::depth).min().unwrap_or(0);
    let l2k = words.iter().map(AntichainWord::depth).max().unwrap_or(0);
    Ok(Antichain { k, r, eta_lower: eta.lower, eta_upper: eta.upper, threshold, words, l1k, l2k })
}

/// Every word of length `depth` with its weights, in lexicographic order.
pub fn enumerate_level(system: &CondensationSystem, r: f64, depth: usize) -> Vec<AntichainWord> {
    let kernel = WeightKernel::new(system, r);
    let n = system.n_maps();
    let mut level = vec![(Vec::new(), kernel.root(), 1.0)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * n);
        for (prefix, weights, ts) in &level {
            for i in 0..n {
                let mut indices = prefix.clone();
                indices.push(i);
                next.push((indices, kernel.child(*weights, i), ts * kernel.ts(i)));
            }
        }
        level = next;
    }
    level
        .into_iter()
        .map(|(indices, w, ts)| AntichainWord { word: Word::from_indices(indices), h1: w.h1, h2: w.h2, ts })
        .collect()
}

/// `Σ h(σ)^{s/(s+r)}` over an arbitrary word set, evaluated word by word.
pub fn power_sum(system: &CondensationSystem, words: &[Word], r: f64, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidInput(format!("exponent s = {s} must be positive")));
    }
    let hs =
        words.iter().map(|w| crate::weights::h_components(system, w, r).map(|c| c.h())).collect::<Result<Vec<_>>>()?;
    Ok(power_sum_of(hs, s, r))
}

pub(crate) fn power_sum_of(values: impl IntoIterator<Item = f64>, s: f64, r: f64) -> f64 {
    let x = s / (s + r);
    values.into_iter().map(|h| h.powf(x)).sum()
}
