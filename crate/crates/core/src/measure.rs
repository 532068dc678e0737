//! Weighted-atom discretisations of ν and μ, and a seeded sampler for μ.
//!
//! A depth-`L` discretisation puts one atom at `f_σ(x*)` for each `σ ∈ Ω_L`,
//! with `x*` the fixed point of `f_1`. Each atom sits inside its cylinder,
//! whose diameter is at most `s_max^L`, so moving every cylinder's mass onto
//! its atom changes any `e_{n,r}` by at most `s_max^L`.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{CondensationSystem, Similitude};
use crate::weights::MassPair;

pub const DEFAULT_ATOM_BUDGET: usize = 1 << 22;
/// Samples drawn from one RNG stream; output does not depend on thread count.
pub const SAMPLE_CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomSource {
    Nu,
    Mu,
}

/// A finitely supported probability measure on `ℝ^q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedAtoms {
    dim: usize,
    /// Row-major `len × dim` coordinates.
    points: Vec<f64>,
    weights: Vec<f64>,
    /// Upper bound on the distance any unit of mass was moved.
    pub resolution: f64,
    pub source: Option<AtomSource>,
    pub depth: Option<usize>,
}

impl WeightedAtoms {
    /// Atoms given as explicit points. Weights must be positive; they are
    /// used as given and not renormalised.
    pub fn new(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || points.len() != dim * weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} coordinates do not form {} points in dimension {dim}",
                points.len(),
                weights.len()
            )));
        }
        if weights.is_empty() || weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidInput("atom weights must be positive and finite".into()));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("atom coordinates must be finite".into()));
        }
        Ok(WeightedAtoms { dim, points, weights, resolution: 0.0, source: None, depth: None })
    }

    pub fn line(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        WeightedAtoms::new(1, points, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.dim..(j + 1) * self.dim]
    }

    pub fn points_flat(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Coordinates and weights sorted by coordinate (stable). Requires `dim = 1`.
    pub fn sorted_line(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.dim != 1 {
            return Err(Error::Unsupported(format!("expected 1-D atoms, got dimension {}", self.dim)));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.points[a].total_cmp(&self.points[b]));
        Ok((order.iter().map(|&j| self.points[j]).collect(), order.iter().map(|&j| self.weights[j]).collect()))
    }

    /// The same measure with every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> WeightedAtoms {
        WeightedAtoms {
            points: self.points.iter().map(|x| x * factor).collect(),
            resolution: self.resolution * factor.abs(),
            ..self.clone()
        }
    }

    /// Sums the weights of consecutive blocks of `block` atoms, which for a
    /// depth-`L` discretisation gives the depth-`L−1` cylinder masses.
    pub fn block_weights(&self, block: usize) -> Vec<f64> {
        self.weights.chunks(block).map(|c| c.iter().sum()).collect()
    }
}

fn check_depth(system: &CondensationSystem, depth: usize, budget: usize) -> Result<usize> {
    if depth == 0 {
        return Err(Error::InvalidInput("discretisation depth must be at least 1".into()));
    }
    let count = (system.n_maps() as f64).powi(depth as i32);
    if count > budget as f64 {
        return Err(Error::BudgetExceeded { budget, count: count.min(usize::MAX as f64) as usize });
    }
    Ok(count as usize)
}

/// Walks `Ω_depth` in lexicographic order, calling `emit(f_σ(x*), state)`.
fn walk_level<S: Copy>(
    system: &CondensationSystem,
    depth: usize,
    root: S,
    step: impl Fn(S, usize) -> S,
    mut emit: impl FnMut(&[f64], S),
) {
    let anchor = system.anchor();
    let n = system.n_maps();
    let mut stack = vec![(Similitude::identity(system.dim()), root, 0usize)];
    while let Some((map, state, level)) = stack.pop() {
        if level == depth {
            emit(&map.apply(&anchor), state);
            continue;
        }
        for i in (0..n).rev() {
            stack.push((map.compose(&system.maps()[i]), step(state, i), level + 1));
        }
    }
}

fn discretize(system: &CondensationSystem, depth: usize, budget: usize, source: AtomSource) -> Result<WeightedAtoms> {
    let count = check_depth(system, depth, budget)?;
    let dim = system.dim();
    let mut points = Vec::with_capacity(count * dim);
    let mut weights = Vec::with_capacity(count);
    match source {
        AtomSource::Mu => walk_level(
            system,
            depth,
            MassPair::ROOT,
            |m, i| m.child(system, i),
            |x, m| {
                points.extend_from_slice(x);
                weights.push(m.total());
            },
        ),
        AtomSource::Nu => walk_level(
            system,
            depth,
            1.0,
            |t, i| t * system.t()[i],
            |x, t| {
                points.extend_from_slice(x);
                weights.push(t);
            },
        ),
    }
    Ok(WeightedAtoms {
        dim,
        points,
        weights,
        resolution: system.s_max().powi(depth as i32),
        source: Some(source),
        depth: Some(depth),
    })
}

/// Atoms `f_σ(x*)` with weights `μ(E_σ)`, `σ ∈ Ω_depth`. The cylinder
/// masses are only additive under the open set condition, so the system must
/// have it verified or asserted.
pub fn discretize_mu(system: &CondensationSystem, depth: usize, budget: usize) -> Result<WeightedAtoms> {
    system.require_osc()?;
    discretize(system, depth, budget, AtomSource::Mu)
}

/// Atoms `f_σ(x*)` with weights `t_σ`, `σ ∈ Ω_depth`.
pub fn discretize_nu(system: &CondensationSystem, depth: usize, budget: usize) -> Result<WeightedAtoms> {
    discretize(system, depth, budget, AtomSource::Nu)
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleSet {
    pub dim: usize,
    /// Row-major `count × dim`.
    pub points: Vec<f64>,
    pub seed: u64,
    pub depth_cap: usize,
    /// `s_max^{depth_cap}`, the per-point truncation bias bound.
    pub truncation_bound: f64,
    /// Samples whose `μ`-prefix reached `depth_cap` and was flushed through ν.
    pub truncated: usize,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.dim..(j + 1) * self.dim]
    }
}

/// Draws `count` points from μ using the fixed-point equation
/// `μ = p_0 ν + Σ p_i μ∘f_i⁻¹`. Chunk `c` of `SAMPLE_CHUNK` samples uses
/// stream `c` of a ChaCha8 generator seeded with `seed`.
pub fn sample_mu(system: &CondensationSystem, seed: u64, count: usize, depth_cap: usize) -> Result<SampleSet> {
    if depth_cap == 0 {
        return Err(Error::InvalidInput("depth_cap must be at least 1".into()));
    }
    let mut mu_weights = vec![system.p0()];
    mu_weights.extend_from_slice(system.p());
    let mu_pick = WeightedIndex::new(&mu_weights).map_err(|e| Error::InvalidSystem(e.to_string()))?;
    let nu_pick = WeightedIndex::new(system.t()).map_err(|e| Error::InvalidSystem(e.to_string()))?;
    let anchor = system.anchor();
    let maps = system.maps();
    let dim = system.dim();

    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let parts: Vec<(Vec<f64>, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
            let mut out = Vec::with_capacity(len * dim);
            let mut truncated = 0;
            let mut prefix = Vec::with_capacity(depth_cap);
            for _ in 0..len {
                prefix.clear();
                loop {
                    let i = mu_pick.sample(&mut rng);
                    if i == 0 {
                        break;
                    }
                    prefix.push(i - 1);
                    if prefix.len() == depth_cap {
                        truncated += 1;
                        break;
                    }
                }
                let mut x = anchor.clone();
                for _ in 0..depth_cap {
                    x = maps[nu_pick.sample(&mut rng)].apply(&x);
                }
                // the first symbol drawn is the outermost map
                for &i in prefix.iter().rev() {
                    x = maps[i].apply(&x);
                }
                out.extend_from_slice(&x);
            }
            (out, truncated)
        })
        .collect();

    let mut points = Vec::with_capacity(count * dim);
    let mut truncated = 0;
    for (chunk, t) in parts {
        points.extend(chunk);
        truncated += t;
    }
    Ok(SampleSet { dim, points, seed, depth_cap, truncation_bound: system.s_max().powi(depth_cap as i32), truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::Word;
    use crate::reference;
    use crate::weights::cylinder_mass;

    #[test]
    fn c13_atoms() {
        let c13 = reference::c13();
        let one = discretize_mu(&c13, 1, 100).unwrap();
        assert_eq!(one.len(), 2);
        assert_eq!(one.weights(), &[0.5, 0.5]);
        assert_eq!(one.point(0), &[0.0]);
        assert!((one.point(1)[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((one.resolution - 1.0 / 3.0).abs() < 1e-15);
        let two = discretize_mu(&c13, 2, 100).unwrap();
        assert!(two.weights().iter().all(|&w| (w - 0.25).abs() < 1e-15));
        assert!((two.resolution - 1.0 / 9.0).abs() < 1e-15);
        let eight = discretize_mu(&c13, 8, 1000).unwrap();
        assert!((eight.total_weight() - 1.0).abs() < 1e-12);
        let nu = discretize_nu(&c13, 3, 100).unwrap();
        assert_eq!(nu.len(), 8);
        assert!(nu.weights().iter().all(|&w| (w - 0.125).abs() < 1e-15));
        assert!(matches!(discretize_mu(&c13, 11, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn weights_are_cylinder_masses() {
        let sys = reference::equal_ratio_line(3, 0.3, vec![0.5, 0.3, 0.2], 0.25, vec![0.3, 0.25, 0.2]).unwrap();
        let atoms = discretize_mu(&sys, 4, 1000).unwrap();
        for (w, sigma) in atoms.weights().iter().zip(Word::level(3, 4)) {
            assert!((w - cylinder_mass(&sys, &sigma).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn refinement_aggregates_exactly() {
        let sys = reference::equal_ratio_line(3, 0.3, vec![0.5, 0.3, 0.2], 0.25, vec![0.3, 0.25, 0.2]).unwrap();
        for depth in 1..6 {
            for make in [discretize_mu, discretize_nu] {
                let coarse = make(&sys, depth, 1 << 20).unwrap();
                let fine = make(&sys, depth + 1, 1 << 20).unwrap();
                for (a, b) in fine.block_weights(3).iter().zip(coarse.weights()) {
                    assert!((a - b).abs() <= 1e-15 * b);
                }
                assert!(fine.resolution < coarse.resolution);
            }
        }
    }

    #[test]
    fn atoms_lie_in_their_cylinders() {
        let c13 = reference::c13();
        let atoms = discretize_mu(&c13, 5, 100).unwrap();
        for (j, sigma) in Word::level(2, 5).iter().enumerate() {
            let map = c13.compose_map(sigma).unwrap();
            let lo = map.apply(&[0.0])[0];
            let x = atoms.point(j)[0];
            assert!(x >= lo - 1e-15 && x <= lo + map.scale() + 1e-15);
        }
    }

    #[test]
    fn sampler_is_deterministic_and_in_hull() {
        let c13 = reference::c13();
        let a = sample_mu(&c13, 9, 10_000, 30).unwrap();
        let b = sample_mu(&c13, 9, 10_000, 30).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.len(), 10_000);
        assert!(a.points.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let c = sample_mu(&c13, 10, 10_000, 30).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn sampler_matches_first_level_masses() {
        let sys = reference::equal_ratio_line(2, 1.0 / 3.0, vec![0.8, 0.2], 0.3, vec![0.2, 0.5]).unwrap();
        let n = 50_000;
        let samples = sample_mu(&sys, 1, n, 40).unwrap();
        let left = samples.points.iter().filter(|&&x| x < 0.5).count() as f64 / n as f64;
        let expected = cylinder_mass(&sys, &"1".parse().unwrap()).unwrap();
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((left - expected).abs() < 4.0 * se, "{left} vs {expected}");
    }
}
