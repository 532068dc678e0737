//! Lloyd iteration with generalized centroids, for atoms in any dimension.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{eval_error, Method, Quantizer};
use crate::error::{Error, Result};
use crate::ifs::distance;
use crate::measure::WeightedAtoms;

const REL_IMPROVEMENT_STOP: f64 = 1e-10;
const CENTER_STEPS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LloydOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_rounds: usize,
}

impl Default for LloydOptions {
    fn default() -> Self {
        LloydOptions { restarts: 16, seed: 0, max_rounds: 500 }
    }
}

struct Points<'a> {
    atoms: &'a WeightedAtoms,
    r: f64,
}

impl Points<'_> {
    fn assign(&self, centers: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
        (0..self.atoms.len())
            .map(|j| {
                let x = self.atoms.point(j);
                let mut best = (0, f64::INFINITY);
                for (c, a) in centers.iter().enumerate() {
                    let d = distance(x, a);
                    if d < best.1 {
                        best = (c, d);
                    }
                }
                best
            })
            .unzip()
    }

    fn cell_cost(&self, members: &[usize], c: &[f64]) -> f64 {
        members.iter().map(|&j| self.atoms.weights()[j] * distance(self.atoms.point(j), c).powf(self.r)).sum()
    }

    /// Minimizer of `Σ w |x − c|^r` over the cell, starting from `start`.
    fn centroid(&self, members: &[usize], start: &[f64]) -> Vec<f64> {
        let q = self.atoms.dim();
        let w = self.atoms.weights();
        if self.r == 2.0 {
            let total: f64 = members.iter().map(|&j| w[j]).sum();
            return (0..q)
                .map(|d| members.iter().map(|&j| w[j] * self.atoms.point(j)[d]).sum::<f64>() / total)
                .collect();
        }
        if q == 1 {
            return vec![self.line_centroid(members)];
        }
        // iteratively reweighted means, accepted only while the cost drops
        let mut c = start.to_vec();
        let mut cost = self.cell_cost(members, &c);
        for _ in 0..CENTER_STEPS {
            let mut num = vec![0.0; q];
            let mut den = 0.0;
            for &j in members {
                let x = self.atoms.point(j);
                let d = distance(x, &c).max(1e-300);
                let weight = w[j] * d.powf(self.r - 2.0);
                if !weight.is_finite() {
                    continue;
                }
                den += weight;
                for k in 0..q {
                    num[k] += weight * x[k];
                }
            }
            if den == 0.0 {
                break;
            }
            let next: Vec<f64> = num.iter().map(|v| v / den).collect();
            let next_cost = self.cell_cost(members, &next);
            if !(next_cost < cost) {
                break;
            }
            let gain = (cost - next_cost) / cost;
            c = next;
            cost = next_cost;
            if gain < REL_IMPROVEMENT_STOP {
                break;
            }
        }
        c
    }

    fn line_centroid(&self, members: &[usize]) -> f64 {
        let w = self.atoms.weights();
        let mut pts: Vec<(f64, f64)> = members.iter().map(|&j| (self.atoms.point(j)[0], w[j])).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        if self.r == 1.0 {
            let half = pts.iter().map(|p| p.1).sum::<f64>() / 2.0;
            let mut acc = 0.0;
            for &(x, wt) in &pts {
                acc += wt;
                if acc >= half {
                    return x;
                }
            }
            return pts[pts.len() - 1].0;
        }
        let r = self.r;
        let slope =
            |c: f64| -> f64 { pts.iter().map(|&(x, wt)| wt * (c - x).signum() * (c - x).abs().powf(r - 1.0)).sum() };
        let (mut lo, mut hi) = (pts[0].0, pts[pts.len() - 1].0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// k-means++ style seeding with probabilities proportional to `w·d^r`.
    fn seed(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let m = self.atoms.len();
        let w = self.atoms.weights();
        let first = WeightedIndex::new(w).expect("positive weights").sample(rng);
        let mut centers = vec![self.atoms.point(first).to_vec()];
        let mut nearest: Vec<f64> = (0..m).map(|j| distance(self.atoms.point(j), &centers[0])).collect();
        while centers.len() < n {
            let scores: Vec<f64> = (0..m).map(|j| w[j] * nearest[j].powf(self.r)).collect();
            let pick = match WeightedIndex::new(&scores) {
                Ok(dist) => dist.sample(rng),
                // every atom already coincides with a center
                Err(_) => break,
            };
            let c = self.atoms.point(pick).to_vec();
            for j in 0..m {
                nearest[j] = nearest[j].min(distance(self.atoms.point(j), &c));
            }
            centers.push(c);
        }
        centers
    }

    fn run(&self, n: usize, rng: &mut ChaCha8Rng, max_rounds: usize) -> (Vec<Vec<f64>>, f64) {
        let mut centers = self.seed(n, rng);
        let mut prev = f64::INFINITY;
        for _ in 0..max_rounds {
            let (owner, dist) = self.assign(&centers);
            let cost: f64 = dist.iter().zip(self.atoms.weights()).map(|(d, w)| w * d.powf(self.r)).sum();
            if prev.is_finite() && (prev - cost) <= REL_IMPROVEMENT_STOP * prev {
                break;
            }
            prev = cost;
            if cost == 0.0 {
                break;
            }
            let mut members = vec![Vec::new(); centers.len()];
            for (j, &c) in owner.iter().enumerate() {
                members[c].push(j);
            }
            let mut contribution: Vec<(f64, usize)> =
                dist.iter().zip(self.atoms.weights()).enumerate().map(|(j, (d, w))| (w * d.powf(self.r), j)).collect();
            // largest contributions first, ties by atom index
            contribution.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            let mut reseeds = contribution.into_iter().map(|(_, j)| j);
            for (c, cell) in members.iter().enumerate() {
                centers[c] = if cell.is_empty() {
                    match reseeds.next() {
                        Some(j) => self.atoms.point(j).to_vec(),
                        None => centers[c].clone(),
                    }
                } else {
                    self.centroid(cell, &centers[c])
                };
            }
        }
        let cost = self.assign(&centers).1.iter().zip(self.atoms.weights()).map(|(d, w)| w * d.powf(self.r)).sum();
        (centers, cost)
    }
}

/// Best of `options.restarts` Lloyd runs; restart `i` draws from stream `i`
/// of a ChaCha8 generator seeded with `options.seed`.
pub fn lloyd(atoms: &WeightedAtoms, n: usize, r: f64, options: &LloydOptions) -> Result<Quantizer> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if !(r >= 1.0) {
        return Err(Error::Unsupported(format!("Lloyd iteration needs r >= 1 (got {r})")));
    }
    if options.restarts == 0 {
        return Err(Error::InvalidInput("need at least one restart".into()));
    }
    if n >= atoms.len() {
        let codebook: Vec<Vec<f64>> = (0..atoms.len()).map(|j| atoms.point(j).to_vec()).collect();
        return Ok(Quantizer { codebook, error: 0.0, r, method: Method::Lloyd });
    }
    let pts = Points { atoms, r };
    let runs: Vec<(Vec<Vec<f64>>, f64)> = (0..options.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(i as u64);
            pts.run(n, &mut rng, options.max_rounds)
        })
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.1 < runs[best].1 {
            best = i;
        }
    }
    let codebook = runs.into_iter().nth(best).expect("restarts >= 1").0;
    let error = eval_error(atoms, &codebook, r)?;
    Ok(Quantizer { codebook, error, r, method: Method::Lloyd })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::discretize_mu;
    use crate::quantizer::optimal_1d;
    use crate::reference;

    #[test]
    fn close_to_dp_on_the_line() {
        let atoms = discretize_mu(&reference::c13(), 8, 1000).unwrap();
        let opts = LloydOptions { restarts: 32, seed: 1, ..Default::default() };
        for n in [2, 4, 8, 16] {
            let exact = optimal_1d(&atoms, n, 2.0).unwrap().error;
            let approx = lloyd(&atoms, n, 2.0, &opts).unwrap().error;
            assert!(approx >= exact * (1.0 - 1e-12));
            assert!(approx <= 1.01 * exact, "n={n}: {approx} vs {exact}");
        }
    }

    #[test]
    fn other_orders_on_the_line() {
        let atoms =
            discretize_mu(&reference::equal_ratio_line(2, 0.3, vec![0.8, 0.2], 0.3, vec![0.2, 0.5]).unwrap(), 7, 1000)
                .unwrap();
        let opts = LloydOptions { restarts: 16, seed: 2, ..Default::default() };
        for r in [1.0, 3.0] {
            for n in [1, 3, 6] {
                let exact = optimal_1d(&atoms, n, r).unwrap().error;
                let approx = lloyd(&atoms, n, r, &opts).unwrap().error;
                assert!(approx >= exact * (1.0 - 1e-9) && approx <= 1.05 * exact, "r={r} n={n}");
            }
        }
    }

    #[test]
    fn trivial_cases() {
        let atoms = discretize_mu(&reference::c13(), 3, 100).unwrap();
        let opts = LloydOptions::default();
        assert_eq!(lloyd(&atoms, 8, 2.0, &opts).unwrap().error, 0.0);
        assert_eq!(lloyd(&atoms, 20, 1.5, &opts).unwrap().error, 0.0);
        let one = lloyd(&atoms, 1, 2.0, &opts).unwrap();
        let mean: f64 = (0..atoms.len()).map(|j| atoms.point(j)[0] * atoms.weights()[j]).sum();
        assert!((one.codebook[0][0] - mean).abs() < 1e-14);
    }

    #[test]
    fn deterministic_and_planar() {
        // Sierpinski-type triangle, three maps of ratio 1/2
        let atoms = {
            let mut pts = Vec::new();
            let corners = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.8660254037844386]];
            let mut frontier = vec![[0.0, 0.0]];
            for level in 1..=5 {
                let s = 0.5f64.powi(level);
                frontier = frontier
                    .iter()
                    .flat_map(|p| corners.iter().map(move |c| [p[0] + s * c[0], p[1] + s * c[1]]))
                    .collect();
            }
            for p in &frontier {
                pts.extend_from_slice(p);
            }
            let m = frontier.len();
            WeightedAtoms::new(2, pts, vec![1.0 / m as f64; m]).unwrap()
        };
        let opts = LloydOptions { restarts: 8, seed: 4, ..Default::default() };
        for r in [1.0, 2.0, 3.0] {
            let a = lloyd(&atoms, 3, r, &opts).unwrap();
            let b = lloyd(&atoms, 3, r, &opts).unwrap();
            assert_eq!(a, b);
            let single = lloyd(&atoms, 1, r, &opts).unwrap();
            assert!(a.error < single.error);
        }
    }
}
