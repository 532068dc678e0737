//! Cylinder weights `h⁽¹⁾, h⁽²⁾, h` and cylinder masses `μ(E_σ)`.
//!
//! Both quantities are carried down the word tree one symbol at a time:
//!
//! ```text
//! h1(σ∗i) = (h1(σ) + p0·h2(σ)) · t_i s_i^r      μ1(σ∗i) = (μ1(σ) + p0·μ2(σ)) · t_i
//! h2(σ∗i) = h2(σ) · p_i s_i^r                     μ2(σ∗i) = μ2(σ) · p_i
//! ```
//!
//! starting from `(0, 1)` at the empty word, so `h(θ) = μ(E_θ) = 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{is_maximal_antichain, CondensationSystem, Word};

/// Per-symbol factors of the `h` recursion at a fixed order `r`.
#[derive(Clone, Debug)]
pub struct WeightKernel {
    p0: f64,
    /// `t_i s_i^r`
    ts: Vec<f64>,
    /// `p_i s_i^r`
    ps: Vec<f64>,
    r: f64,
}

impl WeightKernel {
    pub fn new(system: &CondensationSystem, r: f64) -> Self {
        let ratios = system.ratios();
        WeightKernel {
            p0: system.p0(),
            ts: system.t().iter().zip(&ratios).map(|(t, s)| t * s.powf(r)).collect(),
            ps: system.p().iter().zip(&ratios).map(|(p, s)| p * s.powf(r)).collect(),
            r,
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn n_maps(&self) -> usize {
        self.ts.len()
    }

    /// `t_i s_i^r`
    pub fn ts(&self, i: usize) -> f64 {
        self.ts[i]
    }

    /// `p_i s_i^r`
    pub fn ps(&self, i: usize) -> f64 {
        self.ps[i]
    }

    pub fn root(&self) -> CylinderWeights {
        CylinderWeights { h1: 0.0, h2: 1.0 }
    }

    pub fn child(&self, parent: CylinderWeights, i: usize) -> CylinderWeights {
        CylinderWeights { h1: (parent.h1 + self.p0 * parent.h2) * self.ts[i], h2: parent.h2 * self.ps[i] }
    }
}

/// The pair `(h⁽¹⁾(σ), h⁽²⁾(σ))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CylinderWeights {
    pub h1: f64,
    pub h2: f64,
}

impl CylinderWeights {
    pub fn h(&self) -> f64 {
        self.h1 + self.h2
    }
}

/// Evaluates the recursion along `word`. The empty word gives `(0, 1)`.
pub fn h_components(system: &CondensationSystem, word: &Word, r: f64) -> Result<CylinderWeights> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("order r = {r} must be positive")));
    }
    word.validate(system.n_maps())?;
    let kernel = WeightKernel::new(system, r);
    Ok(word.indices().iter().fold(kernel.root(), |acc, &i| kernel.child(acc, i)))
}

/// `μ⁽¹⁾(E_σ) = Σ_{h<|σ|} p_0 p_{σ|_h} t_{σ⁽ˡ⁾_{-h}}`, evaluated term by term.
pub fn mu1_closed_form(system: &CondensationSystem, word: &Word) -> Result<f64> {
    word.validate(system.n_maps())?;
    let idx = word.indices();
    let mut total = 0.0;
    for h in 0..idx.len() {
        let p_head: f64 = idx[..h].iter().map(|&i| system.p()[i]).product();
        let t_tail: f64 = idx[h..].iter().map(|&i| system.t()[i]).product();
        total += system.p0() * p_head * t_tail;
    }
    Ok(total)
}

/// `μ(E_σ) = μ⁽¹⁾(E_σ) + p_σ` (requires OSC for the identity to be a mass).
pub fn cylinder_mass(system: &CondensationSystem, word: &Word) -> Result<f64> {
    if word.is_empty() {
        return Ok(1.0);
    }
    let p_sigma = system.word_products(word)?.p;
    Ok(mu1_closed_form(system, word)? + p_sigma)
}

/// Mass recursion carried down from `(0, 1)`; independent of the closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct MassPair {
    pub mu1: f64,
    pub mu2: f64,
}

impl MassPair {
    pub const ROOT: MassPair = MassPair { mu1: 0.0, mu2: 1.0 };

    pub fn child(self, system: &CondensationSystem, i: usize) -> MassPair {
        MassPair { mu1: (self.mu1 + system.p0() * self.mu2) * system.t()[i], mu2: self.mu2 * system.p()[i] }
    }

    pub fn total(self) -> f64 {
        self.mu1 + self.mu2
    }
}

/// One row of an antichain decomposition of μ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassSplit {
    pub word: Word,
    pub mu1: f64,
    pub mu2: f64,
}

/// Splits μ over a finite maximal antichain into the ν-part and μ-part
/// masses of each cylinder.
pub fn decompose(system: &CondensationSystem, antichain: &[Word]) -> Result<Vec<MassSplit>> {
    if !is_maximal_antichain(system.n_maps(), antichain)? {
        return Err(Error::InvalidAntichain("word set is not a maximal antichain".into()));
    }
    let mut words: Vec<&Word> = antichain.iter().collect();
    words.sort();
    Ok(words
        .into_iter()
        .map(|w| {
            let m = w.indices().iter().fold(MassPair::ROOT, |acc, &i| acc.child(system, i));
            MassSplit { word: w.clone(), mu1: m.mu1, mu2: m.mu2 }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn h_examples() {
        let c13 = reference::c13();
        let one = h_components(&c13, &w("1"), 2.0).unwrap();
        assert!(close(one.h1, 1.0 / 90.0, 1e-14) && close(one.h2, 2.0 / 45.0, 1e-14));
        let two = h_components(&c13, &w("1.1"), 2.0).unwrap();
        assert!(close(two.h1, 1.0 / 900.0, 1e-14), "{two:?}");
        assert!(close(two.h2, 4.0 / 2025.0, 1e-14));
        assert_eq!(h_components(&c13, &Word::empty(), 0.7).unwrap().h(), 1.0);
        assert!(h_components(&c13, &w("1"), 0.0).is_err());
    }

    #[test]
    fn mass_examples() {
        let c13 = reference::c13();
        assert!(close(mu1_closed_form(&c13, &w("1")).unwrap(), 0.1, 1e-14));
        assert!(close(mu1_closed_form(&c13, &w("1.1")).unwrap(), 0.09, 1e-14));
        assert!(close(mu1_closed_form(&c13, &w("2")).unwrap(), 0.1, 1e-14));
        assert!(close(cylinder_mass(&c13, &w("1")).unwrap(), 0.5, 1e-14));
        assert!(close(cylinder_mass(&c13, &w("1.1")).unwrap(), 0.25, 1e-14));
        for k in 1..=8 {
            let total: f64 = Word::level(2, k).iter().map(|s| cylinder_mass(&c13, s).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12, "level {k}: {total}");
        }
    }

    #[test]
    fn decompose_examples() {
        let c13 = reference::c13();
        let level1 = decompose(&c13, &Word::level(2, 1)).unwrap();
        assert_eq!(level1.len(), 2);
        for row in &level1 {
            assert!(close(row.mu1, 0.1, 1e-14) && close(row.mu2, 0.4, 1e-14));
        }
        let level2 = decompose(&c13, &Word::level(2, 2)).unwrap();
        assert_eq!(level2.len(), 4);
        for row in &level2 {
            assert!(close(row.mu1, 0.09, 1e-14) && close(row.mu2, 0.16, 1e-14));
        }
        let mixed = decompose(&c13, &[w("1"), w("2.1"), w("2.2")]).unwrap();
        let total: f64 = mixed.iter().map(|r| r.mu1 + r.mu2).sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert!(matches!(decompose(&c13, &[w("1"), w("2.1")]), Err(Error::InvalidAntichain(_))));
    }

    fn random_system(rng: &mut ChaCha8Rng) -> CondensationSystem {
        let n = rng.gen_range(2..=4);
        let c = rng.gen_range(0.05..(1.0 / n as f64));
        let mut t: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let ts: f64 = t.iter().sum();
        t.iter_mut().for_each(|x| *x /= ts);
        let p0 = rng.gen_range(0.05..0.9);
        let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let ps: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x *= (1.0 - p0) / ps);
        reference::equal_ratio_line(n, c, t, p0, p).unwrap()
    }

    #[test]
    fn recursion_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let sys = random_system(&mut rng);
            let r = rng.gen_range(0.5..3.0);
            let n = sys.n_maps();
            let max_depth = if n == 2 { 8 } else { 5 };
            for depth in 1..=max_depth {
                for sigma in Word::level(n, depth) {
                    let hw = h_components(&sys, &sigma, r).unwrap();
                    let prod = sys.word_products(&sigma).unwrap();
                    let scale = prod.s.powf(-r);
                    let mu1 = mu1_closed_form(&sys, &sigma).unwrap();
                    assert!(close(hw.h1 * scale, mu1, 1e-12), "{sigma}: {} vs {mu1}", hw.h1 * scale);
                    assert!(close(hw.h2 * scale, prod.p, 1e-12));
                    let mass = cylinder_mass(&sys, &sigma).unwrap();
                    assert!(close(hw.h() * scale, mass, 1e-12));
                }
            }
        }
    }

    #[test]
    fn step_bounds_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let sys = random_system(&mut rng);
            let r = rng.gen_range(0.5..3.0);
            let eta = crate::antichain::eta_bounds(&sys, r);
            let kernel = WeightKernel::new(&sys, r);
            let mut frontier = vec![kernel.root()];
            for _ in 0..6 {
                let mut next = Vec::new();
                for parent in frontier {
                    for i in 0..sys.n_maps() {
                        let c = kernel.child(parent, i);
                        assert!(c.h() >= eta.lower * parent.h() * (1.0 - 1e-12));
                        assert!(c.h() <= eta.upper * parent.h() * (1.0 + 1e-12));
                        next.push(c);
                    }
                }
                frontier = next;
            }
        }
    }

    #[test]
    fn random_antichains_carry_unit_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let sys = random_system(&mut rng);
            let n = sys.n_maps();
            // split leaves at random until a target size
            let mut words = vec![Word::empty()];
            while words.len() < 30 {
                let pick = rng.gen_range(0..words.len());
                let leaf = words.swap_remove(pick);
                words.extend((0..n).map(|i| leaf.child(i)));
            }
            let rows = decompose(&sys, &words).unwrap();
            let total: f64 = rows.iter().map(|r| r.mu1 + r.mu2).sum();
            assert!((total - 1.0).abs() < 1e-10);
            for row in &rows {
                let cm = cylinder_mass(&sys, &row.word).unwrap();
                assert!(close(row.mu1 + row.mu2, cm, 1e-12));
            }
        }
    }
}
