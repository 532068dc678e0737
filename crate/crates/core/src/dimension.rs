//! Moment sums and the implicit dimension equations.
//!
//! For weights `w` and ratios `s` the moment sum at order `r` is
//! `Σ (w_i s_i^r)^{x/(x+r)}`. It is strictly decreasing in `x`, equals `N`
//! as `x → 0⁺`, and tends to `Σ w_i s_i^r < 1`, so `moment_sum = 1` has a
//! unique root which is found by bisection.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::CondensationSystem;
use crate::reference;

/// Root tolerance on `|moment_sum − 1|` used by every report.
pub const SOLVER_TOL: f64 = 1e-12;
/// `|ξ₁ − ξ₂|` at or below this is reported as the equal regime.
pub const REGIME_TIE_TOL: f64 = 1e-9;
const BRACKET_LIMIT: f64 = 1e6;
const UNIFORM_TOL: f64 = 1e-12;

pub fn moment_sum(weights: &[f64], ratios: &[f64], r: f64, s: f64) -> Result<f64> {
    check_inputs(weights, ratios, r)?;
    Ok(moment_sum_unchecked(weights, ratios, r, s))
}

fn moment_sum_unchecked(weights: &[f64], ratios: &[f64], r: f64, s: f64) -> f64 {
    let exponent = s / (s + r);
    weights.iter().zip(ratios).map(|(w, c)| (w * c.powf(r)).powf(exponent)).sum()
}

fn check_inputs(weights: &[f64], ratios: &[f64], r: f64) -> Result<()> {
    if weights.len() != ratios.len() || weights.is_empty() {
        return Err(Error::InvalidInput("weights and ratios must be nonempty and of equal length".into()));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("order r = {r} must be positive")));
    }
    if weights.iter().any(|&w| !(w > 0.0)) || ratios.iter().any(|&c| !(c > 0.0 && c < 1.0)) {
        return Err(Error::InvalidInput("weights must be positive and ratios in (0,1)".into()));
    }
    for (index, (w, c)) in weights.iter().zip(ratios).enumerate() {
        let value = w * c.powf(r);
        if value >= 1.0 {
            return Err(Error::NonContractiveMoment { index, value });
        }
    }
    Ok(())
}

/// Unique positive root of `moment_sum(weights, ratios, r, ·) = 1`.
pub fn solve_xi(weights: &[f64], ratios: &[f64], r: f64, tol: f64) -> Result<f64> {
    check_inputs(weights, ratios, r)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    if weights.len() < 2 {
        // sum at 0⁺ is N = 1, so no root with the sum crossing 1
        return Err(Error::NoRoot { limit: 0.0 });
    }
    bisect_decreasing(|x| moment_sum_unchecked(weights, ratios, r, x), tol)
}

/// Similarity dimension: the root of `Σ s_i^d = 1`.
pub fn similarity_dim(ratios: &[f64]) -> Result<f64> {
    if ratios.len() < 2 || ratios.iter().any(|&c| !(c > 0.0 && c < 1.0)) {
        return Err(Error::InvalidInput("need at least two ratios in (0,1)".into()));
    }
    bisect_decreasing(|d| ratios.iter().map(|c| c.powf(d)).sum(), SOLVER_TOL)
}

/// Root of a strictly decreasing `f` with `f(0⁺) > 1`, bracketed by doubling.
fn bisect_decreasing(f: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) >= 1.0 {
        lo = hi;
        hi *= 2.0;
        if hi > BRACKET_LIMIT {
            return Err(Error::NoRoot { limit: BRACKET_LIMIT });
        }
    }
    let mut best = (f64::INFINITY, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let value = f(mid);
        let residual = (value - 1.0).abs();
        if residual < best.0 {
            best = (residual, mid);
        }
        if residual <= tol {
            return Ok(mid);
        }
        if mid <= lo || mid >= hi {
            break;
        }
        if value > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::SolverStalled { residual: best.0, tol })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Xi1GtXi2,
    Equal,
    Xi1LtXi2,
}

impl Regime {
    pub fn classify(xi1: f64, xi2: f64) -> Regime {
        if (xi1 - xi2).abs() <= REGIME_TIE_TOL {
            Regime::Equal
        } else if xi1 > xi2 {
            Regime::Xi1GtXi2
        } else {
            Regime::Xi1LtXi2
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Xi1GtXi2 => "xi1_gt_xi2",
            Regime::Equal => "equal",
            Regime::Xi1LtXi2 => "xi1_lt_xi2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionReport {
    pub r: f64,
    /// Root of the `t`-moment equation.
    pub xi1: f64,
    /// Root of the `p`-moment equation.
    pub xi2: f64,
    pub xi: f64,
    pub d0: f64,
    /// Quantization dimension of μ as a self-similar measure; present only
    /// when `p_i + p_0 t_i = t_i`, where it coincides with `xi1`.
    pub k_r: Option<f64>,
    /// `(a(ξ₁) − 1, b(ξ₂) − 1)`
    pub residuals: (f64, f64),
    pub regime: Regime,
}

/// Solves both moment equations for `system` at order `r`.
pub fn classify_regime(system: &CondensationSystem, r: f64) -> Result<DimensionReport> {
    let ratios = system.ratios();
    let xi1 = solve_xi(system.t(), &ratios, r, SOLVER_TOL)?;
    let xi2 = solve_xi(system.p(), &ratios, r, SOLVER_TOL)?;
    let d0 = similarity_dim(&ratios)?;
    let residuals = (
        moment_sum_unchecked(system.t(), &ratios, r, xi1) - 1.0,
        moment_sum_unchecked(system.p(), &ratios, r, xi2) - 1.0,
    );
    Ok(DimensionReport {
        r,
        xi1,
        xi2,
        xi: xi1.max(xi2),
        d0,
        k_r: system.is_self_similar().then_some(xi1),
        residuals,
        regime: Regime::classify(xi1, xi2),
    })
}

/// Three systems straddling the regime boundary for equal ratios.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub r: f64,
    pub xi1: f64,
    /// `1 − N^{−r/ξ₁} c^{−r}`
    pub p0_threshold: f64,
    pub below: CondensationSystem,
    pub boundary: CondensationSystem,
    pub above: CondensationSystem,
}

impl Scenario {
    pub fn systems(&self) -> [(&'static str, &CondensationSystem); 3] {
        [("below", &self.below), ("boundary", &self.boundary), ("above", &self.above)]
    }
}

/// Builds systems with `N` maps of ratio `c`, weights `t`, `p_i = (1 − p_0)/N`
/// and `p_0` at half, exactly at, and 1.5 times the regime threshold (the
/// last capped at the midpoint between the threshold and 1).
pub fn scenario_build(n: usize, c: f64, t: &[f64], r: f64) -> Result<Scenario> {
    if t.len() != n {
        return Err(Error::InvalidInput(format!("t has {} entries, expected {n}", t.len())));
    }
    let uniform = 1.0 / n as f64;
    if t.iter().all(|ti| (ti - uniform).abs() <= UNIFORM_TOL) {
        return Err(Error::ZeroThreshold);
    }
    let ratios = vec![c; n];
    let xi1 = solve_xi(t, &ratios, r, SOLVER_TOL)?;
    let p0_threshold = 1.0 - (n as f64).powf(-r / xi1) * c.powf(-r);
    if !(p0_threshold > 0.0 && p0_threshold < 1.0) {
        return Err(Error::InvalidInput(format!("threshold {p0_threshold} outside (0,1)")));
    }
    let build = |p0: f64| reference::equal_ratio_line(n, c, t.to_vec(), p0, vec![(1.0 - p0) / n as f64; n]);
    let above_p0 = (1.5 * p0_threshold).min(0.5 * (1.0 + p0_threshold));
    Ok(Scenario {
        r,
        xi1,
        p0_threshold,
        below: build(0.5 * p0_threshold)?,
        boundary: build(p0_threshold)?,
        above: build(above_p0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LN2_LN3: f64 = 0.630_929_753_571_457_4;

    #[test]
    fn moment_sum_examples() {
        let third = [1.0 / 3.0, 1.0 / 3.0];
        let v = moment_sum(&[0.5, 0.5], &third, 2.0, LN2_LN3).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let near_zero = moment_sum(&[0.5, 0.5], &third, 2.0, 1e-12).unwrap();
        assert!((near_zero - 2.0).abs() < 1e-9);
        let v = moment_sum(&[0.4, 0.4], &third, 2.0, 0.572761).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
        assert!(matches!(
            moment_sum(&[5.0, 0.5], &[0.9, 0.5], 0.5, 1.0),
            Err(Error::NonContractiveMoment { index: 0, .. })
        ));
    }

    #[test]
    fn solve_xi_examples() {
        let third = [1.0 / 3.0, 1.0 / 3.0];
        let xi = solve_xi(&[0.5, 0.5], &third, 2.0, 1e-12).unwrap();
        assert!((xi - LN2_LN3).abs() < 1e-10);
        let xi = solve_xi(&[0.4, 0.4], &third, 2.0, 1e-12).unwrap();
        let closed = 2.0 * 2f64.ln() / 11.25f64.ln();
        assert!((xi - closed).abs() < 1e-10);
        assert!((xi - 0.572761).abs() < 1e-6);
        let xi = solve_xi(&[0.5, 0.5], &third, 1.0, 1e-12).unwrap();
        assert!((xi - LN2_LN3).abs() < 1e-10);
    }

    #[test]
    fn similarity_dim_examples() {
        assert!((similarity_dim(&[1.0 / 3.0, 1.0 / 3.0]).unwrap() - LN2_LN3).abs() < 1e-11);
        assert!((similarity_dim(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-12);
        assert!((similarity_dim(&[0.25; 4]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn c13_regime() {
        let report = classify_regime(&reference::c13(), 2.0).unwrap();
        assert_eq!(report.regime, Regime::Xi1GtXi2);
        assert!((report.xi - 0.63093).abs() < 1e-5);
        assert_eq!(report.k_r, Some(report.xi1));
    }

    #[test]
    fn scenario_examples() {
        let sc = scenario_build(2, 1.0 / 3.0, &[0.8, 0.2], 2.0).unwrap();
        assert!(sc.p0_threshold > 0.0 && sc.p0_threshold < 1.0);
        let below = classify_regime(&sc.below, 2.0).unwrap();
        let boundary = classify_regime(&sc.boundary, 2.0).unwrap();
        let above = classify_regime(&sc.above, 2.0).unwrap();
        assert_eq!(below.regime, Regime::Xi1LtXi2);
        assert!((boundary.xi1 - boundary.xi2).abs() < 1e-8);
        assert_eq!(boundary.regime, Regime::Equal);
        assert_eq!(above.regime, Regime::Xi1GtXi2);
        assert!(matches!(scenario_build(2, 1.0 / 3.0, &[0.5, 0.5], 2.0), Err(Error::ZeroThreshold)));
    }

    #[test]
    fn self_similar_degeneration() {
        for (t1, p0) in [(0.7, 0.2), (0.3, 0.6), (0.55, 0.05)] {
            let sys = reference::self_similar_pair(t1, p0);
            let rep = classify_regime(&sys, 2.0).unwrap();
            let b = moment_sum(sys.p(), &sys.ratios(), 2.0, rep.xi1).unwrap();
            let expected = (1.0 - p0).powf(rep.xi1 / (rep.xi1 + 2.0));
            assert!((b - expected).abs() < 1e-12);
            assert!(b < 1.0);
            assert_eq!(rep.regime, Regime::Xi1GtXi2);
        }
    }

    fn ratios_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.02f64..0.95, 2..5)
    }

    proptest! {
        #[test]
        fn strictly_decreasing(ratios in ratios_strategy(), r in 0.2f64..4.0, s in 0.01f64..20.0, ds in 1e-3f64..5.0) {
            let w = vec![1.0 / ratios.len() as f64; ratios.len()];
            let a = moment_sum(&w, &ratios, r, s).unwrap();
            let b = moment_sum(&w, &ratios, r, s + ds).unwrap();
            prop_assert!(b < a);
        }

        #[test]
        fn root_residual(ratios in ratios_strategy(), r in 0.2f64..4.0, raw in prop::collection::vec(0.05f64..1.0, 4)) {
            let n = ratios.len();
            let total: f64 = raw[..n].iter().sum();
            let w: Vec<f64> = raw[..n].iter().map(|x| x / total).collect();
            let xi = solve_xi(&w, &ratios, r, SOLVER_TOL).unwrap();
            prop_assert!((moment_sum(&w, &ratios, r, xi).unwrap() - 1.0).abs() <= SOLVER_TOL);
        }

        #[test]
        fn holder_bound_on_similarity_weights(
            ratios in ratios_strategy(),
            r in 0.2f64..4.0,
            p0 in 0.01f64..0.9,
            raw in prop::collection::vec(0.05f64..1.0, 4),
        ) {
            let n = ratios.len();
            let d0 = similarity_dim(&ratios).unwrap();
            let total: f64 = raw[..n].iter().sum();
            let p: Vec<f64> = raw[..n].iter().map(|x| (1.0 - p0) * x / total).collect();
            let b = moment_sum(&p, &ratios, r, d0).unwrap();
            let bound = (1.0 - p0).powf(d0 / (d0 + r));
            prop_assert!(b <= bound * (1.0 + 1e-12));
            prop_assert!(bound < 1.0);
        }
    }
}
