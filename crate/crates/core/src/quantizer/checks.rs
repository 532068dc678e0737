//! Computed errors against the condensation recursion and the antichain sums.

use serde::Serialize;

use super::{optimal_1d_all, DpStrategy};
use crate::antichain::{build_lambda, DEFAULT_WORD_BUDGET};
use crate::error::{Error, Result};
use crate::ifs::CondensationSystem;
use crate::measure::{discretize_mu, discretize_nu, DEFAULT_ATOM_BUDGET};

/// Largest allowed spread of `log(e^r / Σh)` across `k`.
pub const SANDWICH_SPREAD_LIMIT: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CondensationRow {
    pub n: usize,
    pub e_mu: f64,
    pub e_nu: f64,
    /// `⌊n/(N+1)⌋`
    pub n_split: usize,
    pub lower_rhs: f64,
    pub upper_rhs: Option<f64>,
    pub slack: f64,
    pub lower_ok: bool,
    pub upper_ok: Option<bool>,
    /// The slack alone exceeds `e^r_n(μ)`, so the row carries no information.
    pub vacuous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CondensationReport {
    pub r: f64,
    pub depth: usize,
    pub resolution: f64,
    pub rows: Vec<CondensationRow>,
    pub low_resolution: bool,
}

impl CondensationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|row| row.lower_ok && row.upper_ok.unwrap_or(true))
    }
}

/// Checks, on the line,
///
/// ```text
/// e^r_n(μ) ≥ p_0 e^r_n(ν) + Σ p_i s_i^r e^r_n(μ)
/// e^r_n(μ) ≤ p_0 e^r_m(ν) + Σ p_i s_i^r e^r_m(μ),   m = ⌊n/(N+1)⌋ ≥ 1
/// ```
///
/// with exact errors of the depth-`depth` discretisations. Each error is
/// within `δ = s_max^depth` of the true one, so each side may move by
/// `r (e + δ)^{r−1} δ` per term; the slack allows three such moves.
pub fn check_condensation_inequality(
    system: &CondensationSystem,
    r: f64,
    n_list: &[usize],
    depth: usize,
) -> Result<CondensationReport> {
    if system.dim() != 1 {
        return Err(Error::Unsupported("the condensation check needs exact errors, available on the line only".into()));
    }
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::InvalidInput("n values must be positive and the list nonempty".into()));
    }
    let mu = discretize_mu(system, depth, DEFAULT_ATOM_BUDGET)?;
    let nu = discretize_nu(system, depth, DEFAULT_ATOM_BUDGET)?;
    let n_max = *n_list.iter().max().expect("nonempty");
    let e_mu: Vec<f64> = optimal_1d_all(&mu, n_max, r, DpStrategy::Auto)?.into_iter().map(|q| q.error).collect();
    let e_nu: Vec<f64> = optimal_1d_all(&nu, n_max, r, DpStrategy::Auto)?.into_iter().map(|q| q.error).collect();
    let delta = mu.resolution;
    let ratios = system.ratios();
    let ps: f64 = system.p().iter().zip(&ratios).map(|(p, s)| p * s.powf(r)).sum();
    let p0 = system.p0();
    let groups = system.n_maps() + 1;

    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let (em, en) = (e_mu[n - 1], e_nu[n - 1]);
        let m = n / groups;
        let lower_rhs = p0 * en.powf(r) + ps * em.powf(r);
        let upper = (m >= 1).then(|| (e_mu[m - 1], e_nu[m - 1]));
        let upper_rhs = upper.map(|(um, un)| p0 * un.powf(r) + ps * um.powf(r));
        let e_max = upper.map_or(em.max(en), |(um, un)| em.max(en).max(um).max(un));
        let slack = 3.0 * r * (e_max + delta).powf(r - 1.0) * delta;
        let lhs = em.powf(r);
        rows.push(CondensationRow {
            n,
            e_mu: em,
            e_nu: en,
            n_split: m,
            lower_rhs,
            upper_rhs,
            slack,
            lower_ok: lhs >= lower_rhs - slack,
            upper_ok: upper_rhs.map(|u| lhs <= u + slack),
            vacuous: slack >= lhs,
        });
    }
    let low_resolution = rows.iter().all(|row| row.vacuous);
    Ok(CondensationReport { r, depth, resolution: delta, rows, low_resolution })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichRow {
    pub k: u64,
    pub n_kr: usize,
    pub h_sum: f64,
    /// `e^r` at `n = N_{k,r}`
    pub e_r: f64,
    pub slack: f64,
    pub upper_ok: bool,
    pub log_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub r: f64,
    pub depth: usize,
    pub resolution: f64,
    pub rows: Vec<SandwichRow>,
    pub log_ratio_spread: f64,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        !self.rows.is_empty()
            && self.rows.iter().all(|row| row.upper_ok && row.log_ratio.is_finite())
            && self.log_ratio_spread < SANDWICH_SPREAD_LIMIT
    }
}

/// Compares `e^r_{N_{k,r}}` with `Σ_{Λ_{k,r}} h(σ)` for each `k`. The
/// discretisation moves `e` by at most `δ`, so the upper bound is relaxed to
/// `((Σh)^{1/r} + δ)^r`.
pub fn check_error_sandwich(system: &CondensationSystem, r: f64, ks: &[u64], depth: usize) -> Result<SandwichReport> {
    if system.dim() != 1 {
        return Err(Error::Unsupported("the sandwich check needs exact errors, available on the line only".into()));
    }
    let lambdas = ks.iter().map(|&k| build_lambda(system, r, k, DEFAULT_WORD_BUDGET)).collect::<Result<Vec<_>>>()?;
    let atoms = discretize_mu(system, depth, DEFAULT_ATOM_BUDGET)?;
    let n_max = lambdas.iter().map(|l| l.cardinality()).max().unwrap_or(0);
    if n_max == 0 {
        return Err(Error::InvalidInput("no k values given".into()));
    }
    let errors = optimal_1d_all(&atoms, n_max, r, DpStrategy::Auto)?;
    let delta = atoms.resolution;
    let rows: Vec<SandwichRow> = lambdas
        .iter()
        .map(|lam| {
            let n = lam.cardinality();
            let h_sum = lam.h_total();
            let e_r = errors[n - 1].error.powf(r);
            let slack = (h_sum.powf(1.0 / r) + delta).powf(r) - h_sum;
            SandwichRow {
                k: lam.k,
                n_kr: n,
                h_sum,
                e_r,
                slack,
                upper_ok: e_r <= h_sum + slack,
                log_ratio: (e_r / h_sum).ln(),
            }
        })
        .collect();
    let hi = rows.iter().map(|r| r.log_ratio).fold(f64::NEG_INFINITY, f64::max);
    let lo = rows.iter().map(|r| r.log_ratio).fold(f64::INFINITY, f64::min);
    Ok(SandwichReport { r, depth, resolution: delta, rows, log_ratio_spread: hi - lo })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn c13_condensation_small() {
        let report = check_condensation_inequality(&reference::c13(), 2.0, &[1, 2, 3, 5, 8], 8).unwrap();
        assert!(report.passed());
        assert!(!report.low_resolution);
        assert_eq!(report.rows[0].upper_ok, None);
        assert_eq!(report.rows[2].n_split, 1);
    }

    #[test]
    fn coarse_depth_is_flagged() {
        let report = check_condensation_inequality(&reference::c13(), 2.0, &[1, 2], 1).unwrap();
        assert!(report.low_resolution);
        assert!(report.passed());
    }

    #[test]
    fn skewed_condensation() {
        let sys = reference::equal_ratio_line(2, 1.0 / 3.0, vec![0.8, 0.2], 0.3, vec![0.2, 0.5]).unwrap();
        let ns: Vec<usize> = (1..=12).collect();
        let report = check_condensation_inequality(&sys, 2.0, &ns, 9).unwrap();
        assert!(report.passed(), "{:?}", report.rows);
    }

    #[test]
    fn c13_sandwich_small() {
        let ks: Vec<u64> = (0..4).map(|j| 18u64.pow(j)).collect();
        let report = check_error_sandwich(&reference::c13(), 2.0, &ks, 9).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.rows.iter().map(|r| r.n_kr).collect::<Vec<_>>(), vec![4, 8, 16, 32]);
    }
}
