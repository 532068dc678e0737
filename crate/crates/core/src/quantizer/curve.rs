//! Error curves `n ↦ e_{n,r}` and the estimates read off them.

use serde::Serialize;

use super::{lloyd, optimal_1d_all, DpStrategy, LloydOptions, Method, Quantizer};
use crate::error::{Error, Result};
use crate::ifs::CondensationSystem;
use crate::measure::{discretize_mu, WeightedAtoms, DEFAULT_ATOM_BUDGET};

/// Entries enter the regression only when `e > RESOLUTION_MARGIN · resolution`.
pub const RESOLUTION_MARGIN: f64 = 10.0;
pub const MIN_REGRESSION_POINTS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveEntry {
    pub n: usize,
    pub e: f64,
    pub method: Method,
    pub codebook: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorCurve {
    pub r: f64,
    pub entries: Vec<CurveEntry>,
    /// Discretisation certificate: `|e(μ) − e(atoms)| ≤ resolution_bound`.
    pub resolution_bound: f64,
}

fn normalize_n_list(n_list: &[usize]) -> Result<Vec<usize>> {
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::InvalidInput("n values must be positive and the list nonempty".into()));
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    Ok(ns)
}

/// Errors of `atoms` at each `n`: exact DP on the line, Lloyd otherwise.
pub fn error_curve_on(
    atoms: &WeightedAtoms,
    r: f64,
    n_list: &[usize],
    lloyd_options: &LloydOptions,
) -> Result<ErrorCurve> {
    let ns = normalize_n_list(n_list)?;
    let n_max = *ns.last().expect("nonempty");
    let mut entries = Vec::with_capacity(ns.len());
    if atoms.dim() == 1 {
        let all = optimal_1d_all(atoms, n_max, r, DpStrategy::Auto)?;
        for &n in &ns {
            let Quantizer { codebook, error, method, .. } = all[n - 1].clone();
            entries.push(CurveEntry { n, e: error, method, codebook });
        }
    } else {
        for &n in &ns {
            let mut q = lloyd(atoms, n, r, lloyd_options)?;
            // adding points never hurts, so fall back on the previous codebook
            if let Some(prev) = entries.last() as Option<&CurveEntry> {
                if q.error > prev.e {
                    let mut codebook = prev.codebook.clone();
                    let extra = (0..atoms.len()).take(n - prev.n).map(|j| atoms.point(j).to_vec());
                    codebook.extend(extra);
                    let error = super::eval_error(atoms, &codebook, r)?;
                    q = Quantizer { codebook, error, r, method: Method::Lloyd };
                }
            }
            entries.push(CurveEntry { n, e: q.error, method: q.method, codebook: q.codebook });
        }
    }
    Ok(ErrorCurve { r, entries, resolution_bound: atoms.resolution })
}

/// Errors of the depth-`depth` discretisation of μ.
pub fn error_curve(system: &CondensationSystem, r: f64, n_list: &[usize], depth: usize) -> Result<ErrorCurve> {
    let atoms = discretize_mu(system, depth, DEFAULT_ATOM_BUDGET)?;
    error_curve_on(&atoms, r, n_list, &LloydOptions::default())
}

/// Smallest depth whose resolution is at most `0.05 · target_error`.
pub fn choose_depth(system: &CondensationSystem, target_error: f64) -> Result<usize> {
    if !(target_error > 0.0) {
        return Err(Error::InvalidInput("target error must be positive".into()));
    }
    let depth = ((0.05 * target_error).ln() / system.s_max().ln()).ceil().max(1.0);
    Ok(depth as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// Secant slopes between consecutive qualifying entries, keyed by the larger `n`.
    pub local_slopes: Vec<(usize, f64)>,
    pub used: Vec<usize>,
}

/// Least-squares fit of `log n` against `−log e` over entries well above
/// the resolution bound.
pub fn estimate_dimension(curve: &ErrorCurve) -> Result<DimensionEstimate> {
    let cutoff = RESOLUTION_MARGIN * curve.resolution_bound;
    let pts: Vec<(usize, f64, f64)> = curve
        .entries
        .iter()
        .filter(|e| e.e > cutoff && e.e > 0.0)
        .map(|e| (e.n, -e.e.ln(), (e.n as f64).ln()))
        .collect();
    if pts.len() < MIN_REGRESSION_POINTS {
        return Err(Error::InsufficientResolution { qualifying: pts.len(), needed: MIN_REGRESSION_POINTS });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.2).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.1 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.1 - mx) * (p.2 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientResolution { qualifying: 1, needed: MIN_REGRESSION_POINTS });
    }
    let slope = sxy / sxx;
    let local_slopes = pts.windows(2).map(|w| (w[1].0, (w[1].2 - w[0].2) / (w[1].1 - w[0].1))).collect();
    Ok(DimensionEstimate { slope, intercept: my - slope * mx, local_slopes, used: pts.iter().map(|p| p.0).collect() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientSequence {
    pub xi: f64,
    /// `(n, n^{1/ξ} e_n)`
    pub values: Vec<(usize, f64)>,
    pub min: f64,
    pub max: f64,
    pub ratio: f64,
    pub first_quarter_mean: f64,
    pub last_quarter_mean: f64,
}

/// `n^{1/ξ} e_n` over the curve, with band and trend summaries. The
/// quarters hold `⌈len/4⌉` entries each.
pub fn coefficient_sequence(curve: &ErrorCurve, xi: f64) -> Result<CoefficientSequence> {
    if !(xi > 0.0) {
        return Err(Error::InvalidInput("xi must be positive".into()));
    }
    if curve.entries.is_empty() {
        return Err(Error::InvalidInput("empty curve".into()));
    }
    let values: Vec<(usize, f64)> = curve.entries.iter().map(|e| (e.n, (e.n as f64).powf(1.0 / xi) * e.e)).collect();
    let min = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let max = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let quarter = values.len().div_ceil(4);
    let mean = |s: &[(usize, f64)]| s.iter().map(|v| v.1).sum::<f64>() / s.len() as f64;
    Ok(CoefficientSequence {
        xi,
        min,
        max,
        ratio: max / min,
        first_quarter_mean: mean(&values[..quarter]),
        last_quarter_mean: mean(&values[values.len() - quarter..]),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::optimal_1d;
    use crate::reference;

    #[test]
    fn c13_curve_decreases() {
        let c13 = reference::c13();
        let ns: Vec<usize> = (1..=8).collect();
        let curve = error_curve(&c13, 2.0, &ns, 10).unwrap();
        assert!(curve.entries.windows(2).all(|w| w[1].e < w[0].e));
        let atoms = discretize_mu(&c13, 10, 1 << 12).unwrap();
        assert_eq!(curve.entries[0].e, optimal_1d(&atoms, 1, 2.0).unwrap().error);
        assert!((curve.resolution_bound - 3f64.powi(-10)).abs() < 1e-18);
    }

    #[test]
    fn needs_enough_resolved_points() {
        let c13 = reference::c13();
        let curve = error_curve(&c13, 2.0, &[2, 4], 10).unwrap();
        assert!(matches!(estimate_dimension(&curve), Err(Error::InsufficientResolution { qualifying: 2, .. })));
        // at depth 3 only the coarsest errors clear the margin
        let coarse = error_curve(&c13, 2.0, &[1, 2, 4, 8], 3).unwrap();
        assert!(estimate_dimension(&coarse).is_err());
    }

    #[test]
    fn exact_power_law_slope() {
        let curve = ErrorCurve {
            r: 2.0,
            entries: (1..=6)
                .map(|l| {
                    let n = 1usize << l;
                    CurveEntry { n, e: 0.3 * (n as f64).powf(-1.0 / 0.7), method: Method::DpExact, codebook: vec![] }
                })
                .collect(),
            resolution_bound: 0.0,
        };
        let est = estimate_dimension(&curve).unwrap();
        assert!((est.slope - 0.7).abs() < 1e-12);
        assert!(est.local_slopes.iter().all(|s| (s.1 - 0.7).abs() < 1e-12));
        let seq = coefficient_sequence(&curve, 0.7).unwrap();
        assert!((seq.ratio - 1.0).abs() < 1e-12);
        let flat = coefficient_sequence(&curve, 1e6).unwrap();
        assert!(flat.values.windows(2).all(|w| w[1].1 < w[0].1));
    }

    #[test]
    fn depth_choice() {
        let c13 = reference::c13();
        let depth = choose_depth(&c13, 1e-3).unwrap();
        assert!(3f64.powi(-(depth as i32)) <= 0.05e-3);
        assert!(3f64.powi(-(depth as i32 - 1)) > 0.05e-3);
    }

    #[test]
    fn planar_curve_is_monotone() {
        let atoms = WeightedAtoms::new(
            2,
            (0..60).flat_map(|j| [(j as f64 * 0.37).sin(), (j as f64 * 0.11).cos()]).collect(),
            vec![1.0 / 60.0; 60],
        )
        .unwrap();
        let curve =
            error_curve_on(&atoms, 2.0, &[1, 2, 3, 5, 8], &LloydOptions { restarts: 4, ..Default::default() }).unwrap();
        assert!(curve.entries.windows(2).all(|w| w[1].e <= w[0].e));
        assert!(curve.entries.iter().all(|e| e.method == Method::Lloyd));
    }
}
