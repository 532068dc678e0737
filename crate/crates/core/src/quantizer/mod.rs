//! n-th quantization errors of weighted-atom measures.
//!
//! `dp` solves the 1-D problem exactly; `lloyd` is the approximate fallback
//! for `ℝ^q`. `curve` turns a sequence of errors into dimension and
//! coefficient estimates and `checks` compares them with the antichain bounds.

mod checks;
mod curve;
mod dp;
mod lloyd;

pub use checks::{
    check_condensation_inequality, check_error_sandwich, CondensationReport, CondensationRow, SandwichReport,
    SandwichRow, SANDWICH_SPREAD_LIMIT,
};
pub use curve::{
    choose_depth, coefficient_sequence, error_curve, error_curve_on, estimate_dimension, CoefficientSequence,
    CurveEntry, DimensionEstimate, ErrorCurve, MIN_REGRESSION_POINTS, RESOLUTION_MARGIN,
};
pub use dp::{optimal_1d, optimal_1d_all, DpStrategy};
pub use lloyd::{lloyd, LloydOptions};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::WeightedAtoms;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DpExact,
    Lloyd,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::DpExact => "dp_exact",
            Method::Lloyd => "lloyd",
        }
    }
}

/// A codebook with its error `(∫ d(x, α)^r dP)^{1/r}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quantizer {
    pub codebook: Vec<Vec<f64>>,
    pub error: f64,
    pub r: f64,
    pub method: Method,
}

fn check_codebook(atoms: &WeightedAtoms, codebook: &[Vec<f64>]) -> Result<()> {
    if codebook.is_empty() {
        return Err(Error::InvalidInput("codebook is empty".into()));
    }
    if codebook.iter().any(|a| a.len() != atoms.dim()) {
        return Err(Error::InvalidInput(format!("codebook points must have dimension {}", atoms.dim())));
    }
    Ok(())
}

/// Distance from each atom to its nearest codebook point, in atom order.
fn nearest_distances(atoms: &WeightedAtoms, codebook: &[Vec<f64>]) -> Vec<f64> {
    if atoms.dim() == 1 {
        let mut sorted: Vec<f64> = codebook.iter().map(|a| a[0]).collect();
        sorted.sort_by(f64::total_cmp);
        return atoms
            .points_flat()
            .iter()
            .map(|&x| {
                let at = sorted.partition_point(|&c| c < x);
                let right = sorted.get(at).map_or(f64::INFINITY, |c| c - x);
                let left = if at > 0 { x - sorted[at - 1] } else { f64::INFINITY };
                left.min(right)
            })
            .collect();
    }
    (0..atoms.len())
        .map(|j| {
            let x = atoms.point(j);
            codebook.iter().map(|a| crate::ifs::distance(x, a)).fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Sum `Σ_j w_j d(x_j, α)^r` without the final root.
pub(crate) fn distortion(atoms: &WeightedAtoms, codebook: &[Vec<f64>], r: f64) -> f64 {
    nearest_distances(atoms, codebook).iter().zip(atoms.weights()).map(|(d, w)| w * d.powf(r)).sum()
}

/// `(Σ_j w_j min_{a∈α} |x_j − a|^r)^{1/r}`.
pub fn eval_error(atoms: &WeightedAtoms, codebook: &[Vec<f64>], r: f64) -> Result<f64> {
    check_codebook(atoms, codebook)?;
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("order r = {r} must be positive")));
    }
    Ok(distortion(atoms, codebook, r).powf(1.0 / r))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometricMeanError {
    pub value: f64,
    /// Some atom coincides with a codebook point, forcing the value to 0.
    pub zero_distance: bool,
}

/// `exp(Σ_j w_j log min_{a∈α} |x_j − a|)`, the order-0 error of a fixed codebook.
pub fn eval_geometric_mean(atoms: &WeightedAtoms, codebook: &[Vec<f64>]) -> Result<GeometricMeanError> {
    check_codebook(atoms, codebook)?;
    let d = nearest_distances(atoms, codebook);
    if d.contains(&0.0) {
        return Ok(GeometricMeanError { value: 0.0, zero_distance: true });
    }
    let log_mean: f64 = d.iter().zip(atoms.weights()).map(|(x, w)| w * x.ln()).sum();
    Ok(GeometricMeanError { value: log_mean.exp(), zero_distance: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::discretize_mu;
    use crate::reference;

    fn two_atoms() -> WeightedAtoms {
        WeightedAtoms::line(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert!((eval_error(&two_atoms(), &[vec![0.5]], 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(eval_error(&two_atoms(), &[vec![1.0], vec![0.0], vec![0.3]], 1.3).unwrap(), 0.0);
        assert!(eval_error(&two_atoms(), &[], 2.0).is_err());
    }

    #[test]
    fn eval_matches_plain_summation() {
        let atoms = discretize_mu(&reference::c13(), 6, 100).unwrap();
        let (c1, c2) = (1.0 / 6.0, 5.0 / 6.0);
        let mut total = 0.0;
        for j in 0..atoms.len() {
            let x = atoms.point(j)[0];
            let d = (x - c1).abs().min((x - c2).abs());
            total += atoms.weights()[j] * d * d;
        }
        let e = eval_error(&atoms, &[vec![c1], vec![c2]], 2.0).unwrap();
        assert!((e - total.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn planar_eval_uses_euclidean_distance() {
        let atoms = WeightedAtoms::new(2, vec![0.0, 0.0, 3.0, 4.0], vec![0.5, 0.5]).unwrap();
        let e = eval_error(&atoms, &[vec![0.0, 0.0]], 1.0).unwrap();
        assert!((e - 2.5).abs() < 1e-15);
    }

    #[test]
    fn geometric_mean_examples() {
        let g = eval_geometric_mean(&two_atoms(), &[vec![0.25]]).unwrap();
        assert!((g.value - (0.25f64 * 0.75).sqrt()).abs() < 1e-15);
        assert!(!g.zero_distance);
        let g = eval_geometric_mean(&two_atoms(), &[vec![1.0]]).unwrap();
        assert!(g.zero_distance && g.value == 0.0);
        let single = WeightedAtoms::line(vec![0.0], vec![1.0]).unwrap();
        assert!((eval_geometric_mean(&single, &[vec![0.3]]).unwrap().value - 0.3).abs() < 1e-15);
    }
}
