//! Bundled systems used throughout the tests and the reproduction run.

use crate::error::{Error, Result};
use crate::ifs::{CondensationSystem, Similitude};

/// The middle-thirds system `f_1(x) = x/3`, `f_2(x) = x/3 + 2/3` with
/// `t = (1/2, 1/2)`, `p_0 = 1/5`, `p = (2/5, 2/5)`.
pub fn c13() -> CondensationSystem {
    equal_ratio_line(2, 1.0 / 3.0, vec![0.5, 0.5], 0.2, vec![0.4, 0.4]).expect("c13 is valid")
}

/// `N` maps of common ratio `c` on `[0,1]`, evenly spaced with the first
/// anchored at 0 and the last at 1. Requires `N·c ≤ 1` so the images of the
/// unit interval do not overlap.
pub fn equal_ratio_line(n: usize, c: f64, t: Vec<f64>, p0: f64, p: Vec<f64>) -> Result<CondensationSystem> {
    if n < 2 {
        return Err(Error::InvalidSystem("need at least 2 maps".into()));
    }
    if n as f64 * c > 1.0 + 1e-12 {
        return Err(Error::InvalidSystem(format!("{n} maps of ratio {c} overlap on the line")));
    }
    let gap = (1.0 - c) / (n - 1) as f64;
    let maps = (0..n)
        .map(|i| {
            // the last map is pinned to end exactly at 1
            let b = if i + 1 == n { 1.0 - c } else { i as f64 * gap };
            Similitude::new(c, None, vec![b])
        })
        .collect::<Result<Vec<_>>>()?;
    CondensationSystem::new(maps, t, p0, p, false)
}

/// Maps with the given ratios laid out left to right on `[0,1]`, the first
/// starting at 0, the last ending at 1 and equal gaps in between. Requires
/// `Σ s_i ≤ 1`.
pub fn packed_line(ratios: &[f64], t: Vec<f64>, p0: f64, p: Vec<f64>) -> Result<CondensationSystem> {
    let n = ratios.len();
    if n < 2 {
        return Err(Error::InvalidSystem("need at least 2 maps".into()));
    }
    let total: f64 = ratios.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(Error::InvalidSystem(format!("ratios sum to {total} > 1 and overlap on the line")));
    }
    let gap = (1.0 - total).max(0.0) / (n - 1) as f64;
    let mut left = 0.0;
    let mut maps = Vec::with_capacity(n);
    for (i, &c) in ratios.iter().enumerate() {
        let b = if i + 1 == n { 1.0 - c } else { left };
        maps.push(Similitude::new(c, None, vec![b])?);
        left += c + gap;
    }
    CondensationSystem::new(maps, t, p0, p, false)
}

/// The self-similar case `p_i = (1 - p_0) t_i` on the middle-thirds geometry.
pub fn self_similar_pair(t1: f64, p0: f64) -> CondensationSystem {
    let t = vec![t1, 1.0 - t1];
    let p = t.iter().map(|ti| (1.0 - p0) * ti).collect();
    equal_ratio_line(2, 1.0 / 3.0, t, p0, p).expect("valid pair")
}
