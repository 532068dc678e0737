//! Exact 1-D quantization by dynamic programming over contiguous cells.
//!
//! On the line every optimal codebook induces a partition of the sorted
//! atoms into contiguous runs, so for `D[l][j]`, the least cost of covering
//! the first `j` atoms with `l` cells,
//!
//! ```text
//! D[l][j] = min_{l−1 ≤ i < j} D[l−1][i] + C(i, j)
//! ```
//!
//! where `C(i, j)` is the cost of atoms `i..j` around their best center.
//! The minimizing `i` is monotone in `j`, which the divide-and-conquer
//! strategy exploits.

use super::{eval_error, Method, Quantizer};
use crate::error::{Error, Result};
use crate::measure::WeightedAtoms;

/// Above this many atoms `Auto` switches to divide and conquer.
const FULL_DP_MAX_ATOMS: usize = 64;
const CENTER_ITERATIONS: usize = 200;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DpStrategy {
    #[default]
    Auto,
    /// Scan every split point, `O(n·m²)` cell evaluations.
    Full,
    /// Monotone split points, `O(n·m·log m)` cell evaluations.
    DivideConquer,
}

/// Double-double value `hi + lo`, enough to keep prefix-sum differences
/// exact when cells are many orders of magnitude narrower than the support.
#[derive(Clone, Copy, Debug, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn product(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd::quick(p, a.mul_add(b, -p))
    }

    fn quick(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (o.hi - bb);
        Dd::quick(s, err + self.lo + o.lo)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = Dd::product(self.hi, o.hi);
        Dd::quick(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }

    fn mul_f64(self, x: f64) -> Dd {
        self.mul(Dd::from_f64(x))
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let rem = self.sub(o.mul_f64(q1));
        let q2 = rem.hi / o.hi;
        let rem = rem.sub(o.mul_f64(q2));
        Dd::quick(q1, q2).add(Dd::from_f64(rem.hi / o.hi))
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Cell costs `C(i, j) = min_c Σ_{i≤k<j} w_k |x_k − c|^r` over sorted atoms.
struct CellCost<'a> {
    xs: &'a [f64],
    ws: &'a [f64],
    r: f64,
    /// Coordinates are shifted by `xs[0]` in the prefix sums.
    shift: f64,
    p0: Vec<Dd>,
    p1: Vec<Dd>,
    p2: Vec<Dd>,
}

impl<'a> CellCost<'a> {
    fn new(xs: &'a [f64], ws: &'a [f64], r: f64) -> Self {
        let shift = xs[0];
        let m = xs.len();
        let (mut p0, mut p1, mut p2) =
            (Vec::with_capacity(m + 1), Vec::with_capacity(m + 1), Vec::with_capacity(m + 1));
        let (mut a, mut b, mut c) = (Dd::default(), Dd::default(), Dd::default());
        p0.push(a);
        p1.push(b);
        p2.push(c);
        for (&x, &w) in xs.iter().zip(ws) {
            let y = x - shift;
            let wy = Dd::product(w, y);
            a = a.add(Dd::from_f64(w));
            b = b.add(wy);
            c = c.add(wy.mul_f64(y));
            p0.push(a);
            p1.push(b);
            p2.push(c);
        }
        CellCost { xs, ws, r, shift, p0, p1, p2 }
    }

    fn weight(&self, i: usize, j: usize) -> Dd {
        self.p0[j].sub(self.p0[i])
    }

    fn moment(&self, i: usize, j: usize) -> Dd {
        self.p1[j].sub(self.p1[i])
    }

    /// Index of the weighted median of atoms `i..j`.
    fn median_index(&self, i: usize, j: usize) -> usize {
        let half = self.weight(i, j).value() / 2.0;
        let base = self.p0[i];
        // first q with mass of i..=q reaching half the cell mass
        let mut lo = i;
        let mut hi = j - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.p0[mid + 1].sub(base).value() >= half {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }

    fn center(&self, i: usize, j: usize) -> f64 {
        if j - i == 1 {
            return self.xs[i];
        }
        if self.r == 2.0 {
            self.moment(i, j).div(self.weight(i, j)).value() + self.shift
        } else if self.r == 1.0 {
            self.xs[self.median_index(i, j)]
        } else {
            self.bisect_center(i, j)
        }
    }

    /// Root of the increasing derivative `Σ w sign(c − x)|c − x|^{r−1}`.
    fn bisect_center(&self, i: usize, j: usize) -> f64 {
        let (xs, ws) = (&self.xs[i..j], &self.ws[i..j]);
        let slope = |c: f64| -> f64 {
            xs.iter().zip(ws).map(|(&x, &w)| w * (c - x).signum() * (c - x).abs().powf(self.r - 1.0)).sum()
        };
        let (mut lo, mut hi) = (xs[0], xs[xs.len() - 1]);
        for _ in 0..CENTER_ITERATIONS {
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

    fn cost(&self, i: usize, j: usize) -> f64 {
        if j - i == 1 {
            return 0.0;
        }
        if self.r == 2.0 {
            let s1 = self.moment(i, j);
            let v = self.p2[j].sub(self.p2[i]).sub(s1.mul(s1).div(self.weight(i, j)));
            v.value().max(0.0)
        } else if self.r == 1.0 {
            let q = self.median_index(i, j);
            let m = self.xs[q] - self.shift;
            let right = self.moment(q + 1, j).sub(self.weight(q + 1, j).mul_f64(m));
            let left = self.weight(i, q).mul_f64(m).sub(self.moment(i, q));
            right.add(left).value().max(0.0)
        } else {
            let c = self.bisect_center(i, j);
            self.xs[i..j].iter().zip(&self.ws[i..j]).map(|(&x, &w)| w * (x - c).abs().powf(self.r)).sum()
        }
    }
}

/// One DP layer: best values and split points for every prefix length.
struct Layer {
    value: Vec<f64>,
    split: Vec<u32>,
}

fn next_layer(cost: &CellCost, prev: &Layer, l: usize, strategy: DpStrategy) -> Layer {
    let m = prev.value.len() - 1;
    let mut value = vec![f64::INFINITY; m + 1];
    let mut split = vec![0u32; m + 1];
    match strategy {
        DpStrategy::Full | DpStrategy::Auto => {
            for j in l..=m {
                for i in (l - 1)..j {
                    let v = prev.value[i] + cost.cost(i, j);
                    if v < value[j] {
                        value[j] = v;
                        split[j] = i as u32;
                    }
                }
            }
        }
        DpStrategy::DivideConquer => {
            let mut tasks = vec![(l, m, l - 1, m - 1)];
            while let Some((j_lo, j_hi, opt_lo, opt_hi)) = tasks.pop() {
                if j_lo > j_hi {
                    continue;
                }
                let j = (j_lo + j_hi) / 2;
                let mut best = (f64::INFINITY, opt_lo);
                for i in opt_lo..=opt_hi.min(j - 1) {
                    let v = prev.value[i] + cost.cost(i, j);
                    if v < best.0 {
                        best = (v, i);
                    }
                }
                value[j] = best.0;
                split[j] = best.1 as u32;
                if j > j_lo {
                    tasks.push((j_lo, j - 1, opt_lo, best.1));
                }
                tasks.push((j + 1, j_hi, best.1, opt_hi));
            }
        }
    }
    Layer { value, split }
}

fn check_order(r: f64) -> Result<()> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::Unsupported(format!(
            "exact quantization needs r >= 1 (got {r}); cell costs are not convex below 1"
        )));
    }
    Ok(())
}

/// Optimal codebooks for every `n` in `1..=n_max`.
pub fn optimal_1d_all(atoms: &WeightedAtoms, n_max: usize, r: f64, strategy: DpStrategy) -> Result<Vec<Quantizer>> {
    check_order(r)?;
    if n_max == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let (xs, ws) = atoms.sorted_line()?;
    let m = xs.len();
    let strategy = match strategy {
        DpStrategy::Auto if m > FULL_DP_MAX_ATOMS => DpStrategy::DivideConquer,
        DpStrategy::Auto => DpStrategy::Full,
        s => s,
    };
    let cost = CellCost::new(&xs, &ws, r);
    let depth = n_max.min(m);

    let mut layers = Vec::with_capacity(depth);
    let first =
        Layer { value: (0..=m).map(|j| if j == 0 { 0.0 } else { cost.cost(0, j) }).collect(), split: vec![0; m + 1] };
    layers.push(first);
    for l in 2..=depth {
        let layer = next_layer(&cost, &layers[l - 2], l, strategy);
        layers.push(layer);
    }

    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let codebook: Vec<Vec<f64>> = if n >= m {
            xs.iter().map(|&x| vec![x]).collect()
        } else {
            let mut cells = Vec::with_capacity(n);
            let mut j = m;
            for l in (1..=n).rev() {
                let i = layers[l - 1].split[j] as usize;
                cells.push(cost.center(i, j));
                j = i;
            }
            cells.reverse();
            cells.into_iter().map(|c| vec![c]).collect()
        };
        let error = eval_error(atoms, &codebook, r)?;
        out.push(Quantizer { codebook, error, r, method: Method::DpExact });
    }
    Ok(out)
}

/// The optimal codebook of at most `n` points for 1-D atoms.
pub fn optimal_1d(atoms: &WeightedAtoms, n: usize, r: f64) -> Result<Quantizer> {
    let mut all = optimal_1d_all(atoms, n, r, DpStrategy::Auto)?;
    Ok(all.pop().expect("n >= 1"))
}

/// DP optimum `D[n][m]` itself, for comparison with the evaluated codebook.
#[cfg(test)]
fn dp_value(atoms: &WeightedAtoms, n: usize, r: f64, strategy: DpStrategy) -> f64 {
    let (xs, ws) = atoms.sorted_line().unwrap();
    let cost = CellCost::new(&xs, &ws, r);
    let m = xs.len();
    let mut layer =
        Layer { value: (0..=m).map(|j| if j == 0 { 0.0 } else { cost.cost(0, j) }).collect(), split: vec![0; m + 1] };
    for l in 2..=n.min(m) {
        layer = next_layer(&cost, &layer, l, strategy);
    }
    layer.value[m]
}
