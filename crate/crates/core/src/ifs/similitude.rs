use crate::error::{Error, Result};

const ORTHOGONAL_TOL: f64 = 1e-9;

/// A contracting similitude `x ↦ scale · O x + translation` on `ℝ^q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Similitude {
    scale: f64,
    /// Row-major `q × q` orthogonal matrix.
    orthogonal: Vec<f64>,
    translation: Vec<f64>,
}

impl Similitude {
    /// Builds a similitude; `orthogonal` defaults to the identity.
    pub fn new(scale: f64, orthogonal: Option<Vec<Vec<f64>>>, translation: Vec<f64>) -> Result<Self> {
        let q = translation.len();
        if q == 0 {
            return Err(Error::InvalidSystem("translation must have at least one coordinate".into()));
        }
        if !(scale > 0.0 && scale < 1.0) {
            return Err(Error::InvalidSystem(format!("scale {scale} outside (0,1)")));
        }
        if translation.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSystem("non-finite translation".into()));
        }
        let orthogonal = match orthogonal {
            None => identity(q),
            Some(rows) => {
                if rows.len() != q || rows.iter().any(|row| row.len() != q) {
                    return Err(Error::InvalidSystem(format!("orthogonal matrix must be {q}x{q}")));
                }
                let flat: Vec<f64> = rows.into_iter().flatten().collect();
                check_orthogonal(&flat, q)?;
                flat
            }
        };
        Ok(Similitude { scale, orthogonal, translation })
    }

    /// The identity map, with scale 1. Only produced by composing the empty word.
    pub fn identity(q: usize) -> Self {
        Similitude { scale: 1.0, orthogonal: identity(q), translation: vec![0.0; q] }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    pub fn orthogonal_rows(&self) -> Vec<Vec<f64>> {
        self.orthogonal.chunks(self.dim()).map(<[f64]>::to_vec).collect()
    }

    pub fn is_identity_rotation(&self) -> bool {
        self.orthogonal == identity(self.dim())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let q = self.dim();
        debug_assert_eq!(x.len(), q);
        (0..q)
            .map(|row| {
                let dot: f64 = (0..q).map(|col| self.orthogonal[row * q + col] * x[col]).sum();
                self.scale * dot + self.translation[row]
            })
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Similitude) -> Similitude {
        let q = self.dim();
        let mut orthogonal = vec![0.0; q * q];
        for i in 0..q {
            for j in 0..q {
                orthogonal[i * q + j] = (0..q).map(|k| self.orthogonal[i * q + k] * inner.orthogonal[k * q + j]).sum();
            }
        }
        Similitude { scale: self.scale * inner.scale, orthogonal, translation: self.apply(&inner.translation) }
    }

    /// The unique fixed point, found by iterating the contraction.
    pub fn fixed_point(&self) -> Vec<f64> {
        let mut x = self.translation.clone();
        for _ in 0..100_000 {
            let next = self.apply(&x);
            let moved = distance(&next, &x);
            x = next;
            if moved <= f64::EPSILON * (1.0 + norm(&x)) {
                break;
            }
        }
        x
    }

    /// Conjugates by `y ↦ origin + factor·y`, i.e. returns `φ⁻¹ ∘ self ∘ φ`.
    pub(crate) fn conjugate(&self, origin: &[f64], factor: f64) -> Similitude {
        let q = self.dim();
        // self(origin + factor y) = s O origin + s factor O y + b
        let image_of_origin = self.apply(origin);
        let translation = (0..q).map(|i| (image_of_origin[i] - origin[i]) / factor).collect();
        Similitude { scale: self.scale, orthogonal: self.orthogonal.clone(), translation }
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn identity(q: usize) -> Vec<f64> {
    let mut m = vec![0.0; q * q];
    for i in 0..q {
        m[i * q + i] = 1.0;
    }
    m
}

fn check_orthogonal(m: &[f64], q: usize) -> Result<()> {
    for i in 0..q {
        for j in 0..q {
            let dot: f64 = (0..q).map(|k| m[k * q + i] * m[k * q + j]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            if (dot - want).abs() > ORTHOGONAL_TOL {
                return Err(Error::InvalidSystem("matrix is not orthogonal".into()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rotation(theta: f64) -> Vec<Vec<f64>> {
        vec![vec![theta.cos(), -theta.sin()], vec![theta.sin(), theta.cos()]]
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Similitude::new(1.0, None, vec![0.0]).is_err());
        assert!(Similitude::new(0.0, None, vec![0.0]).is_err());
        assert!(Similitude::new(0.5, Some(vec![vec![1.0, 1.0], vec![0.0, 1.0]]), vec![0.0, 0.0]).is_err());
        assert!(Similitude::new(0.5, Some(vec![vec![-1.0]]), vec![1.0]).is_ok());
    }

    #[test]
    fn fixed_point_of_line_map() {
        let f = Similitude::new(1.0 / 3.0, None, vec![2.0 / 3.0]).unwrap();
        assert!((f.fixed_point()[0] - 1.0).abs() < 1e-15);
        let g = Similitude::new(0.5, Some(vec![vec![-1.0]]), vec![1.0]).unwrap();
        let x = g.fixed_point()[0];
        assert!((x - 2.0 / 3.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn scales_distances(
            s in 0.01f64..0.99,
            theta in 0.0f64..6.3,
            b in prop::array::uniform2(-3.0f64..3.0),
            x in prop::array::uniform2(-5.0f64..5.0),
            y in prop::array::uniform2(-5.0f64..5.0),
        ) {
            let f = Similitude::new(s, Some(rotation(theta)), b.to_vec()).unwrap();
            let d = distance(&x, &y);
            let fd = distance(&f.apply(&x), &f.apply(&y));
            prop_assert!((fd - s * d).abs() <= 1e-12 * (1.0 + s * d));
        }

        #[test]
        fn composition_matches_sequential_application(
            s1 in 0.01f64..0.99, s2 in 0.01f64..0.99,
            t1 in 0.0f64..6.3, t2 in 0.0f64..6.3,
            x in prop::array::uniform2(-5.0f64..5.0),
        ) {
            let f = Similitude::new(s1, Some(rotation(t1)), vec![0.3, -1.0]).unwrap();
            let g = Similitude::new(s2, Some(rotation(t2)), vec![2.0, 0.5]).unwrap();
            let direct = f.apply(&g.apply(&x));
            let composed = f.compose(&g).apply(&x);
            prop_assert!(distance(&direct, &composed) <= 1e-12 * (1.0 + direct.iter().map(|v| v.abs()).sum::<f64>()));
            prop_assert!((f.compose(&g).scale() - s1 * s2).abs() < 1e-15);
        }
    }
}
