use serde::{Deserialize, Serialize};

use super::similitude::{distance, Similitude};
use super::word::Word;
use crate::error::{Error, Result};

const PROBABILITY_TOL: f64 = 1e-12;
const OSC_TOL: f64 = 1e-12;
/// Atom budget used to estimate the attractor diameter when `q ≥ 2`.
const DIAMETER_POINTS: usize = 2048;

/// JSON form of a condensation system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub dim: usize,
    pub maps: Vec<MapConfig>,
    pub t: Vec<f64>,
    pub p0: f64,
    pub p: Vec<f64>,
    #[serde(default)]
    pub osc_asserted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapConfig {
    pub scale: f64,
    pub translation: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orthogonal: Option<Vec<Vec<f64>>>,
}

/// How the open set condition is known to hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OscStatus {
    /// 1-D check: the images of `(0,1)` are disjoint subintervals of `(0,1)`.
    VerifiedInterval,
    /// Declared by the configuration and not checked.
    Asserted,
    Unknown,
}

/// Affine change of coordinates `x = origin + scale · y` from the
/// normalised frame (attractor diameter 1) back to the input frame.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Normalization {
    pub origin: Vec<f64>,
    pub scale: f64,
    /// False when the diameter was bounded from a point cloud rather than computed.
    pub exact: bool,
}

impl Normalization {
    pub fn to_original(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.origin).map(|(v, o)| o + self.scale * v).collect()
    }
}

/// Products `s_σ`, `t_σ`, `p_σ` along a word.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WordProducts {
    pub s: f64,
    pub t: f64,
    pub p: f64,
}

/// Similitudes `f_1..f_N` with the weights `t` of the self-similar measure ν
/// and the condensation weights `p_0, p_1..p_N`.
///
/// Coordinates are normalised at construction so that the attractor has
/// diameter 1; the maps stored here act on the normalised frame.
#[derive(Clone, Debug)]
pub struct CondensationSystem {
    maps: Vec<Similitude>,
    t: Vec<f64>,
    p0: f64,
    p: Vec<f64>,
    osc: OscStatus,
    normalization: Normalization,
}

impl CondensationSystem {
    pub fn new(maps: Vec<Similitude>, t: Vec<f64>, p0: f64, p: Vec<f64>, osc_asserted: bool) -> Result<Self> {
        let n = maps.len();
        if n < 2 {
            return Err(Error::InvalidSystem(format!("need at least 2 maps, got {n}")));
        }
        let q = maps[0].dim();
        if maps.iter().any(|m| m.dim() != q) {
            return Err(Error::InvalidSystem("maps act on different dimensions".into()));
        }
        if t.len() != n || p.len() != n {
            return Err(Error::InvalidSystem(format!(
                "expected {n} entries in t and p, got {} and {}",
                t.len(),
                p.len()
            )));
        }
        if t.iter().chain(&p).chain(std::iter::once(&p0)).any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidSystem("all of t, p0, p must be positive".into()));
        }
        let t_sum: f64 = t.iter().sum();
        if (t_sum - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::InvalidSystem(format!("t sums to {t_sum}, not 1")));
        }
        let p_sum: f64 = p0 + p.iter().sum::<f64>();
        if (p_sum - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::InvalidSystem(format!("p0 + p sums to {p_sum}, not 1")));
        }

        let normalization = if q == 1 { interval_hull(&maps) } else { point_cloud_diameter(&maps) };
        if !(normalization.scale > 0.0) {
            return Err(Error::InvalidSystem("attractor is a single point".into()));
        }
        let maps: Vec<Similitude> =
            maps.iter().map(|m| m.conjugate(&normalization.origin, normalization.scale)).collect();

        let mut system = CondensationSystem { maps, t, p0, p, osc: OscStatus::Unknown, normalization };
        system.osc = match system.osc_interval_check() {
            Ok(true) => OscStatus::VerifiedInterval,
            _ if osc_asserted => OscStatus::Asserted,
            _ => OscStatus::Unknown,
        };
        Ok(system)
    }

    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        if config.dim == 0 {
            return Err(Error::InvalidSystem("dim must be positive".into()));
        }
        let maps = config
            .maps
            .iter()
            .map(|m| {
                if m.translation.len() != config.dim {
                    return Err(Error::InvalidSystem(format!(
                        "translation has {} coordinates, dim is {}",
                        m.translation.len(),
                        config.dim
                    )));
                }
                Similitude::new(m.scale, m.orthogonal.clone(), m.translation.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(maps, config.t.clone(), config.p0, config.p.clone(), config.osc_asserted)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: SystemConfig = serde_json::from_str(text)?;
        Self::from_config(&config)
    }

    /// Configuration of the normalised system.
    pub fn to_config(&self) -> SystemConfig {
        SystemConfig {
            dim: self.dim(),
            maps: self
                .maps
                .iter()
                .map(|m| MapConfig {
                    scale: m.scale(),
                    translation: m.translation().to_vec(),
                    orthogonal: (!m.is_identity_rotation()).then(|| m.orthogonal_rows()),
                })
                .collect(),
            t: self.t.clone(),
            p0: self.p0,
            p: self.p.clone(),
            osc_asserted: self.osc != OscStatus::Unknown,
        }
    }

    pub fn n_maps(&self) -> usize {
        self.maps.len()
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    pub fn maps(&self) -> &[Similitude] {
        &self.maps
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(Similitude::scale).collect()
    }

    pub fn s_max(&self) -> f64 {
        self.maps.iter().map(Similitude::scale).fold(0.0, f64::max)
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn osc(&self) -> OscStatus {
        self.osc
    }

    pub fn normalization(&self) -> &Normalization {
        &self.normalization
    }

    pub fn require_osc(&self) -> Result<()> {
        match self.osc {
            OscStatus::Unknown => Err(Error::OscUnknown),
            _ => Ok(()),
        }
    }

    /// Whether `p_i + p_0 t_i = t_i` for all `i`, in which case μ = ν.
    pub fn is_self_similar(&self) -> bool {
        self.t.iter().zip(&self.p).all(|(t, p)| (p + self.p0 * t - t).abs() <= PROBABILITY_TOL)
    }

    /// Anchor point of the discretisations: the fixed point of `f_1`.
    pub fn anchor(&self) -> Vec<f64> {
        self.maps[0].fixed_point()
    }

    /// `f_σ = f_{σ_1} ∘ ... ∘ f_{σ_n}`.
    pub fn compose_map(&self, word: &Word) -> Result<Similitude> {
        word.validate(self.n_maps())?;
        Ok(word.indices().iter().fold(Similitude::identity(self.dim()), |acc, &i| acc.compose(&self.maps[i])))
    }

    pub fn word_products(&self, word: &Word) -> Result<WordProducts> {
        word.validate(self.n_maps())?;
        let mut out = WordProducts { s: 1.0, t: 1.0, p: 1.0 };
        for &i in word.indices() {
            out.s *= self.maps[i].scale();
            out.t *= self.t[i];
            out.p *= self.p[i];
        }
        Ok(out)
    }

    /// Sufficient check for the open set condition on the line: the images
    /// of `(0,1)` are pairwise disjoint and contained in `(0,1)`.
    pub fn osc_interval_check(&self) -> Result<bool> {
        if self.dim() != 1 {
            return Err(Error::Unsupported("interval OSC check needs dim = 1; assert OSC in the configuration".into()));
        }
        let mut intervals: Vec<(f64, f64)> = self
            .maps
            .iter()
            .map(|m| {
                let a = m.apply(&[0.0])[0];
                let b = m.apply(&[1.0])[0];
                (a.min(b), a.max(b))
            })
            .collect();
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let inside = intervals.iter().all(|&(a, b)| a >= -OSC_TOL && b <= 1.0 + OSC_TOL);
        let disjoint = intervals.windows(2).all(|w| w[1].0 >= w[0].1 - OSC_TOL);
        Ok(inside && disjoint)
    }
}

/// Convex hull of a 1-D attractor: grow the hull of the fixed points under
/// the maps until it stops changing.
fn interval_hull(maps: &[Similitude]) -> Normalization {
    let fixed: Vec<f64> = maps.iter().map(|m| m.fixed_point()[0]).collect();
    let mut lo = fixed.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = fixed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..10_000 {
        let (mut new_lo, mut new_hi) = (lo, hi);
        for m in maps {
            let a = m.apply(&[lo])[0];
            let b = m.apply(&[hi])[0];
            new_lo = new_lo.min(a.min(b));
            new_hi = new_hi.max(a.max(b));
        }
        if new_lo == lo && new_hi == hi {
            break;
        }
        lo = new_lo;
        hi = new_hi;
    }
    Normalization { origin: vec![lo], scale: hi - lo, exact: true }
}

/// Upper bound on the attractor diameter from the images of one point at
/// the deepest level with at most `DIAMETER_POINTS` words: every point of
/// the attractor lies within `s_max^L · diam` of one of them.
fn point_cloud_diameter(maps: &[Similitude]) -> Normalization {
    let n = maps.len();
    let s_max = maps.iter().map(Similitude::scale).fold(0.0, f64::max);
    let mut depth = 1;
    while n.pow(depth as u32 + 1) <= DIAMETER_POINTS {
        depth += 1;
    }
    let anchor = maps[0].fixed_point();
    let mut points = vec![anchor.clone()];
    for _ in 0..depth {
        points = points.iter().flat_map(|x| maps.iter().map(move |m| m.apply(x))).collect();
    }
    let mut diameter: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            diameter = diameter.max(distance(a, b));
        }
    }
    let margin = 1.0 - 2.0 * s_max.powi(depth);
    let scale = if margin > 0.0 { diameter / margin } else { diameter };
    Normalization { origin: vec![0.0; anchor.len()], scale, exact: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    fn line(maps: &[(f64, f64)]) -> CondensationSystem {
        let n = maps.len();
        let maps = maps.iter().map(|&(s, b)| Similitude::new(s, None, vec![b]).unwrap()).collect();
        CondensationSystem::new(maps, vec![1.0 / n as f64; n], 0.2, vec![0.8 / n as f64; n], false).unwrap()
    }

    #[test]
    fn compose_map_examples() {
        let c13 = reference::c13();
        let w12 = Word::from_symbols(&[1, 2], 2).unwrap();
        let f = c13.compose_map(&w12).unwrap();
        assert!((f.scale() - 1.0 / 9.0).abs() < 1e-15);
        for x in [0.0, 0.3, 1.0] {
            assert!((f.apply(&[x])[0] - (x / 9.0 + 2.0 / 9.0)).abs() < 1e-15);
        }
        let id = c13.compose_map(&Word::empty()).unwrap();
        assert_eq!(id.scale(), 1.0);
        assert_eq!(id.apply(&[0.7]), vec![0.7]);
        let w111 = Word::from_symbols(&[1, 1, 1], 2).unwrap();
        assert!((c13.compose_map(&w111).unwrap().scale() - 1.0 / 27.0).abs() < 1e-16);
        assert!(c13.compose_map(&Word::from_indices(vec![2])).is_err());
    }

    #[test]
    fn word_products_examples() {
        let c13 = reference::c13();
        assert_eq!(c13.word_products(&Word::empty()).unwrap(), WordProducts { s: 1.0, t: 1.0, p: 1.0 });
        let one = c13.word_products(&Word::from_symbols(&[1], 2).unwrap()).unwrap();
        assert!((one.s - 1.0 / 3.0).abs() < 1e-16 && one.t == 0.5 && (one.p - 0.4).abs() < 1e-16);
        let two_one = c13.word_products(&Word::from_symbols(&[2, 1], 2).unwrap()).unwrap();
        assert!((two_one.s - 1.0 / 9.0).abs() < 1e-16);
        assert!((two_one.t - 0.25).abs() < 1e-16);
        assert!((two_one.p - 4.0 / 25.0).abs() < 1e-16);
    }

    #[test]
    fn osc_interval_examples() {
        assert!(reference::c13().osc_interval_check().unwrap());
        assert!(line(&[(0.5, 0.0), (0.5, 0.5)]).osc_interval_check().unwrap());
        let overlapping = line(&[(2.0 / 3.0, 0.0), (2.0 / 3.0, 1.0 / 3.0)]);
        assert!(!overlapping.osc_interval_check().unwrap());
        assert_eq!(overlapping.osc(), OscStatus::Unknown);
        assert!(overlapping.require_osc().is_err());
    }

    #[test]
    fn osc_check_needs_the_line() {
        let rot = |x: f64, y: f64| Similitude::new(0.5, None, vec![x, y]).unwrap();
        let sys = CondensationSystem::new(
            vec![rot(0.0, 0.0), rot(0.5, 0.0), rot(0.0, 0.5)],
            vec![1.0 / 3.0; 3],
            0.1,
            vec![0.3; 3],
            true,
        )
        .unwrap();
        assert!(matches!(sys.osc_interval_check(), Err(Error::Unsupported(_))));
        assert_eq!(sys.osc(), OscStatus::Asserted);
        assert!(!sys.normalization().exact);
        // normalised diameter is at most 1
        let far = sys.compose_map(&Word::from_indices(vec![1; 30])).unwrap().apply(&sys.anchor());
        let near = sys.compose_map(&Word::from_indices(vec![2; 30])).unwrap().apply(&sys.anchor());
        assert!(distance(&far, &near) <= 1.0);
    }

    #[test]
    fn rescales_to_unit_diameter() {
        // attractor of x/3, x/3 + 4 is the Cantor set stretched onto [0, 6]
        let sys = line(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 4.0)]);
        let norm = sys.normalization();
        assert!(norm.exact);
        assert!((norm.scale - 6.0).abs() < 1e-12 && norm.origin[0].abs() < 1e-12);
        assert!((sys.maps()[1].translation()[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!(sys.osc_interval_check().unwrap());
        assert!((norm.to_original(&[1.0])[0] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn hull_with_orientation_reversal() {
        // f1(x) = -x/2 + 1/2, f2(x) = x/2 + 1/2: hull [0,1] although the
        // fixed points are 1/3 and 1
        let maps = vec![
            Similitude::new(0.5, Some(vec![vec![-1.0]]), vec![0.5]).unwrap(),
            Similitude::new(0.5, None, vec![0.5]).unwrap(),
        ];
        let sys = CondensationSystem::new(maps, vec![0.5, 0.5], 0.5, vec![0.25, 0.25], false).unwrap();
        let norm = sys.normalization();
        assert!(norm.origin[0].abs() < 1e-12, "{norm:?}");
        assert!((norm.scale - 1.0).abs() < 1e-12, "{norm:?}");
    }

    #[test]
    fn validation_errors() {
        let mut cfg = reference::c13().to_config();
        cfg.t = vec![0.5, 0.6];
        assert!(CondensationSystem::from_config(&cfg).is_err());
        let mut cfg = reference::c13().to_config();
        cfg.p0 = 0.0;
        assert!(CondensationSystem::from_config(&cfg).is_err());
        let mut cfg = reference::c13().to_config();
        cfg.maps.pop();
        assert!(CondensationSystem::from_config(&cfg).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"dim":1,"maps":[{"scale":0.3333333333333333,"translation":[0.0]},
            {"scale":0.3333333333333333,"translation":[0.6666666666666666]}],
            "t":[0.5,0.5],"p0":0.2,"p":[0.4,0.4],"osc_asserted":false}"#;
        let sys = CondensationSystem::from_json(text).unwrap();
        assert_eq!(sys.osc(), OscStatus::VerifiedInterval);
        let again = CondensationSystem::from_config(&sys.to_config()).unwrap();
        assert_eq!(again.to_config(), sys.to_config());
    }
}
