//! Split quasimorphisms on free-product decompositions `W_M * W_{V−M}`.
//!
//! A split quasimorphism is determined by two bounded odd functions, one on
//! each factor, and sums them over the alternating blocks of an element.
//! All values are exact rationals.

use std::cmp::Ordering;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentation::{Order, Presentation, PresentationError};
use crate::sampling::{random_word_upto, substream};
use crate::vertex_set::VertexSet;
use crate::words::{
    check_free_split, invert, multiply, pow, split_unchecked, AlternatingForm, NormalWord, Side,
    WordError,
};

pub type Q = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QmError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("odd function table violates f(x⁻¹) = −f(x) at exponent {0}")]
    NotOdd(i64),
    #[error("odd function table has {0} entries, expected the order {1}")]
    TableSize(usize, u64),
    #[error("odd function vertex {0} is not on its side of the split")]
    WrongSide(String),
    #[error("a sign rule needs a vertex of infinite order")]
    SignOnFinite,
    #[error("both odd functions are zero")]
    BothZero,
    #[error("recorded defect bound {0} is below the analytic bound {1}")]
    DefectTooSmall(Q, Q),
    #[error("estimation needs a positive power, got {0}")]
    NonPositivePower(i64),
    #[error("malformed rational {0:?}")]
    Rational(String),
    #[error("malformed quasimorphism: {0}")]
    Malformed(String),
}

/// A bounded odd function on one side of a split, supported on an infinite
/// or finite cyclic subgroup; every other element is sent to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OddFunction {
    Zero,
    /// `f(g^k) = values[k]` for `0 ≤ k < #G_g`.
    Table { vertex: usize, values: Vec<Q> },
    /// `f(g^k) = c` for `0 < k < n/2`, `−c` for `n/2 < k < n`, zero
    /// otherwise, where `n = #G_g` is finite.
    Halves { vertex: usize, order: u64, c: Q },
    /// `f(g^k) = c · sign(k)` for `g` of infinite order.
    Sign { vertex: usize, c: Q },
    /// `f((uv)^k) = c · sign(k)` for non-commuting involutions `u`, `v`.
    Dihedral { u: usize, v: usize, c: Q },
}

impl OddFunction {
    pub fn is_zero(&self) -> bool {
        match self {
            OddFunction::Zero => true,
            OddFunction::Table { values, .. } => values.iter().all(Zero::is_zero),
            OddFunction::Halves { c, .. } | OddFunction::Sign { c, .. } | OddFunction::Dihedral { c, .. } => {
                c.is_zero()
            }
        }
    }

    pub fn sup_norm(&self) -> Q {
        match self {
            OddFunction::Zero => Q::zero(),
            OddFunction::Table { values, .. } => {
                values.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
            }
            OddFunction::Halves { c, .. } | OddFunction::Sign { c, .. } | OddFunction::Dihedral { c, .. } => {
                c.abs()
            }
        }
    }

    fn vertices(&self) -> Vec<usize> {
        match self {
            OddFunction::Zero => vec![],
            OddFunction::Table { vertex, .. }
            | OddFunction::Halves { vertex, .. }
            | OddFunction::Sign { vertex, .. } => vec![*vertex],
            OddFunction::Dihedral { u, v, .. } => vec![*u, *v],
        }
    }

    /// Value on a block, an element of the side group.
    pub fn eval_block(&self, block: &NormalWord) -> Q {
        let syl = block.syllables();
        match self {
            OddFunction::Zero => Q::zero(),
            OddFunction::Table { vertex, values } => match syl {
                [s] if s.vertex == *vertex => values[s.exp as usize],
                _ => Q::zero(),
            },
            OddFunction::Halves { vertex, order, c } => match syl {
                [s] if s.vertex == *vertex => {
                    let k2 = 2 * s.exp as u128;
                    let n = *order as u128;
                    match k2.cmp(&n) {
                        Ordering::Less => *c,
                        Ordering::Equal => Q::zero(),
                        Ordering::Greater => -*c,
                    }
                }
                _ => Q::zero(),
            },
            OddFunction::Sign { vertex, c } => match syl {
                [s] if s.vertex == *vertex => *c * Q::from_integer(s.exp.signum() as i128),
                _ => Q::zero(),
            },
            OddFunction::Dihedral { u, v, c } => {
                if syl.is_empty() || syl.len() % 2 == 1 {
                    return Q::zero();
                }
                let (first, second) = (syl[0].vertex, syl[1].vertex);
                let alternating = (first == *u && second == *v || first == *v && second == *u)
                    && syl.iter().enumerate().all(|(i, s)| {
                        s.vertex == if i % 2 == 0 { first } else { second }
                    });
                if !alternating {
                    Q::zero()
                } else if first == *u {
                    *c
                } else {
                    -*c
                }
            }
        }
    }

    fn validate(&self, p: &Presentation, side: VertexSet) -> Result<(), QmError> {
        for v in self.vertices() {
            if v >= p.len() || !side.contains(v) {
                return Err(QmError::WrongSide(
                    p.vertices().get(v).map_or(v.to_string(), |s| s.id.clone()),
                ));
            }
        }
        match self {
            OddFunction::Zero => Ok(()),
            OddFunction::Table { vertex, values } => {
                let n = match p.order(*vertex) {
                    Order::Finite(n) => n,
                    Order::Infinite => return Err(QmError::TableSize(values.len(), 0)),
                };
                if values.len() as u64 != n {
                    return Err(QmError::TableSize(values.len(), n));
                }
                let n = n as usize;
                for k in 0..n {
                    if values[(n - k) % n] != -values[k] {
                        return Err(QmError::NotOdd(k as i64));
                    }
                }
                Ok(())
            }
            OddFunction::Halves { vertex, order, .. } => {
                if p.order(*vertex) == Order::Finite(*order) {
                    Ok(())
                } else {
                    Err(QmError::Malformed("recorded order does not match the vertex".into()))
                }
            }
            OddFunction::Sign { vertex, .. } => {
                if p.order(*vertex).is_infinite() {
                    Ok(())
                } else {
                    Err(QmError::SignOnFinite)
                }
            }
            OddFunction::Dihedral { u, v, .. } => {
                let involution = |x: usize| p.order(x) == Order::Finite(2);
                if u != v && involution(*u) && involution(*v) && !p.adjacent(*u, *v) {
                    Ok(())
                } else {
                    Err(QmError::Malformed("dihedral support needs two non-commuting involutions".into()))
                }
            }
        }
    }
}

/// The standard bounded odd function on `W_side`; zero exactly when `W_side`
/// is `C₂^k`.
///
/// The least vertex `g` of order other than 2 carries `sign(k)` (infinite
/// order) or `+1` on `g^k`, `0 < k < n/2`, and `−1` on their inverses. If
/// every vertex has order 2, the least non-commuting pair `u, v` carries
/// `sign(k)` on `(uv)^k`.
pub fn default_odd_function(p: &Presentation, side: VertexSet) -> Result<OddFunction, QmError> {
    if !side.is_subset(p.all()) {
        return Err(WordError::NotSubset.into());
    }
    let one = Q::from_integer(1);
    if let Some(g) = side.iter().find(|&v| p.order(v) != Order::Finite(2)) {
        return Ok(match p.order(g) {
            Order::Infinite => OddFunction::Sign { vertex: g, c: one },
            Order::Finite(order) => OddFunction::Halves {
                vertex: g,
                order,
                c: one,
            },
        });
    }
    for u in side.iter() {
        if let Some(v) = side.difference(p.star(u)).iter().find(|&v| v > u) {
            return Ok(OddFunction::Dihedral { u, v, c: one });
        }
    }
    Ok(OddFunction::Zero)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitQm {
    /// `M`; `W_M` is the left factor.
    pub left: VertexSet,
    pub sigma_left: OddFunction,
    pub sigma_right: OddFunction,
    pub defect_bound: Q,
}

/// `3 · max(‖σ₁‖, ‖σ₂‖)`.
pub fn analytic_defect(sigma_left: &OddFunction, sigma_right: &OddFunction) -> Q {
    Q::from_integer(3) * sigma_left.sup_norm().max(sigma_right.sup_norm())
}

impl SplitQm {
    pub fn new(
        p: &Presentation,
        left: VertexSet,
        sigma_left: OddFunction,
        sigma_right: OddFunction,
    ) -> Result<Self, QmError> {
        let defect_bound = analytic_defect(&sigma_left, &sigma_right);
        let q = SplitQm {
            left,
            sigma_left,
            sigma_right,
            defect_bound,
        };
        q.validate(p)?;
        Ok(q)
    }

    /// The split quasimorphism with default odd functions on both sides.
    pub fn default_for(p: &Presentation, left: VertexSet) -> Result<Self, QmError> {
        check_free_split(p, left)?;
        let right = p.all().difference(left);
        Self::new(
            p,
            left,
            default_odd_function(p, left)?,
            default_odd_function(p, right)?,
        )
    }

    pub fn validate(&self, p: &Presentation) -> Result<(), QmError> {
        check_free_split(p, self.left)?;
        self.sigma_left.validate(p, self.left)?;
        self.sigma_right.validate(p, p.all().difference(self.left))?;
        if self.sigma_left.is_zero() && self.sigma_right.is_zero() {
            return Err(QmError::BothZero);
        }
        let analytic = analytic_defect(&self.sigma_left, &self.sigma_right);
        if self.defect_bound < analytic {
            return Err(QmError::DefectTooSmall(self.defect_bound, analytic));
        }
        Ok(())
    }

    /// Homogenized defect bound `D̄ ≤ 2D`.
    pub fn homogenized_defect(&self) -> Q {
        Q::from_integer(2) * self.defect_bound
    }

    fn sigma(&self, side: Side) -> &OddFunction {
        match side {
            Side::Left => &self.sigma_left,
            Side::Right => &self.sigma_right,
        }
    }

    fn eval_form(&self, form: &AlternatingForm) -> Q {
        form.factors
            .iter()
            .map(|(side, block)| self.sigma(*side).eval_block(block))
            .sum()
    }

    /// `q(x) = Σ σ_{side}(block)` over the alternating blocks of `x`.
    pub fn eval(&self, x: &NormalWord) -> Q {
        self.eval_form(&split_unchecked(self.left, x))
    }

    /// A conjugate of `x` whose alternating form is cyclically reduced: its
    /// first and last blocks lie on different sides, or it has at most one
    /// block.
    pub fn cyclic_core(&self, p: &Presentation, x: &NormalWord) -> NormalWord {
        let mut x = x.clone();
        loop {
            let form = split_unchecked(self.left, &x);
            let n = form.factors.len();
            if n < 2 || form.factors[0].0 != form.factors[n - 1].0 {
                return x;
            }
            let last = &form.factors[n - 1].1;
            x = multiply(p, &multiply(p, last, &x), &invert(p, last));
        }
    }

    /// Exact homogenization `q̄(x) = lim q(x^s)/s`.
    pub fn homogenize_exact(&self, p: &Presentation, x: &NormalWord) -> Q {
        let core = self.cyclic_core(p, x);
        let form = split_unchecked(self.left, &core);
        if form.factors.len() < 2 {
            Q::zero()
        } else {
            self.eval_form(&form)
        }
    }

    /// `(q(x^s)/s, D/s)`.
    pub fn homogenize_estimate(
        &self,
        p: &Presentation,
        x: &NormalWord,
        s: i64,
    ) -> Result<(Q, Q), QmError> {
        if s <= 0 {
            return Err(QmError::NonPositivePower(s));
        }
        let s_q = Q::from_integer(s as i128);
        Ok((self.eval(&pow(p, x, s)) / s_q, self.defect_bound / s_q))
    }

    /// `(value, error bound)` in the requested mode.
    pub fn homogenize(
        &self,
        p: &Presentation,
        x: &NormalWord,
        mode: Homogenization,
    ) -> Result<(Q, Q), QmError> {
        match mode {
            Homogenization::Exact => Ok((self.homogenize_exact(p, x), Q::zero())),
            Homogenization::Estimate(s) => self.homogenize_estimate(p, x, s),
        }
    }

    /// `|q(ab) − q(a) − q(b)|`.
    pub fn defect_at(&self, p: &Presentation, a: &NormalWord, b: &NormalWord) -> Q {
        (self.eval(&multiply(p, a, b)) - self.eval(a) - self.eval(b)).abs()
    }

    /// Analytic defect and the largest defect over `samples` random pairs.
    pub fn defect_bound_report(&self, p: &Presentation, samples: usize, seed: u64) -> (Q, Q) {
        let mut rng = substream(seed, "defect");
        let mut worst = Q::zero();
        for _ in 0..samples {
            let len = rng.gen_range(0..=12);
            let a = random_word_upto(p, &mut rng, len, 3);
            let b = random_word_upto(p, &mut rng, len, 3);
            worst = worst.max(self.defect_at(p, &a, &b));
        }
        (analytic_defect(&self.sigma_left, &self.sigma_right), worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogenization {
    Exact,
    Estimate(i64),
}

/// Rationals as strings `"p"` or `"p/q"`.
pub fn format_q(x: &Q) -> String {
    x.to_string()
}

pub fn parse_q(text: &str) -> Result<Q, QmError> {
    let bad = || QmError::Rational(text.to_string());
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let n: i128 = n.parse().map_err(|_| bad())?;
    let d: i128 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OddFunctionJson {
    /// `"zero"`, `"table"`, `"halves"` (values: order, then `c`), `"sign"`
    /// or `"dihedral"`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
    pub sup_norm: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitQmJson {
    pub split: Vec<String>,
    pub sigma_left: OddFunctionJson,
    pub sigma_right: OddFunctionJson,
    pub defect_bound: String,
}

impl OddFunction {
    pub fn to_json(&self, p: &Presentation) -> OddFunctionJson {
        let (kind, values) = match self {
            OddFunction::Zero => ("zero", vec![]),
            OddFunction::Table { values, .. } => ("table", values.iter().map(format_q).collect()),
            OddFunction::Halves { order, c, .. } => ("halves", vec![order.to_string(), format_q(c)]),
            OddFunction::Sign { c, .. } => ("sign", vec![format_q(c)]),
            OddFunction::Dihedral { c, .. } => ("dihedral", vec![format_q(c)]),
        };
        OddFunctionJson {
            kind: kind.to_string(),
            vertices: self.vertices().into_iter().map(|v| p.id(v).to_string()).collect(),
            values,
            sup_norm: format_q(&self.sup_norm()),
        }
    }

    pub fn from_json(p: &Presentation, j: &OddFunctionJson) -> Result<Self, QmError> {
        let vs: Vec<usize> = j
            .vertices
            .iter()
            .map(|id| p.require_index(id))
            .collect::<Result<_, _>>()?;
        let values: Vec<Q> = j.values.iter().map(|s| parse_q(s)).collect::<Result<_, _>>()?;
        let f = match (j.kind.as_str(), vs.as_slice(), values.as_slice()) {
            ("zero", [], []) => OddFunction::Zero,
            ("table", [vertex], _) => OddFunction::Table {
                vertex: *vertex,
                values,
            },
            ("halves", [vertex], [n, c]) if n.denom() == &1 && *n.numer() > 0 => OddFunction::Halves {
                vertex: *vertex,
                order: u64::try_from(*n.numer()).map_err(|_| QmError::Malformed("order".into()))?,
                c: *c,
            },
            ("sign", [vertex], [c]) => OddFunction::Sign {
                vertex: *vertex,
                c: *c,
            },
            ("dihedral", [u, v], [c]) => OddFunction::Dihedral {
                u: *u,
                v: *v,
                c: *c,
            },
            _ => return Err(QmError::Malformed(format!("odd function of kind {:?}", j.kind))),
        };
        if parse_q(&j.sup_norm)? != f.sup_norm() {
            return Err(QmError::Malformed("recorded sup norm is wrong".into()));
        }
        Ok(f)
    }
}

impl SplitQm {
    pub fn to_json(&self, p: &Presentation) -> SplitQmJson {
        SplitQmJson {
            split: p.ids_of(self.left),
            sigma_left: self.sigma_left.to_json(p),
            sigma_right: self.sigma_right.to_json(p),
            defect_bound: format_q(&self.defect_bound),
        }
    }

    pub fn from_json(p: &Presentation, j: &SplitQmJson) -> Result<Self, QmError> {
        let q = SplitQm {
            left: p.set_of(&j.split)?,
            sigma_left: OddFunction::from_json(p, &j.sigma_left)?,
            sigma_right: OddFunction::from_json(p, &j.sigma_right)?,
            defect_bound: parse_q(&j.defect_bound)?,
        };
        q.validate(p)?;
        Ok(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::words::parse_word;

    fn q(n: i128) -> Q {
        Q::from_integer(n)
    }

    fn psl_qm() -> (Presentation, SplitQm) {
        let p = corpus::psl();
        let qm = SplitQm::default_for(&p, p.set_of(&["a"]).unwrap()).unwrap();
        (p, qm)
    }

    #[test]
    fn default_odd_function_examples() {
        let p = corpus::psl();
        let a = p.set_of(&["a"]).unwrap();
        assert!(default_odd_function(&p, a).unwrap().is_zero());
        let f = default_odd_function(&p, p.set_of(&["b"]).unwrap()).unwrap();
        assert_eq!(f, OddFunction::Halves { vertex: 1, order: 3, c: q(1) });
        assert_eq!(f.eval_block(&parse_word(&p, "b").unwrap()), q(1));
        assert_eq!(f.eval_block(&parse_word(&p, "b^2").unwrap()), q(-1));
        assert_eq!(f.sup_norm(), q(1));
        let z = corpus::z();
        let f = default_odd_function(&z, z.all()).unwrap();
        assert_eq!(f.eval_block(&parse_word(&z, "a^-5").unwrap()), q(-1));
        let c4 = Presentation::cyclic(&[("a", Order::Finite(4))], &[]).unwrap();
        let f = default_odd_function(&c4, c4.all()).unwrap();
        let values: Vec<Q> = (0..4).map(|k| f.eval_block(&NormalWord::power_of(&c4, 0, k))).collect();
        assert_eq!(values, [q(0), q(1), q(0), q(-1)]);
        f.validate(&c4, c4.all()).unwrap();
        let table = OddFunction::Table { vertex: 0, values };
        table.validate(&c4, c4.all()).unwrap();
    }

    #[test]
    fn dihedral_side() {
        let p = corpus::c2c2c2();
        let bc = p.set_of(&["b", "c"]).unwrap();
        let f = default_odd_function(&p, bc).unwrap();
        assert_eq!(f, OddFunction::Dihedral { u: 1, v: 2, c: q(1) });
        assert_eq!(f.eval_block(&parse_word(&p, "b c b c").unwrap()), q(1));
        assert_eq!(f.eval_block(&parse_word(&p, "c b").unwrap()), q(-1));
        assert_eq!(f.eval_block(&parse_word(&p, "b c b").unwrap()), q(0));
        let qm = SplitQm::default_for(&p, p.set_of(&["a"]).unwrap()).unwrap();
        let x = parse_word(&p, "a b c").unwrap();
        assert_eq!(qm.homogenize_exact(&p, &x), q(1));
        let conj = parse_word(&p, "b c a c b").unwrap();
        assert_eq!(qm.homogenize_exact(&p, &conj), q(0));
        let y = parse_word(&p, "a b c b c").unwrap();
        let (est, err) = qm.homogenize_estimate(&p, &y, 64).unwrap();
        assert!((est - qm.homogenize_exact(&p, &y)).abs() <= err);
        let dinf = corpus::dinf();
        assert!(default_odd_function(&dinf, dinf.set_of(&["a"]).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn eval_examples() {
        let (p, qm) = psl_qm();
        assert_eq!(qm.eval(&parse_word(&p, "a b a b").unwrap()), q(2));
        assert_eq!(qm.eval(&NormalWord::identity()), q(0));
        assert_eq!(qm.eval(&parse_word(&p, "b^2").unwrap()), q(-1));
        assert_eq!(qm.defect_bound, q(3));
    }

    #[test]
    fn homogenize_examples() {
        let (p, qm) = psl_qm();
        let ab = parse_word(&p, "a b").unwrap();
        assert_eq!(qm.homogenize_exact(&p, &ab), q(1));
        let (est, err) = qm.homogenize_estimate(&p, &ab, 64).unwrap();
        assert!((est - q(1)).abs() <= err);
        assert_eq!(qm.homogenize_exact(&p, &parse_word(&p, "b").unwrap()), q(0));
        assert_eq!(qm.homogenize_exact(&p, &NormalWord::identity()), q(0));
        // odd block count
        let x = parse_word(&p, "b a b a b").unwrap();
        let exact = qm.homogenize_exact(&p, &x);
        let (est, err) = qm.homogenize_estimate(&p, &x, 64).unwrap();
        assert!((est - exact).abs() <= err);
        assert!(qm.homogenize_estimate(&p, &x, 0).is_err());
    }

    #[test]
    fn defect_report_psl_and_free() {
        let (p, qm) = psl_qm();
        let (analytic, empirical) = qm.defect_bound_report(&p, 2000, 3);
        assert_eq!(analytic, q(3));
        assert!(empirical <= analytic);
        let f2 = corpus::f2();
        let qm = SplitQm::default_for(&f2, f2.set_of(&["a"]).unwrap()).unwrap();
        let (analytic, empirical) = qm.defect_bound_report(&f2, 2000, 3);
        assert!(empirical <= analytic);
        assert!(empirical > q(0));
    }

    #[test]
    fn validation_errors() {
        let p = corpus::dinf();
        assert_eq!(
            SplitQm::default_for(&p, p.set_of(&["a"]).unwrap()),
            Err(QmError::BothZero)
        );
        let z2 = corpus::z2();
        assert!(SplitQm::default_for(&z2, z2.set_of(&["a"]).unwrap()).is_err());
        let psl = corpus::psl();
        let bad = OddFunction::Table {
            vertex: 1,
            values: vec![q(0), q(1), q(1)],
        };
        assert_eq!(
            SplitQm::new(&psl, psl.set_of(&["a"]).unwrap(), OddFunction::Zero, bad),
            Err(QmError::NotOdd(1))
        );
    }

    #[test]
    fn json_round_trip() {
        let (p, qm) = psl_qm();
        let j = qm.to_json(&p);
        let text = serde_json::to_string(&j).unwrap();
        let back: SplitQmJson = serde_json::from_str(&text).unwrap();
        assert_eq!(SplitQm::from_json(&p, &back).unwrap(), qm);
        let mut low = j.clone();
        low.defect_bound = "2".into();
        assert!(matches!(
            SplitQm::from_json(&p, &low),
            Err(QmError::DefectTooSmall(..))
        ));
        assert_eq!(parse_q("-3/6").unwrap(), Q::new(-1, 2));
        assert!(parse_q("1/0").is_err());
    }
}
