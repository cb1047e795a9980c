//! The preorders `≤`, `≤_s`, `≤_τ` on vertices, the `∼_τ` equivalence
//! classes with their types, lower cones, and the join decomposition.
//!
//! * `v ≤ w`   iff `Lk(v) ⊆ St(w)`
//! * `v ≤_s w` iff `St(v) ⊆ St(w)`
//! * `v ≤_τ w` iff the dominated transvection `τ_{v,w}` is defined: either
//!   `v` has infinite order and `v ≤ w`, or both orders are powers of the
//!   same prime and `v ≤_s w`. Every vertex is `≤_τ` itself.

use serde::Serialize;
use serde_json::json;

use crate::presentation::{Order, Presentation, PresentationError};
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PreorderKind {
    Leq,
    LeqS,
    LeqTau,
}

pub(crate) fn leq(p: &Presentation, v: usize, w: usize) -> bool {
    p.link(v).is_subset(p.star(w))
}

pub(crate) fn leq_s(p: &Presentation, v: usize, w: usize) -> bool {
    p.star(v).is_subset(p.star(w))
}

fn prime_of(o: Order) -> Option<u64> {
    o.prime_power().map(|(p, _)| p)
}

pub(crate) fn leq_tau(p: &Presentation, v: usize, w: usize) -> bool {
    if v == w {
        return true;
    }
    match (p.order(v), p.order(w)) {
        (Order::Infinite, _) => leq(p, v, w),
        (Order::Finite(_), Order::Finite(_)) => {
            prime_of(p.order(v)).is_some()
                && prime_of(p.order(v)) == prime_of(p.order(w))
                && leq_s(p, v, w)
        }
        (Order::Finite(_), Order::Infinite) => false,
    }
}

/// Evaluates one of the three relations on the named vertices.
pub fn preorder(
    p: &Presentation,
    kind: PreorderKind,
    v: &str,
    w: &str,
) -> Result<bool, PresentationError> {
    let v = p.require_index(v)?;
    let w = p.require_index(w)?;
    Ok(match kind {
        PreorderKind::Leq => leq(p, v, w),
        PreorderKind::LeqS => leq_s(p, v, w),
        PreorderKind::LeqTau => {
            p.require_primary()?;
            leq_tau(p, v, w)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassType {
    /// Pairwise commuting infinite-order vertices.
    FreeAbelian { rank: usize },
    /// Pairwise non-commuting infinite-order vertices.
    Free { rank: usize },
    /// Finite abelian `p`-group of order `prime^exponent`.
    FinitePrimary { prime: u64, exponent: u32 },
}

impl ClassType {
    pub fn is_torsion(self) -> bool {
        matches!(self, ClassType::FinitePrimary { .. })
    }
}

#[derive(Debug, Clone)]
pub struct TauStructure {
    pub leq: Vec<Vec<bool>>,
    pub leq_s: Vec<Vec<bool>>,
    pub leq_tau: Vec<Vec<bool>>,
    /// Classes sorted by least member.
    pub classes: Vec<VertexSet>,
    pub class_of: Vec<usize>,
    pub class_types: Vec<ClassType>,
    /// `class_leq[i][j]` iff class `i` ≤_τ class `j`.
    pub class_leq: Vec<Vec<bool>>,
}

fn matrix(n: usize, f: impl Fn(usize, usize) -> bool) -> Vec<Vec<bool>> {
    (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect()
}

pub fn tau_structure(p: &Presentation) -> Result<TauStructure, PresentationError> {
    p.require_primary()?;
    Ok(tau_structure_unchecked(p))
}

pub(crate) fn tau_structure_unchecked(p: &Presentation) -> TauStructure {
    let n = p.len();
    let leq_m = matrix(n, |v, w| leq(p, v, w));
    let leq_s_m = matrix(n, |v, w| leq_s(p, v, w));
    let tau = matrix(n, |v, w| leq_tau(p, v, w));
    let mut class_of = vec![usize::MAX; n];
    let mut classes = Vec::new();
    for v in 0..n {
        if class_of[v] != usize::MAX {
            continue;
        }
        let members: VertexSet = (v..n).filter(|&w| tau[v][w] && tau[w][v]).collect();
        for w in members.iter() {
            class_of[w] = classes.len();
        }
        classes.push(members);
    }
    let class_types = classes
        .iter()
        .map(|&c| {
            let first = c.first().expect("classes are nonempty");
            match p.order(first) {
                Order::Infinite => {
                    let rank = c.len();
                    let commuting = c.iter().nth(1).is_none_or(|w| p.adjacent(first, w));
                    if commuting {
                        ClassType::FreeAbelian { rank }
                    } else {
                        ClassType::Free { rank }
                    }
                }
                Order::Finite(_) => {
                    let (prime, _) = p.order(first).prime_power().expect("primary");
                    let exponent = c
                        .iter()
                        .map(|v| p.order(v).prime_power().expect("primary").1)
                        .sum();
                    ClassType::FinitePrimary { prime, exponent }
                }
            }
        })
        .collect();
    let k = classes.len();
    let class_leq = matrix(k, |i, j| {
        let a = classes[i].first().unwrap();
        let b = classes[j].first().unwrap();
        tau[a][b]
    });
    TauStructure {
        leq: leq_m,
        leq_s: leq_s_m,
        leq_tau: tau,
        classes,
        class_of,
        class_types,
        class_leq,
    }
}

impl TauStructure {
    /// Classes with no other class strictly above them.
    pub fn maximal_classes(&self) -> Vec<usize> {
        let k = self.classes.len();
        (0..k)
            .filter(|&i| (0..k).all(|j| j == i || !self.class_leq[i][j]))
            .collect()
    }

    pub fn minimal_classes(&self) -> Vec<usize> {
        let k = self.classes.len();
        (0..k)
            .filter(|&i| (0..k).all(|j| j == i || !self.class_leq[j][i]))
            .collect()
    }

    /// The maximal class containing the least-indexed vertex among all
    /// maximal classes.
    pub fn chosen_maximal_class(&self) -> usize {
        // classes are sorted by least member
        self.maximal_classes()[0]
    }

    /// Cover relations `(lower, upper)` of the class order.
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        let k = self.classes.len();
        let lt = |i: usize, j: usize| i != j && self.class_leq[i][j];
        let mut out = Vec::new();
        for i in 0..k {
            for j in 0..k {
                if lt(i, j) && !(0..k).any(|m| lt(i, m) && lt(m, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Whether class `i` and class `j` commute (tested on representatives).
    pub fn classes_commute(&self, p: &Presentation, i: usize, j: usize) -> bool {
        p.adjacent(
            self.classes[i].first().unwrap(),
            self.classes[j].first().unwrap(),
        )
    }

    pub fn hasse_dot(&self, p: &Presentation) -> String {
        let mut out = String::from("digraph classes {\n  rankdir=BT;\n");
        for (i, c) in self.classes.iter().enumerate() {
            let ty = match self.class_types[i] {
                ClassType::FreeAbelian { rank } => format!("Z^{rank}"),
                ClassType::Free { rank } => format!("F_{rank}"),
                ClassType::FinitePrimary { prime, exponent } => {
                    format!("finite {prime}^{exponent}")
                }
            };
            out.push_str(&format!(
                "  c{i} [label=\"{{{}}} {}\"];\n",
                p.ids_of(*c).join(","),
                ty
            ));
        }
        for (a, b) in self.hasse() {
            out.push_str(&format!("  c{a} -> c{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// `s ∉ X`, `t ∈ X` with `s ≤_τ t`, if `X` fails to be a lower cone.
pub fn lower_cone_violation(p: &Presentation, set: VertexSet) -> Option<(usize, usize)> {
    for t in set.iter() {
        for s in p.all().difference(set).iter() {
            if leq_tau(p, s, t) {
                return Some((s, t));
            }
        }
    }
    None
}

pub fn is_lower_cone(p: &Presentation, set: VertexSet) -> bool {
    lower_cone_violation(p, set).is_none()
}

/// Smallest lower cone containing `set`.
pub fn down_closure(p: &Presentation, set: VertexSet) -> VertexSet {
    let mut out = set;
    for t in set.iter() {
        for s in 0..p.len() {
            if leq_tau(p, s, t) {
                out.insert(s);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComponentShape {
    ZFactor,
    DinfFactor,
    FiniteFactor,
    Other,
}

/// Components of the complement graph with their shapes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinDecomposition {
    pub components: Vec<(VertexSet, ComponentShape)>,
    pub n: usize,
    pub m: usize,
    pub finite_part: VertexSet,
}

pub fn join_decomposition(p: &Presentation) -> Result<JoinDecomposition, PresentationError> {
    p.require_primary()?;
    Ok(join_decomposition_unchecked(p))
}

pub(crate) fn join_decomposition_unchecked(p: &Presentation) -> JoinDecomposition {
    let all = p.all();
    let mut seen = VertexSet::EMPTY;
    let mut components = Vec::new();
    for v in 0..p.len() {
        if seen.contains(v) {
            continue;
        }
        let mut comp = VertexSet::singleton(v);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for w in all.difference(p.star(u)).difference(comp).iter() {
                comp.insert(w);
                stack.push(w);
            }
        }
        seen = seen.union(comp);
        let members: Vec<usize> = comp.iter().collect();
        let shape = match members.as_slice() {
            [u] if p.order(*u).is_infinite() => ComponentShape::ZFactor,
            [_] => ComponentShape::FiniteFactor,
            [a, b] if p.order(*a) == Order::Finite(2) && p.order(*b) == Order::Finite(2) => {
                ComponentShape::DinfFactor
            }
            _ => ComponentShape::Other,
        };
        components.push((comp, shape));
    }
    let count = |s| components.iter().filter(|(_, sh)| *sh == s).count();
    let n = count(ComponentShape::ZFactor);
    let m = count(ComponentShape::DinfFactor);
    let finite_part = components
        .iter()
        .filter(|(_, sh)| *sh == ComponentShape::FiniteFactor)
        .fold(VertexSet::EMPTY, |acc, (c, _)| acc.union(*c));
    JoinDecomposition {
        components,
        n,
        m,
        finite_part,
    }
}

/// Whether `W_Γ ≅ Zⁿ × D∞ᵐ × F` with `n ≠ 1` and `F` finite, read off the
/// complement graph.
pub fn bounded_form_check(p: &Presentation) -> Result<bool, PresentationError> {
    p.require_primary()?;
    Ok(bounded_form_unchecked(p))
}

pub(crate) fn bounded_form_unchecked(p: &Presentation) -> bool {
    let jd = join_decomposition_unchecked(p);
    jd.n != 1
        && jd
            .components
            .iter()
            .all(|(_, s)| *s != ComponentShape::Other)
}

/// JSON report of the relations, classes and diagrams.
pub fn classes_report(p: &Presentation) -> Result<serde_json::Value, PresentationError> {
    let ts = tau_structure(p)?;
    let jd = join_decomposition_unchecked(p);
    let as_ints = |m: &Vec<Vec<bool>>| -> Vec<Vec<u8>> {
        m.iter().map(|r| r.iter().map(|&b| b as u8).collect()).collect()
    };
    let classes: Vec<_> = ts
        .classes
        .iter()
        .zip(&ts.class_types)
        .map(|(c, t)| json!({"vertices": p.ids_of(*c), "type": t}))
        .collect();
    let hasse: Vec<_> = ts.hasse().into_iter().map(|(a, b)| json!([a, b])).collect();
    let components: Vec<_> = jd
        .components
        .iter()
        .map(|(c, s)| json!({"vertices": p.ids_of(*c), "shape": s}))
        .collect();
    Ok(json!({
        "vertices": p.ids_of(p.all()),
        "leq": as_ints(&ts.leq),
        "leq_s": as_ints(&ts.leq_s),
        "leq_tau": as_ints(&ts.leq_tau),
        "classes": classes,
        "hasse": hasse,
        "join_decomposition": {
            "components": components,
            "n": jd.n,
            "m": jd.m,
            "finite_part": p.ids_of(jd.finite_part),
        },
        "bounded_form": bounded_form_unchecked(p),
        "dot": {
            "hasse": ts.hasse_dot(p),
            "complement": p.to_dot(true),
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn preorder_examples() {
        let dinf = corpus::dinf();
        assert!(preorder(&dinf, PreorderKind::Leq, "a", "b").unwrap());
        assert!(!preorder(&dinf, PreorderKind::LeqTau, "a", "b").unwrap());
        let psl = corpus::psl();
        assert!(!preorder(&psl, PreorderKind::LeqTau, "a", "b").unwrap());
        let f2 = corpus::f2();
        assert!(preorder(&f2, PreorderKind::LeqTau, "a", "b").unwrap());
        assert!(preorder(&f2, PreorderKind::LeqTau, "a", "a").unwrap());
        assert!(preorder(&f2, PreorderKind::Leq, "a", "q").is_err());
    }

    #[test]
    fn tau_structure_examples() {
        let z2 = corpus::z2();
        let ts = tau_structure(&z2).unwrap();
        assert_eq!(ts.classes, vec![z2.all()]);
        assert_eq!(ts.class_types, vec![ClassType::FreeAbelian { rank: 2 }]);

        let path = corpus::path_raag();
        let ts = tau_structure(&path).unwrap();
        let ac = path.set_of(&["a", "c"]).unwrap();
        let b = path.set_of(&["b"]).unwrap();
        assert_eq!(ts.classes, vec![ac, b]);
        assert_eq!(
            ts.class_types,
            vec![ClassType::Free { rank: 2 }, ClassType::FreeAbelian { rank: 1 }]
        );
        assert!(ts.class_leq[0][1] && !ts.class_leq[1][0]);
        assert_eq!(ts.hasse(), vec![(0, 1)]);
        assert_eq!(ts.maximal_classes(), vec![1]);

        let psl = corpus::psl();
        let ts = tau_structure(&psl).unwrap();
        assert_eq!(
            ts.class_types,
            vec![
                ClassType::FinitePrimary { prime: 2, exponent: 1 },
                ClassType::FinitePrimary { prime: 3, exponent: 1 }
            ]
        );
        assert!(!ts.class_leq[0][1] && !ts.class_leq[1][0]);
        assert_eq!(ts.chosen_maximal_class(), 0);
    }

    #[test]
    fn lower_cone_examples() {
        let path = corpus::path_raag();
        assert!(is_lower_cone(&path, path.all()));
        assert!(is_lower_cone(&path, path.set_of(&["a", "c"]).unwrap()));
        let b = path.set_of(&["b"]).unwrap();
        assert!(!is_lower_cone(&path, b));
        assert_eq!(lower_cone_violation(&path, b), Some((0, 1)));
        assert_eq!(down_closure(&path, b), path.all());
    }

    #[test]
    fn join_decomposition_examples() {
        let jd = join_decomposition(&corpus::dinf()).unwrap();
        assert_eq!((jd.n, jd.m), (0, 1));
        assert_eq!(jd.components[0].1, ComponentShape::DinfFactor);
        let jd = join_decomposition(&corpus::z2()).unwrap();
        assert_eq!(jd.n, 2);
        let jd = join_decomposition(&corpus::c2c2c2()).unwrap();
        assert_eq!(jd.components.len(), 1);
        assert_eq!(jd.components[0].1, ComponentShape::Other);
    }

    #[test]
    fn bounded_form_examples() {
        assert!(!bounded_form_check(&corpus::z()).unwrap());
        assert!(bounded_form_check(&corpus::dinf_c2()).unwrap());
        assert!(!bounded_form_check(&corpus::psl()).unwrap());
        assert!(bounded_form_check(&corpus::z2()).unwrap());
        assert!(bounded_form_check(&corpus::dinf()).unwrap());
        assert!(!bounded_form_check(&corpus::f2()).unwrap());
    }

    #[test]
    fn non_primary_rejected() {
        let p = Presentation::cyclic(&[("a", Order::Finite(6))], &[]).unwrap();
        assert!(tau_structure(&p).is_err());
        assert!(bounded_form_check(&p).is_err());
    }
}
