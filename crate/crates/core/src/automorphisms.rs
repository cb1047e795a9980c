//! Generators of the automorphism group and truncated orbit enumeration.
//!
//! Generators are validated against the presentation when built. A step is a
//! generator together with a flag selecting its inverse; sequences of steps
//! act left to right (the first step is applied first).

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::classes::leq_tau;
use crate::presentation::{factorize, Order, Presentation, PresentationError};
use crate::vertex_set::VertexSet;
use crate::words::{invert, multiply, pow, NormalWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("transvection {0},{1} is not defined: {0} is not τ-dominated by {1}")]
    NotDominated(String, String),
    #[error("factor exponent {1} is not a unit modulo the order of {0}")]
    NotUnit(String, i64),
    #[error("vertex set is not a connected component of the complement of St({0})")]
    NotComponent(String),
    #[error("vertex {1} lies in St({0})")]
    InStar(String, String),
    #[error("permutation is not a bijection of the vertex set")]
    BadPermutation,
    #[error("permutation does not preserve edges")]
    NotGraphAutomorphism,
    #[error("permutation sends {0} to a vertex of different order")]
    OrderMismatch(String),
    #[error("transvection exponent is undefined for orders {0} and {1}")]
    NoExponent(Order, Order),
    #[error("malformed generator literal {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AutGen {
    /// Vertex `v` goes to `perm[v]`.
    LabelledGraph { perm: Vec<usize> },
    /// `v ↦ v^m`; `m` is stored reduced modulo the order.
    Factor { v: usize, m: i64 },
    /// `v ↦ v w^q`.
    Transvection { v: usize, w: usize },
    /// `z ↦ v z v⁻¹` for `z ∈ component`.
    PartialConj { v: usize, component: VertexSet },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenKind {
    LabelledGraph,
    Factor,
    Transvection,
    PartialConj,
}

impl AutGen {
    pub fn kind(&self) -> GenKind {
        match self {
            AutGen::LabelledGraph { .. } => GenKind::LabelledGraph,
            AutGen::Factor { .. } => GenKind::Factor,
            AutGen::Transvection { .. } => GenKind::Transvection,
            AutGen::PartialConj { .. } => GenKind::PartialConj,
        }
    }

    pub fn step(self) -> AutStep {
        AutStep {
            gen: self,
            inverse: false,
        }
    }

    pub fn inverse_step(self) -> AutStep {
        AutStep {
            gen: self,
            inverse: true,
        }
    }
}

/// A generator or its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AutStep {
    pub gen: AutGen,
    pub inverse: bool,
}

impl AutStep {
    pub fn inverted(&self) -> AutStep {
        AutStep {
            gen: self.gen.clone(),
            inverse: !self.inverse,
        }
    }
}

fn mod_pow(b: u64, mut e: u64, n: u64) -> u64 {
    let n = n as u128;
    let mut acc = 1u128 % n;
    let mut b = b as u128 % n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % n;
        }
        b = b * b % n;
        e >>= 1;
    }
    acc as u64
}

fn mod_inverse(m: i64, n: u64) -> i64 {
    let g = (m as i128).extended_gcd(&(n as i128));
    debug_assert_eq!(g.gcd, 1);
    g.x.rem_euclid(n as i128) as i64
}

/// A generating set of the unit group `(Z/p^k)^×`: a primitive root for odd
/// `p`, and `{−1, 5}` (or the part of it that is nontrivial) for `p = 2`.
pub fn unit_group_generators(prime: u64, k: u32) -> Vec<u64> {
    let n = prime.pow(k);
    if prime == 2 {
        return match k {
            0 | 1 => vec![],
            2 => vec![3],
            _ => vec![n - 1, 5],
        };
    }
    let cofactors: Vec<u64> = factorize(prime - 1)
        .into_iter()
        .map(|(q, _)| (prime - 1) / q)
        .collect();
    let mut g = (2..prime)
        .find(|&g| cofactors.iter().all(|&c| mod_pow(g, c, prime) != 1))
        .expect("a primitive root exists");
    if k >= 2 && mod_pow(g, prime - 1, prime * prime) == 1 {
        g += prime;
    }
    vec![g % n]
}

/// `q = max{1, p^{l−k}}` for `#G_v = p^k`, `#G_w = p^l`; `1` when `v` has
/// infinite order.
pub fn transvection_exponent(p: &Presentation, v: usize, w: usize) -> Result<u64, AutError> {
    let (ov, ow) = (p.order(v), p.order(w));
    if ov.is_infinite() {
        return Ok(1);
    }
    match (ov.prime_power(), ow.prime_power()) {
        (Some((pv, k)), Some((pw, l))) if pv == pw => {
            Ok(if l > k { pv.pow(l - k) } else { 1 })
        }
        _ => Err(AutError::NoExponent(ov, ow)),
    }
}

/// Connected components of `Γ − St(v)`, ordered by least vertex.
pub fn components_outside_star(p: &Presentation, v: usize) -> Vec<VertexSet> {
    let rest = p.all().difference(p.star(v));
    let mut seen = VertexSet::EMPTY;
    let mut out = Vec::new();
    for u in rest.iter() {
        if seen.contains(u) {
            continue;
        }
        let mut comp = VertexSet::singleton(u);
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            for y in p.link(x).intersection(rest).difference(comp).iter() {
                comp.insert(y);
                stack.push(y);
            }
        }
        seen = seen.union(comp);
        out.push(comp);
    }
    out
}

fn check_vertex(p: &Presentation, v: usize) -> Result<(), AutError> {
    if v < p.len() {
        Ok(())
    } else {
        Err(AutError::Parse(format!("vertex index {v}")))
    }
}

pub fn make_factor(p: &Presentation, v: usize, m: i64) -> Result<AutGen, AutError> {
    p.require_primary()?;
    check_vertex(p, v)?;
    let m = match p.order(v) {
        Order::Infinite if m == 1 || m == -1 => m,
        Order::Finite(n) if (m as i128).rem_euclid(n as i128).gcd(&(n as i128)) == 1 => {
            (m as i128).rem_euclid(n as i128) as i64
        }
        _ => return Err(AutError::NotUnit(p.id(v).to_string(), m)),
    };
    Ok(AutGen::Factor { v, m })
}

pub fn make_transvection(p: &Presentation, v: usize, w: usize) -> Result<AutGen, AutError> {
    p.require_primary()?;
    check_vertex(p, v)?;
    check_vertex(p, w)?;
    if v == w || !leq_tau(p, v, w) {
        return Err(AutError::NotDominated(
            p.id(v).to_string(),
            p.id(w).to_string(),
        ));
    }
    Ok(AutGen::Transvection { v, w })
}

pub fn make_partial_conj(
    p: &Presentation,
    v: usize,
    component: VertexSet,
) -> Result<AutGen, AutError> {
    p.require_primary()?;
    check_vertex(p, v)?;
    if !components_outside_star(p, v).contains(&component) {
        return Err(AutError::NotComponent(p.id(v).to_string()));
    }
    Ok(AutGen::PartialConj { v, component })
}

/// Partial conjugation by `v` of the component of `Γ − St(v)` containing `u`.
pub fn make_partial_conj_at(p: &Presentation, v: usize, u: usize) -> Result<AutGen, AutError> {
    p.require_primary()?;
    check_vertex(p, v)?;
    check_vertex(p, u)?;
    components_outside_star(p, v)
        .into_iter()
        .find(|c| c.contains(u))
        .map(|component| AutGen::PartialConj { v, component })
        .ok_or_else(|| AutError::InStar(p.id(v).to_string(), p.id(u).to_string()))
}

pub fn make_labelled_graph(p: &Presentation, perm: Vec<usize>) -> Result<AutGen, AutError> {
    p.require_primary()?;
    let n = p.len();
    if perm.len() != n || perm.iter().copied().collect::<VertexSet>().len() != n {
        return Err(AutError::BadPermutation);
    }
    if perm.iter().any(|&x| x >= n) {
        return Err(AutError::BadPermutation);
    }
    for v in 0..n {
        if p.order(v) != p.order(perm[v]) {
            return Err(AutError::OrderMismatch(p.id(v).to_string()));
        }
        for w in 0..n {
            if p.adjacent(v, w) != p.adjacent(perm[v], perm[w]) {
                return Err(AutError::NotGraphAutomorphism);
            }
        }
    }
    Ok(AutGen::LabelledGraph { perm })
}

/// Re-validates an existing generator against `p`.
pub fn validate_generator(p: &Presentation, g: &AutGen) -> Result<(), AutError> {
    let rebuilt = match g {
        AutGen::LabelledGraph { perm } => make_labelled_graph(p, perm.clone())?,
        AutGen::Factor { v, m } => make_factor(p, *v, *m)?,
        AutGen::Transvection { v, w } => make_transvection(p, *v, *w)?,
        AutGen::PartialConj { v, component } => make_partial_conj(p, *v, *component)?,
    };
    if rebuilt == *g {
        Ok(())
    } else {
        Err(AutError::Parse(format!("{g:?} is not in reduced form")))
    }
}

/// Images of the generators under one step; `None` marks a fixed vertex.
#[derive(Debug, Clone)]
pub struct VertexImages {
    images: Vec<Option<NormalWord>>,
}

impl VertexImages {
    pub fn of(p: &Presentation, step: &AutStep) -> Self {
        let mut images = vec![None; p.len()];
        match &step.gen {
            AutGen::LabelledGraph { perm } => {
                for (v, &t) in perm.iter().enumerate() {
                    if step.inverse {
                        images[t] = Some(NormalWord::generator(p, v));
                    } else {
                        images[v] = Some(NormalWord::generator(p, t));
                    }
                }
            }
            AutGen::Factor { v, m } => {
                let m = match (p.order(*v), step.inverse) {
                    (Order::Finite(n), true) => mod_inverse(*m, n),
                    _ => *m,
                };
                images[*v] = Some(NormalWord::power_of(p, *v, m));
            }
            AutGen::Transvection { v, w } => {
                let q = transvection_exponent(p, *v, *w).expect("validated generator") as i64;
                let q = if step.inverse { -q } else { q };
                images[*v] = Some(multiply(
                    p,
                    &NormalWord::generator(p, *v),
                    &NormalWord::power_of(p, *w, q),
                ));
            }
            AutGen::PartialConj { v, component } => {
                let e = if step.inverse { -1 } else { 1 };
                let c = NormalWord::power_of(p, *v, e);
                let ci = invert(p, &c);
                for z in component.iter() {
                    let zw = NormalWord::generator(p, z);
                    images[z] = Some(multiply(p, &multiply(p, &c, &zw), &ci));
                }
            }
        }
        VertexImages { images }
    }

    pub fn apply(&self, p: &Presentation, x: &NormalWord) -> NormalWord {
        let mut out = NormalWord::identity();
        for s in x.syllables() {
            let img = match &self.images[s.vertex] {
                None => NormalWord::power_of(p, s.vertex, s.exp),
                Some(w) => pow(p, w, s.exp),
            };
            out = multiply(p, &out, &img);
        }
        out
    }
}

/// Applies the steps in order, validating each generator first.
pub fn apply(p: &Presentation, seq: &[AutStep], x: &NormalWord) -> Result<NormalWord, AutError> {
    for s in seq {
        validate_generator(p, &s.gen)?;
    }
    Ok(apply_unchecked(p, seq, x))
}

pub(crate) fn apply_unchecked(p: &Presentation, seq: &[AutStep], x: &NormalWord) -> NormalWord {
    seq.iter()
        .fold(x.clone(), |acc, s| VertexImages::of(p, s).apply(p, &acc))
}

/// The inverse sequence: reversed, each step inverted.
pub fn inverse_sequence(seq: &[AutStep]) -> Vec<AutStep> {
    seq.iter().rev().map(AutStep::inverted).collect()
}

/// All factor automorphisms (over unit-group generators), dominated
/// transvections and partial conjugations of `p`.
pub fn aut0_generators(p: &Presentation) -> Result<Vec<AutGen>, AutError> {
    p.require_primary()?;
    let n = p.len();
    let mut out = Vec::new();
    for v in 0..n {
        match p.order(v) {
            Order::Infinite => out.push(AutGen::Factor { v, m: -1 }),
            o => {
                let (prime, k) = o.prime_power().expect("primary");
                for m in unit_group_generators(prime, k) {
                    out.push(AutGen::Factor { v, m: m as i64 });
                }
            }
        }
    }
    for v in 0..n {
        for w in 0..n {
            if v != w && leq_tau(p, v, w) {
                out.push(AutGen::Transvection { v, w });
            }
        }
    }
    for v in 0..n {
        for component in components_outside_star(p, v) {
            out.push(AutGen::PartialConj { v, component });
        }
    }
    Ok(out)
}

/// Truncated orbit of a word set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSet {
    /// Sorted shortlex.
    pub elements: Vec<NormalWord>,
    pub frontier_exhausted: bool,
    pub depth_used: usize,
    pub length_cap: usize,
    /// Images dropped for exceeding the length cap (with repetition).
    pub discarded: usize,
}

impl OrbitSet {
    /// An orbit given explicitly, e.g. the images of a seed under known
    /// automorphisms.
    pub fn from_elements(elements: impl IntoIterator<Item = NormalWord>) -> Self {
        let set: BTreeSet<NormalWord> = elements.into_iter().collect();
        let length_cap = set.iter().map(NormalWord::len).max().unwrap_or(0);
        OrbitSet {
            elements: set.into_iter().collect(),
            frontier_exhausted: false,
            depth_used: 0,
            length_cap,
            discarded: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &NormalWord) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn union(&self, other: &OrbitSet) -> OrbitSet {
        let set: BTreeSet<NormalWord> = self
            .elements
            .iter()
            .chain(&other.elements)
            .cloned()
            .collect();
        OrbitSet {
            elements: set.into_iter().collect(),
            frontier_exhausted: self.frontier_exhausted && other.frontier_exhausted,
            depth_used: self.depth_used.max(other.depth_used),
            length_cap: self.length_cap.max(other.length_cap),
            discarded: self.discarded + other.discarded,
        }
    }
}

/// Breadth-first closure of `seeds` under `gens` and their inverses, for at
/// most `depth` rounds, discarding images longer than `length_cap`
/// syllables. Seeds are always kept.
pub fn orbit(
    p: &Presentation,
    seeds: &[NormalWord],
    gens: &[AutGen],
    depth: usize,
    length_cap: usize,
) -> OrbitSet {
    let maps: Vec<VertexImages> = gens
        .iter()
        .flat_map(|g| [g.clone().step(), g.clone().inverse_step()])
        .map(|s| VertexImages::of(p, &s))
        .collect();
    let mut seen: BTreeSet<NormalWord> = seeds.iter().cloned().collect();
    let mut frontier: Vec<NormalWord> = seen.iter().cloned().collect();
    let mut discarded = 0;
    let mut depth_used = 0;
    let mut exhausted = frontier.is_empty();
    while depth_used < depth && !exhausted {
        depth_used += 1;
        let mut next = BTreeSet::new();
        for x in &frontier {
            for m in &maps {
                let y = m.apply(p, x);
                if y.len() > length_cap {
                    discarded += 1;
                } else if !seen.contains(&y) {
                    next.insert(y);
                }
            }
        }
        seen.extend(next.iter().cloned());
        frontier = next.into_iter().collect();
        exhausted = frontier.is_empty();
    }
    OrbitSet {
        elements: seen.into_iter().collect(),
        frontier_exhausted: exhausted,
        depth_used,
        length_cap,
        discarded,
    }
}

/// Formats a generator as a literal: `factor(v,m)`, `tv(v,w)`, `pc(v,u)`
/// with `u` the least vertex of the component, `graph(a:b,b:a)` listing the
/// moved vertices.
pub struct GenDisplay<'a>(pub &'a Presentation, pub &'a AutStep);

impl fmt::Display for GenDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.0;
        match &self.1.gen {
            AutGen::LabelledGraph { perm } => {
                let moved: Vec<String> = perm
                    .iter()
                    .enumerate()
                    .filter(|(v, t)| v != *t)
                    .map(|(v, &t)| format!("{}:{}", p.id(v), p.id(t)))
                    .collect();
                write!(f, "graph({})", moved.join(","))?;
            }
            AutGen::Factor { v, m } => write!(f, "factor({},{})", p.id(*v), m)?,
            AutGen::Transvection { v, w } => write!(f, "tv({},{})", p.id(*v), p.id(*w))?,
            AutGen::PartialConj { v, component } => write!(
                f,
                "pc({},{})",
                p.id(*v),
                p.id(component.first().expect("components are nonempty"))
            )?,
        }
        if self.1.inverse {
            f.write_str("^-1")?;
        }
        Ok(())
    }
}

pub fn format_step(p: &Presentation, s: &AutStep) -> String {
    GenDisplay(p, s).to_string()
}

/// Parses one generator literal, optionally followed by `^-1`.
pub fn parse_step(p: &Presentation, text: &str) -> Result<AutStep, AutError> {
    let bad = || AutError::Parse(text.to_string());
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (body, inverse) = match compact.strip_suffix("^-1") {
        Some(b) => (b, true),
        None => (compact.as_str(), false),
    };
    let (name, rest) = body.split_once('(').ok_or_else(bad)?;
    let args = rest.strip_suffix(')').ok_or_else(bad)?;
    let args: Vec<&str> = if args.is_empty() {
        vec![]
    } else {
        args.split(',').collect()
    };
    let vertex = |id: &str| p.require_index(id).map_err(AutError::from);
    let gen = match (name, args.as_slice()) {
        ("factor", [v, m]) => make_factor(p, vertex(v)?, m.parse().map_err(|_| bad())?)?,
        ("tv", [v, w]) => make_transvection(p, vertex(v)?, vertex(w)?)?,
        ("pc", [v, u]) => make_partial_conj_at(p, vertex(v)?, vertex(u)?)?,
        ("graph", pairs) => {
            let mut perm: Vec<usize> = (0..p.len()).collect();
            for pair in pairs {
                let (a, b) = pair.split_once(':').ok_or_else(bad)?;
                perm[vertex(a)?] = vertex(b)?;
            }
            make_labelled_graph(p, perm)?
        }
        _ => return Err(bad()),
    };
    Ok(AutStep { gen, inverse })
}

/// Parses a sequence of generator literals separated by whitespace or `;`.
pub fn parse_sequence(p: &Presentation, text: &str) -> Result<Vec<AutStep>, AutError> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0usize;
    let flush = |cur: &mut String, out: &mut Vec<AutStep>| -> Result<(), AutError> {
        if !cur.trim().is_empty() {
            out.push(parse_step(p, cur)?);
        }
        cur.clear();
        Ok(())
    };
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1).ok_or_else(|| AutError::Parse(text.into()))?,
            _ => {}
        }
        let separator = depth == 0 && (c.is_whitespace() || c == ';');
        if separator {
            // allow "tv(a,b) ^-1"
            let rest: String = chars[i..].iter().collect();
            if !rest.trim_start_matches(|ch: char| ch.is_whitespace()).starts_with('^') {
                flush(&mut cur, &mut out)?;
            }
        } else {
            cur.push(c);
        }
        i += 1;
    }
    if depth != 0 {
        return Err(AutError::Parse(text.to_string()));
    }
    flush(&mut cur, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::words::parse_word;

    fn w(p: &Presentation, s: &str) -> NormalWord {
        parse_word(p, s).unwrap()
    }

    #[test]
    fn make_generator_examples() {
        let z2 = corpus::z2();
        assert!(make_transvection(&z2, 0, 1).is_ok());
        let dinf = corpus::dinf();
        assert!(matches!(
            make_transvection(&dinf, 0, 1),
            Err(AutError::NotDominated(..))
        ));
        let psl = corpus::psl();
        assert_eq!(make_factor(&psl, 1, 2), Ok(AutGen::Factor { v: 1, m: 2 }));
        assert!(make_factor(&psl, 1, 3).is_err());
        assert!(make_factor(&z2, 0, 2).is_err());
        assert_eq!(make_factor(&z2, 0, -1), Ok(AutGen::Factor { v: 0, m: -1 }));
        assert!(make_labelled_graph(&psl, vec![1, 0]).is_err());
        assert!(make_labelled_graph(&dinf, vec![1, 0]).is_ok());
        assert!(make_labelled_graph(&dinf, vec![0, 0]).is_err());
        let path = corpus::path_raag();
        assert!(matches!(
            make_labelled_graph(&path, vec![1, 0, 2]),
            Err(AutError::NotGraphAutomorphism)
        ));
        assert!(make_partial_conj(&dinf, 0, VertexSet::singleton(1)).is_ok());
        assert!(make_partial_conj(&dinf, 0, VertexSet::singleton(0)).is_err());
        assert!(matches!(
            make_partial_conj_at(&z2, 0, 1),
            Err(AutError::InStar(..))
        ));
    }

    #[test]
    fn transvection_exponent_examples() {
        let two = Presentation::cyclic(
            &[("a", Order::Finite(2)), ("b", Order::Finite(8))],
            &[("a", "b")],
        )
        .unwrap();
        assert_eq!(transvection_exponent(&two, 0, 1), Ok(4));
        assert_eq!(transvection_exponent(&two, 1, 0), Ok(1));
        let three = Presentation::cyclic(
            &[("a", Order::Finite(9)), ("b", Order::Finite(3))],
            &[("a", "b")],
        )
        .unwrap();
        assert_eq!(transvection_exponent(&three, 0, 1), Ok(1));
        assert_eq!(transvection_exponent(&corpus::dinf(), 0, 1), Ok(1));
        assert_eq!(transvection_exponent(&corpus::z2(), 0, 1), Ok(1));
        assert!(transvection_exponent(&corpus::psl(), 0, 1).is_err());
    }

    #[test]
    fn apply_examples() {
        let z2 = corpus::z2();
        let tv = make_transvection(&z2, 0, 1).unwrap().step();
        assert_eq!(apply(&z2, &[tv], &w(&z2, "a^2")).unwrap(), w(&z2, "a^2 b^2"));
        let dinf = corpus::dinf();
        let pc = make_partial_conj_at(&dinf, 0, 1).unwrap().step();
        assert_eq!(apply(&dinf, &[pc], &w(&dinf, "b")).unwrap(), w(&dinf, "a b a"));
        let psl = corpus::psl();
        let f = make_factor(&psl, 1, 2).unwrap().step();
        assert_eq!(apply(&psl, &[f], &w(&psl, "a b")).unwrap(), w(&psl, "a b^2"));
        assert_eq!(apply(&psl, &[], &w(&psl, "a b")).unwrap(), w(&psl, "a b"));
    }

    #[test]
    fn finite_transvection_has_right_order() {
        let p = Presentation::cyclic(
            &[("a", Order::Finite(2)), ("b", Order::Finite(8))],
            &[("a", "b")],
        )
        .unwrap();
        let tv = make_transvection(&p, 0, 1).unwrap().step();
        assert_eq!(apply(&p, &[tv.clone()], &w(&p, "a")).unwrap(), w(&p, "a b^4"));
        let x = w(&p, "a b^3");
        let back = apply(&p, &[tv.clone(), tv.inverted()], &x).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn inverses_and_labelled_graph() {
        let dinf = corpus::dinf();
        let g = make_labelled_graph(&dinf, vec![1, 0]).unwrap().step();
        assert_eq!(apply(&dinf, &[g.clone()], &w(&dinf, "a b a")).unwrap(), w(&dinf, "b a b"));
        let c5 = Presentation::cyclic(&[("a", Order::Finite(5))], &[]).unwrap();
        let f = make_factor(&c5, 0, 2).unwrap().step();
        assert_eq!(apply(&c5, &[f.inverted()], &w(&c5, "a^2")).unwrap(), w(&c5, "a"));
        let seq = vec![f.clone(), f.clone()];
        let x = w(&c5, "a^3");
        let y = apply(&c5, &seq, &x).unwrap();
        assert_eq!(apply(&c5, &inverse_sequence(&seq), &y).unwrap(), x);
    }

    #[test]
    fn unit_group_generators_generate() {
        for (prime, k) in [(2u64, 1u32), (2, 2), (2, 3), (2, 5), (3, 1), (3, 3), (5, 2), (7, 1), (29, 2)] {
            let n = prime.pow(k);
            let gens = unit_group_generators(prime, k);
            let mut reached: BTreeSet<u64> = [1].into();
            let mut stack = vec![1u64];
            while let Some(x) = stack.pop() {
                for &g in &gens {
                    let y = x * g % n;
                    if reached.insert(y) {
                        stack.push(y);
                    }
                }
            }
            let units = (1..n).filter(|x| x.gcd(&n) == 1).count().max(1);
            assert_eq!(reached.len(), units, "{prime}^{k}");
        }
    }

    #[test]
    fn aut0_generator_examples() {
        let dinf = corpus::dinf();
        assert_eq!(
            aut0_generators(&dinf).unwrap(),
            vec![
                AutGen::PartialConj { v: 0, component: VertexSet::singleton(1) },
                AutGen::PartialConj { v: 1, component: VertexSet::singleton(0) },
            ]
        );
        assert_eq!(
            aut0_generators(&corpus::z()).unwrap(),
            vec![AutGen::Factor { v: 0, m: -1 }]
        );
        assert_eq!(
            aut0_generators(&corpus::z2()).unwrap(),
            vec![
                AutGen::Factor { v: 0, m: -1 },
                AutGen::Factor { v: 1, m: -1 },
                AutGen::Transvection { v: 0, w: 1 },
                AutGen::Transvection { v: 1, w: 0 },
            ]
        );
    }

    #[test]
    fn orbit_examples() {
        let z = corpus::z();
        let gens = aut0_generators(&z).unwrap();
        let o = orbit(&z, &[w(&z, "a")], &gens, 2, 4);
        assert_eq!(o.elements, vec![w(&z, "a^-1"), w(&z, "a")]);
        assert!(o.frontier_exhausted);
        let o1 = orbit(&z, &[w(&z, "a")], &gens, 1, 4);
        assert!(!o1.frontier_exhausted);

        let dinf = corpus::dinf();
        let gens = aut0_generators(&dinf).unwrap();
        let o = orbit(&dinf, &[w(&dinf, "a"), w(&dinf, "b")], &gens, 2, 5);
        let lits: Vec<String> = o.elements.iter().map(|x| crate::words::format_word(&dinf, x)).collect();
        assert_eq!(lits, ["a", "b", "a b a", "b a b", "a b a b a", "b a b a b"]);
    }

    #[test]
    fn parse_and_format_literals() {
        let dinf = corpus::dinf();
        let seq = parse_sequence(&dinf, "pc(a,b) pc(b,a)^-1; graph(a:b, b:a)").unwrap();
        assert_eq!(seq.len(), 3);
        let text: Vec<String> = seq.iter().map(|s| format_step(&dinf, s)).collect();
        assert_eq!(text, ["pc(a,b)", "pc(b,a)^-1", "graph(a:b,b:a)"]);
        assert_eq!(parse_sequence(&dinf, "pc(a,b) ^-1").unwrap().len(), 1);
        assert!(parse_step(&dinf, "tv(a,b)").is_err());
        assert!(parse_step(&dinf, "xx(a)").is_err());
        let z2 = corpus::z2();
        for lit in ["factor(a,-1)", "tv(b,a)^-1"] {
            assert_eq!(format_step(&z2, &parse_step(&z2, lit).unwrap()), lit);
        }
    }
}
