//! Element arithmetic in a graph product of cyclic groups.
//!
//! Elements are stored as [`NormalWord`]s: reduced syllable sequences in which
//! no two syllables of the same vertex can be shuffled next to each other,
//! ordered as the lexicographically least linear extension of their
//! commutation class (vertex declaration index, then exponent). Two words
//! represent the same element iff they are identical.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::presentation::{Order, Presentation, PresentationError};
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("malformed word literal {0:?}")]
    Parse(String),
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
    #[error("word is not in canonical form for this presentation")]
    NotCanonical,
    #[error("vertex set is not contained in the vertex set of the presentation")]
    NotSubset,
    #[error("edge {0}-{1} joins the two sides of the split")]
    NotAFreeSplit(String, String),
}

/// A power `v^exp` of the fixed generator of a vertex group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub vertex: usize,
    pub exp: i64,
}

impl Syllable {
    pub fn new(vertex: usize, exp: i64) -> Self {
        Syllable { vertex, exp }
    }
}

/// Canonical representative of a group element.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NormalWord {
    syllables: Vec<Syllable>,
}

/// Shortlex on syllable sequences.
impl Ord for NormalWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.syllables
            .len()
            .cmp(&other.syllables.len())
            .then_with(|| self.syllables.cmp(&other.syllables))
    }
}

impl PartialOrd for NormalWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl NormalWord {
    pub fn identity() -> Self {
        NormalWord::default()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// Number of syllables.
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Vertices occurring in the word.
    pub fn support(&self) -> VertexSet {
        self.syllables.iter().map(|s| s.vertex).collect()
    }

    /// Sum of exponents of syllables at `v`.
    pub fn exponent_sum(&self, v: usize) -> i64 {
        self.syllables
            .iter()
            .filter(|s| s.vertex == v)
            .map(|s| s.exp)
            .sum()
    }

    /// Generator `v` itself.
    pub fn generator(p: &Presentation, v: usize) -> Self {
        Self::power_of(p, v, 1)
    }

    /// `v^e` in canonical form.
    pub fn power_of(p: &Presentation, v: usize, e: i64) -> Self {
        let e = reduce_exponent(p.order(v), e as i128);
        if e == 0 {
            NormalWord::identity()
        } else {
            NormalWord {
                syllables: vec![Syllable::new(v, e)],
            }
        }
    }

    /// Relabels vertices through `map` (sub-presentation index to parent index)
    /// and renormalizes in `parent`.
    pub fn lift(&self, parent: &Presentation, map: &[usize]) -> NormalWord {
        let raw: Vec<Syllable> = self
            .syllables
            .iter()
            .map(|s| Syllable::new(map[s.vertex], s.exp))
            .collect();
        normalize(parent, &raw)
    }

    /// Restricts to a sub-presentation given the parent-to-sub index map;
    /// syllables at vertices outside the sub-presentation are dropped.
    pub fn restrict(&self, sub: &Presentation, back: &[Option<usize>]) -> NormalWord {
        let raw: Vec<Syllable> = self
            .syllables
            .iter()
            .filter_map(|s| back[s.vertex].map(|i| Syllable::new(i, s.exp)))
            .collect();
        normalize(sub, &raw)
    }
}

/// Reduces an exponent into the canonical range: `{0,…,n−1}` for order `n`,
/// unchanged for infinite order.
#[inline]
pub fn reduce_exponent(order: Order, e: i128) -> i64 {
    match order {
        Order::Finite(n) => e.rem_euclid(n as i128) as i64,
        Order::Infinite => i64::try_from(e).expect("exponent overflow"),
    }
}

/// Appends `v^e` to a reduced word, merging with an earlier syllable of the
/// same vertex when everything in between commutes with `v`.
///
/// Removing a syllable never enables a further merge: everything to its right
/// commutes with it, so two syllables it separated cannot both commute with it.
#[inline]
fn push(p: &Presentation, word: &mut Vec<Syllable>, v: usize, e: i64) {
    let order = p.order(v);
    let e = reduce_exponent(order, e as i128);
    if e == 0 {
        return;
    }
    let link = p.link(v);
    let mut j = word.len();
    while j > 0 {
        let s = word[j - 1];
        if s.vertex == v {
            let merged = reduce_exponent(order, s.exp as i128 + e as i128);
            if merged == 0 {
                word.remove(j - 1);
            } else {
                word[j - 1].exp = merged;
            }
            return;
        }
        if !link.contains(s.vertex) {
            break;
        }
        j -= 1;
    }
    word.push(Syllable::new(v, e));
}

/// Lexicographically least linear extension of a reduced word: repeatedly
/// take the least syllable that commutes with everything before it.
fn canonicalize(p: &Presentation, word: Vec<Syllable>) -> Vec<Syllable> {
    let n = word.len();
    if n <= 1 {
        return word;
    }
    let mut used = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut seen = VertexSet::EMPTY;
        let mut best: Option<usize> = None;
        for i in 0..n {
            if used[i] {
                continue;
            }
            let s = word[i];
            if seen.is_subset(p.link(s.vertex)) && best.is_none_or(|b| s < word[b]) {
                best = Some(i);
            }
            seen.insert(s.vertex);
        }
        let b = best.expect("some syllable is always available");
        used[b] = true;
        out.push(word[b]);
    }
    out
}

fn normalize(p: &Presentation, raw: &[Syllable]) -> NormalWord {
    let mut w = Vec::with_capacity(raw.len());
    for s in raw {
        push(p, &mut w, s.vertex, s.exp);
    }
    NormalWord {
        syllables: canonicalize(p, w),
    }
}

fn check_vertices(p: &Presentation, raw: &[Syllable]) -> Result<(), WordError> {
    p.require_cyclic()?;
    match raw.iter().find(|s| s.vertex >= p.len()) {
        Some(s) => Err(WordError::VertexOutOfRange(s.vertex)),
        None => Ok(()),
    }
}

/// Canonical form of an arbitrary syllable sequence.
pub fn normal_form(p: &Presentation, raw: &[Syllable]) -> Result<NormalWord, WordError> {
    check_vertices(p, raw)?;
    Ok(normalize(p, raw))
}

/// Checks that `x` is a canonical word of `p`.
pub fn validate(p: &Presentation, x: &NormalWord) -> Result<(), WordError> {
    check_vertices(p, &x.syllables)?;
    if normalize(p, &x.syllables) == *x {
        Ok(())
    } else {
        Err(WordError::NotCanonical)
    }
}

/// Product `xy`. Both arguments must be canonical for `p`.
pub fn multiply(p: &Presentation, x: &NormalWord, y: &NormalWord) -> NormalWord {
    if y.is_identity() {
        return x.clone();
    }
    if x.is_identity() {
        return y.clone();
    }
    let mut w = x.syllables.clone();
    w.reserve(y.len());
    for s in &y.syllables {
        push(p, &mut w, s.vertex, s.exp);
    }
    NormalWord {
        syllables: canonicalize(p, w),
    }
}

/// [`multiply`] with validation of both operands against `p`.
pub fn checked_multiply(
    p: &Presentation,
    x: &NormalWord,
    y: &NormalWord,
) -> Result<NormalWord, WordError> {
    validate(p, x)?;
    validate(p, y)?;
    Ok(multiply(p, x, y))
}

/// Product of a sequence of words.
pub fn product<'a>(p: &Presentation, words: impl IntoIterator<Item = &'a NormalWord>) -> NormalWord {
    let mut w = Vec::new();
    for x in words {
        for s in &x.syllables {
            push(p, &mut w, s.vertex, s.exp);
        }
    }
    NormalWord {
        syllables: canonicalize(p, w),
    }
}

pub fn invert(p: &Presentation, x: &NormalWord) -> NormalWord {
    let raw: Vec<Syllable> = x
        .syllables
        .iter()
        .rev()
        .map(|s| Syllable::new(s.vertex, reduce_exponent(p.order(s.vertex), -(s.exp as i128))))
        .collect();
    // the reversed word is reduced; only the order needs fixing
    NormalWord {
        syllables: canonicalize(p, raw),
    }
}

/// `x^k` by repeated squaring.
pub fn pow(p: &Presentation, x: &NormalWord, k: i64) -> NormalWord {
    let base = if k < 0 { invert(p, x) } else { x.clone() };
    let mut k = k.unsigned_abs();
    let mut acc = NormalWord::identity();
    let mut sq = base;
    while k > 0 {
        if k & 1 == 1 {
            acc = multiply(p, &acc, &sq);
        }
        k >>= 1;
        if k > 0 {
            sq = multiply(p, &sq, &sq);
        }
    }
    acc
}

/// `y x y⁻¹`.
pub fn conjugate(p: &Presentation, y: &NormalWord, x: &NormalWord) -> NormalWord {
    product(p, [y, x, &invert(p, y)])
}

/// `x y x⁻¹ y⁻¹`.
pub fn commutator(p: &Presentation, x: &NormalWord, y: &NormalWord) -> NormalWord {
    product(p, [x, y, &invert(p, x), &invert(p, y)])
}

/// Image under the standard retraction killing every generator outside `set`.
pub fn retract(p: &Presentation, set: VertexSet, x: &NormalWord) -> Result<NormalWord, WordError> {
    if !set.is_subset(p.all()) {
        return Err(WordError::NotSubset);
    }
    Ok(retract_unchecked(p, set, x))
}

pub(crate) fn retract_unchecked(p: &Presentation, set: VertexSet, x: &NormalWord) -> NormalWord {
    if x.support().is_subset(set) {
        return x.clone();
    }
    let raw: Vec<Syllable> = x
        .syllables
        .iter()
        .filter(|s| set.contains(s.vertex))
        .copied()
        .collect();
    normalize(p, &raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Normal form of an element in a free product `W_M * W_{V−M}`: maximal
/// nontrivial blocks with strictly alternating sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingForm {
    pub factors: Vec<(Side, NormalWord)>,
}

/// Fails unless no edge joins `left` and its complement.
pub fn check_free_split(p: &Presentation, left: VertexSet) -> Result<(), WordError> {
    if !left.is_subset(p.all()) {
        return Err(WordError::NotSubset);
    }
    for v in left.iter() {
        if let Some(w) = p.link(v).difference(left).first() {
            return Err(WordError::NotAFreeSplit(
                p.id(v).to_string(),
                p.id(w).to_string(),
            ));
        }
    }
    Ok(())
}

pub fn split_free_product(
    p: &Presentation,
    left: VertexSet,
    x: &NormalWord,
) -> Result<AlternatingForm, WordError> {
    check_free_split(p, left)?;
    Ok(split_unchecked(left, x))
}

/// Blocks of a canonical word. No syllable commutes across the split, so the
/// blocks are contiguous runs and each run is already canonical.
pub(crate) fn split_unchecked(left: VertexSet, x: &NormalWord) -> AlternatingForm {
    let mut factors: Vec<(Side, NormalWord)> = Vec::new();
    for s in &x.syllables {
        let side = if left.contains(s.vertex) {
            Side::Left
        } else {
            Side::Right
        };
        match factors.last_mut() {
            Some((last, block)) if *last == side => block.syllables.push(*s),
            _ => factors.push((
                side,
                NormalWord {
                    syllables: vec![*s],
                },
            )),
        }
    }
    AlternatingForm { factors }
}

/// Parses a word literal: whitespace-separated `v`, `v^3`, `v^-2`.
pub fn parse_syllables(p: &Presentation, text: &str) -> Result<Vec<Syllable>, WordError> {
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        let (id, exp) = match tok.split_once('^') {
            Some((id, e)) => (
                id,
                e.parse::<i64>()
                    .map_err(|_| WordError::Parse(tok.to_string()))?,
            ),
            None => (tok, 1),
        };
        let v = p.index_of(id).ok_or_else(|| {
            WordError::Presentation(PresentationError::UnknownVertex(id.to_string()))
        })?;
        out.push(Syllable::new(v, exp));
    }
    Ok(out)
}

/// Parses and normalizes a word literal.
pub fn parse_word(p: &Presentation, text: &str) -> Result<NormalWord, WordError> {
    let raw = parse_syllables(p, text)?;
    normal_form(p, &raw)
}

/// Formats a word with the literal grammar; the identity is the empty string.
pub fn format_word(p: &Presentation, x: &NormalWord) -> String {
    WordDisplay(p, x).to_string()
}

pub struct WordDisplay<'a>(pub &'a Presentation, pub &'a NormalWord);

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.1.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.0.id(s.vertex))?;
            if s.exp != 1 {
                write!(f, "^{}", s.exp)?;
            }
        }
        Ok(())
    }
}
