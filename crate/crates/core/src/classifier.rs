//! Boundedness of the automorphism-invariant word norm: a recursive decision
//! procedure producing a certificate, and an independent certificate checker.
//!
//! The recursion removes a maximal `∼_τ` class `M` and recurses on `V − M`
//! (a lower cone). Unbounded outcomes carry a chain of nested lower cones
//! `X₁ ⊇ X₂ ⊇ …` and a witness element of `W_{X_k}` whose image is
//! undistorted there, certified by a homomorphism to `Z`, a split
//! quasimorphism, or a citation.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automorphisms::{
    aut0_generators, apply_unchecked, inverse_sequence, orbit, transvection_exponent,
    validate_generator, AutGen, AutStep,
};
use crate::classes::{
    join_decomposition_unchecked, leq_tau, lower_cone_violation, tau_structure_unchecked,
    ClassType, ComponentShape,
};
use crate::presentation::{Order, Presentation, PresentationError};
use crate::quasimorphisms::{default_odd_function, OddFunction, SplitQm, SplitQmJson, Q};
use crate::sampling::{random_word_upto, substream};
use crate::vertex_set::VertexSet;
use crate::words::{
    commutator, format_word, invert, multiply, parse_word, product, retract_unchecked,
    NormalWord,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("malformed certificate: {0}")]
    Certificate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertKind {
    BoundedDecomposition,
    Homomorphism,
    SplitQm,
    Citation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CitationTag {
    /// Free groups carry nonzero homogeneous quasimorphisms bounded on
    /// primitive elements.
    FreeGroupPrimitives,
    /// `C₂^k * C₂^l` with `k + l ≥ 3` is non-elementary hyperbolic and carries
    /// quasimorphisms bounded on the factors.
    HyperbolicC2Powers,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Payload {
    Decomposition {
        n: usize,
        m: usize,
        z_vertices: Vec<String>,
        dinf_pairs: Vec<Vec<String>>,
        finite_part: Vec<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        other_components: Vec<Vec<String>>,
        uniform_bound: usize,
    },
    Homomorphism {
        vertex: String,
    },
    SplitQm {
        quasimorphism: SplitQmJson,
    },
    Citation {
        tag: CitationTag,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub kind: CertKind,
    pub presentation_digest: String,
    /// Vertex sets `X₁ ⊇ X₂ ⊇ …`, each a lower cone in the graph spanned by
    /// the previous one (the first in the whole graph).
    pub retraction_chain: Vec<Vec<String>>,
    pub payload: Payload,
    /// Word literal of an undistorted element of `W_{X_k}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceStep {
    pub level: usize,
    pub vertices: Vec<String>,
    pub classes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chosen_class: Option<Vec<String>>,
    pub branch: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub bounded: bool,
    pub certificate: Certificate,
    pub trace: Vec<TraceStep>,
}

enum Evidence {
    Homomorphism(usize),
    SplitQm(Box<SplitQmJson>),
    Citation(CitationTag),
}

enum Outcome {
    Bounded,
    /// Chain sets and witness use indices of the top-level presentation.
    Unbounded {
        chain: Vec<VertexSet>,
        evidence: Evidence,
        witness: NormalWord,
    },
}

struct Recursion<'a> {
    p: &'a Presentation,
    trace: Vec<TraceStep>,
}

fn free_witness(p: &Presentation, class: VertexSet) -> NormalWord {
    let mut it = class.iter();
    let a = NormalWord::generator(p, it.next().expect("rank ≥ 2"));
    let c = NormalWord::generator(p, it.next().expect("rank ≥ 2"));
    commutator(p, &a, &c)
}

/// Element on which an odd function takes its positive value, in the
/// presentation where the function lives.
fn positive_element(q: &Presentation, f: &OddFunction, side: VertexSet) -> NormalWord {
    match f {
        OddFunction::Zero => NormalWord::generator(q, side.first().expect("nonempty side")),
        OddFunction::Table { vertex, values } => {
            let k = values
                .iter()
                .position(|x| *x > Q::from_integer(0))
                .unwrap_or(1);
            NormalWord::power_of(q, *vertex, k as i64)
        }
        OddFunction::Halves { vertex, c, .. } | OddFunction::Sign { vertex, c } => {
            let e = if *c >= Q::from_integer(0) { 1 } else { -1 };
            NormalWord::power_of(q, *vertex, e)
        }
        OddFunction::Dihedral { u, v, c } => {
            let (a, b) = if *c >= Q::from_integer(0) { (*u, *v) } else { (*v, *u) };
            multiply(q, &NormalWord::generator(q, a), &NormalWord::generator(q, b))
        }
    }
}

impl Recursion<'_> {
    fn log(&mut self, level: usize, cur: VertexSet, classes: usize, chosen: Option<VertexSet>, branch: &str) {
        self.trace.push(TraceStep {
            level,
            vertices: self.p.ids_of(cur),
            classes,
            chosen_class: chosen.map(|c| self.p.ids_of(c)),
            branch: branch.to_string(),
        });
    }

    fn run(&mut self, cur: VertexSet, level: usize) -> Outcome {
        let p = self.p;
        if cur.is_empty() {
            self.log(level, cur, 0, None, "trivial group: bounded");
            return Outcome::Bounded;
        }
        let (q, map) = p.induced(cur);
        let up = |s: VertexSet| -> VertexSet { s.iter().map(|i| map[i]).collect() };
        let ts = tau_structure_unchecked(&q);
        let k = ts.classes.len();
        if k == 1 {
            return match ts.class_types[0] {
                ClassType::FreeAbelian { rank: 1 } => {
                    self.log(level, cur, 1, Some(cur), "single class Z: homomorphism");
                    let z = map[0];
                    Outcome::Unbounded {
                        chain: vec![],
                        evidence: Evidence::Homomorphism(z),
                        witness: NormalWord::generator(p, z),
                    }
                }
                ClassType::Free { .. } => {
                    self.log(level, cur, 1, Some(cur), "single class free group: citation");
                    Outcome::Unbounded {
                        chain: vec![],
                        evidence: Evidence::Citation(CitationTag::FreeGroupPrimitives),
                        witness: free_witness(p, cur),
                    }
                }
                ClassType::FreeAbelian { .. } => {
                    self.log(level, cur, 1, Some(cur), "single class free abelian of rank > 1: bounded");
                    Outcome::Bounded
                }
                ClassType::FinitePrimary { .. } => {
                    self.log(level, cur, 1, Some(cur), "single class finite: bounded");
                    Outcome::Bounded
                }
            };
        }
        let mi = ts.chosen_maximal_class();
        let m = up(ts.classes[mi]);
        let m_type = ts.class_types[mi];
        let rest = cur.difference(m);
        self.log(level, cur, k, Some(m), "remove maximal class, recurse on the complement");
        if let Outcome::Unbounded {
            mut chain,
            evidence,
            witness,
        } = self.run(rest, level + 1)
        {
            chain.insert(0, rest);
            return Outcome::Unbounded {
                chain,
                evidence,
                witness,
            };
        }
        // every vertex commutes with all of M or with none of it
        let rep = m.first().expect("classes are nonempty");
        let l: VertexSet = rest.iter().filter(|&v| !p.adjacent(v, rep)).collect();
        if l.is_empty() {
            return self.direct_product(cur, k, m, m_type, rest, level);
        }
        let (ql, lmap) = p.induced(l);
        let jd = join_decomposition_unchecked(&ql);
        if jd.n == 1 {
            let (zc, _) = jd
                .components
                .iter()
                .find(|(_, s)| *s == ComponentShape::ZFactor)
                .expect("one Z factor");
            let z = lmap[zc.first().unwrap()];
            self.log(level, cur, k, Some(m), "Z factor of rank 1 among vertices not commuting with M: homomorphism");
            return Outcome::Unbounded {
                chain: vec![VertexSet::singleton(z)],
                evidence: Evidence::Homomorphism(z),
                witness: NormalWord::generator(p, z),
            };
        }
        let ml = m.union(l);
        match m_type {
            ClassType::FreeAbelian { rank: 1 } => {
                self.log(level, cur, k, Some(m), "free product with M = Z: homomorphism");
                let z = rep;
                Outcome::Unbounded {
                    chain: vec![ml, m],
                    evidence: Evidence::Homomorphism(z),
                    witness: NormalWord::generator(p, z),
                }
            }
            ClassType::Free { .. } => {
                self.log(level, cur, k, Some(m), "free product with M free: citation");
                Outcome::Unbounded {
                    chain: vec![ml, m],
                    evidence: Evidence::Citation(CitationTag::FreeGroupPrimitives),
                    witness: free_witness(p, m),
                }
            }
            _ => self.free_product(cur, k, m, l, level),
        }
    }

    /// `W = W_M × W_{rest}` with `W_{rest}` bounded.
    fn direct_product(
        &mut self,
        cur: VertexSet,
        k: usize,
        m: VertexSet,
        m_type: ClassType,
        rest: VertexSet,
        level: usize,
    ) -> Outcome {
        let p = self.p;
        match m_type {
            ClassType::Free { .. } => {
                self.log(level, cur, k, Some(m), "direct product with a free class: citation");
                Outcome::Unbounded {
                    chain: vec![m],
                    evidence: Evidence::Citation(CitationTag::FreeGroupPrimitives),
                    witness: free_witness(p, m),
                }
            }
            ClassType::FreeAbelian { rank: 1 } => {
                let (qr, _) = p.induced(rest);
                if join_decomposition_unchecked(&qr).n == 0 {
                    let z = m.first().unwrap();
                    self.log(level, cur, k, Some(m), "direct product with the only Z factor: homomorphism");
                    Outcome::Unbounded {
                        chain: vec![m],
                        evidence: Evidence::Homomorphism(z),
                        witness: NormalWord::generator(p, z),
                    }
                } else {
                    self.log(level, cur, k, Some(m), "direct product raising the Z rank above 1: bounded");
                    Outcome::Bounded
                }
            }
            _ => {
                self.log(level, cur, k, Some(m), "direct product with a bounded class: bounded");
                Outcome::Bounded
            }
        }
    }

    /// `W_{M ∪ L} = W_M * W_L` with `W_M` finite or free abelian of rank > 1.
    fn free_product(&mut self, cur: VertexSet, k: usize, m: VertexSet, l: VertexSet, level: usize) -> Outcome {
        let p = self.p;
        let ml = m.union(l);
        let (qs, smap) = p.induced(ml);
        let local = |s: VertexSet| -> VertexSet {
            (0..qs.len()).filter(|&i| s.contains(smap[i])).collect()
        };
        let (left, right) = (local(m), local(l));
        let sigma_m = default_odd_function(&qs, left).expect("valid side");
        let sigma_l = default_odd_function(&qs, right).expect("valid side");
        if sigma_m.is_zero() && sigma_l.is_zero() {
            if m.len() == 1 && l.len() == 1 {
                self.log(level, cur, k, Some(m), "M and L both C2: extra dihedral factor, bounded");
                return Outcome::Bounded;
            }
            self.log(level, cur, k, Some(m), "free product of elementary abelian 2-groups: citation");
            let g = NormalWord::generator(p, m.first().unwrap());
            let h = NormalWord::generator(p, l.first().unwrap());
            return Outcome::Unbounded {
                chain: vec![ml],
                evidence: Evidence::Citation(CitationTag::HyperbolicC2Powers),
                witness: multiply(p, &g, &h),
            };
        }
        let g = positive_element(&qs, &sigma_m, left);
        let h = positive_element(&qs, &sigma_l, right);
        let witness = multiply(&qs, &g, &h).lift(p, &smap);
        let qm = SplitQm::new(&qs, left, sigma_m, sigma_l).expect("split of a free product");
        self.log(level, cur, k, Some(m), "free product: split quasimorphism");
        Outcome::Unbounded {
            chain: vec![ml],
            evidence: Evidence::SplitQm(Box::new(qm.to_json(&qs))),
            witness,
        }
    }
}

/// Sum of pieces used by the constructive bound for bounded groups.
fn uniform_bound_of(p: &Presentation, n: usize, m: usize, finite: VertexSet) -> usize {
    let z = if n >= 2 { 2 } else { 0 };
    z + 2 * m
        + finite
            .iter()
            .map(|v| if p.order(v) == Order::Finite(2) { 1 } else { 2 })
            .sum::<usize>()
}

fn decomposition_payload(p: &Presentation) -> Payload {
    let jd = join_decomposition_unchecked(p);
    let pick = |shape| -> Vec<VertexSet> {
        jd.components
            .iter()
            .filter(|(_, s)| *s == shape)
            .map(|(c, _)| *c)
            .collect()
    };
    let z: VertexSet = pick(ComponentShape::ZFactor)
        .into_iter()
        .fold(VertexSet::EMPTY, VertexSet::union);
    Payload::Decomposition {
        n: jd.n,
        m: jd.m,
        z_vertices: p.ids_of(z),
        dinf_pairs: pick(ComponentShape::DinfFactor)
            .into_iter()
            .map(|c| p.ids_of(c))
            .collect(),
        finite_part: p.ids_of(jd.finite_part),
        other_components: pick(ComponentShape::Other)
            .into_iter()
            .map(|c| p.ids_of(c))
            .collect(),
        uniform_bound: uniform_bound_of(p, jd.n, jd.m, jd.finite_part),
    }
}

/// Runs the recursion on a primary presentation.
pub fn classify(p: &Presentation) -> Result<Verdict, ClassifyError> {
    p.require_primary()?;
    let mut rec = Recursion {
        p,
        trace: Vec::new(),
    };
    let outcome = rec.run(p.all(), 0);
    let digest = p.digest();
    let certificate = match outcome {
        Outcome::Bounded => Certificate {
            kind: CertKind::BoundedDecomposition,
            presentation_digest: digest,
            retraction_chain: vec![],
            payload: decomposition_payload(p),
            witness: None,
        },
        Outcome::Unbounded {
            chain,
            evidence,
            witness,
        } => {
            let (kind, payload) = match evidence {
                Evidence::Homomorphism(z) => (
                    CertKind::Homomorphism,
                    Payload::Homomorphism {
                        vertex: p.id(z).to_string(),
                    },
                ),
                Evidence::SplitQm(quasimorphism) => {
                    (CertKind::SplitQm, Payload::SplitQm { quasimorphism: *quasimorphism })
                }
                Evidence::Citation(tag) => (CertKind::Citation, Payload::Citation { tag }),
            };
            Certificate {
                kind,
                presentation_digest: digest,
                retraction_chain: chain.into_iter().map(|s| p.ids_of(s)).collect(),
                payload,
                witness: Some(format_word(p, &witness)),
            }
        }
    };
    Ok(Verdict {
        bounded: certificate.kind == CertKind::BoundedDecomposition,
        certificate,
        trace: rec.trace,
    })
}

impl Certificate {
    /// The vertex sets of the chain, in the whole presentation.
    pub fn chain_sets(&self, p: &Presentation) -> Result<Vec<VertexSet>, ClassifyError> {
        self.retraction_chain
            .iter()
            .map(|ids| p.set_of(ids).map_err(ClassifyError::from))
            .collect()
    }

    /// The last chain set, or all vertices for an empty chain.
    pub fn final_set(&self, p: &Presentation) -> Result<VertexSet, ClassifyError> {
        Ok(self.chain_sets(p)?.last().copied().unwrap_or_else(|| p.all()))
    }

    pub fn witness_word(&self, p: &Presentation) -> Result<Option<NormalWord>, ClassifyError> {
        self.witness
            .as_deref()
            .map(|w| parse_word(p, w).map_err(|e| ClassifyError::Certificate(e.to_string())))
            .transpose()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ClassifyError> {
        serde_json::from_str(text).map_err(|e| ClassifyError::Certificate(e.to_string()))
    }
}

/// One factor in the constructive bound: `element = apply(seq, vertex)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub vertex: usize,
    pub seq: Vec<AutStep>,
    pub element: NormalWord,
}

/// Automorphism steps sending the generator `zs[0]` to `Π zs[i]^{target[i]}`
/// inside a free abelian direct factor `Z^n`, `n ≥ 2`; `target` must be
/// primitive.
pub fn primitive_vector_sequence(zs: &[usize], target: &[i64]) -> Vec<AutStep> {
    let tv = |i: usize, j: usize| AutGen::Transvection { v: zs[i], w: zs[j] };
    let mut u = target.to_vec();
    let mut ops: Vec<AutStep> = Vec::new();
    loop {
        let nz: Vec<usize> = (0..u.len()).filter(|&i| u[i] != 0).collect();
        if nz.len() <= 1 {
            break;
        }
        let i = *nz.iter().min_by_key(|&&i| u[i].unsigned_abs()).unwrap();
        for &j in &nz {
            if j == i {
                continue;
            }
            // τ_{i,j} adds coordinate i to coordinate j
            let q = u[j] / u[i];
            let step = if q > 0 {
                tv(i, j).inverse_step()
            } else {
                tv(i, j).step()
            };
            for _ in 0..q.unsigned_abs() {
                ops.push(step.clone());
            }
            u[j] -= q * u[i];
        }
    }
    let i = (0..u.len()).find(|&i| u[i] != 0).expect("primitive vector is nonzero");
    debug_assert_eq!(u[i].abs(), 1);
    if u[i] < 0 {
        ops.push(AutGen::Factor { v: zs[i], m: -1 }.step());
    }
    if i != 0 {
        ops.push(tv(i, 0).step());
        ops.push(tv(0, i).inverse_step());
    }
    inverse_sequence(&ops)
}

fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

/// Writes `x` as a product of at most `uniform_bound` images of generators
/// under explicit automorphism sequences, for `p` of the form
/// `Zⁿ × D∞ᵐ × F`, `n ≠ 1`. Returns `None` when `p` is not of that form.
pub fn uniform_factorization(p: &Presentation, x: &NormalWord) -> Option<Vec<Piece>> {
    let jd = join_decomposition_unchecked(p);
    if jd.n == 1 || jd.components.iter().any(|(_, s)| *s == ComponentShape::Other) {
        return None;
    }
    let mut pieces = Vec::new();
    let gen_piece = |v: usize, seq: Vec<AutStep>| {
        let element = apply_unchecked(p, &seq, &NormalWord::generator(p, v));
        Piece { vertex: v, seq, element }
    };
    let zs: Vec<usize> = jd
        .components
        .iter()
        .filter(|(_, s)| *s == ComponentShape::ZFactor)
        .map(|(c, _)| c.first().unwrap())
        .collect();
    let z: Vec<i64> = zs.iter().map(|&v| x.exponent_sum(v)).collect();
    if z.iter().any(|&e| e != 0) {
        if z.iter().fold(0, |g, &e| gcd(g, e)) == 1 {
            pieces.push(gen_piece(zs[0], primitive_vector_sequence(&zs, &z)));
        } else {
            let mut u = z.clone();
            u[0] = 1;
            u[1] = z[1] - 1;
            let mut w = vec![0; z.len()];
            w[0] = z[0] - 1;
            w[1] = 1;
            pieces.push(gen_piece(zs[0], primitive_vector_sequence(&zs, &u)));
            pieces.push(gen_piece(zs[0], primitive_vector_sequence(&zs, &w)));
        }
    }
    for (c, shape) in &jd.components {
        match shape {
            ComponentShape::DinfFactor => {
                let y = retract_unchecked(p, *c, x);
                let letters: Vec<usize> = y.syllables().iter().map(|s| s.vertex).collect();
                let other = |v: usize| c.difference(VertexSet::singleton(v)).first().unwrap();
                let inner = |v: usize| AutGen::PartialConj {
                    v,
                    component: VertexSet::singleton(other(v)),
                };
                let odd = |letters: &[usize]| -> Piece {
                    let k = letters.len() / 2;
                    let seq = letters[..k].iter().rev().map(|&v| inner(v).step()).collect();
                    gen_piece(letters[k], seq)
                };
                if letters.is_empty() {
                } else if letters.len() % 2 == 1 {
                    pieces.push(odd(&letters));
                } else {
                    pieces.push(gen_piece(letters[0], vec![]));
                    pieces.push(odd(&letters[1..]));
                }
            }
            ComponentShape::FiniteFactor => {
                let v = c.first().unwrap();
                let n = p.order(v).finite().expect("finite factor") as i64;
                let e = x.exponent_sum(v).rem_euclid(n);
                let factor = |e: i64| -> Vec<AutStep> {
                    if e == 1 {
                        vec![]
                    } else {
                        vec![AutGen::Factor { v, m: e }.step()]
                    }
                };
                if e == 0 {
                } else if gcd(e, n) == 1 {
                    pieces.push(gen_piece(v, factor(e)));
                } else {
                    pieces.push(gen_piece(v, vec![]));
                    pieces.push(gen_piece(v, factor(e - 1)));
                }
            }
            _ => {}
        }
    }
    Some(pieces)
}

/// Sampling effort and seed for verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Effort {
    pub samples: usize,
    pub seed: u64,
}

impl Default for Effort {
    fn default() -> Self {
        Effort {
            samples: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_bound: Option<usize>,
    /// A dominated transvection that moves an element of `K_X` out of it,
    /// when some chain step is not a lower cone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violating_generator: Option<String>,
    pub citation_level: bool,
}

struct Checker {
    checks: Vec<Check>,
}

impl Checker {
    fn record(&mut self, name: &str, pass: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
        pass
    }
}

/// `w` with `R_X(w) = e`: a random word times the inverse of its retraction.
fn kernel_sample<R: Rng>(p: &Presentation, x: VertexSet, rng: &mut R) -> NormalWord {
    let y = random_word_upto(p, rng, 8, 3);
    multiply(p, &y, &invert(p, &retract_unchecked(p, x, &y)))
}

/// Re-checks a verdict against `p` without re-running the classifier.
pub fn verify_certificate(p: &Presentation, verdict: &Verdict, effort: Effort) -> VerificationReport {
    let mut ck = Checker { checks: Vec::new() };
    let cert = &verdict.certificate;
    let mut report = VerificationReport {
        pass: false,
        checks: vec![],
        uniform_bound: None,
        violating_generator: None,
        citation_level: false,
    };
    ck.record(
        "digest",
        cert.presentation_digest == p.digest(),
        "certificate names this presentation",
    );
    if !ck.record("primary", p.is_primary(), "vertex groups are primary or infinite cyclic") {
        return finish(ck, report);
    }
    let bounded_kind = cert.kind == CertKind::BoundedDecomposition;
    ck.record(
        "kind",
        verdict.bounded == bounded_kind && cert.witness.is_some() != bounded_kind,
        "bounded verdicts carry a decomposition and no witness",
    );
    if bounded_kind {
        verify_bounded(p, cert, effort, &mut ck, &mut report);
    } else {
        verify_unbounded(p, cert, effort, &mut ck, &mut report);
    }
    finish(ck, report)
}

fn finish(ck: Checker, mut report: VerificationReport) -> VerificationReport {
    report.pass = ck.checks.iter().all(|c| c.pass);
    report.checks = ck.checks;
    report
}

fn verify_bounded(
    p: &Presentation,
    cert: &Certificate,
    effort: Effort,
    ck: &mut Checker,
    report: &mut VerificationReport,
) {
    let expected = decomposition_payload(p);
    let (n, other, bound) = match &expected {
        Payload::Decomposition {
            n,
            other_components,
            uniform_bound,
            ..
        } => (*n, other_components.len(), *uniform_bound),
        _ => unreachable!(),
    };
    ck.record(
        "decomposition",
        cert.payload == expected && other == 0 && n != 1,
        format!("complement components give Z^{n} times dihedral and finite factors, {other} other"),
    );
    if other != 0 || n == 1 {
        return;
    }
    report.uniform_bound = Some(bound);
    let mut rng = substream(effort.seed, "uniform-bound");
    let mut worst = 0;
    let mut failures = Vec::new();
    for _ in 0..effort.samples {
        let x = random_word_upto(p, &mut rng, 8, 4);
        let pieces = uniform_factorization(p, &x).expect("bounded form");
        let elements: Vec<NormalWord> = pieces.iter().map(|pc| pc.element.clone()).collect();
        let valid = pieces.iter().all(|pc| {
            pc.seq.iter().all(|s| {
                !matches!(s.gen, AutGen::LabelledGraph { .. }) && validate_generator(p, &s.gen).is_ok()
            }) && apply_unchecked(p, &pc.seq, &NormalWord::generator(p, pc.vertex)) == pc.element
        });
        worst = worst.max(pieces.len());
        if !valid || product(p, &elements) != x || pieces.len() > bound {
            failures.push(format_word(p, &x));
        }
    }
    ck.record(
        "uniform-bound",
        failures.is_empty(),
        format!(
            "{} sampled elements written as at most {bound} automorphic images of generators (largest used {worst}); failures: {:?}",
            effort.samples,
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    );
}

fn verify_unbounded(
    p: &Presentation,
    cert: &Certificate,
    effort: Effort,
    ck: &mut Checker,
    report: &mut VerificationReport,
) {
    let chain = match cert.chain_sets(p) {
        Ok(c) => c,
        Err(e) => {
            ck.record("chain", false, e.to_string());
            return;
        }
    };
    let mut prev = p.all();
    let mut nested = true;
    let mut cones = true;
    let mut rng = substream(effort.seed, "kernel-invariance");
    let mut kernel_failures = 0;
    let mut kernel_trials = 0;
    for &x in &chain {
        if !x.is_subset(prev) {
            nested = false;
            break;
        }
        let (q, map) = p.induced(prev);
        let local: VertexSet = (0..q.len()).filter(|&i| x.contains(map[i])).collect();
        if let Some((s, t)) = lower_cone_violation(&q, local) {
            cones = false;
            let qexp = transvection_exponent(&q, s, t).unwrap_or(1) as i64;
            let image = multiply(
                &q,
                &NormalWord::generator(&q, s),
                &NormalWord::power_of(&q, t, qexp),
            );
            let escapes = !retract_unchecked(&q, local, &image).is_identity();
            report.violating_generator.get_or_insert_with(|| {
                format!(
                    "tv({},{}) sends {} in K_X to {} with nontrivial retraction {}",
                    q.id(s),
                    q.id(t),
                    q.id(s),
                    format_word(&q, &image),
                    if escapes { "(confirmed)" } else { "(not confirmed)" }
                )
            });
            continue;
        }
        let gens = aut0_generators(&q).expect("primary");
        for _ in 0..effort.samples.div_ceil(chain.len().max(1)) {
            let w = kernel_sample(&q, local, &mut rng);
            if let Some(g) = gens.choose(&mut rng) {
                let step = if rng.gen_bool(0.5) {
                    g.clone().step()
                } else {
                    g.clone().inverse_step()
                };
                let image = apply_unchecked(&q, &[step], &w);
                kernel_trials += 1;
                if !retract_unchecked(&q, local, &image).is_identity() {
                    kernel_failures += 1;
                }
            }
        }
        prev = x;
    }
    ck.record("chain-nested", nested, "each chain set lies in the previous one");
    ck.record(
        "chain-lower-cones",
        cones,
        report
            .violating_generator
            .clone()
            .unwrap_or_else(|| "every chain set is a lower cone for the dominated-transvection preorder".into()),
    );
    ck.record(
        "kernel-invariance",
        kernel_failures == 0,
        format!("{kernel_failures} of {kernel_trials} sampled kernel elements left the kernel"),
    );
    if !nested {
        return;
    }
    let final_set = chain.last().copied().unwrap_or_else(|| p.all());
    let (q, map) = p.induced(final_set);
    let back = {
        let mut b = vec![None; p.len()];
        for (i, &v) in map.iter().enumerate() {
            b[v] = Some(i);
        }
        b
    };
    let witness = match cert.witness_word(p) {
        Ok(Some(w)) => w,
        Ok(None) => {
            ck.record("witness", false, "missing witness");
            return;
        }
        Err(e) => {
            ck.record("witness", false, e.to_string());
            return;
        }
    };
    let in_final = witness.support().is_subset(final_set) && !witness.is_identity();
    ck.record(
        "witness",
        in_final,
        format!("witness {} is a nontrivial element of the final standard subgroup", format_word(p, &witness)),
    );
    let w_local = witness.restrict(&q, &back);
    match &cert.payload {
        Payload::Homomorphism { vertex } => {
            let ok = q.len() == 1
                && q.order(0).is_infinite()
                && q.id(0) == vertex
                && w_local.exponent_sum(0) != 0;
            ck.record(
                "homomorphism",
                ok,
                "the chain ends at one vertex of infinite order and the witness has nonzero exponent",
            );
        }
        Payload::SplitQm { quasimorphism } => {
            verify_split(&q, quasimorphism, &w_local, effort, ck);
        }
        Payload::Citation { tag } => {
            report.citation_level = true;
            let ok = match tag {
                CitationTag::FreeGroupPrimitives => {
                    q.len() >= 2 && q.edges().is_empty() && (0..q.len()).all(|v| q.order(v).is_infinite())
                }
                CitationTag::HyperbolicC2Powers => {
                    let involutions = (0..q.len()).all(|v| q.order(v) == Order::Finite(2));
                    let jd = join_decomposition_unchecked(&q);
                    let comp = q.all().difference(q.star(0));
                    let side = q.all().difference(comp);
                    involutions
                        && q.len() >= 3
                        && jd.components.len() == 1
                        && crate::words::check_free_split(&q, side).is_ok()
                        && is_clique(&q, side)
                        && is_clique(&q, comp)
                }
            };
            ck.record(
                "citation-shape",
                ok,
                format!("final group has the shape required by the cited result ({tag:?})"),
            );
        }
        Payload::Decomposition { .. } => {
            ck.record("payload", false, "decomposition payload on an unbounded certificate");
        }
    }
}

fn is_clique(p: &Presentation, s: VertexSet) -> bool {
    !s.is_empty() && s.iter().all(|v| s.difference(p.star(v)).is_empty())
}

fn verify_split(q: &Presentation, j: &SplitQmJson, witness: &NormalWord, effort: Effort, ck: &mut Checker) {
    let qm = match SplitQm::from_json(q, j) {
        Ok(qm) => qm,
        Err(e) => {
            ck.record("quasimorphism", false, e.to_string());
            return;
        }
    };
    ck.record("quasimorphism", true, "odd functions and the free splitting are valid");
    let left = qm.left;
    let right = q.all().difference(left);
    let crossing = (0..q.len())
        .flat_map(|v| (0..q.len()).map(move |w| (v, w)))
        .find(|&(v, w)| v != w && left.contains(v) != left.contains(w) && leq_tau(q, v, w));
    ck.record(
        "no-crossing-transvection",
        crossing.is_none() && !left.is_empty() && !right.is_empty(),
        match crossing {
            Some((v, w)) => format!("tv({},{}) crosses the splitting", q.id(v), q.id(w)),
            None => "both factors are unions of classes closed under domination".into(),
        },
    );
    let (analytic, empirical) = qm.defect_bound_report(q, effort.samples.max(1) * 5, effort.seed);
    ck.record(
        "defect",
        empirical <= analytic && analytic <= qm.defect_bound,
        format!("empirical defect {empirical} within analytic bound {analytic}"),
    );
    let value = qm.homogenize_exact(q, witness);
    ck.record(
        "witness-value",
        value != Q::from_integer(0),
        format!("homogenized value at the witness is {value}"),
    );
    let gens = aut0_generators(q).expect("primary");
    let seeds: Vec<NormalWord> = (0..q.len()).map(|v| NormalWord::generator(q, v)).collect();
    let small = orbit(q, &seeds, &gens, 2, 9);
    let mut rng = substream(effort.seed, "orbit-vanishing");
    let mut samples: Vec<NormalWord> = small.elements.clone();
    for _ in 0..effort.samples {
        let len = rng.gen_range(1..=6);
        let mut seq: Vec<AutStep> = Vec::with_capacity(len);
        for _ in 0..len {
            if let Some(g) = gens.choose(&mut rng) {
                seq.push(if rng.gen_bool(0.5) {
                    g.clone().step()
                } else {
                    g.clone().inverse_step()
                });
            }
        }
        let v = rng.gen_range(0..q.len());
        let e = rng.gen_range(1..=3);
        samples.push(apply_unchecked(q, &seq, &NormalWord::power_of(q, v, e)));
    }
    let bad = samples
        .iter()
        .find(|x| qm.homogenize_exact(q, x) != Q::from_integer(0));
    ck.record(
        "vanishing-on-orbit",
        bad.is_none(),
        match bad {
            Some(x) => format!("nonzero on orbit element {}", format_word(q, x)),
            None => format!("homogenization vanishes on {} orbit elements", samples.len()),
        },
    );
}
