//! Certified intervals for automorphism-invariant word norms.
//!
//! Upper bounds come from breadth-first search over products of a truncated
//! orbit set `S ⊆ S̄`; lower bounds come from the homomorphism or split
//! quasimorphism carried by an unbounded certificate, via
//! `|q̄(s₁⋯sₙ)| ≤ n·B̄ + (n − 1)·D̄`.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use num_traits::Signed;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::automorphisms::{aut0_generators, orbit, AutError, OrbitSet};
use crate::classifier::{CertKind, Certificate, ClassifyError, Payload};
use crate::presentation::Presentation;
use crate::quasimorphisms::{format_q, QmError, SplitQm, Q};
use crate::words::{format_word, invert, multiply, pow, retract_unchecked, NormalWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormError {
    #[error("certificate was issued for a different presentation")]
    DigestMismatch,
    #[error("{0:?} certificates carry no numeric lower bound")]
    NoNumericBound(CertKind),
    #[error(transparent)]
    Certificate(#[from] ClassifyError),
    #[error(transparent)]
    Quasimorphism(#[from] QmError),
    #[error(transparent)]
    Automorphism(#[from] AutError),
    #[error("radius must be at least 1")]
    Radius,
    #[error("the generating set is empty")]
    EmptyGenerators,
}

/// Result of a bounded search: a proven upper bound or nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Upper {
    Known(usize),
    Unknown,
}

impl Upper {
    pub fn known(self) -> Option<usize> {
        match self {
            Upper::Known(n) => Some(n),
            Upper::Unknown => None,
        }
    }
}

impl fmt::Display for Upper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Upper::Known(n) => write!(f, "{n}"),
            Upper::Unknown => f.write_str("UNKNOWN"),
        }
    }
}

impl Serialize for Upper {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Upper::Known(n) => s.serialize_u64(*n as u64),
            Upper::Unknown => s.serialize_str("UNKNOWN"),
        }
    }
}

impl<'de> Deserialize<'de> for Upper {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(|n| Upper::Known(n as usize))
                .ok_or_else(|| serde::de::Error::custom("expected a nonnegative integer")),
            serde_json::Value::String(s) if s == "UNKNOWN" => Ok(Upper::Unknown),
            other => Err(serde::de::Error::custom(format!("bad upper bound {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BfsParams {
    pub orbit_depth: usize,
    pub length_cap: usize,
    pub radius: usize,
}

impl Default for BfsParams {
    fn default() -> Self {
        BfsParams {
            orbit_depth: 3,
            length_cap: 9,
            radius: 3,
        }
    }
}

/// The truncated orbit of the vertex generators under `Aut⁰`.
pub fn generator_orbit(p: &Presentation, params: BfsParams) -> Result<OrbitSet, NormError> {
    let gens = aut0_generators(p)?;
    let seeds: Vec<NormalWord> = (0..p.len()).map(|v| NormalWord::generator(p, v)).collect();
    Ok(orbit(p, &seeds, &gens, params.orbit_depth, params.length_cap))
}

/// Distances from the identity in the Cayley graph of `gens ∪ gens⁻¹`, up to
/// a fixed radius, reusable across queries.
pub struct NormOracle<'a> {
    p: &'a Presentation,
    letters: Vec<NormalWord>,
    radius: usize,
    half: usize,
    ball: HashMap<NormalWord, usize>,
}

impl<'a> NormOracle<'a> {
    pub fn new(p: &'a Presentation, gens: &OrbitSet, radius: usize) -> Result<Self, NormError> {
        if radius == 0 {
            return Err(NormError::Radius);
        }
        if gens.is_empty() {
            return Err(NormError::EmptyGenerators);
        }
        let mut letters: Vec<NormalWord> = gens
            .elements
            .iter()
            .flat_map(|g| [g.clone(), invert(p, g)])
            .filter(|g| !g.is_identity())
            .collect();
        letters.sort();
        letters.dedup();
        // meet in the middle: products of length ≤ r split as ⌈r/2⌉ + ⌊r/2⌋
        let half = if radius >= 4 { radius.div_ceil(2) } else { radius };
        let mut ball = HashMap::new();
        ball.insert(NormalWord::identity(), 0);
        let mut frontier = vec![NormalWord::identity()];
        for d in 1..=half {
            let mut next = Vec::new();
            for x in &frontier {
                for s in &letters {
                    let y = multiply(p, x, s);
                    if !ball.contains_key(&y) {
                        ball.insert(y.clone(), d);
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        Ok(NormOracle {
            p,
            letters,
            radius,
            half,
            ball,
        })
    }

    pub fn ball_size(&self) -> usize {
        self.ball.len()
    }

    pub fn letters(&self) -> &[NormalWord] {
        &self.letters
    }

    /// Least `n ≤ radius` such that `x` is a product of `n` letters.
    pub fn upper(&self, x: &NormalWord) -> Upper {
        if let Some(&d) = self.ball.get(x) {
            return Upper::Known(d);
        }
        if self.half == self.radius {
            return Upper::Unknown;
        }
        let rest = self.radius - self.half;
        let best = self
            .ball
            .iter()
            .filter_map(|(a, &d)| {
                let b = multiply(self.p, &invert(self.p, a), x);
                self.ball.get(&b).filter(|&&e| e <= rest).map(|&e| d + e)
            })
            .min();
        best.map_or(Upper::Unknown, Upper::Known)
    }
}

/// Least `n ≤ radius` with `x` a product of `n` elements of `gens ∪ gens⁻¹`.
pub fn norm_upper(p: &Presentation, x: &NormalWord, gens: &OrbitSet, radius: usize) -> Result<Upper, NormError> {
    if x.is_identity() {
        return Ok(Upper::Known(0));
    }
    Ok(NormOracle::new(p, gens, radius)?.upper(x))
}

/// `(|q̄(x)|, B̄, D̄)` for the numeric certificate kinds.
fn certified_parts(p: &Presentation, x: &NormalWord, cert: &Certificate) -> Result<(Q, Q, Q), NormError> {
    if cert.presentation_digest != p.digest() {
        return Err(NormError::DigestMismatch);
    }
    let final_set = cert.final_set(p)?;
    let y = retract_unchecked(p, final_set, x);
    match &cert.payload {
        Payload::Homomorphism { vertex } => {
            let z = p.require_index(vertex).map_err(ClassifyError::from)?;
            let k = y.exponent_sum(z) as i128;
            Ok((Q::from_integer(k.abs()), Q::from_integer(1), Q::from_integer(0)))
        }
        Payload::SplitQm { quasimorphism } => {
            let (q, map) = p.induced(final_set);
            let mut back = vec![None; p.len()];
            for (i, &v) in map.iter().enumerate() {
                back[v] = Some(i);
            }
            let qm = SplitQm::from_json(&q, quasimorphism)?;
            let value = qm.homogenize_exact(&q, &y.restrict(&q, &back));
            Ok((value.abs(), Q::from_integer(0), qm.homogenized_defect()))
        }
        _ => Err(NormError::NoNumericBound(cert.kind)),
    }
}

/// `|q̄(x)| / (B̄ + D̄)`, a lower bound for the `Aut⁰`-invariant norm of `x`
/// with respect to the vertex generators.
pub fn norm_lower(p: &Presentation, x: &NormalWord, cert: &Certificate) -> Result<Q, NormError> {
    let (value, b, d) = certified_parts(p, x, cert)?;
    Ok(value / (b + d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub element: String,
    pub lower: String,
    pub upper: Upper,
    pub params: BfsParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate_ref: Option<String>,
}

/// Lower bound from `cert` when it has one (zero otherwise) and upper bound
/// from the truncated orbit.
pub fn estimate(
    p: &Presentation,
    x: &NormalWord,
    cert: Option<&Certificate>,
    params: BfsParams,
) -> Result<NormEstimate, NormError> {
    let gens = generator_orbit(p, params)?;
    let upper = norm_upper(p, x, &gens, params.radius)?;
    let lower = match cert {
        Some(c) if matches!(c.kind, CertKind::Homomorphism | CertKind::SplitQm) => norm_lower(p, x, c)?,
        Some(c) if c.presentation_digest != p.digest() => return Err(NormError::DigestMismatch),
        _ => Q::from_integer(0),
    };
    Ok(NormEstimate {
        element: format_word(p, x),
        lower: format_q(&lower),
        upper,
        params,
        certificate_ref: cert.map(|c| c.presentation_digest.clone()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistortionRow {
    pub n: usize,
    pub lower: String,
    pub upper: Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DistortionStatus {
    /// A certificate gives `lower(1) > 0`.
    Undistorted,
    /// Only search data is available.
    EmpiricalOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistortionTable {
    pub element: String,
    pub params: BfsParams,
    pub status: DistortionStatus,
    pub rows: Vec<DistortionRow>,
}

/// Rows `(n, lower(xⁿ), upper(xⁿ))` for `1 ≤ n ≤ n_max`.
pub fn distortion_table(
    p: &Presentation,
    x: &NormalWord,
    cert: Option<&Certificate>,
    n_max: usize,
    params: BfsParams,
) -> Result<DistortionTable, NormError> {
    let numeric = cert.filter(|c| matches!(c.kind, CertKind::Homomorphism | CertKind::SplitQm));
    if let Some(c) = cert {
        if c.presentation_digest != p.digest() {
            return Err(NormError::DigestMismatch);
        }
    }
    let gens = generator_orbit(p, params)?;
    let oracle = NormOracle::new(p, &gens, params.radius)?;
    let mut rows = Vec::with_capacity(n_max);
    let mut lower_one = Q::from_integer(0);
    for n in 1..=n_max {
        let xn = pow(p, x, n as i64);
        let lower = match numeric {
            Some(c) => norm_lower(p, &xn, c)?,
            None => Q::from_integer(0),
        };
        if n == 1 {
            lower_one = lower;
        }
        let upper = if xn.is_identity() {
            Upper::Known(0)
        } else {
            oracle.upper(&xn)
        };
        rows.push(DistortionRow {
            n,
            lower: format_q(&lower),
            upper,
        });
    }
    Ok(DistortionTable {
        element: format_word(p, x),
        params,
        status: if lower_one > Q::from_integer(0) {
            DistortionStatus::Undistorted
        } else {
            DistortionStatus::EmpiricalOnly
        },
        rows,
    })
}

impl DistortionTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lower,upper\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.n, r.lower, r.upper);
        }
        out
    }

    /// Line plot of both bounds against `n`; unknown upper bounds are left
    /// out.
    pub fn to_svg(&self) -> String {
        let (w, h, pad) = (480.0, 320.0, 40.0);
        let n_max = self.rows.len().max(1) as f64;
        let lowers: Vec<f64> = self
            .rows
            .iter()
            .map(|r| {
                let q = crate::quasimorphisms::parse_q(&r.lower).unwrap_or(Q::from_integer(0));
                *q.numer() as f64 / *q.denom() as f64
            })
            .collect();
        let y_max = self
            .rows
            .iter()
            .filter_map(|r| r.upper.known().map(|u| u as f64))
            .chain(lowers.iter().copied())
            .fold(1.0, f64::max);
        let sx = |n: f64| pad + (n - 1.0) / (n_max - 1.0).max(1.0) * (w - 2.0 * pad);
        let sy = |v: f64| h - pad - v / y_max * (h - 2.0 * pad);
        let line = |pts: Vec<(f64, f64)>, colour: &str| -> String {
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{:.1},{:.1}", sx(*x), sy(*y))).collect();
            format!(
                "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"2\" points=\"{}\"/>\n",
                path.join(" ")
            )
        };
        let lower_pts = lowers.iter().enumerate().map(|(i, &v)| ((i + 1) as f64, v)).collect();
        let upper_pts = self
            .rows
            .iter()
            .filter_map(|r| r.upper.known().map(|u| (r.n as f64, u as f64)))
            .collect();
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
        );
        let _ = write!(
            svg,
            "<line x1=\"{pad}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
             <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{y0}\" stroke=\"black\"/>\n\
             <text x=\"{xl}\" y=\"{yl}\" font-size=\"12\">n (1..{nm})</text>\n\
             <text x=\"4\" y=\"{ty}\" font-size=\"12\">{ym}</text>\n\
             <text x=\"{pad}\" y=\"20\" font-size=\"12\">norm of {el}: lower (blue), upper (red)</text>\n",
            y0 = h - pad,
            x1 = w - pad,
            xl = w / 2.0 - 20.0,
            yl = h - 10.0,
            nm = self.rows.len(),
            ty = pad + 4.0,
            ym = y_max,
            el = xml_escape(&self.element),
        );
        svg.push_str(&line(lower_pts, "blue"));
        svg.push_str(&line(upper_pts, "red"));
        svg.push_str("</svg>\n");
        svg
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
