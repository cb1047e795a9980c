//! Graph presentations of graph products of finitely generated abelian groups.
//!
//! A [`Presentation`] is a finite simplicial graph whose vertices carry an
//! abelian group: either a cyclic group (finite order or infinite) or a list
//! of invariant factors. Vertex declaration order is part of the identity of
//! a presentation and seeds every canonical form in the crate.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::vertex_set::{VertexSet, MAX_VERTICES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("malformed presentation JSON: {0}")]
    Json(String),
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("edge {0:?}-{0:?} is a loop")]
    Loop(String),
    #[error("duplicate edge {0:?}-{1:?}")]
    DuplicateEdge(String, String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("vertex {id:?}: order {order} is less than 2")]
    OrderTooSmall { id: String, order: u64 },
    #[error("vertex {id:?}: order {order} exceeds the supported maximum 2^62")]
    OrderTooLarge { id: String, order: u64 },
    #[error("vertex {0:?}: exactly one of `order` and `factors` must be given")]
    OrderOrFactors(String),
    #[error("vertex {0:?}: empty factor list")]
    EmptyFactors(String),
    #[error("vertex {id:?}: invalid order literal {literal:?}")]
    BadOrder { id: String, literal: String },
    #[error("invalid vertex id {0:?} (use letters, digits, '_' or '.')")]
    BadId(String),
    #[error("presentation has {0} vertices; at most {MAX_VERTICES} are supported")]
    TooManyVertices(usize),
    #[error("vertex {0:?} does not carry a cyclic group; expand to primary form first")]
    NotCyclic(String),
    #[error("vertex {0:?} is neither primary nor infinite cyclic")]
    NotPrimary(String),
}

/// Largest supported finite order; exponents are stored as `i64`.
pub const MAX_ORDER: u64 = 1 << 62;

/// Order of a cyclic group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn is_infinite(self) -> bool {
        matches!(self, Order::Infinite)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }

    /// `(p, k)` with `self = p^k`, if the order is a prime power.
    pub fn prime_power(self) -> Option<(u64, u32)> {
        let n = self.finite()?;
        let factors = factorize(n);
        match factors.as_slice() {
            [(p, k)] => Some((*p, *k)),
            _ => None,
        }
    }

    pub fn is_primary_or_infinite(self) -> bool {
        self.is_infinite() || self.prime_power().is_some()
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VertexGroup {
    Cyclic(Order),
    /// Direct sum of cyclic groups given by invariant factors.
    Abelian(Vec<Order>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSpec {
    pub id: String,
    pub group: VertexGroup,
}

/// A validated graph presentation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    vertices: Vec<VertexSpec>,
    /// `link[v]` = vertices adjacent to `v`.
    link: Vec<VertexSet>,
    /// Cyclic order per vertex; meaningful only when `all_cyclic`.
    orders: Vec<Order>,
    all_cyclic: bool,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

impl Presentation {
    /// Builds and validates a presentation from vertex specs and id pairs.
    pub fn new(
        vertices: Vec<VertexSpec>,
        edges: &[(impl AsRef<str>, impl AsRef<str>)],
    ) -> Result<Self, PresentationError> {
        if vertices.len() > MAX_VERTICES {
            return Err(PresentationError::TooManyVertices(vertices.len()));
        }
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if !valid_id(&v.id) {
                return Err(PresentationError::BadId(v.id.clone()));
            }
            if index.insert(v.id.clone(), i).is_some() {
                return Err(PresentationError::DuplicateVertex(v.id.clone()));
            }
            let check = |o: &Order| match o {
                Order::Finite(n) if *n < 2 => Err(PresentationError::OrderTooSmall {
                    id: v.id.clone(),
                    order: *n,
                }),
                Order::Finite(n) if *n > MAX_ORDER => Err(PresentationError::OrderTooLarge {
                    id: v.id.clone(),
                    order: *n,
                }),
                _ => Ok(()),
            };
            match &v.group {
                VertexGroup::Cyclic(o) => check(o)?,
                VertexGroup::Abelian(fs) => {
                    if fs.is_empty() {
                        return Err(PresentationError::EmptyFactors(v.id.clone()));
                    }
                    fs.iter().try_for_each(check)?;
                }
            }
        }
        let mut link = vec![VertexSet::EMPTY; vertices.len()];
        let mut seen = HashSet::new();
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index
                .get(a)
                .ok_or_else(|| PresentationError::UnknownVertex(a.to_string()))?;
            let ib = *index
                .get(b)
                .ok_or_else(|| PresentationError::UnknownVertex(b.to_string()))?;
            if ia == ib {
                return Err(PresentationError::Loop(a.to_string()));
            }
            if !seen.insert((ia.min(ib), ia.max(ib))) {
                return Err(PresentationError::DuplicateEdge(a.to_string(), b.to_string()));
            }
            link[ia].insert(ib);
            link[ib].insert(ia);
        }
        Ok(Self::from_parts(vertices, link))
    }

    fn from_parts(vertices: Vec<VertexSpec>, link: Vec<VertexSet>) -> Self {
        let all_cyclic = vertices
            .iter()
            .all(|v| matches!(v.group, VertexGroup::Cyclic(_)));
        let orders = vertices
            .iter()
            .map(|v| match v.group {
                VertexGroup::Cyclic(o) => o,
                VertexGroup::Abelian(_) => Order::Infinite,
            })
            .collect();
        Presentation {
            vertices,
            link,
            orders,
            all_cyclic,
        }
    }

    /// Convenience constructor for cyclic vertex groups.
    pub fn cyclic(
        vertices: &[(&str, Order)],
        edges: &[(&str, &str)],
    ) -> Result<Self, PresentationError> {
        let specs = vertices
            .iter()
            .map(|(id, o)| VertexSpec {
                id: id.to_string(),
                group: VertexGroup::Cyclic(*o),
            })
            .collect();
        Self::new(specs, edges)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[VertexSpec] {
        &self.vertices
    }

    pub fn all(&self) -> VertexSet {
        VertexSet::full(self.len())
    }

    pub fn id(&self, v: usize) -> &str {
        &self.vertices[v].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn require_index(&self, id: &str) -> Result<usize, PresentationError> {
        self.index_of(id)
            .ok_or_else(|| PresentationError::UnknownVertex(id.to_string()))
    }

    /// Order of the cyclic vertex group at `v`. Only meaningful when
    /// [`Presentation::is_cyclic`] holds.
    #[inline]
    pub fn order(&self, v: usize) -> Order {
        self.orders[v]
    }

    pub fn is_cyclic(&self) -> bool {
        self.all_cyclic
    }

    pub fn require_cyclic(&self) -> Result<(), PresentationError> {
        match self
            .vertices
            .iter()
            .find(|v| !matches!(v.group, VertexGroup::Cyclic(_)))
        {
            Some(v) => Err(PresentationError::NotCyclic(v.id.clone())),
            None => Ok(()),
        }
    }

    pub fn is_primary(&self) -> bool {
        self.all_cyclic && self.orders.iter().all(|o| o.is_primary_or_infinite())
    }

    pub fn require_primary(&self) -> Result<(), PresentationError> {
        self.require_cyclic()?;
        match (0..self.len()).find(|&v| !self.orders[v].is_primary_or_infinite()) {
            Some(v) => Err(PresentationError::NotPrimary(self.id(v).to_string())),
            None => Ok(()),
        }
    }

    #[inline]
    pub fn link(&self, v: usize) -> VertexSet {
        self.link[v]
    }

    #[inline]
    pub fn star(&self, v: usize) -> VertexSet {
        let mut s = self.link[v];
        s.insert(v);
        s
    }

    #[inline]
    pub fn adjacent(&self, v: usize, w: usize) -> bool {
        self.link[v].contains(w)
    }

    /// `(star, link)` of the vertex named `id`.
    pub fn neighborhoods(&self, id: &str) -> Result<(VertexSet, VertexSet), PresentationError> {
        let v = self.require_index(id)?;
        Ok((self.star(v), self.link(v)))
    }

    /// Edges as index pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in self.link[i].iter().filter(|&j| j > i) {
                out.push((i, j));
            }
        }
        out
    }

    /// Full subgraph spanned by `set`, keeping declaration order. Also returns
    /// the map from sub-indices to indices of `self`.
    pub fn induced(&self, set: VertexSet) -> (Presentation, Vec<usize>) {
        let map: Vec<usize> = set.iter().filter(|&v| v < self.len()).collect();
        let mut back = vec![usize::MAX; self.len()];
        for (i, &v) in map.iter().enumerate() {
            back[v] = i;
        }
        let vertices = map.iter().map(|&v| self.vertices[v].clone()).collect();
        let link = map
            .iter()
            .map(|&v| self.link[v].intersection(set).iter().map(|w| back[w]).collect())
            .collect();
        (Self::from_parts(vertices, link), map)
    }

    /// Set of vertex indices named by `ids`.
    pub fn set_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<VertexSet, PresentationError> {
        ids.iter()
            .map(|id| self.require_index(id.as_ref()))
            .collect()
    }

    pub fn ids_of(&self, set: VertexSet) -> Vec<String> {
        set.iter().map(|v| self.id(v).to_string()).collect()
    }

    /// Replaces every vertex whose group is not primary or infinite cyclic by
    /// a clique of primary/infinite cyclic vertices inheriting its adjacencies.
    pub fn expand_to_primary(&self) -> Result<Presentation, PresentationError> {
        let mut taken: HashSet<String> = self.vertices.iter().map(|v| v.id.clone()).collect();
        let mut pieces: Vec<Vec<usize>> = Vec::with_capacity(self.len());
        let mut vertices = Vec::new();
        for spec in &self.vertices {
            let factors: Vec<Order> = match &spec.group {
                VertexGroup::Cyclic(o) => vec![*o],
                VertexGroup::Abelian(fs) => fs.clone(),
            };
            let mut primary = Vec::new();
            for f in factors {
                match f {
                    Order::Infinite => primary.push(Order::Infinite),
                    Order::Finite(n) => primary.extend(
                        factorize(n).into_iter().map(|(p, k)| Order::Finite(p.pow(k))),
                    ),
                }
            }
            if primary.len() == 1 && spec.group == VertexGroup::Cyclic(primary[0]) {
                pieces.push(vec![vertices.len()]);
                vertices.push(spec.clone());
                continue;
            }
            let mut mine = Vec::new();
            for o in primary {
                let base = format!("{}_{}", spec.id, o);
                let mut id = base.clone();
                let mut k = 1;
                while taken.contains(&id) {
                    id = format!("{base}_{k}");
                    k += 1;
                }
                taken.insert(id.clone());
                mine.push(vertices.len());
                vertices.push(VertexSpec {
                    id,
                    group: VertexGroup::Cyclic(o),
                });
            }
            pieces.push(mine);
        }
        if vertices.len() > MAX_VERTICES {
            return Err(PresentationError::TooManyVertices(vertices.len()));
        }
        let mut link = vec![VertexSet::EMPTY; vertices.len()];
        for group in &pieces {
            for &a in group {
                for &b in group {
                    if a != b {
                        link[a].insert(b);
                    }
                }
            }
        }
        for (i, j) in self.edges() {
            for &a in &pieces[i] {
                for &b in &pieces[j] {
                    link[a].insert(b);
                    link[b].insert(a);
                }
            }
        }
        Ok(Self::from_parts(vertices, link))
    }

    /// Parses the JSON presentation format.
    pub fn from_json(text: &str) -> Result<Self, PresentationError> {
        let raw: PresentationJson =
            serde_json::from_str(text).map_err(|e| PresentationError::Json(e.to_string()))?;
        let mut specs = Vec::with_capacity(raw.vertices.len());
        for v in raw.vertices {
            let group = match (v.order, v.factors) {
                (Some(o), None) => VertexGroup::Cyclic(o.to_order(&v.id)?),
                (None, Some(fs)) => VertexGroup::Abelian(
                    fs.into_iter()
                        .map(|f| f.to_order(&v.id))
                        .collect::<Result<_, _>>()?,
                ),
                _ => return Err(PresentationError::OrderOrFactors(v.id)),
            };
            specs.push(VertexSpec { id: v.id, group });
        }
        let edges: Vec<(String, String)> = raw.edges.into_iter().map(|[a, b]| (a, b)).collect();
        Self::new(specs, &edges)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = PresentationJson {
            vertices: self
                .vertices
                .iter()
                .map(|v| match &v.group {
                    VertexGroup::Cyclic(o) => VertexJson {
                        id: v.id.clone(),
                        order: Some(OrderJson::from(*o)),
                        factors: None,
                    },
                    VertexGroup::Abelian(fs) => VertexJson {
                        id: v.id.clone(),
                        order: None,
                        factors: Some(fs.iter().map(|&o| OrderJson::from(o)).collect()),
                    },
                })
                .collect(),
            edges: self
                .edges()
                .into_iter()
                .map(|(i, j)| [self.id(i).to_string(), self.id(j).to_string()])
                .collect(),
        };
        serde_json::to_value(raw).expect("presentation serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("presentation serializes")
    }

    /// SHA-256 of the compact JSON form; identifies the presentation inside
    /// certificates.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// DOT rendering of the graph, or of its complement graph.
    pub fn to_dot(&self, complement: bool) -> String {
        let mut out = String::from(if complement {
            "graph complement {\n"
        } else {
            "graph gamma {\n"
        });
        for (i, v) in self.vertices.iter().enumerate() {
            let label = match &v.group {
                VertexGroup::Cyclic(o) => o.to_string(),
                VertexGroup::Abelian(fs) => fs
                    .iter()
                    .map(|o| o.to_string())
                    .collect::<Vec<_>>()
                    .join("+"),
            };
            out.push_str(&format!("  v{i} [label=\"{}:{}\"];\n", v.id, label));
        }
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.adjacent(i, j) != complement {
                    out.push_str(&format!("  v{i} -- v{j};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentationJson {
    vertices: Vec<VertexJson>,
    #[serde(default)]
    edges: Vec<[String; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexJson {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<OrderJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factors: Option<Vec<OrderJson>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum OrderJson {
    Int(u64),
    Str(String),
}

impl OrderJson {
    fn to_order(&self, id: &str) -> Result<Order, PresentationError> {
        match self {
            OrderJson::Int(n) => Ok(Order::Finite(*n)),
            OrderJson::Str(s) if s.eq_ignore_ascii_case("inf") => Ok(Order::Infinite),
            OrderJson::Str(s) => match s.parse::<u64>() {
                Ok(n) => Ok(Order::Finite(n)),
                Err(_) => Err(PresentationError::BadOrder {
                    id: id.to_string(),
                    literal: s.clone(),
                }),
            },
        }
    }
}

impl From<Order> for OrderJson {
    fn from(o: Order) -> Self {
        match o {
            Order::Finite(n) => OrderJson::Int(n),
            Order::Infinite => OrderJson::Str("inf".into()),
        }
    }
}

/// Parses a presentation from JSON text.
pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    Presentation::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dinf_and_z() {
        let p = parse_presentation(
            r#"{"vertices":[{"id":"a","order":2},{"id":"b","order":2}],"edges":[]}"#,
        )
        .unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.order(0), Order::Finite(2));
        assert!(p.edges().is_empty());

        let z = parse_presentation(r#"{"vertices":[{"id":"a","order":"inf"}],"edges":[]}"#)
            .unwrap();
        assert_eq!(z.order(0), Order::Infinite);
        assert!(z.is_primary());
    }

    #[test]
    fn validation_errors() {
        let loop_ = parse_presentation(
            r#"{"vertices":[{"id":"a","order":2},{"id":"b","order":2}],"edges":[["a","a"]]}"#,
        );
        assert_eq!(loop_.unwrap_err(), PresentationError::Loop("a".into()));
        let dup = parse_presentation(r#"{"vertices":[{"id":"a","order":2},{"id":"a","order":3}]}"#);
        assert!(matches!(dup, Err(PresentationError::DuplicateVertex(_))));
        let unknown = parse_presentation(r#"{"vertices":[{"id":"a","order":2}],"edges":[["a","q"]]}"#);
        assert!(matches!(unknown, Err(PresentationError::UnknownVertex(_))));
        let small = parse_presentation(r#"{"vertices":[{"id":"a","order":1}]}"#);
        assert!(matches!(small, Err(PresentationError::OrderTooSmall { .. })));
        let both = parse_presentation(r#"{"vertices":[{"id":"a","order":2,"factors":[2]}]}"#);
        assert!(matches!(both, Err(PresentationError::OrderOrFactors(_))));
        let multi = parse_presentation(
            r#"{"vertices":[{"id":"a","order":2},{"id":"b","order":2}],"edges":[["a","b"],["b","a"]]}"#,
        );
        assert!(matches!(multi, Err(PresentationError::DuplicateEdge(..))));
    }

    #[test]
    fn expands_c6_and_z_plus_c4() {
        let p = parse_presentation(
            r#"{"vertices":[{"id":"c","order":6},{"id":"d","factors":["inf",4]},{"id":"e","order":8}],"edges":[["c","e"]]}"#,
        )
        .unwrap();
        let q = p.expand_to_primary().unwrap();
        let ids: Vec<_> = q.vertices().iter().map(|v| v.id.as_str()).collect();
        assert_eq!(ids, vec!["c_2", "c_3", "d_inf", "d_4", "e"]);
        assert_eq!(q.order(0), Order::Finite(2));
        assert_eq!(q.order(1), Order::Finite(3));
        assert_eq!(q.order(2), Order::Infinite);
        assert_eq!(q.order(3), Order::Finite(4));
        assert_eq!(q.order(4), Order::Finite(8));
        // cliques plus inherited edges c-e
        assert!(q.adjacent(0, 1) && q.adjacent(2, 3));
        assert!(q.adjacent(0, 4) && q.adjacent(1, 4));
        assert!(!q.adjacent(2, 4) && !q.adjacent(0, 2));
        assert_eq!(q.edges().len(), 4);
        assert!(q.is_primary());
        assert_eq!(q.expand_to_primary().unwrap(), q);
    }

    #[test]
    fn neighborhoods_examples() {
        let path = Presentation::cyclic(
            &[("a", Order::Infinite), ("b", Order::Infinite), ("c", Order::Infinite)],
            &[("a", "b"), ("b", "c")],
        )
        .unwrap();
        let (star, link) = path.neighborhoods("b").unwrap();
        assert_eq!(star, path.all());
        assert_eq!(link.iter().collect::<Vec<_>>(), vec![0, 2]);
        assert!(path.neighborhoods("z").is_err());

        let dinf = Presentation::cyclic(&[("a", Order::Finite(2)), ("b", Order::Finite(2))], &[])
            .unwrap();
        let (star, link) = dinf.neighborhoods("a").unwrap();
        assert_eq!(star, VertexSet::singleton(0));
        assert!(link.is_empty());
    }

    #[test]
    fn json_round_trip_and_digest() {
        let text = r#"{"vertices":[{"id":"a","order":2},{"id":"b","order":"inf"},{"id":"c","factors":[6,"inf"]}],"edges":[["a","b"]]}"#;
        let p = parse_presentation(text).unwrap();
        let q = parse_presentation(&p.to_json()).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.digest(), q.digest());
        assert!(!p.is_cyclic());
    }

    #[test]
    fn induced_keeps_order() {
        let path = Presentation::cyclic(
            &[("a", Order::Infinite), ("b", Order::Infinite), ("c", Order::Infinite)],
            &[("a", "b"), ("b", "c")],
        )
        .unwrap();
        let (sub, map) = path.induced([0, 2].into_iter().collect());
        assert_eq!(map, vec![0, 2]);
        assert_eq!(sub.id(1), "c");
        assert!(sub.edges().is_empty());
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(Order::Finite(9).prime_power(), Some((3, 2)));
        assert_eq!(Order::Finite(12).prime_power(), None);
    }
}
