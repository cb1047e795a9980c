//! Named test presentations and generators for presentation corpora.

use std::collections::HashSet;

use rand::Rng;

use crate::presentation::{Order, Presentation, VertexGroup, VertexSpec};
use crate::sampling::substream;

const INF: Order = Order::Infinite;
const C2: Order = Order::Finite(2);
const C3: Order = Order::Finite(3);

fn build(vs: &[(&str, Order)], es: &[(&str, &str)]) -> Presentation {
    Presentation::cyclic(vs, es).expect("named presentation is valid")
}

/// `Z`.
pub fn z() -> Presentation {
    build(&[("a", INF)], &[])
}

/// `Z²`.
pub fn z2() -> Presentation {
    build(&[("a", INF), ("b", INF)], &[("a", "b")])
}

/// Free group of rank two.
pub fn f2() -> Presentation {
    build(&[("a", INF), ("b", INF)], &[])
}

/// Infinite dihedral group `C₂ * C₂`.
pub fn dinf() -> Presentation {
    build(&[("a", C2), ("b", C2)], &[])
}

/// `C₂ * C₃ ≅ PSL(2, Z)`.
pub fn psl() -> Presentation {
    build(&[("a", C2), ("b", C3)], &[])
}

/// `C₂ * C₂ * C₂`.
pub fn c2c2c2() -> Presentation {
    build(&[("a", C2), ("b", C2), ("c", C2)], &[])
}

/// RAAG on the path `a – b – c`.
pub fn path_raag() -> Presentation {
    build(&[("a", INF), ("b", INF), ("c", INF)], &[("a", "b"), ("b", "c")])
}

/// `D∞ × C₂`.
pub fn dinf_c2() -> Presentation {
    build(&[("a", C2), ("b", C2), ("c", C2)], &[("a", "c"), ("b", "c")])
}

/// `(C₂ × C₂) * C₃`.
pub fn klein_free_c3() -> Presentation {
    build(&[("a", C2), ("b", C2), ("c", C3)], &[("a", "b")])
}

/// The fixed named corpus, keyed by file stem.
pub fn named() -> Vec<(&'static str, Presentation)> {
    vec![
        ("z", z()),
        ("z2", z2()),
        ("f2", f2()),
        ("dinf", dinf()),
        ("psl", psl()),
        ("c2c2c2", c2c2c2()),
        ("path", path_raag()),
        ("dinf_c2", dinf_c2()),
    ]
}

/// Vertex id for index `i`: `a`, `b`, …, `z`, then `v26`, `v27`, ….
pub fn vertex_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("v{i}")
    }
}

fn pair_index(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Presentation on `orders.len()` vertices whose edges are the set bits of
/// `mask`, indexed by the pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn from_mask(orders: &[Order], mask: u64) -> Presentation {
    let names: Vec<String> = (0..orders.len()).map(vertex_name).collect();
    let specs = orders
        .iter()
        .zip(&names)
        .map(|(&o, id)| VertexSpec {
            id: id.clone(),
            group: VertexGroup::Cyclic(o),
        })
        .collect();
    let edges: Vec<(&str, &str)> = pair_index(orders.len())
        .into_iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, (i, j))| (names[i].as_str(), names[j].as_str()))
        .collect();
    Presentation::new(specs, &edges).expect("generated presentation is valid")
}

/// Every labelling of `n` vertices by `alphabet` times every graph on `n`
/// labelled vertices (no isomorphism reduction).
pub fn exhaustive_labelled(n: usize, alphabet: &[Order]) -> Vec<Presentation> {
    let pairs = pair_index(n).len();
    let mut out = Vec::new();
    for labels in all_sequences(n, alphabet.len(), false) {
        let orders: Vec<Order> = labels.iter().map(|&i| alphabet[i]).collect();
        for mask in 0..1u64 << pairs {
            out.push(from_mask(&orders, mask));
        }
    }
    out
}

fn all_sequences(n: usize, k: usize, nondecreasing: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, k: usize, nd: bool, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let lo = if nd { cur.last().copied().unwrap_or(0) } else { 0 };
        for x in lo..k {
            cur.push(x);
            rec(n, k, nd, cur, out);
            cur.pop();
        }
    }
    rec(n, k, nondecreasing, &mut cur, &mut out);
    out
}

fn label_preserving_perms(labels: &[usize]) -> Vec<Vec<usize>> {
    let n = labels.len();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        labels: &[usize],
        cur: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = cur.len();
        if i == labels.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..labels.len() {
            if !used[j] && labels[j] == labels[i] {
                used[j] = true;
                cur.push(j);
                rec(labels, cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    rec(labels, &mut cur, &mut used, &mut out);
    out
}

/// All presentations with `1..=max_n` vertices and orders from `alphabet`,
/// one per isomorphism class of vertex-labelled graphs. Labels are listed in
/// nondecreasing alphabet position and the representative edge mask is the
/// least in its orbit under label-preserving permutations.
pub fn exhaustive_up_to_iso(max_n: usize, alphabet: &[Order]) -> Vec<Presentation> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let pairs = pair_index(n);
        let mut slot = vec![vec![0usize; n]; n];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            slot[i][j] = k;
            slot[j][i] = k;
        }
        for labels in all_sequences(n, alphabet.len(), true) {
            let perms = label_preserving_perms(&labels);
            let tables: Vec<Vec<usize>> = perms
                .iter()
                .map(|perm| pairs.iter().map(|&(i, j)| slot[perm[i]][perm[j]]).collect())
                .collect();
            let orders: Vec<Order> = labels.iter().map(|&i| alphabet[i]).collect();
            for mask in 0..1u64 << pairs.len() {
                let minimal = tables.iter().all(|t| {
                    let mut image = 0u64;
                    for (k, &to) in t.iter().enumerate() {
                        if mask >> k & 1 == 1 {
                            image |= 1 << to;
                        }
                    }
                    image >= mask
                });
                if minimal {
                    out.push(from_mask(&orders, mask));
                }
            }
        }
    }
    out
}

/// A random presentation with `n` vertices, orders drawn from `alphabet` and
/// each edge present with probability `edge_prob`.
pub fn random_presentation<R: Rng>(
    rng: &mut R,
    n: usize,
    alphabet: &[Order],
    edge_prob: f64,
) -> Presentation {
    let orders: Vec<Order> = (0..n)
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
        .collect();
    let mut mask = 0u64;
    for k in 0..pair_index(n).len() {
        if rng.gen_bool(edge_prob) {
            mask |= 1 << k;
        }
    }
    from_mask(&orders, mask)
}

/// `count` seeded random presentations with `1..=max_n` vertices.
pub fn random_corpus(count: usize, max_n: usize, alphabet: &[Order], seed: u64) -> Vec<Presentation> {
    let mut rng = substream(seed, "corpus");
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_n);
            let prob = rng.gen_range(0.2..0.8);
            random_presentation(&mut rng, n, alphabet, prob)
        })
        .collect()
}

/// Distinct presentations of a list, keeping first occurrences.
pub fn dedup(list: Vec<Presentation>) -> Vec<Presentation> {
    let mut seen = HashSet::new();
    list.into_iter().filter(|p| seen.insert(p.to_json())).collect()
}
