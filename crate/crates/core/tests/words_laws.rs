mod common;

use std::collections::{BTreeSet, VecDeque};

use gpnorm_core::corpus;
use gpnorm_core::vertex_set::VertexSet;
use gpnorm_core::words::{
    format_word, invert, multiply, normal_form, parse_word, pow, retract, split_free_product,
    validate, NormalWord, Side, Syllable,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_axioms(p in common::presentation(5), seed in any::<u64>()) {
        let w = common::words(&p, seed, 3, 8);
        let (x, y, z) = (&w[0], &w[1], &w[2]);
        let e = NormalWord::identity();
        prop_assert_eq!(multiply(&p, &multiply(&p, x, y), z), multiply(&p, x, &multiply(&p, y, z)));
        prop_assert_eq!(&multiply(&p, x, &e), x);
        prop_assert_eq!(&multiply(&p, &e, x), x);
        prop_assert!(multiply(&p, x, &invert(&p, x)).is_identity());
        prop_assert!(validate(&p, &multiply(&p, x, y)).is_ok());
        prop_assert_eq!(pow(&p, x, 3), multiply(&p, x, &multiply(&p, x, x)));
        prop_assert_eq!(pow(&p, x, -2), invert(&p, &multiply(&p, x, x)));
    }

    #[test]
    fn literal_round_trip(p in common::presentation(5), seed in any::<u64>()) {
        for x in common::words(&p, seed, 4, 10) {
            prop_assert_eq!(parse_word(&p, &format_word(&p, &x)).unwrap(), x);
        }
    }

    #[test]
    fn retraction_is_a_homomorphism(p in common::presentation(5), seed in any::<u64>(), bits in any::<u64>()) {
        let set = VertexSet::from_bits(bits).intersection(p.all());
        let w = common::words(&p, seed, 2, 8);
        let r = |x: &NormalWord| retract(&p, set, x).unwrap();
        prop_assert_eq!(r(&multiply(&p, &w[0], &w[1])), multiply(&p, &r(&w[0]), &r(&w[1])));
        prop_assert!(r(&w[0]).support().is_subset(set));
        prop_assert_eq!(r(&r(&w[0])), r(&w[0]));
    }

    #[test]
    fn split_blocks_multiply_back(seed in any::<u64>()) {
        let p = corpus::klein_free_c3();
        let left = p.set_of(&["a", "b"]).unwrap();
        for x in common::words(&p, seed, 5, 12) {
            let form = split_free_product(&p, left, &x).unwrap();
            let back = form.factors.iter().fold(NormalWord::identity(), |acc, (_, b)| multiply(&p, &acc, b));
            prop_assert_eq!(back, x);
            for pair in form.factors.windows(2) {
                prop_assert_ne!(pair[0].0, pair[1].0);
            }
            for (side, block) in &form.factors {
                let inside = block.support().is_subset(left);
                prop_assert_eq!(inside, *side == Side::Left);
            }
        }
    }
}

/// Letters `±1, ±2, ±3` for `a, b, c` in the path RAAG.
fn commutes(x: i8, y: i8) -> bool {
    let (a, b) = (x.abs(), y.abs());
    a == b || a == 2 || b == 2
}

/// Shortest words reachable from `w` by swapping adjacent commuting letters
/// and cancelling adjacent inverse pairs.
fn reduced_class(w: Vec<i8>) -> BTreeSet<Vec<i8>> {
    let mut seen = BTreeSet::from([w.clone()]);
    let mut queue = VecDeque::from([w]);
    while let Some(u) = queue.pop_front() {
        for i in 0..u.len().saturating_sub(1) {
            let mut next = Vec::new();
            if u[i] == -u[i + 1] {
                let mut v = u.clone();
                v.drain(i..i + 2);
                next.push(v);
            } else if u[i] != u[i + 1] && commutes(u[i], u[i + 1]) {
                let mut v = u.clone();
                v.swap(i, i + 1);
                next.push(v);
            }
            for v in next {
                if seen.insert(v.clone()) {
                    queue.push_back(v);
                }
            }
        }
    }
    let min = seen.iter().map(Vec::len).min().unwrap();
    seen.into_iter().filter(|v| v.len() == min).collect()
}

#[test]
fn path_raag_matches_shuffle_oracle() {
    let p = corpus::path_raag();
    let letters = [1i8, -1, 2, -2, 3, -3];
    let mut words: Vec<Vec<i8>> = vec![vec![]];
    let mut frontier = words.clone();
    for _ in 0..5 {
        frontier = frontier
            .iter()
            .flat_map(|w| letters.iter().map(move |&l| [w.clone(), vec![l]].concat()))
            .collect();
        words.extend(frontier.iter().cloned());
    }
    let nf = |w: &[i8]| {
        let raw: Vec<Syllable> = w.iter().map(|&l| Syllable::new(l.unsigned_abs() as usize - 1, l.signum() as i64)).collect();
        normal_form(&p, &raw).unwrap()
    };
    let mut by_class = std::collections::HashMap::new();
    for w in &words {
        let class = reduced_class(w.clone());
        let form = nf(w);
        // the normal form has the reduced length
        let len: i64 = form.syllables().iter().map(|s| s.exp.abs()).sum();
        assert_eq!(len as usize, class.iter().next().unwrap().len(), "{w:?}");
        let prev = by_class.entry(class).or_insert_with(|| form.clone());
        assert_eq!(*prev, form, "{w:?}");
    }
    let forms: BTreeSet<NormalWord> = words.iter().map(|w| nf(w)).collect();
    assert_eq!(forms.len(), by_class.len());
}
