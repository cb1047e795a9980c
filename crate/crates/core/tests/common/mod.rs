#![allow(dead_code)]

use gpnorm_core::corpus;
use gpnorm_core::presentation::{Order, Presentation};
use gpnorm_core::sampling::{random_word_upto, substream};
use gpnorm_core::words::NormalWord;
use proptest::prelude::*;

pub const PRIMARY: [Order; 5] = [
    Order::Finite(2),
    Order::Finite(3),
    Order::Finite(4),
    Order::Finite(9),
    Order::Infinite,
];

/// Primary presentations with up to `max_n` vertices.
pub fn presentation(max_n: usize) -> impl Strategy<Value = Presentation> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(0..PRIMARY.len(), n),
                any::<u64>().prop_map(move |m| m & ((1u64 << (n * (n - 1) / 2)) - 1)),
            )
        })
        .prop_map(|(labels, mask)| {
            let orders: Vec<Order> = labels.iter().map(|&i| PRIMARY[i]).collect();
            corpus::from_mask(&orders, mask)
        })
}

pub fn words(p: &Presentation, seed: u64, count: usize, max_len: usize) -> Vec<NormalWord> {
    let mut rng = substream(seed, "test-words");
    (0..count).map(|_| random_word_upto(p, &mut rng, max_len, 5)).collect()
}
