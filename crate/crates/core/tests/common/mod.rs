#![allow(dead_code)]

use lowdim_core::{Matrix, Network};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entry that is exactly zero with probability 0.3, else uniform in [-2, 2].
fn entry(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.3) {
        0.0
    } else {
        rng.random_range(-2.0..2.0)
    }
}

/// Random network with the given layer widths `[in, h1, ..., out]`.
pub fn random_net_with(rng: &mut ChaCha8Rng, widths: &[usize]) -> Network {
    let parts = widths
        .windows(2)
        .map(|w| {
            let data = (0..w[0] * w[1]).map(|_| entry(rng)).collect();
            let bias = (0..w[1]).map(|_| entry(rng)).collect();
            (Matrix::from_row_major(w[1], w[0], data), bias)
        })
        .collect();
    Network::from_parts(parts).unwrap()
}

pub fn random_widths(
    rng: &mut ChaCha8Rng,
    input: usize,
    output: usize,
    depth: usize,
) -> Vec<usize> {
    let mut w = vec![input];
    for _ in 1..depth {
        w.push(rng.random_range(1..=5));
    }
    w.push(output);
    w
}

pub fn random_net(rng: &mut ChaCha8Rng, input: usize, output: usize, depth: usize) -> Network {
    let w = random_widths(rng, input, output, depth);
    random_net_with(rng, &w)
}

/// Straightforward forward pass over the dense weights.
pub fn reference_forward(net: &Network, x: &[f64]) -> Vec<f64> {
    let mut cur = x.to_vec();
    let last = net.depth() - 1;
    for (i, layer) in net.layers().iter().enumerate() {
        let a = layer.weight();
        let mut next = layer.bias().to_vec();
        for (r, out) in next.iter_mut().enumerate() {
            for (c, v) in cur.iter().enumerate() {
                *out += a.get(r, c) * v;
            }
        }
        if i < last {
            next.iter_mut().for_each(|v| *v = v.max(0.0));
        }
        cur = next;
    }
    cur
}

pub fn random_point(rng: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}
