//! Brute-force references shared by the integration and acceptance tests.
//!
//! Everything here enumerates paths as bit strings (bit `k` set means step `k`
//! is `e1`) and never calls the library's dynamic programming.

#![allow(dead_code)]

use polymerlab::env::{Site, WeightField};

/// Stable `β⁻¹ log Σ exp(β s)`; `beta = ∞` gives the maximum.
pub fn soft_max(beta: f64, xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if beta.is_infinite() || m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (beta * (x - m)).exp()).sum();
    m + s.ln() / beta
}

/// Sites visited by the path from `x` encoded by `mask` over `n` steps.
pub fn decode(x: Site, mask: u32, n: u32) -> Vec<Site> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut s = x;
    out.push(s);
    for k in 0..n {
        s = if mask >> k & 1 == 1 {
            Site::new(s.u + 1, s.v)
        } else {
            Site::new(s.u, s.v + 1)
        };
        out.push(s);
    }
    out
}

/// Weight of a path: every site but the last.
pub fn path_weight(field: &WeightField, sites: &[Site]) -> f64 {
    sites[..sites.len() - 1].iter().map(|&s| field.at(s)).sum()
}

/// `F_{x,y}` by listing every path.
pub fn brute_p2p(field: &WeightField, x: Site, y: Site, beta: f64) -> f64 {
    let (a, b) = (y.u - x.u, y.v - x.v);
    let n = (a + b) as u32;
    let mut ws = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as i64 == a {
            ws.push(path_weight(field, &decode(x, mask, n)));
        }
    }
    soft_max(beta, &ws)
}

/// `F^h_{x,(x.level + n)}` by listing every path.
pub fn brute_p2l(field: &WeightField, x: Site, n: u32, beta: f64, h: [f64; 2]) -> f64 {
    let mut ws = Vec::with_capacity(1 << n);
    for mask in 0u32..(1u32 << n) {
        let sites = decode(x, mask, n);
        let end = sites[sites.len() - 1];
        let bonus = h[0] * (end.u - x.u) as f64 + h[1] * (end.v - x.v) as f64;
        ws.push(path_weight(field, &sites) + bonus);
    }
    soft_max(beta, &ws)
}

/// `C(n, k) / 2ⁿ` by multiplying exact ratios.
pub fn binomial_half(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut p = 1.0f64;
    for i in 0..k {
        p *= (n - i) as f64 / (k - i) as f64;
    }
    p / 2f64.powi(n as i32)
}

/// `−t log t − (1 − t) log(1 − t)`.
pub fn entropy(t: f64) -> f64 {
    let f = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    f(t) + f(1.0 - t)
}

/// Probability that a lazy walk on `Z` (steps ±1 with probability ¼ each)
/// started at `d` has not hit 0 within `steps` steps.
pub fn lazy_walk_survival(d: usize, steps: usize) -> f64 {
    let width = d + steps + 2;
    let mut p = vec![0.0; width];
    p[d] = 1.0;
    for _ in 0..steps {
        let mut q = vec![0.0; width];
        for i in 1..width - 1 {
            let m = p[i];
            if m == 0.0 {
                continue;
            }
            q[i] += 0.5 * m;
            q[i + 1] += 0.25 * m;
            q[i - 1] += 0.25 * m;
        }
        q[0] = 0.0;
        p = q;
    }
    p.iter().sum()
}
