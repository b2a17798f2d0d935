//! Numerical building blocks: Gauss-Legendre rules, panel layouts, special functions,
//! multi-indices and deterministic summation.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// The bracket ⟨x⟩ = 1 + |x|, evaluated on a norm or scalar.
#[inline]
pub fn bracket(r: f64) -> f64 {
    1.0 + r.abs()
}

#[inline]
pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Hölder conjugate p' with 1/p + 1/p' = 1 (1 ↔ ∞).
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Surface measure of the unit sphere S^{d-1} ⊂ ℝ^d (counting measure, i.e. 2, for d = 1).
pub fn sphere_area(d: usize) -> f64 {
    // |S^{d+1}| = 2π |S^{d-1}| / d, started from |S^0| = 2 and |S^1| = 2π.
    let mut k = if d % 2 == 1 { 1 } else { 2 };
    let mut area = if d % 2 == 1 { 2.0 } else { 2.0 * PI };
    while k < d {
        area *= 2.0 * PI / k as f64;
        k += 2;
    }
    area
}

/// Volume of the unit ball in ℝ^d (1 for d = 0).
pub fn unit_ball_volume(d: usize) -> f64 {
    if d == 0 {
        1.0
    } else {
        sphere_area(d) / d as f64
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Number of multi-indices α ∈ ℕ^d with |α| = k.
pub fn multi_index_count(d: usize, k: usize) -> f64 {
    binomial(k + d - 1, d - 1)
}

/// All multi-indices α ∈ ℕ^d with |α| ≤ max_order, ordered by total order and then
/// lexicographically (descending in the first coordinate).
pub fn multi_indices(d: usize, max_order: usize) -> Vec<Vec<u32>> {
    fn fill(rest: usize, d: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == d {
            prefix.push(rest as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=rest).rev() {
            prefix.push(a as u32);
            fill(rest - a, d, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for k in 0..=max_order {
        fill(k, d, &mut Vec::with_capacity(d), &mut out);
    }
    out
}

pub fn order(alpha: &[u32]) -> usize {
    alpha.iter().map(|&a| a as usize).sum()
}

/// Probabilists' Hermite polynomial He_k(t).
pub fn hermite_he(k: usize, t: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, t);
    if k == 0 {
        return h0;
    }
    for n in 1..k {
        let h2 = t * h1 - n as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// ∫_{ℝ^d} ⟨x⟩^{-a} dx = |S^{d-1}| Γ(d) Γ(a-d) / Γ(a); infinite when a ≤ d.
pub fn bracket_decay_integral(d: usize, a: f64) -> f64 {
    let df = d as f64;
    if a <= df {
        return f64::INFINITY;
    }
    sphere_area(d) * (ln_gamma(df) + ln_gamma(a - df) - ln_gamma(a)).exp()
}

/// Mean of |sin|^q over a period: Γ((q+1)/2) / (√π Γ(q/2 + 1)).
pub fn mean_abs_sin_power(q: f64) -> f64 {
    (ln_gamma((q + 1.0) / 2.0) - ln_gamma(q / 2.0 + 1.0)).exp() / PI.sqrt()
}

#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn compute_gauss_legendre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

/// n-point Gauss-Legendre rule on [-1, 1]; rules are cached per n.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(n, rule.clone());
    rule
}

/// Composite Gauss-Legendre rule with `n` nodes on every panel [breaks[i], breaks[i+1]].
pub fn panel_rule(breaks: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(n);
    let mut xs = Vec::with_capacity(breaks.len().saturating_sub(1) * n);
    let mut ws = Vec::with_capacity(xs.capacity());
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            xs.push(mid + half * t);
            ws.push(half * w);
        }
    }
    (xs, ws)
}

/// Equal panels on [a, b] of width at most `h`.
pub fn uniform_breaks(a: f64, b: f64, h: f64) -> Vec<f64> {
    let count = ((b - a) / h).ceil().max(1.0) as usize;
    (0..=count)
        .map(|i| a + (b - a) * i as f64 / count as f64)
        .collect()
}

/// Breaks t₀ = start, t_{k+1} = ratio·t_k, ending exactly at `end` (start > 0, ratio > 1).
pub fn geometric_breaks(start: f64, end: f64, ratio: f64) -> Vec<f64> {
    let mut out = vec![start];
    let mut t = start;
    while t * ratio < end * (1.0 - 1e-12) {
        t *= ratio;
        out.push(t);
    }
    if end > start {
        out.push(end);
    }
    out
}

/// Breaks on [0, b] graded geometrically toward 0: b·2^{-levels}, …, b/2, b.
pub fn graded_breaks(b: f64, levels: usize) -> Vec<f64> {
    let mut out: Vec<f64> = (0..=levels).rev().map(|k| b * 0.5f64.powi(k as i32)).collect();
    out.dedup();
    out
}

/// Pairwise (tree) summation with a fixed association order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// ∫_a^b f with a composite Gauss-Legendre rule on `panels` equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, n: usize) -> f64 {
    let breaks = uniform_breaks(a, b, (b - a) / panels.max(1) as f64);
    let (xs, ws) = panel_rule(&breaks, n);
    let vals: Vec<f64> = xs.iter().zip(&ws).map(|(x, w)| w * f(*x)).collect();
    pairwise_sum(&vals)
}
