//! Domains, quadrature grids and the weighted L^p, weighted Sobolev and characteristic
//! function Fourier-Lebesgue norms built on them.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::{FreqEstimate, FreqQuadrature, FreqScheme};
use crate::error::{Error, Result};
use crate::function::SmoothFunction;
use crate::numerics::{
    bracket, geometric_breaks, graded_breaks, mean_abs_sin_power, multi_indices, norm2,
    pairwise_sum, panel_rule, sphere_area, uniform_breaks, unit_ball_volume,
};
use crate::weights::WeightSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    /// Axis-parallel box ∏ [a_j, b_j].
    Box(Vec<(f64, f64)>),
    Ball { center: Vec<f64>, radius: f64 },
    FullSpace(usize),
}

impl DomainSpec {
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Box(iv) => iv.len(),
            DomainSpec::Ball { center, .. } => center.len(),
            DomainSpec::FullSpace(d) => *d,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, DomainSpec::FullSpace(_))
    }

    pub fn volume(&self) -> f64 {
        match self {
            DomainSpec::Box(iv) => iv.iter().map(|(a, b)| b - a).product(),
            DomainSpec::Ball { center, radius } => unit_ball_volume(center.len()) * radius.powi(center.len() as i32),
            DomainSpec::FullSpace(_) => f64::INFINITY,
        }
    }

    /// R_U = sup_{x ∈ U} |x|.
    pub fn r_u(&self) -> f64 {
        match self {
            DomainSpec::Box(iv) => iv.iter().map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum::<f64>().sqrt(),
            DomainSpec::Ball { center, radius } => norm2(center) + radius,
            DomainSpec::FullSpace(_) => f64::INFINITY,
        }
    }

    /// True when the closed domain contains the origin.
    pub fn contains_origin(&self) -> bool {
        match self {
            DomainSpec::Box(iv) => iv.iter().all(|(a, b)| *a <= 0.0 && *b >= 0.0),
            DomainSpec::Ball { center, radius } => norm2(center) <= *radius,
            DomainSpec::FullSpace(_) => true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            DomainSpec::Box(iv) => !iv.is_empty() && iv.iter().all(|(a, b)| a.is_finite() && b.is_finite() && a < b),
            DomainSpec::Ball { center, radius } => {
                !center.is_empty() && center.iter().all(|c| c.is_finite()) && radius.is_finite() && *radius > 0.0
            }
            DomainSpec::FullSpace(d) => *d > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("degenerate domain {self}")))
        }
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Box(iv) => {
                let parts: Vec<String> = iv.iter().map(|(a, b)| format!("{a},{b}")).collect();
                write!(f, "box:{}", parts.join(";"))
            }
            DomainSpec::Ball { center, radius } => write!(f, "ball:{}:{radius}", join(center)),
            DomainSpec::FullSpace(d) => write!(f, "rd:{d}"),
        }
    }
}

impl FromStr for DomainSpec {
    type Err = Error;

    /// Parses `box:-1,1;-1,1`, `ball:0,0:1` and `rd:2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad domain '{s}'"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let dom = match kind {
            "box" => {
                let iv = rest
                    .split(';')
                    .map(|axis| {
                        let (a, b) = axis.split_once(',').ok_or_else(bad)?;
                        Ok((num(a)?, num(b)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                DomainSpec::Box(iv)
            }
            "ball" => {
                let (c, r) = rest.rsplit_once(':').ok_or_else(bad)?;
                let center = c.split(',').map(num).collect::<Result<Vec<_>>>()?;
                DomainSpec::Ball { center, radius: num(r)? }
            }
            "rd" => DomainSpec::FullSpace(rest.trim().parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        dom.validate().map_err(|_| bad())?;
        Ok(dom)
    }
}

impl Serialize for DomainSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DomainSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grading {
    Uniform,
    OriginGraded,
    TailTruncated,
}

/// Nodes (row-major, `dim` coordinates each) and positive weights for ∫_U · dx.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub grading: Grading,
    /// Upper bound on ∫_{|x|>T} ω^p for truncated full-space grids, 0 otherwise.
    pub tail_bound: f64,
    pub truncation: Option<f64>,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
}

/// Default panel width for bounded grids.
const PANEL: f64 = 0.25;
/// Half-width of the uniform core of full-space grids.
const CORE: f64 = 20.0;
const MAX_TRUNCATION: f64 = 1e8;
/// Relative size of the neglected tail of ∫ ⟨x⟩^{-up} on full-space grids.
const TAIL_TOLERANCE: f64 = 1e-12;

/// ∫_{|x|>T} ⟨x⟩^{-up} dx ≤ |S^{d-1}| (1+T)^{d-up} / (up - d).
pub fn tail_bound(d: usize, u: f64, p: f64, t: f64) -> Result<f64> {
    let e = u * p;
    let df = d as f64;
    if e <= df {
        return Err(Error::NonIntegrable(format!("⟨x⟩^(-{e}) is not integrable on ℝ^{d}")));
    }
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("truncation radius must be positive, got {t}")));
    }
    Ok(sphere_area(d) * bracket(t).powf(df - e) / (e - df))
}

/// Builds a grid for ∫_U |ω g|^p. Bounded domains use Gauss-Legendre panels of width at most
/// 1/4 with `resolution` nodes each. A power singularity of ω at the origin is handled by
/// geometric grading toward 0; in d = 1 the excluded interval of radius h gets a correction
/// node at ±h whose weight integrates |x|^{βp} exactly. Full space needs ω = ⟨x⟩^{-u}.
pub fn build_quadrature(dom: &DomainSpec, w: &WeightSpec, p: f64, resolution: usize) -> Result<QuadratureGrid> {
    dom.validate()?;
    if resolution == 0 {
        return Err(Error::Parameter("grid resolution must be positive".into()));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("p must lie in [1, ∞), got {p}")));
    }
    let d = dom.dim();
    let e = w.exponent_at_zero() * p;
    if dom.contains_origin() && e + d as f64 <= 0.0 {
        return Err(Error::NonIntegrable(format!(
            "|ω|^p ≍ |x|^{e} is not integrable at the origin in dimension {d}"
        )));
    }
    let singular = e < 0.0 && dom.contains_origin();
    match dom {
        DomainSpec::Box(iv) => Ok(box_grid(iv, resolution, singular.then_some(e))),
        DomainSpec::Ball { center, radius } => {
            if singular && norm2(center) > 0.0 {
                return Err(Error::Parameter(
                    "singular weights are supported only on balls centred at the origin".into(),
                ));
            }
            Ok(ball_grid(center, *radius, resolution, singular.then_some(e)))
        }
        DomainSpec::FullSpace(d) => {
            let u = match w {
                WeightSpec::BracketDecay(u) => *u,
                _ => {
                    return Err(Error::Parameter(format!(
                        "full-space grids need a decaying weight decay:u, got {w}"
                    )))
                }
            };
            full_space_grid(*d, u, p, resolution)
        }
    }
}

/// Breaks on [a, b] of width ≤ PANEL, with 0 as a break when it lies inside.
fn axis_breaks(a: f64, b: f64) -> Vec<f64> {
    if a < 0.0 && b > 0.0 {
        let mut left = uniform_breaks(a, 0.0, PANEL);
        left.extend(uniform_breaks(0.0, b, PANEL).into_iter().skip(1));
        left
    } else {
        uniform_breaks(a, b, PANEL)
    }
}

/// 1D rule on [a, b] with optional grading toward 0 for an integrand ≍ |x|^e.
/// `correct` adds the excluded-interval node (d = 1); otherwise [0, h] stays an ordinary panel.
fn axis_rule(a: f64, b: f64, n: usize, singular: Option<f64>, correct: bool, levels: usize) -> (Vec<f64>, Vec<f64>) {
    let breaks = axis_breaks(a, b);
    let Some(e) = singular else {
        return panel_rule(&breaks, n);
    };
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let (pts, wts) = if lo == 0.0 || hi == 0.0 {
            let len = hi - lo;
            let mut g = graded_breaks(len, levels);
            let h = g[0];
            if !correct {
                g.insert(0, 0.0);
            }
            let (mut pts, mut wts) = panel_rule(&g, n);
            if correct {
                pts.insert(0, h);
                wts.insert(0, h / (e + 1.0));
            }
            if hi == 0.0 {
                pts.iter_mut().for_each(|x| *x = -*x);
                pts.reverse();
                wts.reverse();
            }
            (pts, wts)
        } else {
            panel_rule(&[lo, hi], n)
        };
        xs.extend(pts);
        ws.extend(wts);
    }
    (xs, ws)
}

fn tensor(axes: &[(Vec<f64>, Vec<f64>)]) -> (Vec<f64>, Vec<f64>) {
    let d = axes.len();
    let total: usize = axes.iter().map(|a| a.0.len()).product();
    let mut nodes = Vec::with_capacity(total * d);
    let mut weights = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut w = 1.0;
        let mut point = vec![0.0; d];
        for j in (0..d).rev() {
            let m = axes[j].0.len();
            let i = rem % m;
            rem /= m;
            point[j] = axes[j].0[i];
            w *= axes[j].1[i];
        }
        nodes.extend(point);
        weights.push(w);
    }
    (nodes, weights)
}

fn box_grid(iv: &[(f64, f64)], n: usize, singular: Option<f64>) -> QuadratureGrid {
    let d = iv.len();
    let levels = if d == 1 { 40 } else { 26 };
    let axes: Vec<_> = iv.iter().map(|&(a, b)| axis_rule(a, b, n, singular, d == 1, levels)).collect();
    let (nodes, weights) = tensor(&axes);
    QuadratureGrid {
        dim: d,
        nodes,
        weights,
        grading: if singular.is_some() { Grading::OriginGraded } else { Grading::Uniform },
        tail_bound: 0.0,
        truncation: None,
    }
}

/// Angular rule on S^{d-1}: directions (row-major) and weights summing to |S^{d-1}|.
fn sphere_rule(d: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
    match d {
        1 => (vec![-1.0, 1.0], vec![1.0, 1.0]),
        2 => {
            let mut dirs = Vec::with_capacity(2 * m);
            for j in 0..m {
                let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                dirs.extend([t.cos(), t.sin()]);
            }
            (dirs, vec![2.0 * PI / m as f64; m])
        }
        3 => {
            let (zs, zw) = panel_rule(&[-1.0, 1.0], m.div_ceil(2));
            let mut dirs = Vec::new();
            let mut ws = Vec::new();
            for (z, wz) in zs.iter().zip(&zw) {
                let s = (1.0 - z * z).sqrt();
                for j in 0..m {
                    let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    dirs.extend([s * t.cos(), s * t.sin(), *z]);
                    ws.push(wz * 2.0 * PI / m as f64);
                }
            }
            (dirs, ws)
        }
        _ => unreachable!("sphere rules exist for d ≤ 3"),
    }
}

fn polar_grid(center: &[f64], rs: &[f64], rw: &[f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let d = center.len();
    let (dirs, aw) = sphere_rule(d, m);
    let mut nodes = Vec::with_capacity(rs.len() * aw.len() * d);
    let mut weights = Vec::with_capacity(rs.len() * aw.len());
    for (r, w) in rs.iter().zip(rw) {
        let jac = r.powi(d as i32 - 1);
        for (dir, a) in dirs.chunks_exact(d).zip(&aw) {
            nodes.extend(center.iter().zip(dir).map(|(c, u)| c + r * u));
            weights.push(w * jac * a);
        }
    }
    (nodes, weights)
}

fn angular_count(radius: f64, n: usize) -> usize {
    ((8.0 * PI * radius * n as f64).ceil() as usize).max(32)
}

fn ball_grid(center: &[f64], radius: f64, n: usize, singular: Option<f64>) -> QuadratureGrid {
    let d = center.len();
    if d == 1 {
        let c = center[0];
        let mut g = box_grid(&[(c - radius, c + radius)], n, singular);
        g.grading = if singular.is_some() { Grading::OriginGraded } else { Grading::Uniform };
        return g;
    }
    let (mut rs, mut rw) = match singular {
        Some(_) => {
            let g = graded_breaks(PANEL.min(radius), 40);
            let mut breaks = g;
            if radius > PANEL {
                breaks.extend(uniform_breaks(PANEL, radius, PANEL).into_iter().skip(1));
            }
            panel_rule(&breaks, n)
        }
        None => panel_rule(&uniform_breaks(0.0, radius, PANEL), n),
    };
    if let Some(e) = singular {
        // ∫_0^h r^{e+d-1} dr = h^{e+d}/(e+d); the node at r = h carries the Jacobian h^{d-1}.
        let h = if radius > PANEL { PANEL * 0.5f64.powi(40) } else { radius * 0.5f64.powi(40) };
        rs.insert(0, h);
        rw.insert(0, h / (e + d as f64));
    }
    let (nodes, weights) = polar_grid(center, &rs, &rw, angular_count(radius, n));
    QuadratureGrid {
        dim: d,
        nodes,
        weights,
        grading: if singular.is_some() { Grading::OriginGraded } else { Grading::Uniform },
        tail_bound: 0.0,
        truncation: None,
    }
}

fn full_space_grid(d: usize, u: f64, p: f64, n: usize) -> Result<QuadratureGrid> {
    if d > 3 {
        return Err(Error::Parameter(format!("full-space grids are implemented for d ≤ 3, got {d}")));
    }
    let total = crate::numerics::bracket_decay_integral(d, u * p);
    let mut t = CORE;
    let mut tail = tail_bound(d, u, p, t)?;
    while tail > TAIL_TOLERANCE * total && t < MAX_TRUNCATION {
        t *= 2.0;
        tail = tail_bound(d, u, p, t)?;
    }
    let mut radial = uniform_breaks(0.0, CORE, PANEL);
    radial.extend(geometric_breaks(CORE, t, 1.25).into_iter().skip(1));
    let (nodes, weights) = if d == 1 {
        let mut breaks: Vec<f64> = radial.iter().rev().map(|r| -r).collect();
        breaks.extend(radial.iter().skip(1));
        panel_rule(&breaks, n)
    } else {
        let (rs, rw) = panel_rule(&radial, n);
        polar_grid(&vec![0.0; d], &rs, &rw, (16 * n).max(64))
    };
    Ok(QuadratureGrid { dim: d, nodes, weights, grading: Grading::TailTruncated, tail_bound: tail, truncation: Some(t) })
}

/// A norm value with the declared truncation uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub tail_bound: f64,
}

/// The weighted Sobolev norm (Σ_{|α|≤ℓ} ∫ |ω ∂^α g|^p)^{1/p} prepared on a fixed grid, so that
/// many functions can be measured with the same nodes and weight values.
#[derive(Debug, Clone)]
pub struct SobolevNorm {
    grid: QuadratureGrid,
    scaled_weights: Vec<f64>,
    alphas: Vec<Vec<u32>>,
    p: f64,
    /// Indices of nodes in the outer half of a truncated grid.
    outer: Vec<usize>,
}

impl SobolevNorm {
    pub fn new(grid: QuadratureGrid, w: &WeightSpec, ell: usize, p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("p must lie in [1, ∞), got {p}")));
        }
        let mut scaled_weights = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let om = w.eval(grid.node(i));
            if !om.is_finite() {
                return Err(Error::Evaluation(format!("weight {w} is infinite at a grid node")));
            }
            scaled_weights.push(grid.weights[i] * om.powf(p));
        }
        let outer = match grid.truncation {
            Some(t) => (0..grid.len()).filter(|&i| norm2(grid.node(i)) >= 0.5 * t).collect(),
            None => Vec::new(),
        };
        let alphas = multi_indices(grid.dim, ell);
        Ok(SobolevNorm { grid, scaled_weights, alphas, p, outer })
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn order(&self) -> usize {
        self.alphas.last().map(|a| crate::numerics::order(a)).unwrap_or(0)
    }

    /// Σ_i W_i |∂^α g(x_i)|^p for every α, plus the tail estimate.
    pub fn estimate<G: SmoothFunction + ?Sized>(&self, g: &G) -> Result<NormEstimate> {
        crate::error::check_dim(self.grid.dim, g.dim())?;
        let mut vals = vec![0.0; self.grid.len()];
        let mut per_alpha = Vec::with_capacity(self.alphas.len());
        let mut outer_max = 0.0f64;
        for alpha in &self.alphas {
            g.partial_on(alpha, &self.grid.nodes, &mut vals)?;
            if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
                return Err(Error::Evaluation(format!("∂^{alpha:?} g at {:?}", self.grid.node(i))));
            }
            let terms: Vec<f64> = vals.iter().zip(&self.scaled_weights).map(|(v, w)| w * v.abs().powf(self.p)).collect();
            per_alpha.push(pairwise_sum(&terms));
            let m = self.outer.iter().map(|&i| vals[i].abs()).fold(0.0, f64::max);
            outer_max += m.powf(self.p);
        }
        let sum = pairwise_sum(&per_alpha);
        let value = sum.powf(1.0 / self.p);
        let tail = if self.grid.tail_bound > 0.0 {
            ((sum + self.grid.tail_bound * outer_max).powf(1.0 / self.p) - value).max(0.0)
        } else {
            0.0
        };
        Ok(NormEstimate { value, tail_bound: tail })
    }

    pub fn eval<G: SmoothFunction + ?Sized>(&self, g: &G) -> Result<f64> {
        Ok(self.estimate(g)?.value)
    }
}

/// ‖ω g‖_{L^p} on the grid.
pub fn weighted_lp_norm<G: SmoothFunction + ?Sized>(g: &G, w: &WeightSpec, p: f64, grid: &QuadratureGrid) -> Result<f64> {
    weighted_sobolev_norm(g, 0, p, w, grid)
}

/// (Σ_{|α|≤ℓ} ‖ω ∂^α g‖_{L^p}^p)^{1/p} on the grid.
pub fn weighted_sobolev_norm<G: SmoothFunction + ?Sized>(
    g: &G,
    ell: usize,
    p: f64,
    w: &WeightSpec,
    grid: &QuadratureGrid,
) -> Result<f64> {
    Ok(weighted_sobolev_estimate(g, ell, p, w, grid)?.value)
}

pub fn weighted_sobolev_estimate<G: SmoothFunction + ?Sized>(
    g: &G,
    ell: usize,
    p: f64,
    w: &WeightSpec,
    grid: &QuadratureGrid,
) -> Result<NormEstimate> {
    SobolevNorm::new(grid.clone(), w, ell, p)?.estimate(g)
}

/// ‖ω‖_{L^p(U)}.
pub fn weight_lp_norm(w: &WeightSpec, p: f64, grid: &QuadratureGrid) -> Result<f64> {
    let mut terms = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let om = w.eval(grid.node(i));
        if !om.is_finite() {
            return Err(Error::Evaluation(format!("weight {w} is infinite at a grid node")));
        }
        terms.push(grid.weights[i] * om.powf(p));
    }
    Ok(pairwise_sum(&terms).powf(1.0 / p))
}

/// CSV header matching [`norm_csv_row`].
pub const NORM_CSV_HEADER: &str = "domain,weight,ell,p,value,tail_bound";

pub fn norm_csv_row(dom: &DomainSpec, w: &WeightSpec, ell: usize, p: f64, est: &NormEstimate) -> String {
    format!("\"{dom}\",\"{w}\",{ell},{p},{:.16e},{:.6e}", est.value, est.tail_bound)
}

// ---------------------------------------------------------------------------
// Characteristic functions on the frequency side
// ---------------------------------------------------------------------------

/// Frequencies are integrated out to k·(half-width) ≈ this value; beyond it the
/// asymptotic form with the mean of |sin|^q is used.
const CHI_CUTOFF: f64 = 2000.0;
const CHI_NODES: usize = 16;

/// ‖⟨·⟩^γ χ̂_U‖_{L^q} for a box or ball U, q ∈ (1, ∞] (q = 1 diverges for every bounded U).
/// Box transforms are sinc products; ball transforms come from the radial integral
/// (2π)^{-d/2} ∫_{-R}^{R} V_{d-1} (R² - t²)^{(d-1)/2} cos(kt) dt.
pub fn char_fn_fl_norm(dom: &DomainSpec, q: f64, gamma: f64) -> Result<FreqEstimate> {
    dom.validate()?;
    if !(q >= 1.0) {
        return Err(Error::Parameter(format!("q must lie in [1, ∞], got {q}")));
    }
    if gamma < 0.0 || !gamma.is_finite() {
        return Err(Error::Parameter(format!("γ must be a nonnegative real, got {gamma}")));
    }
    match dom {
        DomainSpec::FullSpace(_) => Err(Error::Parameter("χ_U needs a bounded domain".into())),
        DomainSpec::Box(iv) if iv.len() == 1 => {
            let len = iv[0].1 - iv[0].0;
            box_axis_norm(len, q, gamma)
        }
        DomainSpec::Ball { center, radius } if center.len() == 1 => box_axis_norm(2.0 * radius, q, gamma),
        DomainSpec::Box(iv) => {
            if gamma != 0.0 {
                return Err(Error::Parameter(
                    "weighted χ̂ norms of boxes are implemented in d = 1 and for γ = 0".into(),
                ));
            }
            // |χ̂| is a product over the axes, so the L^q norm is too.
            let mut value = 1.0;
            let mut rel_tail = 0.0;
            let mut quad = None;
            for (a, b) in iv {
                let est = box_axis_norm(b - a, q, 0.0)?;
                value *= est.value;
                rel_tail += est.quadrature.tail_bound / est.value.max(f64::MIN_POSITIVE);
                quad.get_or_insert(est.quadrature);
            }
            let mut quadrature = quad.expect("at least one axis");
            quadrature.scheme = FreqScheme::Tensor;
            quadrature.tail_bound = rel_tail * value;
            Ok(FreqEstimate { value, quadrature })
        }
        DomainSpec::Ball { center, radius } => ball_norm(center.len(), *radius, q, gamma),
    }
}

/// The 1D interval of length L: |χ̂(k)| = (2π)^{-1/2} |2 sin(Lk/2)/k|.
fn box_axis_norm(len: f64, q: f64, gamma: f64) -> Result<FreqEstimate> {
    let amp = 2.0 / (2.0 * PI).sqrt();
    let chi = |k: f64| {
        if k == 0.0 {
            len / (2.0 * PI).sqrt()
        } else {
            amp * ((0.5 * len * k).sin() / k).abs()
        }
    };
    let half_period = 2.0 * PI / len;
    radial_profile_norm(1, q, gamma, chi, half_period, 1.0, amp, 0.5 * len)
}

/// χ̂ of the ball of radius R in d ≥ 2 at frequency k, via t = R sin φ.
fn ball_transform(d: usize, r: f64, k: f64) -> f64 {
    let z = k * r;
    if d == 3 {
        // (sin z − z cos z)/z³, with its series near 0.
        let g = if z.abs() < 1e-2 {
            let z2 = z * z;
            1.0 / 3.0 - z2 / 30.0 + z2 * z2 / 840.0
        } else {
            (z.sin() - z * z.cos()) / z.powi(3)
        };
        return (2.0 * PI).powf(-1.5) * 4.0 * PI * r.powi(3) * g;
    }
    let c = (2.0 * PI).powf(-(d as f64) / 2.0) * unit_ball_volume(d - 1) * r.powi(d as i32);
    let n = (z.abs() as usize) + 50;
    // cos^d φ cos(z sin φ) has period π for even d: the trapezoid rule converges geometrically.
    let h = PI / n as f64;
    let integral = (0..n)
        .map(|j| {
            let phi = -0.5 * PI + j as f64 * h;
            phi.cos().powi(d as i32) * (z * phi.sin()).cos()
        })
        .sum::<f64>()
        * h;
    c * integral
}

fn ball_norm(d: usize, r: f64, q: f64, gamma: f64) -> Result<FreqEstimate> {
    if d > 3 {
        return Err(Error::Parameter(format!("ball transforms are implemented for d ≤ 3, got {d}")));
    }
    let amp = r.powf((d as f64 - 1.0) / 2.0) * (2.0 / PI).sqrt();
    let decay = (d as f64 + 1.0) / 2.0;
    radial_profile_norm(d, q, gamma, |k| ball_transform(d, r, k).abs(), PI / r, decay, amp, r)
}

/// ‖⟨·⟩^γ F‖_{L^q(ℝ^d)} for a radial profile F(k) with asymptotics F ≈ A k^{-decay}|sin(·)|.
/// Panels follow the oscillation (one per half period) up to k·scale = CHI_CUTOFF.
#[allow(clippy::too_many_arguments)]
fn radial_profile_norm<F: Fn(f64) -> f64>(
    d: usize,
    q: f64,
    gamma: f64,
    profile: F,
    half_period: f64,
    decay: f64,
    amp: f64,
    scale: f64,
) -> Result<FreqEstimate> {
    let df = d as f64;
    let finite = if q.is_infinite() { gamma <= decay } else { q * (decay - gamma) > df };
    if !finite {
        return Err(Error::Diverging(format!(
            "⟨ξ⟩^{gamma} χ̂_U is not in L^{q}: χ̂_U decays like |ξ|^(-{decay})"
        )));
    }
    let t = CHI_CUTOFF / scale;
    let mut breaks = vec![0.0];
    let mut k = half_period;
    while k < t {
        breaks.push(k);
        k += half_period;
    }
    breaks.push(k);
    let t = k;
    let weight = |k: f64| bracket(k).powf(gamma);
    if q.is_infinite() {
        let (ks, _) = panel_rule(&breaks, CHI_NODES);
        let value = ks.iter().chain(breaks.iter()).map(|&k| weight(k) * profile(k)).fold(0.0, f64::max);
        let tail_sup = amp * bracket(t).powf(gamma) * t.powf(-decay);
        return Ok(FreqEstimate {
            value: value.max(tail_sup),
            quadrature: FreqQuadrature {
                scheme: FreqScheme::RadialProduct,
                truncation: t,
                nodes_per_axis: CHI_NODES,
                tail_bound: tail_sup,
            },
        });
    }
    let area = sphere_area(d);
    let (ks, ws) = panel_rule(&breaks, CHI_NODES);
    let terms: Vec<f64> = ks
        .iter()
        .zip(&ws)
        .map(|(k, w)| w * area * k.powi(d as i32 - 1) * (weight(*k) * profile(*k)).powf(q))
        .collect();
    let body = pairwise_sum(&terms);
    // ∫_T^∞ k^{d-1}(1+k)^{γq} A^q k^{-q·decay} m_q dk with (1+k)^{γq} ≈ k^{γq}(1 + γq/k).
    let e = df - 1.0 + gamma * q - q * decay;
    let tail = area * mean_abs_sin_power(q) * amp.powf(q)
        * (t.powf(e + 1.0) / (-e - 1.0) + if gamma > 0.0 { gamma * q * t.powf(e) / (-e) } else { 0.0 });
    let total = body + tail;
    let value = total.powf(1.0 / q);
    Ok(FreqEstimate {
        value,
        quadrature: FreqQuadrature {
            scheme: FreqScheme::RadialProduct,
            truncation: t,
            nodes_per_axis: CHI_NODES,
            tail_bound: value - body.powf(1.0 / q),
        },
    })
}
