//! Radial weights on ℝ^d: power |x|^α, polynomial ⟨x⟩^s, decaying ⟨x⟩^{-u}, and the
//! derived weights built from them (ω = υ^{-1/p'}, powers, and x ↦ |x|^δ w(1/|x|)).
//! Also the sampled Muckenhoupt A_p check.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    bracket, conjugate, graded_breaks, norm2, pairwise_sum, panel_rule, sphere_area,
    uniform_breaks, unit_ball_volume,
};

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Constant,
    /// |x|^α.
    Power(f64),
    /// ⟨x⟩^s.
    BracketPoly(f64),
    /// ⟨x⟩^{-u}.
    BracketDecay(f64),
    /// υ^{-1/p'}; `p_conj` stores p'.
    Derived { upsilon: Box<WeightSpec>, p_conj: f64 },
    /// base^e.
    Raised { base: Box<WeightSpec>, exponent: f64 },
    /// |x|^δ · base(1/|x|).
    Reflected { base: Box<WeightSpec>, delta: f64 },
}

impl WeightSpec {
    pub fn power(alpha: f64) -> Self {
        if alpha == 0.0 {
            WeightSpec::Constant
        } else {
            WeightSpec::Power(alpha)
        }
    }

    pub fn raised(self, exponent: f64) -> Self {
        WeightSpec::Raised { base: Box::new(self), exponent }
    }

    pub fn reflected(self, delta: f64) -> Self {
        WeightSpec::Reflected { base: Box::new(self), delta }
    }

    /// w(x) for a point of any dimension; +∞ is possible only at x = 0.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.radial_eval(norm2(x))
    }

    /// w as a function of r = |x| ≥ 0.
    pub fn radial_eval(&self, r: f64) -> f64 {
        if r == 0.0 {
            return self.value_at_origin();
        }
        match self {
            WeightSpec::Constant => 1.0,
            WeightSpec::Power(a) => r.powf(*a),
            WeightSpec::BracketPoly(s) => bracket(r).powf(*s),
            WeightSpec::BracketDecay(u) => bracket(r).powf(-*u),
            WeightSpec::Derived { upsilon, p_conj } => upsilon.radial_eval(r).powf(-1.0 / p_conj),
            WeightSpec::Raised { base, exponent } => base.radial_eval(r).powf(*exponent),
            WeightSpec::Reflected { base, delta } => {
                if r.is_infinite() {
                    return self.limit_from_exponent(self.exponent_at_infinity(), f64::INFINITY);
                }
                r.powf(*delta) * base.radial_eval(1.0 / r)
            }
        }
    }

    fn value_at_origin(&self) -> f64 {
        let e = self.exponent_at_zero();
        if e < 0.0 {
            f64::INFINITY
        } else if e > 0.0 {
            0.0
        } else {
            match self {
                WeightSpec::Constant | WeightSpec::Power(_) => 1.0,
                WeightSpec::BracketPoly(_) | WeightSpec::BracketDecay(_) => 1.0,
                WeightSpec::Derived { upsilon, p_conj } => upsilon.value_at_origin().powf(-1.0 / p_conj),
                WeightSpec::Raised { base, exponent } => base.value_at_origin().powf(*exponent),
                WeightSpec::Reflected { .. } => self.radial_eval(1e-150),
            }
        }
    }

    fn limit_from_exponent(&self, e: f64, _r: f64) -> f64 {
        if e > 0.0 {
            f64::INFINITY
        } else if e < 0.0 {
            0.0
        } else {
            self.radial_eval(1e150)
        }
    }

    /// β with w(x) ≍ |x|^β as x → 0.
    pub fn exponent_at_zero(&self) -> f64 {
        match self {
            WeightSpec::Constant | WeightSpec::BracketPoly(_) | WeightSpec::BracketDecay(_) => 0.0,
            WeightSpec::Power(a) => *a,
            WeightSpec::Derived { upsilon, p_conj } => -upsilon.exponent_at_zero() / p_conj,
            WeightSpec::Raised { base, exponent } => exponent * base.exponent_at_zero(),
            WeightSpec::Reflected { base, delta } => delta - base.exponent_at_infinity(),
        }
    }

    /// β with w(x) ≍ |x|^β as |x| → ∞.
    pub fn exponent_at_infinity(&self) -> f64 {
        match self {
            WeightSpec::Constant => 0.0,
            WeightSpec::Power(a) => *a,
            WeightSpec::BracketPoly(s) => *s,
            WeightSpec::BracketDecay(u) => -u,
            WeightSpec::Derived { upsilon, p_conj } => -upsilon.exponent_at_infinity() / p_conj,
            WeightSpec::Raised { base, exponent } => exponent * base.exponent_at_infinity(),
            WeightSpec::Reflected { base, delta } => delta - base.exponent_at_zero(),
        }
    }

    /// Some(α) when w = |x|^α exactly (constant weights give α = 0).
    pub fn as_power(&self) -> Option<f64> {
        match self {
            WeightSpec::Constant => Some(0.0),
            WeightSpec::Power(a) => Some(*a),
            WeightSpec::BracketPoly(s) | WeightSpec::BracketDecay(s) if *s == 0.0 => Some(0.0),
            WeightSpec::BracketPoly(_) | WeightSpec::BracketDecay(_) => None,
            WeightSpec::Derived { upsilon, p_conj } => upsilon.as_power().map(|a| -a / p_conj),
            WeightSpec::Raised { base, exponent } => base.as_power().map(|a| a * exponent),
            WeightSpec::Reflected { base, delta } => base.as_power().map(|a| delta - a),
        }
    }

    /// True when w is singular (infinite) at the origin.
    pub fn is_singular(&self) -> bool {
        self.exponent_at_zero() < 0.0
    }

    /// True when w(r) is non-decreasing in r, checked on a logarithmic scan of [1e-8, 1e8].
    pub fn is_radial_nondecreasing(&self) -> bool {
        if let Some(a) = self.as_power() {
            return a >= 0.0;
        }
        let mut prev = 0.0f64;
        for k in 0..=640 {
            let r = 10f64.powf(-8.0 + k as f64 / 40.0);
            let v = self.radial_eval(r);
            if v < prev * (1.0 - 1e-12) {
                return false;
            }
            prev = v;
        }
        true
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Constant => write!(f, "const"),
            WeightSpec::Power(a) => write!(f, "pow:{a}"),
            WeightSpec::BracketPoly(s) => write!(f, "bracket:{s}"),
            WeightSpec::BracketDecay(u) => write!(f, "decay:{u}"),
            WeightSpec::Derived { upsilon, p_conj } => {
                write!(f, "derived:{upsilon}:p={}", conjugate(*p_conj))
            }
            WeightSpec::Raised { base, exponent } => write!(f, "raised:{base}:e={exponent}"),
            WeightSpec::Reflected { base, delta } => write!(f, "reflected:{base}:delta={delta}"),
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    /// Parses `const`, `pow:-0.5`, `bracket:2`, `decay:3`, `derived:pow:1.0:p=2`,
    /// `raised:<weight>:e=0.5` and `reflected:<weight>:delta=0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad weight '{s}'"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let nested = |key: &str| -> Result<(WeightSpec, f64)> {
            let (inner, tail) = rest.rsplit_once(':').ok_or_else(bad)?;
            let v = tail.strip_prefix(key).and_then(|t| t.strip_prefix('=')).ok_or_else(bad)?;
            Ok((inner.parse()?, num(v)?))
        };
        let w = match head {
            "const" | "1" if rest.is_empty() => WeightSpec::Constant,
            "pow" => WeightSpec::Power(num(rest)?),
            "bracket" => WeightSpec::BracketPoly(num(rest)?),
            "decay" => WeightSpec::BracketDecay(num(rest)?),
            "derived" => {
                let (upsilon, p) = nested("p")?;
                return sobolev_weight_from_upsilon(&upsilon, p).map_err(|e| Error::Parse(e.to_string()));
            }
            "raised" => {
                let (base, e) = nested("e")?;
                base.raised(e)
            }
            "reflected" => {
                let (base, delta) = nested("delta")?;
                base.reflected(delta)
            }
            _ => return Err(bad()),
        };
        let finite = match &w {
            WeightSpec::Power(v) | WeightSpec::BracketPoly(v) | WeightSpec::BracketDecay(v) => v.is_finite(),
            _ => true,
        };
        if finite {
            Ok(w)
        } else {
            Err(bad())
        }
    }
}

impl Serialize for WeightSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for WeightSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// ω = υ^{-1/p'} with p' = p/(p-1), for p ∈ (1, ∞).
pub fn sobolev_weight_from_upsilon(upsilon: &WeightSpec, p: f64) -> Result<WeightSpec> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("p must lie in (1, ∞), got {p}")));
    }
    Ok(WeightSpec::Derived { upsilon: Box::new(upsilon.clone()), p_conj: conjugate(p) })
}

/// A ball {x : |x - center| ≤ radius}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// ∫_B w for a radial weight w, or +∞ when the integral diverges.
pub fn ball_integral(w: &WeightSpec, ball: &Ball) -> Result<f64> {
    let d = ball.center.len();
    if d == 0 || d > 3 {
        return Err(Error::Parameter(format!("ball integrals are implemented for d ∈ {{1,2,3}}, got {d}")));
    }
    if !(ball.radius > 0.0 && ball.radius.is_finite()) {
        return Err(Error::Parameter(format!("ball radius must be positive, got {}", ball.radius)));
    }
    let r = ball.radius;
    let dist = norm2(&ball.center);
    let beta = w.exponent_at_zero();
    let df = d as f64;
    if dist <= r && beta + df <= 0.0 {
        return Ok(f64::INFINITY);
    }
    if let Some(alpha) = w.as_power() {
        if d == 1 {
            return Ok(power_interval_integral(alpha, ball.center[0] - r, ball.center[0] + r));
        }
        if dist == 0.0 {
            return Ok(sphere_area(d) * r.powf(alpha + df) / (alpha + df));
        }
    }
    Ok(radial_ball_quadrature(w, d, dist, r))
}

/// ∫_a^b |x|^α dx from the antiderivative sign(x)|x|^{α+1}/(α+1).
fn power_interval_integral(alpha: f64, a: f64, b: f64) -> f64 {
    if alpha == 0.0 {
        return b - a;
    }
    if a < 0.0 && b > 0.0 && alpha <= -1.0 {
        return f64::INFINITY;
    }
    let anti = |x: f64| x.signum() * x.abs().powf(alpha + 1.0) / (alpha + 1.0);
    if (a == 0.0 || b == 0.0) && alpha <= -1.0 {
        return f64::INFINITY;
    }
    anti(b) - anti(a)
}

/// Angular measure of {θ ∈ S^{d-1} : ρθ ∈ B(D e₁, R)}.
fn cap_measure(d: usize, rho: f64, dist: f64, r: f64) -> f64 {
    if rho + dist <= r {
        return sphere_area(d);
    }
    if rho >= dist + r || rho <= dist - r {
        return 0.0;
    }
    let c = ((rho * rho + dist * dist - r * r) / (2.0 * rho * dist)).clamp(-1.0, 1.0);
    match d {
        1 => {
            // The two points ±ρ on the line; +ρ is closer to the centre D ≥ 0.
            let plus = (rho - dist).abs() <= r;
            let minus = (rho + dist).abs() <= r;
            (plus as u8 + minus as u8) as f64
        }
        2 => 2.0 * c.acos(),
        _ => 2.0 * PI * (1.0 - c),
    }
}

const RADIAL_NODES: usize = 20;

/// ∫_0^{D+R} w(ρ) ρ^{d-1} A(ρ) dρ, with A the angular measure of the sphere of radius ρ
/// inside the ball.
fn radial_ball_quadrature(w: &WeightSpec, d: usize, dist: f64, r: f64) -> f64 {
    let beta = w.exponent_at_zero();
    let df = d as f64;
    let integrand = |rho: f64| w.radial_eval(rho) * rho.powi(d as i32 - 1) * cap_measure(d, rho, dist, r);
    let mut total = Vec::new();
    let lower = (dist - r).abs();
    let upper = dist + r;
    if dist < r {
        total.push(graded_origin_integral(&integrand, r - dist, beta + df));
    }
    if dist > 0.0 {
        let mid = 0.5 * (lower + upper);
        if lower <= 1e-14 * upper {
            // The sphere through the origin: A is smooth at 0, the weight may not be.
            total.push(graded_origin_integral(&integrand, mid, beta + df));
        } else {
            // ρ = a + u², which removes the square-root behaviour of A at ρ = a.
            let h = (mid - lower).sqrt();
            let floor = 1e-3 * lower.sqrt();
            let levels = ((h / floor).log2().ceil().max(0.0) as usize).min(60);
            let breaks = if levels > 0 && w.is_singular() { graded_breaks(h, levels) } else { uniform_breaks(0.0, h, h / 8.0) };
            let mut breaks = breaks;
            if breaks[0] > 0.0 {
                breaks.insert(0, 0.0);
            }
            total.push(substituted(&integrand, &breaks, |u| lower + u * u));
        }
        let h = (upper - mid).sqrt();
        total.push(substituted(&integrand, &uniform_breaks(0.0, h, h / 8.0), |u| upper - u * u));
    }
    pairwise_sum(&total)
}

fn substituted<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(f: &F, breaks: &[f64], rho: G) -> f64 {
    let (us, ws) = panel_rule(breaks, RADIAL_NODES);
    let terms: Vec<f64> = us.iter().zip(&ws).map(|(u, wt)| wt * 2.0 * u * f(rho(*u))).collect();
    pairwise_sum(&terms)
}

/// ∫_0^b F where F(ρ) ≍ ρ^{e-1} near 0 (e > 0): geometric panels toward 0, plus the
/// power-law remainder F(ε)ε/e on [0, ε].
fn graded_origin_integral<F: Fn(f64) -> f64>(f: &F, b: f64, e: f64) -> f64 {
    let levels = 60;
    let breaks = graded_breaks(b, levels);
    let (xs, ws) = panel_rule(&breaks, RADIAL_NODES);
    let mut terms: Vec<f64> = xs.iter().zip(&ws).map(|(x, wt)| wt * f(*x)).collect();
    let eps = breaks[0];
    terms.push(f(eps) * eps / e);
    pairwise_sum(&terms)
}

/// (1/|B|) (∫_B υ)^{1/p} (∫_B υ^{1-p'})^{1/p'}; +∞ if either integral diverges.
pub fn muckenhoupt_statistic(upsilon: &WeightSpec, p: f64, ball: &Ball) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Contract(format!("Muckenhoupt exponent must satisfy 1 < p < ∞, got {p}")));
    }
    let pc = conjugate(p);
    let direct = ball_integral(upsilon, ball)?;
    let dual = ball_integral(&upsilon.clone().raised(1.0 - pc), ball)?;
    if direct.is_infinite() || dual.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let d = ball.center.len();
    let volume = unit_ball_volume(d) * ball.radius.powi(d as i32);
    Ok(direct.powf(1.0 / p) * dual.powf(1.0 / pc) / volume)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApVerdict {
    Bounded,
    Diverging,
    Inconclusive,
}

impl fmt::Display for ApVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ApVerdict::Bounded => "bounded",
            ApVerdict::Diverging => "diverging",
            ApVerdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Balls probing a radial weight: for every radius, one ball per centre offset
/// |c| = k·R with k from `offsets` (0 centres the ball at the singular point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    pub dim: usize,
    pub radii: Vec<f64>,
    pub offsets: Vec<f64>,
}

impl BallFamily {
    /// Radii 10^{-3}, 10^{-2.5}, …, 10^{3}; centres at the origin, inside, tangent-adjacent and far.
    pub fn standard(dim: usize) -> Self {
        BallFamily {
            dim,
            radii: (0..=12).map(|k| 10f64.powf(-3.0 + 0.5 * k as f64)).collect(),
            offsets: vec![0.0, 0.5, 2.0, 10.0],
        }
    }

    pub fn balls(&self) -> Vec<Ball> {
        let mut out = Vec::new();
        for &r in &self.radii {
            for &k in &self.offsets {
                let mut center = vec![0.0; self.dim];
                center[0] = k * r;
                out.push(Ball { center, radius: r });
            }
        }
        out
    }

    pub fn describe(&self) -> String {
        format!(
            "d={} radii={}..{} ({} radii) offsets={:?}",
            self.dim,
            self.radii.first().copied().unwrap_or(f64::NAN),
            self.radii.last().copied().unwrap_or(f64::NAN),
            self.radii.len(),
            self.offsets
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApReport {
    pub p: f64,
    pub family: String,
    pub balls: Vec<Ball>,
    pub statistics: Vec<f64>,
    pub supremum: f64,
    pub verdict: ApVerdict,
}

/// Statistic values above this are read as divergence.
pub const AP_CAP: f64 = 1e6;

/// Samples the A_p statistic over a ball family. Verdicts: `diverging` when some ball gives
/// +∞ or a value above [`AP_CAP`]; `bounded` when the running supremum grows by less than
/// 1% across the last decade of radii at both ends of the family; `inconclusive` otherwise.
pub fn check_ap(upsilon: &WeightSpec, p: f64, family: &BallFamily) -> Result<ApReport> {
    if family.radii.is_empty() || family.offsets.is_empty() {
        return Err(Error::Contract("ball family is empty".into()));
    }
    let balls = family.balls();
    let statistics = balls
        .iter()
        .map(|b| muckenhoupt_statistic(upsilon, p, b))
        .collect::<Result<Vec<_>>>()?;
    let supremum = statistics.iter().copied().fold(0.0, f64::max);
    let per_radius: Vec<f64> = statistics
        .chunks(family.offsets.len())
        .map(|c| c.iter().copied().fold(0.0, f64::max))
        .collect();
    let verdict = if supremum.is_infinite() || supremum > AP_CAP {
        ApVerdict::Diverging
    } else if stabilizes(&family.radii, &per_radius) {
        ApVerdict::Bounded
    } else {
        ApVerdict::Inconclusive
    };
    Ok(ApReport { p, family: family.describe(), balls, statistics, supremum, verdict })
}

/// The supremum over radii outside the first and last decade differs from the full
/// supremum by less than 1%.
fn stabilizes(radii: &[f64], per_radius: &[f64]) -> bool {
    let (lo, hi) = (radii[0], radii[radii.len() - 1]);
    let full = per_radius.iter().copied().fold(0.0, f64::max);
    let inner = radii
        .iter()
        .zip(per_radius)
        .filter(|(r, _)| **r >= lo * 10.0 * (1.0 - 1e-12) && **r <= hi / 10.0 * (1.0 + 1e-12))
        .map(|(_, v)| *v)
        .fold(0.0, f64::max);
    inner > 0.0 && full <= inner * 1.01
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundReport {
    pub holds: bool,
    pub worst_ratio: f64,
}

/// Checks υ(x) ≥ ⟨1/|x|⟩^{-γp'} at every sample and reports the smallest ratio υ/bound.
pub fn lower_bound_check(upsilon: &WeightSpec, gamma: f64, p: f64, samples: &[Vec<f64>]) -> Result<LowerBoundReport> {
    let pc = conjugate(p);
    let mut worst = f64::INFINITY;
    for x in samples {
        let r = norm2(x);
        if r == 0.0 {
            return Err(Error::Contract("lower-bound samples must avoid the origin".into()));
        }
        let bound = bracket(1.0 / r).powf(-gamma * pc);
        worst = worst.min(upsilon.radial_eval(r) / bound);
    }
    Ok(LowerBoundReport { holds: worst >= 1.0, worst_ratio: worst })
}

/// Closed-form statistic of |x|^α on balls centred at the origin (independent of the radius).
pub fn power_weight_centered_statistic(alpha: f64, p: f64, d: usize) -> f64 {
    let df = d as f64;
    let pc = conjugate(p);
    let dual = alpha * (1.0 - pc);
    if alpha + df <= 0.0 || dual + df <= 0.0 {
        return f64::INFINITY;
    }
    df * (alpha + df).powf(-1.0 / p) * (dual + df).powf(-1.0 / pc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parse_and_display() {
        for s in ["const", "pow:-0.5", "bracket:2", "decay:3", "derived:pow:1:p=2", "reflected:raised:pow:1:e=0.5:delta=0.25"] {
            let w: WeightSpec = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        assert!("pow:x".parse::<WeightSpec>().is_err());
        assert!("derived:pow:1:p=1".parse::<WeightSpec>().is_err());
    }

    #[test]
    fn evaluation() {
        assert_eq!(WeightSpec::BracketPoly(2.0).eval(&[1.0]), 4.0);
        assert!(WeightSpec::Power(-0.5).eval(&[0.0, 0.0]).is_infinite());
        let w: WeightSpec = "derived:const:p=3".parse().unwrap();
        assert_eq!(w.eval(&[0.3, 0.1]), 1.0);
    }

    #[test]
    fn centred_balls_match_closed_form() {
        for &(alpha, p, d) in &[(0.5, 2.0, 1usize), (-0.5, 3.0, 2), (1.0, 1.5, 2)] {
            let ball = Ball { center: vec![0.0; d], radius: 0.7 };
            let got = muckenhoupt_statistic(&WeightSpec::Power(alpha), p, &ball).unwrap();
            assert_relative_eq!(got, power_weight_centered_statistic(alpha, p, d), max_relative = 1e-12);
        }
    }

    #[test]
    fn off_centre_quadrature_matches_constant() {
        for d in 1..=3 {
            let mut center = vec![0.0; d];
            center[0] = 0.4;
            let ball = Ball { center, radius: 1.0 };
            let v = radial_ball_quadrature(&WeightSpec::Constant, d, 0.4, 1.0);
            assert_relative_eq!(v, unit_ball_volume(d), max_relative = 1e-9);
            let far = radial_ball_quadrature(&WeightSpec::Constant, d, 3.0, 1.0);
            assert_relative_eq!(far, unit_ball_volume(d), max_relative = 1e-9);
            let touching = radial_ball_quadrature(&WeightSpec::Constant, d, 1.0, 1.0);
            assert_relative_eq!(touching, unit_ball_volume(d), max_relative = 1e-9);
            assert!(ball_integral(&WeightSpec::Constant, &ball).unwrap() > 0.0);
        }
    }
}
