//! Closed-form target functions with analytic Fourier transforms and derivatives, and
//! frequency-side norms (spectral Barron and weighted Fourier-Lebesgue).
//!
//! The Fourier transform uses the symmetric normalization
//! f̂(ξ) = (2π)^{-d/2} ∫ f(x) e^{-i⟨x,ξ⟩} dx, and ⟨ξ⟩ = 1 + |ξ|.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::function::{check_order, SmoothFunction};
use crate::numerics::{
    bracket, geometric_breaks, graded_breaks, hermite_he, norm2, pairwise_sum, panel_rule,
    sphere_area, uniform_breaks,
};

const MAX_ORDER_SMOOTH: usize = 8;
const MAX_ORDER_SPECTRUM: usize = 4;
/// |f̂| of the prescribed-spectrum entry decays like |ξ|^{-6} along the axes.
const SPECTRUM_DECAY: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    Gaussian,
    GaussianMixture,
    CauchyType,
    PrescribedSpectrum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    pub coef: f64,
    pub center: Vec<f64>,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Mixture(Vec<GaussianComponent>),
    /// Π 1/(1 + (x_i/σ)²).
    Cauchy { scale: f64 },
    /// f̂(ξ) = Π (1 + σ²ξ_i²)^{-3}.
    Spectrum { scale: f64 },
}

/// A catalog entry: a real function on ℝ^d known in closed form on both sides of the
/// Fourier transform.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetFunction {
    kind: TargetKind,
    dim: usize,
    amplitude: f64,
    shape: Shape,
}

impl TargetFunction {
    /// A·exp(-|x - c|² / (2σ²)).
    pub fn gaussian(dim: usize, scale: f64, center: Vec<f64>, amplitude: f64) -> Result<Self> {
        validate_dim(dim)?;
        validate_scale(scale)?;
        check_dim(dim, center.len())?;
        Ok(TargetFunction {
            kind: TargetKind::Gaussian,
            dim,
            amplitude,
            shape: Shape::Mixture(vec![GaussianComponent { coef: 1.0, center, scale }]),
        })
    }

    pub fn standard_gaussian(dim: usize) -> Self {
        Self::gaussian(dim, 1.0, vec![0.0; dim], 1.0).expect("valid standard Gaussian")
    }

    pub fn mixture(dim: usize, components: Vec<GaussianComponent>, amplitude: f64) -> Result<Self> {
        validate_dim(dim)?;
        if components.is_empty() {
            return Err(Error::Parameter("mixture needs at least one component".into()));
        }
        for c in &components {
            validate_scale(c.scale)?;
            check_dim(dim, c.center.len())?;
            if !c.coef.is_finite() {
                return Err(Error::Parameter("mixture coefficient must be finite".into()));
            }
        }
        Ok(TargetFunction { kind: TargetKind::GaussianMixture, dim, amplitude, shape: Shape::Mixture(components) })
    }

    pub fn cauchy(dim: usize, scale: f64, amplitude: f64) -> Result<Self> {
        validate_dim(dim)?;
        validate_scale(scale)?;
        Ok(TargetFunction { kind: TargetKind::CauchyType, dim, amplitude, shape: Shape::Cauchy { scale } })
    }

    pub fn spectrum(dim: usize, scale: f64, amplitude: f64) -> Result<Self> {
        validate_dim(dim)?;
        validate_scale(scale)?;
        Ok(TargetFunction { kind: TargetKind::PrescribedSpectrum, dim, amplitude, shape: Shape::Spectrum { scale } })
    }

    /// c·f.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.amplitude *= c;
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn id(&self) -> String {
        self.to_string()
    }

    /// Asymptotic decay exponent σ of |f̂|: ⟨ξ⟩^s|f̂| is integrable for s < σ - d.
    /// Infinite for entries with exponentially decaying spectra.
    pub fn decay_exponent(&self) -> f64 {
        match self.shape {
            Shape::Spectrum { .. } => SPECTRUM_DECAY,
            _ => f64::INFINITY,
        }
    }

    /// Supremum of the orders s for which ⟨ξ⟩^s f̂ ∈ L^q.
    pub fn order_limit(&self, q: f64) -> f64 {
        let sigma = self.decay_exponent();
        if sigma.is_infinite() {
            return f64::INFINITY;
        }
        if q.is_infinite() {
            sigma
        } else {
            sigma - self.dim as f64 / q
        }
    }

    /// True when |f̂| depends on |ξ| only, so radial quadrature and sampling apply.
    pub fn has_radial_spectrum(&self) -> bool {
        if self.dim == 1 {
            return true;
        }
        match &self.shape {
            Shape::Mixture(cs) => cs.len() == 1 || cs.iter().all(|c| c.center.iter().all(|&v| v == 0.0)),
            _ => false,
        }
    }

    /// Characteristic width of f̂ (the inverse of the smallest spatial scale).
    pub fn frequency_scale(&self) -> f64 {
        1.0 / self.min_scale()
    }

    fn min_scale(&self) -> f64 {
        match &self.shape {
            Shape::Mixture(cs) => cs.iter().map(|c| c.scale).fold(f64::INFINITY, f64::min),
            Shape::Cauchy { scale } | Shape::Spectrum { scale } => *scale,
        }
    }

    /// A radius beyond which f is negligible or decays algebraically; used to lay out
    /// spatial quadratures.
    pub fn spatial_extent(&self) -> f64 {
        match &self.shape {
            Shape::Mixture(cs) => cs
                .iter()
                .map(|c| norm2(&c.center) + 10.0 * c.scale)
                .fold(0.0, f64::max),
            Shape::Cauchy { scale } => 10.0 * scale,
            Shape::Spectrum { scale } => 40.0 * scale,
        }
    }

    pub fn eval_f(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        let zero = vec![0u32; self.dim];
        let v = self.partial_unchecked(&zero, x);
        finite(v, "f", x)
    }

    pub fn eval_f_hat(&self, xi: &[f64]) -> Result<Complex64> {
        check_dim(self.dim, xi.len())?;
        Ok(self.f_hat_unchecked(xi))
    }

    pub fn eval_partial(&self, alpha: &[u32], x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, alpha.len())?;
        check_order(alpha, self.max_order_supported())?;
        let v = self.partial_unchecked(alpha, x);
        finite(v, "∂^α f", x)
    }

    pub fn max_order_supported(&self) -> usize {
        match self.shape {
            Shape::Spectrum { .. } => MAX_ORDER_SPECTRUM,
            _ => MAX_ORDER_SMOOTH,
        }
    }

    pub(crate) fn f_hat_unchecked(&self, xi: &[f64]) -> Complex64 {
        let a = self.amplitude;
        match &self.shape {
            Shape::Mixture(cs) => {
                let d = self.dim as i32;
                let k2: f64 = xi.iter().map(|v| v * v).sum();
                let mut acc = Complex64::new(0.0, 0.0);
                for c in cs {
                    let mag = c.coef * c.scale.powi(d) * (-0.5 * c.scale * c.scale * k2).exp();
                    let phase = -c.center.iter().zip(xi).map(|(m, k)| m * k).sum::<f64>();
                    acc += Complex64::from_polar(mag, phase);
                }
                acc * a
            }
            Shape::Cauchy { scale } => {
                let base = scale * (PI / 2.0).sqrt();
                let v: f64 = xi.iter().map(|k| base * (-scale * k.abs()).exp()).product();
                Complex64::new(a * v, 0.0)
            }
            Shape::Spectrum { scale } => {
                let v: f64 = xi.iter().map(|k| (1.0 + scale * scale * k * k).powi(-3)).product();
                Complex64::new(a * v, 0.0)
            }
        }
    }

    /// |f̂| on the ray k·e₁; equals |f̂(ξ)| for |ξ| = k when the spectrum is radial.
    pub(crate) fn radial_abs_f_hat(&self, k: f64) -> f64 {
        let mut xi = vec![0.0; self.dim];
        xi[0] = k;
        self.f_hat_unchecked(&xi).norm()
    }

    /// A radial function env(k) ≥ sup_{|ξ| = k} |f̂(ξ)|.
    pub fn spectral_envelope(&self, k: f64) -> f64 {
        let a = self.amplitude.abs();
        match &self.shape {
            Shape::Mixture(cs) => {
                let d = self.dim as i32;
                a * cs
                    .iter()
                    .map(|c| c.coef.abs() * c.scale.powi(d) * (-0.5 * c.scale * c.scale * k * k).exp())
                    .sum::<f64>()
            }
            Shape::Cauchy { scale } => {
                a * (scale * (PI / 2.0).sqrt()).powi(self.dim as i32) * (-scale * k).exp()
            }
            Shape::Spectrum { scale } => a * (1.0 + scale * scale * k * k).powi(-3),
        }
    }

    fn partial_unchecked(&self, alpha: &[u32], x: &[f64]) -> f64 {
        let a = self.amplitude;
        match &self.shape {
            Shape::Mixture(cs) => {
                let mut acc = 0.0;
                for c in cs {
                    let mut r2 = 0.0;
                    let mut poly = 1.0;
                    for ((xi, mi), &ai) in x.iter().zip(&c.center).zip(alpha) {
                        let y = (xi - mi) / c.scale;
                        r2 += y * y;
                        if ai > 0 {
                            let sign = if ai % 2 == 1 { -1.0 } else { 1.0 };
                            poly *= sign * hermite_he(ai as usize, y) / c.scale.powi(ai as i32);
                        }
                    }
                    acc += c.coef * poly * (-0.5 * r2).exp();
                }
                a * acc
            }
            Shape::Cauchy { scale } => {
                let mut acc = a;
                for (&xi, &ai) in x.iter().zip(alpha) {
                    acc *= cauchy_derivative(ai as usize, xi / scale) / scale.powi(ai as i32);
                }
                acc
            }
            Shape::Spectrum { scale } => {
                let c = (2.0 * PI).powf(-0.5) * PI / (8.0 * scale);
                let mut acc = a;
                for (&xi, &ai) in x.iter().zip(alpha) {
                    let y = xi.abs() / scale;
                    let sign = if xi < 0.0 && ai % 2 == 1 { -1.0 } else { 1.0 };
                    acc *= c * sign * spectrum_poly(ai as usize, y) * (-y).exp() / scale.powi(ai as i32);
                }
                acc
            }
        }
    }
}

/// n-th derivative of 1/(1+y²): Im[(-1)^n n! / (y - i)^{n+1}].
fn cauchy_derivative(n: usize, y: f64) -> f64 {
    let z = Complex64::new(y, -1.0);
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
    (Complex64::new(sign * fact, 0.0) / z.powi(n as i32 + 1)).im
}

/// P_k with (d/dy)^k [P₀(y) e^{-y}] = P_k(y) e^{-y}, P₀ = 3 + 3y + y².
fn spectrum_poly(k: usize, y: f64) -> f64 {
    // Coefficients of 1, y, y².
    let mut c = [3.0, 3.0, 1.0];
    for _ in 0..k {
        let der = [c[1], 2.0 * c[2], 0.0];
        c = [der[0] - c[0], der[1] - c[1], der[2] - c[2]];
    }
    c[0] + c[1] * y + c[2] * y * y
}

fn finite(v: f64, what: &str, x: &[f64]) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation(format!("{what} at {x:?}")))
    }
}

fn validate_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::Parameter("dimension must be positive".into()))
    } else {
        Ok(())
    }
}

fn validate_scale(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("scale must be positive, got {s}")))
    }
}

impl SmoothFunction for TargetFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn max_order(&self) -> usize {
        self.max_order_supported()
    }

    fn partial(&self, alpha: &[u32], x: &[f64]) -> Result<f64> {
        self.eval_partial(alpha, x)
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim;
        let amp = self.amplitude;
        match (&self.kind, &self.shape) {
            (TargetKind::Gaussian, Shape::Mixture(cs)) => {
                let c = &cs[0];
                write!(f, "gauss:d={d}:scale={}:center={}:amp={amp}", c.scale, join(&c.center))
            }
            (_, Shape::Mixture(cs)) => {
                let coefs: Vec<f64> = cs.iter().map(|c| c.coef).collect();
                let scales: Vec<f64> = cs.iter().map(|c| c.scale).collect();
                let centers: Vec<String> = cs.iter().map(|c| join(&c.center)).collect();
                write!(
                    f,
                    "mix:d={d}:coefs={}:centers={}:scales={}:amp={amp}",
                    join(&coefs),
                    centers.join("|"),
                    join(&scales)
                )
            }
            (_, Shape::Cauchy { scale }) => write!(f, "cauchy:d={d}:scale={scale}:amp={amp}"),
            (_, Shape::Spectrum { scale }) => write!(f, "spectrum:d={d}:scale={scale}:amp={amp}"),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{t}'"))))
        .collect()
}

impl FromStr for TargetFunction {
    type Err = Error;

    /// Parses identifiers such as `gauss:d=2:scale=1`, `mix:d=1:coefs=1,-1:centers=0|1:scales=1,1`,
    /// `cauchy:d=1:scale=2` or `spectrum:d=1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let kind = parts.next().unwrap_or_default();
        let mut d: Option<usize> = None;
        let mut scale = 1.0;
        let mut amp = 1.0;
        let mut center: Option<Vec<f64>> = None;
        let mut coefs: Option<Vec<f64>> = None;
        let mut centers: Option<Vec<Vec<f64>>> = None;
        let mut scales: Option<Vec<f64>> = None;
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in '{part}'")))?;
            let num = || value.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{value}'")));
            match key {
                "d" => d = Some(value.parse().map_err(|_| Error::Parse(format!("bad dimension '{value}'")))?),
                "scale" => scale = num()?,
                "amp" => amp = num()?,
                "center" => center = Some(parse_list(value)?),
                "coefs" => coefs = Some(parse_list(value)?),
                "scales" => scales = Some(parse_list(value)?),
                "centers" => centers = Some(value.split('|').map(parse_list).collect::<Result<_>>()?),
                _ => return Err(Error::Parse(format!("unknown target key '{key}'"))),
            }
        }
        let d = d.unwrap_or(1);
        let wrap = |r: Result<Self>| r.map_err(|e| Error::Parse(format!("target '{s}': {e}")));
        match kind {
            "gauss" => wrap(Self::gaussian(d, scale, center.unwrap_or_else(|| vec![0.0; d]), amp)),
            "mix" => {
                let coefs = coefs.ok_or_else(|| Error::Parse("mixture needs coefs".into()))?;
                let n = coefs.len();
                let scales = scales.unwrap_or_else(|| vec![1.0; n]);
                let centers = centers.unwrap_or_else(|| vec![vec![0.0; d]; n]);
                if scales.len() != n || centers.len() != n {
                    return Err(Error::Parse("mixture lists have different lengths".into()));
                }
                let comps = coefs
                    .into_iter()
                    .zip(centers)
                    .zip(scales)
                    .map(|((coef, center), scale)| GaussianComponent { coef, center, scale })
                    .collect();
                wrap(Self::mixture(d, comps, amp))
            }
            "cauchy" => wrap(Self::cauchy(d, scale, amp)),
            "spectrum" => wrap(Self::spectrum(d, scale, amp)),
            _ => Err(Error::Parse(format!("unknown target kind '{kind}'"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Frequency-side integration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreqScheme {
    RadialProduct,
    Tensor,
}

/// Requested accuracy of a frequency-side integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqSettings {
    /// Gauss-Legendre nodes per panel.
    pub nodes_per_panel: usize,
    /// Maximum tail bound relative to the computed integral.
    pub tolerance: f64,
}

impl Default for FreqSettings {
    fn default() -> Self {
        FreqSettings { nodes_per_panel: 16, tolerance: 1e-10 }
    }
}

impl FreqSettings {
    pub fn refined(&self) -> Self {
        FreqSettings { nodes_per_panel: self.nodes_per_panel * 2, ..*self }
    }
}

/// The quadrature actually used for one frequency integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreqQuadrature {
    pub scheme: FreqScheme,
    pub truncation: f64,
    pub nodes_per_axis: usize,
    pub tail_bound: f64,
}

/// The integrand |ξ|^a ⟨ξ⟩^s |f̂(ξ)|^q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralIntegrand {
    pub a: f64,
    pub s: f64,
    pub q: f64,
}

impl SpectralIntegrand {
    pub fn barron(s: f64) -> Self {
        SpectralIntegrand { a: 0.0, s, q: 1.0 }
    }

    #[inline]
    fn multiplier(&self, k: f64) -> f64 {
        let m = bracket(k).powf(self.s);
        if self.a == 0.0 {
            m
        } else {
            k.powf(self.a) * m
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreqEstimate {
    pub value: f64,
    pub quadrature: FreqQuadrature,
}

const MAX_TRUNCATION_FACTOR: f64 = 1e12;

fn check_integrable(f: &TargetFunction, ig: &SpectralIntegrand) -> Result<()> {
    let d = f.dim as f64;
    if !(ig.q >= 1.0) {
        return Err(Error::Parameter(format!("integrability exponent q = {} must be ≥ 1", ig.q)));
    }
    if ig.a + d <= 0.0 {
        return Err(Error::Diverging(format!(
            "|ξ|^{} is not integrable at the origin in dimension {}",
            ig.a, f.dim
        )));
    }
    let sigma = f.decay_exponent();
    if sigma.is_finite() && d + ig.a + ig.s - sigma * ig.q >= 0.0 {
        return Err(Error::Diverging(format!(
            "growth order {} exceeds what {} supports (decay exponent {sigma})",
            (ig.a + ig.s) / ig.q,
            f.id()
        )));
    }
    Ok(())
}

/// Upper bound on ∫_{|ξ| > T} |ξ|^a ⟨ξ⟩^s env(|ξ|)^q dξ.
fn envelope_tail(f: &TargetFunction, ig: &SpectralIntegrand, t: f64) -> f64 {
    let d = f.dim;
    let area = sphere_area(d);
    let radial = |k: f64| area * k.powi(d as i32 - 1) * ig.multiplier(k) * f.spectral_envelope(k).powf(ig.q);
    match f.shape {
        Shape::Spectrum { scale } => {
            // ⟨k⟩^s k^a ≤ (1+T)^s T^a (k/T)^{a+s} for k ≥ T when s ≥ 0, and (1+σ²k²)^{-3q} ≤ (σk)^{-6q}.
            let g = ig.a + ig.s.max(0.0);
            let e = d as f64 - 1.0 + g - SPECTRUM_DECAY * ig.q;
            let c = area * ig.multiplier(t) * t.powf(-g) * (f.amplitude.abs() * scale.powf(-SPECTRUM_DECAY)).powf(ig.q);
            c * t.powf(e + 1.0) / (-(e + 1.0))
        }
        _ => {
            let w = 0.5 * f.frequency_scale();
            let n = 16;
            let mut total = 0.0;
            let mut a = t;
            for _ in 0..100_000 {
                let (xs, ws) = panel_rule(&[a, a + w], n);
                let part: f64 = xs.iter().zip(&ws).map(|(k, wt)| wt * radial(*k)).sum();
                total += part;
                a += w;
                if part <= 1e-18 * total || (total == 0.0 && radial(a) == 0.0) {
                    break;
                }
            }
            1.01 * total
        }
    }
}

/// Radial breaks on [0, T]: graded toward 0, uniform over the bulk of f̂, then geometric.
pub(crate) fn radial_breaks(f: &TargetFunction, t: f64, graded: bool) -> Vec<f64> {
    let l = f.frequency_scale();
    let h = l / 4.0;
    let bulk = (12.0 * l).min(t);
    let mut breaks = if graded { graded_breaks(h, 50) } else { vec![0.0, h] };
    if bulk > h {
        breaks.extend(uniform_breaks(h, bulk, h).into_iter().skip(1));
    } else {
        breaks = if graded { graded_breaks(bulk, 50) } else { vec![0.0, bulk] };
    }
    if t > bulk {
        breaks.extend(geometric_breaks(bulk, t, 1.25).into_iter().skip(1));
    }
    breaks
}

fn radial_integral(f: &TargetFunction, ig: &SpectralIntegrand, t: f64, n: usize) -> f64 {
    let d = f.dim;
    let area = sphere_area(d);
    let graded = ig.a < 0.0 || (d == 1 && ig.a != 0.0 && ig.a.fract() != 0.0);
    let breaks = radial_breaks(f, t, graded);
    let (ks, ws) = panel_rule(&breaks, n);
    let radial = |k: f64| area * k.powi(d as i32 - 1) * ig.multiplier(k) * f.radial_abs_f_hat(k).powf(ig.q);
    let mut terms: Vec<f64> = ks.iter().zip(&ws).map(|(k, w)| w * radial(*k)).collect();
    if graded {
        // ∫_0^h k^{d-1+a} G(k) dk ≈ G(h) h^{d+a} / (d + a) with G smooth.
        let h0 = breaks[0];
        terms.push(radial(h0) * h0 / (d as f64 + ig.a));
    }
    pairwise_sum(&terms)
}

fn tensor_axis(f: &TargetFunction, t: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let half = radial_breaks(f, t, false);
    let mut breaks: Vec<f64> = half.iter().rev().map(|k| -k).collect();
    breaks.extend(half.iter().skip(1));
    panel_rule(&breaks, n)
}

fn tensor_integral(f: &TargetFunction, ig: &SpectralIntegrand, t: f64, n: usize) -> f64 {
    let d = f.dim;
    let (ax, aw) = tensor_axis(f, t, n);
    let m = ax.len();
    let total = m.pow(d as u32);
    let mut xi = vec![0.0; d];
    let mut terms = Vec::with_capacity(total.min(1 << 26));
    let mut partial_sums = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let mut w = 1.0;
        for x in xi.iter_mut() {
            let i = rem % m;
            rem /= m;
            *x = ax[i];
            w *= aw[i];
        }
        let k = norm2(&xi);
        terms.push(w * ig.multiplier(k) * f.f_hat_unchecked(&xi).norm().powf(ig.q));
        if terms.len() == 1 << 20 {
            partial_sums.push(pairwise_sum(&terms));
            terms.clear();
        }
    }
    partial_sums.push(pairwise_sum(&terms));
    pairwise_sum(&partial_sums)
}

fn sup_over_grid(f: &TargetFunction, ig: &SpectralIntegrand, t: f64, n: usize) -> f64 {
    let w = |k: f64| ig.multiplier(k) * f.radial_abs_f_hat(k).powf(ig.q);
    let envelope = |k: f64| ig.multiplier(k) * f.spectral_envelope(k).powf(ig.q);
    let breaks = radial_breaks(f, t, false);
    let (ks, _) = panel_rule(&breaks, n);
    let mut best = ks.iter().chain(breaks.iter()).map(|&k| if f.has_radial_spectrum() { w(k) } else { envelope(k) }).fold(0.0, f64::max);
    if !f.has_radial_spectrum() {
        // Tensor sup for non-radial spectra: scan an axis-product grid.
        let (ax, _) = tensor_axis(f, t, n.min(8));
        let d = f.dim;
        let m = ax.len();
        let mut xi = vec![0.0; d];
        best = 0.0;
        for idx in 0..m.pow(d as u32) {
            let mut rem = idx;
            for x in xi.iter_mut() {
                *x = ax[rem % m];
                rem /= m;
            }
            best = best.max(ig.multiplier(norm2(&xi)) * f.f_hat_unchecked(&xi).norm().powf(ig.q));
        }
    }
    best
}

fn plan_truncation(f: &TargetFunction, ig: &SpectralIntegrand, settings: &FreqSettings) -> Result<(f64, f64)> {
    let l = f.frequency_scale();
    let t0 = 8.0 * l;
    let rough = radial_integral_envelope(f, ig, t0);
    let mut t = t0;
    let limit = MAX_TRUNCATION_FACTOR * l;
    loop {
        let tail = envelope_tail(f, ig, t);
        if tail <= settings.tolerance * rough || t >= limit {
            return Ok((t, tail));
        }
        t *= 2.0;
    }
}

/// Coarse estimate of the integral, used only to set the truncation radius.
fn radial_integral_envelope(f: &TargetFunction, ig: &SpectralIntegrand, t: f64) -> f64 {
    if f.has_radial_spectrum() {
        radial_integral(f, ig, t, 8)
    } else {
        tensor_integral(f, ig, t, 4)
    }
}

/// ∫ |ξ|^a ⟨ξ⟩^s |f̂(ξ)|^q dξ together with the quadrature that produced it.
pub fn spectral_integral(f: &TargetFunction, ig: SpectralIntegrand, settings: &FreqSettings) -> Result<FreqEstimate> {
    check_integrable(f, &ig)?;
    let (t, tail) = plan_truncation(f, &ig, settings)?;
    let n = settings.nodes_per_panel.max(2);
    let (value, scheme, per_axis) = if f.has_radial_spectrum() {
        let v = radial_integral(f, &ig, t, n);
        (v, FreqScheme::RadialProduct, radial_breaks(f, t, false).len().saturating_sub(1) * n)
    } else {
        if ig.a < 0.0 {
            return Err(Error::Parameter(
                "singular frequency weights need a radial spectrum".into(),
            ));
        }
        let n = if f.dim >= 3 { n.min(8) } else { n };
        let v = tensor_integral(f, &ig, t, n);
        (v, FreqScheme::Tensor, tensor_axis(f, t, n).0.len())
    };
    if tail > settings.tolerance * value.max(f64::MIN_POSITIVE) && value > 0.0 {
        return Err(Error::Accuracy(format!(
            "frequency tail bound {tail:.3e} exceeds tolerance {:.1e} of the integral {value:.6e}",
            settings.tolerance
        )));
    }
    Ok(FreqEstimate {
        value,
        quadrature: FreqQuadrature { scheme, truncation: t, nodes_per_axis: per_axis, tail_bound: tail },
    })
}

fn check_order_nonnegative(s: f64) -> Result<()> {
    if s < 0.0 || !s.is_finite() {
        Err(Error::Parameter(format!("Barron order must be a nonnegative real, got {s}")))
    } else {
        Ok(())
    }
}

/// ∫ ⟨ξ⟩^s |f̂(ξ)| dξ.
pub fn barron_norm(f: &TargetFunction, s: f64, settings: &FreqSettings) -> Result<f64> {
    check_order_nonnegative(s)?;
    Ok(spectral_integral(f, SpectralIntegrand::barron(s), settings)?.value)
}

/// ‖⟨·⟩^s f̂‖_{L^q}, q ∈ [1, ∞].
pub fn fourier_lebesgue_norm(f: &TargetFunction, q: f64, s: f64, settings: &FreqSettings) -> Result<f64> {
    Ok(fourier_lebesgue_estimate(f, q, s, settings)?.value)
}

pub fn fourier_lebesgue_estimate(f: &TargetFunction, q: f64, s: f64, settings: &FreqSettings) -> Result<FreqEstimate> {
    check_order_nonnegative(s)?;
    weighted_fourier_lebesgue(f, q, 0.0, s, settings)
}

/// ‖ |ξ|^a ⟨ξ⟩^s f̂ ‖_{L^q}; the power a may be negative (singular at the origin).
pub fn weighted_fourier_lebesgue(f: &TargetFunction, q: f64, a: f64, s: f64, settings: &FreqSettings) -> Result<FreqEstimate> {
    if q.is_infinite() {
        let ig = SpectralIntegrand { a, s, q: 1.0 };
        if a < 0.0 {
            return Err(Error::Diverging("sup norm with a singular weight".into()));
        }
        let sigma = f.decay_exponent();
        if sigma.is_finite() && a + s > sigma {
            return Err(Error::Diverging(format!("⟨ξ⟩^{} f̂ is unbounded", a + s)));
        }
        let l = f.frequency_scale();
        let mut t = 8.0 * l;
        while ig.multiplier(t) * f.spectral_envelope(t) > settings.tolerance * ig.multiplier(0.0) * f.spectral_envelope(0.0)
            && t < MAX_TRUNCATION_FACTOR * l
        {
            t *= 2.0;
        }
        let n = settings.nodes_per_panel.max(2);
        let value = sup_over_grid(f, &ig, t, n);
        let tail = (0..64)
            .map(|j| {
                let k = t * 1.5f64.powi(j);
                ig.multiplier(k) * f.spectral_envelope(k)
            })
            .fold(0.0, f64::max);
        return Ok(FreqEstimate {
            value,
            quadrature: FreqQuadrature {
                scheme: if f.has_radial_spectrum() { FreqScheme::RadialProduct } else { FreqScheme::Tensor },
                truncation: t,
                nodes_per_axis: n,
                tail_bound: tail,
            },
        });
    }
    let ig = SpectralIntegrand { a: a * q, s: s * q, q };
    let est = spectral_integral(f, ig, settings)?;
    let value = est.value.powf(1.0 / q);
    Ok(FreqEstimate { value, quadrature: est.quadrature })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parse_round_trip() {
        for s in [
            "gauss:d=2:scale=1.5:center=0.5,-1:amp=2",
            "mix:d=1:coefs=1,-1:centers=0|0.5:scales=1,2:amp=1",
            "cauchy:d=2:scale=0.5:amp=1",
            "spectrum:d=1:scale=1:amp=-3",
        ] {
            let f: TargetFunction = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("gauss:d=2:center=1".parse::<TargetFunction>().is_err());
        assert!("sinc:d=1".parse::<TargetFunction>().is_err());
    }

    #[test]
    fn spectrum_polynomials_match_recurrence() {
        assert_eq!(spectrum_poly(1, 0.0), 0.0);
        assert_eq!(spectrum_poly(3, 0.0), 0.0);
        assert_eq!(spectrum_poly(2, 0.0), -1.0);
        assert_eq!(spectrum_poly(4, 1.0), 3.0 - 5.0 + 1.0);
    }

    #[test]
    fn cauchy_derivatives() {
        assert_relative_eq!(cauchy_derivative(0, 2.0), 0.2, epsilon = 1e-15);
        // d/dy (1+y²)^{-1} = -2y/(1+y²)².
        assert_relative_eq!(cauchy_derivative(1, 2.0), -4.0 / 25.0, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_barron_norm() {
        let f = TargetFunction::standard_gaussian(1);
        let v = barron_norm(&f, 0.0, &FreqSettings::default()).unwrap();
        assert_relative_eq!(v, (2.0 * PI).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn spectrum_limit_is_enforced() {
        let f = TargetFunction::spectrum(1, 1.0, 1.0).unwrap();
        assert!(matches!(barron_norm(&f, 5.0, &FreqSettings::default()), Err(Error::Diverging(_))));
        assert!(barron_norm(&f, 1.0, &FreqSettings::default()).is_ok());
        assert!(matches!(barron_norm(&f, -1.0, &FreqSettings::default()), Err(Error::Parameter(_))));
    }
}
