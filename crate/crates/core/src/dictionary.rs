//! Activation functions, ridge atoms ρ(⟨ξ,x⟩/τ + b), shallow networks and explicit
//! weighted-Sobolev bounds on single neurons.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::function::{check_order, SmoothFunction};
use crate::numerics::{bracket, dot, gamma, hermite_he, multi_indices, norm2, panel_rule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActivationKind {
    /// e^{-t²/2}.
    Gaussian,
    /// sech t.
    Sech,
    /// 1/(1+t²).
    Rational,
    /// The inverse transform of ½(1 + cos(πτ/B)) on |τ| < B.
    Bump { band: f64 },
}

/// An activation together with the weight exponent v of ρ ∈ W^{m,∞}(⟨·⟩^v).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationSpec {
    pub kind: ActivationKind,
    decay: Option<f64>,
}

const MAX_ACTIVATION_ORDER: usize = 8;

impl ActivationSpec {
    pub fn new(kind: ActivationKind, decay: Option<f64>) -> Result<Self> {
        if let ActivationKind::Bump { band } = kind {
            if !(band > 0.0 && band.is_finite()) {
                return Err(Error::Parameter(format!("bump band must be positive, got {band}")));
            }
        }
        let spec = ActivationSpec { kind, decay };
        if let Some(v) = decay {
            spec.check_decay(v)?;
        }
        Ok(spec)
    }

    pub fn gaussian() -> Self {
        ActivationSpec { kind: ActivationKind::Gaussian, decay: None }
    }

    /// The decay exponent v, or `default` when none was set explicitly.
    pub fn decay_or(&self, default: f64) -> f64 {
        self.decay.unwrap_or(default)
    }

    pub fn with_decay(mut self, v: f64) -> Result<Self> {
        self.check_decay(v)?;
        self.decay = Some(v);
        Ok(self)
    }

    /// Largest v with sup ⟨t⟩^v |ρ^{(k)}(t)| < ∞ for all k.
    pub fn max_decay(&self) -> f64 {
        match self.kind {
            ActivationKind::Gaussian | ActivationKind::Sech => f64::INFINITY,
            ActivationKind::Rational => 2.0,
            ActivationKind::Bump { .. } => 3.0,
        }
    }

    pub fn check_decay(&self, v: f64) -> Result<()> {
        if !(v > 0.0) || v > self.max_decay() || v.is_nan() {
            return Err(Error::Parameter(format!(
                "activation {} is not in W^(m,∞)(⟨·⟩^{v}); admissible decay is at most {}",
                self.kind_id(),
                self.max_decay()
            )));
        }
        Ok(())
    }

    pub fn max_order(&self) -> usize {
        MAX_ACTIVATION_ORDER
    }

    fn kind_id(&self) -> String {
        match self.kind {
            ActivationKind::Gaussian => "gaussian".into(),
            ActivationKind::Sech => "sech".into(),
            ActivationKind::Rational => "rational".into(),
            ActivationKind::Bump { band } => format!("bump:B={band}"),
        }
    }
}

impl fmt::Display for ActivationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind_id())?;
        if let Some(v) = self.decay {
            write!(f, ":v={v}")?;
        }
        Ok(())
    }
}

impl FromStr for ActivationSpec {
    type Err = Error;

    /// Parses `gaussian`, `sech`, `rational`, `bump:B=2`, each optionally followed by `:v=<decay>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad activation '{s}'"));
        let mut parts = s.trim().split(':');
        let head = parts.next().ok_or_else(bad)?;
        let mut band = None;
        let mut decay = None;
        for part in parts {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            match k {
                "B" => band = Some(v),
                "v" => decay = Some(v),
                _ => return Err(bad()),
            }
        }
        let kind = match head {
            "gaussian" => ActivationKind::Gaussian,
            "sech" => ActivationKind::Sech,
            "rational" => ActivationKind::Rational,
            "bump" => ActivationKind::Bump { band: band.unwrap_or(2.0) },
            _ => return Err(bad()),
        };
        if band.is_some() && !matches!(kind, ActivationKind::Bump { .. }) {
            return Err(bad());
        }
        ActivationSpec::new(kind, decay).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Coefficients of P_k with (d/dt)^k sech t = sech t · P_k(tanh t).
fn sech_poly(k: usize) -> Vec<f64> {
    let mut p = vec![1.0];
    for _ in 0..k {
        // d/dt [sech·P(T)] = sech·(-T P(T) + (1 - T²) P'(T)).
        let mut next = vec![0.0; p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i + 1] -= c;
            if i > 0 {
                next[i - 1] += i as f64 * c;
                next[i + 1] -= i as f64 * c;
            }
        }
        p = next;
    }
    p
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

/// n-th derivative of 1/(1+t²).
fn rational_derivative(n: usize, t: f64) -> f64 {
    let z = Complex64::new(t, -1.0);
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
    (Complex64::new(sign * fact, 0.0) / z.powi(n as i32 + 1)).im
}

fn bump_derivative(k: usize, band: f64, t: f64) -> f64 {
    let c = PI / band;
    let norm = (2.0 * PI).powf(-0.5);
    if t.abs() < c + 2.0 {
        // ρ^{(k)}(t) = (2π)^{-1/2} ∫_{-B}^{B} ½(1 + cos(πτ/B)) (iτ)^k e^{iτt} dτ.
        let n = 24 + (band * t.abs()) as usize;
        let (xs, ws) = panel_rule(&[-band, 0.0, band], n);
        let mut acc = 0.0;
        for (tau, w) in xs.iter().zip(&ws) {
            let amp = 0.5 * (1.0 + (PI * tau / band).cos()) * tau.powi(k as i32);
            let phase = tau * t;
            let re = match k % 4 {
                0 => phase.cos(),
                1 => -phase.sin(),
                2 => -phase.cos(),
                _ => phase.sin(),
            };
            acc += w * amp * re;
        }
        return norm * acc;
    }
    // Leibniz rule on sin(Bt) · h(t), h(t) = 1/t - ½/(t - c) - ½/(t + c).
    let mut acc = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let m = k - j;
        let sin_der = band.powi(m as i32) * (band * t + 0.5 * PI * m as f64).sin();
        let fj: f64 = (1..=j).map(|i| i as f64).product();
        let sj = if j % 2 == 1 { -fj } else { fj };
        let e = -(j as i32) - 1;
        let h = sj * (t.powi(e) - 0.5 * (t - c).powi(e) - 0.5 * (t + c).powi(e));
        acc += binom * sin_der * h;
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    norm * acc
}

/// ρ^{(k)}(t).
pub fn eval_activation(rho: &ActivationSpec, k: usize, t: f64) -> Result<f64> {
    if k > rho.max_order() {
        return Err(Error::UnsupportedOrder { order: k, max: rho.max_order() });
    }
    Ok(activation_unchecked(rho, k, t))
}

#[inline]
fn activation_unchecked(rho: &ActivationSpec, k: usize, t: f64) -> f64 {
    match rho.kind {
        ActivationKind::Gaussian => {
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            sign * hermite_he(k, t) * (-0.5 * t * t).exp()
        }
        ActivationKind::Sech => {
            let s = 1.0 / t.cosh();
            if k == 0 {
                s
            } else {
                s * horner(&sech_poly(k), t.tanh())
            }
        }
        ActivationKind::Rational => rational_derivative(k, t),
        ActivationKind::Bump { band } => bump_derivative(k, band, t),
    }
}

/// ρ̂(τ) = (2π)^{-1/2} ∫ ρ(t) e^{-iτt} dt.
pub fn activation_fourier(rho: &ActivationSpec, tau: f64) -> Complex64 {
    let v = match rho.kind {
        ActivationKind::Gaussian => (-0.5 * tau * tau).exp(),
        ActivationKind::Sech => (PI / 2.0).sqrt() / (0.5 * PI * tau).cosh(),
        ActivationKind::Rational => (PI / 2.0).sqrt() * (-tau.abs()).exp(),
        ActivationKind::Bump { band } => {
            if tau.abs() < band {
                0.5 * (1.0 + (PI * tau / band).cos())
            } else {
                0.0
            }
        }
    };
    Complex64::new(v, 0.0)
}

/// Threshold below which |ρ̂(τ)| counts as zero.
pub const RHO_HAT_FLOOR: f64 = 1e-12;

/// The grid value maximizing |ρ̂(τ)|; ties go to the smallest |τ|, then to the positive sign.
pub fn select_tau(rho: &ActivationSpec, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Contract("τ grid is empty".into()));
    }
    if grid.iter().any(|t| *t == 0.0 || !t.is_finite()) {
        return Err(Error::Contract("τ grid must consist of finite nonzero values".into()));
    }
    let mut ordered = grid.to_vec();
    ordered.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(b.total_cmp(a)));
    let mut best = ordered[0];
    let mut best_val = activation_fourier(rho, best).norm();
    for &t in &ordered[1..] {
        let v = activation_fourier(rho, t).norm();
        if v > best_val {
            best = t;
            best_val = v;
        }
    }
    if best_val < RHO_HAT_FLOOR {
        return Err(Error::NoValidTau(format!(
            "|ρ̂| < {RHO_HAT_FLOOR:e} on the whole grid for activation {rho}"
        )));
    }
    Ok(best)
}

/// sup_t ⟨t⟩^v |ρ^{(k)}(t)| for k = 0..=max_order, from a dense scan of [0, 20] (step 10^{-3}),
/// a logarithmic scan of [20, 10^6] and golden-section refinement, inflated by 10^{-6}.
/// Every built-in activation is even, so t ≥ 0 suffices.
pub fn weighted_sup_constants(rho: &ActivationSpec, v: f64, max_order: usize) -> Result<Vec<f64>> {
    rho.check_decay(v)?;
    if max_order > rho.max_order() {
        return Err(Error::UnsupportedOrder { order: max_order, max: rho.max_order() });
    }
    (0..=max_order)
        .map(|k| {
            let f = |t: f64| bracket(t).powf(v) * activation_unchecked(rho, k, t).abs();
            let mut best_t = 0.0;
            let mut best = f(0.0);
            let mut consider = |t: f64| {
                let val = f(t);
                if val > best {
                    best = val;
                    best_t = t;
                }
            };
            for i in 1..=20_000 {
                consider(i as f64 * 1e-3);
            }
            for i in 1..=2000 {
                consider(20.0 * (5e4f64).powf(i as f64 / 2000.0));
            }
            let step = if best_t <= 20.0 { 1e-3 } else { best_t * 0.006 };
            let refined = golden_max(&f, (best_t - step).max(0.0), best_t + step);
            let sup = best.max(refined);
            if !sup.is_finite() {
                return Err(Error::Parameter(format!("⟨t⟩^{v} ρ^({k}) is unbounded")));
            }
            Ok(sup * (1.0 + 1e-6))
        })
        .collect()
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..80 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    f(0.5 * (a + b))
}

/// One dictionary element prefactor · ρ(⟨ξ,x⟩/τ + b), carrying its network coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub xi: Vec<f64>,
    pub b: f64,
    pub tau: f64,
    pub prefactor: f64,
    pub coefficient: f64,
}

impl Atom {
    #[inline]
    fn argument(&self, x: &[f64]) -> f64 {
        dot(&self.xi, x) / self.tau + self.b
    }

    /// ξ^α / τ^{|α|}.
    fn chain_factor(&self, alpha: &[u32]) -> f64 {
        let mut f = 1.0;
        for (x, &a) in self.xi.iter().zip(alpha) {
            f *= x.powi(a as i32);
        }
        f / self.tau.powi(crate::numerics::order(alpha) as i32)
    }
}

/// ∂^α of prefactor · ρ(⟨ξ,x⟩/τ + b), i.e. prefactor · ξ^α/τ^{|α|} · ρ^{(|α|)}(⟨ξ,x⟩/τ + b).
/// The coefficient is not applied.
pub fn atom_eval(atom: &Atom, rho: &ActivationSpec, x: &[f64], alpha: &[u32]) -> Result<f64> {
    check_dim(atom.xi.len(), x.len())?;
    check_dim(atom.xi.len(), alpha.len())?;
    let k = check_order(alpha, rho.max_order())?;
    Ok(atom.prefactor * atom.chain_factor(alpha) * activation_unchecked(rho, k, atom.argument(x)))
}

/// Σ_i a_i g_i with the budget Σ|a_i| ≤ M enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct ShallowNetwork {
    dim: usize,
    tau: f64,
    activation: ActivationSpec,
    budget: f64,
    atoms: Vec<Atom>,
}

/// Slack allowed in the budget check, relative to max(1, M).
pub const BUDGET_SLACK: f64 = 1e-12;

impl ShallowNetwork {
    pub fn new(dim: usize, tau: f64, activation: ActivationSpec, budget: f64, atoms: Vec<Atom>) -> Result<Self> {
        if !(budget >= 0.0) || !budget.is_finite() {
            return Err(Error::Contract(format!("budget must be a nonnegative real, got {budget}")));
        }
        if tau == 0.0 || !tau.is_finite() {
            return Err(Error::Contract("τ must be finite and nonzero".into()));
        }
        for a in &atoms {
            check_dim(dim, a.xi.len())?;
            if !(a.prefactor > 0.0) || !a.coefficient.is_finite() || !a.b.is_finite() || a.tau != tau {
                return Err(Error::Contract("malformed atom".into()));
            }
        }
        let net = ShallowNetwork { dim, tau, activation, budget, atoms };
        net.check_budget()?;
        Ok(net)
    }

    pub fn empty(dim: usize, tau: f64, activation: ActivationSpec) -> Self {
        ShallowNetwork { dim, tau, activation, budget: 0.0, atoms: Vec::new() }
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.atoms.iter().map(|a| a.coefficient.abs()).sum()
    }

    pub fn check_budget(&self) -> Result<()> {
        let sum = self.coefficient_sum();
        if sum > self.budget + BUDGET_SLACK * self.budget.max(1.0) {
            return Err(Error::Contract(format!(
                "coefficient sum {sum:e} exceeds the budget {:e}",
                self.budget
            )));
        }
        Ok(())
    }

    /// Appends an atom, rejecting it if the budget would be exceeded.
    pub fn push(&mut self, atom: Atom) -> Result<()> {
        self.atoms.push(atom);
        if let Err(e) = self.check_budget() {
            self.atoms.pop();
            return Err(e);
        }
        Ok(())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn width(&self) -> usize {
        self.atoms.len()
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn activation(&self) -> &ActivationSpec {
        &self.activation
    }

    /// Writes the header (d, N, M, τ, activation) and one line per atom:
    /// ξ components, b, prefactor, coefficient, all in `{:.16e}` notation.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("# shallow network\n");
        s.push_str(&format!("d {}\n", self.dim));
        s.push_str(&format!("N {}\n", self.atoms.len()));
        s.push_str(&format!("M {:.16e}\n", self.budget));
        s.push_str(&format!("tau {:.16e}\n", self.tau));
        s.push_str(&format!("activation {}\n", self.activation));
        for a in &self.atoms {
            let mut fields: Vec<String> = a.xi.iter().map(|v| format!("{v:.16e}")).collect();
            fields.push(format!("{:.16e}", a.b));
            fields.push(format!("{:.16e}", a.prefactor));
            fields.push(format!("{:.16e}", a.coefficient));
            s.push_str(&fields.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("network text: {m}"));
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let mut header = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad("truncated header"))?;
            let (k, v) = line.split_once(' ').ok_or_else(|| bad(line))?;
            if k != key {
                return Err(bad(&format!("expected '{key}', found '{k}'")));
            }
            Ok(v.trim().to_string())
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(s));
        let dim: usize = header("d")?.parse().map_err(|_| bad("d"))?;
        let n: usize = header("N")?.parse().map_err(|_| bad("N"))?;
        let budget = num(&header("M")?)?;
        let tau = num(&header("tau")?)?;
        let activation: ActivationSpec = header("activation")?.parse()?;
        let mut atoms = Vec::with_capacity(n);
        for line in lines {
            let v = line.split_whitespace().map(num).collect::<Result<Vec<_>>>()?;
            if v.len() != dim + 3 {
                return Err(bad("atom line has the wrong number of fields"));
            }
            atoms.push(Atom { xi: v[..dim].to_vec(), b: v[dim], tau, prefactor: v[dim + 1], coefficient: v[dim + 2] });
        }
        if atoms.len() != n {
            return Err(bad("atom count does not match N"));
        }
        ShallowNetwork::new(dim, tau, activation, budget, atoms)
    }
}

/// Σ_i a_i ∂^α g_i(x).
pub fn network_eval(net: &ShallowNetwork, x: &[f64], alpha: &[u32]) -> Result<f64> {
    check_dim(net.dim, x.len())?;
    check_dim(net.dim, alpha.len())?;
    let k = check_order(alpha, net.activation.max_order())?;
    let mut acc = 0.0;
    for a in &net.atoms {
        acc += a.coefficient * a.prefactor * a.chain_factor(alpha) * activation_unchecked(&net.activation, k, a.argument(x));
    }
    Ok(acc)
}

impl SmoothFunction for ShallowNetwork {
    fn dim(&self) -> usize {
        self.dim
    }

    fn max_order(&self) -> usize {
        self.activation.max_order()
    }

    fn partial(&self, alpha: &[u32], x: &[f64]) -> Result<f64> {
        network_eval(self, x, alpha)
    }

    fn partial_on(&self, alpha: &[u32], points: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.dim, alpha.len())?;
        let k = check_order(alpha, self.activation.max_order())?;
        out.iter_mut().for_each(|o| *o = 0.0);
        let d = self.dim;
        for a in &self.atoms {
            let c = a.coefficient * a.prefactor * a.chain_factor(alpha);
            if c == 0.0 {
                continue;
            }
            for (x, o) in points.chunks_exact(d).zip(out.iter_mut()) {
                *o += c * activation_unchecked(&self.activation, k, a.argument(x));
            }
        }
        Ok(())
    }
}

/// Parameters of the single-neuron bound on ℝ^d with weight ⟨x⟩^{-u}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronBoundConfig {
    pub dim: usize,
    pub ell: usize,
    pub p: f64,
    pub u: f64,
    pub v: f64,
    pub r: f64,
    pub tau: f64,
}

impl NeuronBoundConfig {
    fn validate(&self) -> Result<()> {
        let df = self.dim as f64;
        if !(self.p >= 2.0 && self.p.is_finite()) {
            return Err(Error::Parameter(format!("neuron bound needs 2 ≤ p < ∞, got {}", self.p)));
        }
        if !(self.r > 1.0 && self.r <= self.v) {
            return Err(Error::Parameter(format!("neuron bound needs 1 < r ≤ v, got r={} v={}", self.r, self.v)));
        }
        if !((self.u - self.r) * self.p > df) {
            return Err(Error::Parameter(format!(
                "neuron bound needs (u - r)p > d, got ({} - {})·{} ≤ {}",
                self.u, self.r, self.p, self.dim
            )));
        }
        if self.tau == 0.0 || !self.tau.is_finite() {
            return Err(Error::Parameter("τ must be finite and nonzero".into()));
        }
        Ok(())
    }

    /// E = (2/((u - r)p - d))^{1/p}, from the 1D integral along ξ.
    pub fn e_constant(&self) -> f64 {
        (2.0 / ((self.u - self.r) * self.p - self.dim as f64)).powf(1.0 / self.p)
    }

    /// D with D^p = π^{(d-1)/2} Γ((up - d + 1)/2) / Γ(up/2), the integral over the
    /// hyperplane orthogonal to ξ of ((1+|s|)² + |y|²)^{-up/2}, divided by ⟨s⟩^{d-1-up}.
    pub fn d_constant(&self) -> f64 {
        if self.dim == 1 {
            return 1.0;
        }
        let up = self.u * self.p;
        let df = self.dim as f64;
        (PI.powf((df - 1.0) / 2.0) * gamma((up - df + 1.0) / 2.0) / gamma(up / 2.0)).powf(1.0 / self.p)
    }
}

/// Explicit upper bound on ‖ρ(⟨ξ,·⟩/τ + b)‖_{W^{ℓ,p}(⟨·⟩^{-u}; ℝ^d)}:
/// (Σ_{|α|≤ℓ} (|ξ^α| |τ|^{-|α|} K_{|α|})^p)^{1/p} · D · E · ⟨min(1, |τ|/|ξ|)|b|⟩^{-r},
/// where K_k = sup ⟨t⟩^v |ρ^{(k)}(t)|. For ξ = 0 only α = 0 survives and the bound is
/// K_0 ⟨b⟩^{-v} ‖⟨·⟩^{-u}‖_{L^p}.
pub fn neuron_sobolev_bound(xi: &[f64], b: f64, cfg: &NeuronBoundConfig, sup_constants: &[f64]) -> Result<f64> {
    cfg.validate()?;
    check_dim(cfg.dim, xi.len())?;
    if sup_constants.len() <= cfg.ell {
        return Err(Error::Parameter(format!("need sup constants up to order {}", cfg.ell)));
    }
    let p = cfg.p;
    let k = norm2(xi);
    if k == 0.0 {
        let weight_norm = crate::numerics::bracket_decay_integral(cfg.dim, cfg.u * p).powf(1.0 / p);
        return Ok(sup_constants[0] * bracket(b).powf(-cfg.v) * weight_norm);
    }
    let mut sum = 0.0;
    for alpha in multi_indices(cfg.dim, cfg.ell) {
        let order = crate::numerics::order(&alpha);
        let mono: f64 = xi.iter().zip(&alpha).map(|(x, &a)| x.abs().powi(a as i32)).product();
        sum += (mono * cfg.tau.abs().powi(-(order as i32)) * sup_constants[order]).powf(p);
    }
    let m = (cfg.tau.abs() / k).min(1.0);
    Ok(sum.powf(1.0 / p) * cfg.d_constant() * cfg.e_constant() * bracket(m * b).powf(-cfg.r))
}

/// Convenience wrapper computing the sup constants on the fly.
pub fn neuron_sobolev_bound_for(rho: &ActivationSpec, xi: &[f64], b: f64, cfg: &NeuronBoundConfig) -> Result<f64> {
    let k = weighted_sup_constants(rho, cfg.v, cfg.ell)?;
    neuron_sobolev_bound(xi, b, cfg, &k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn activation_strings() {
        for s in ["gaussian", "sech:v=3", "rational:v=2", "bump:B=2", "bump:B=1.5:v=3"] {
            assert_eq!(s.parse::<ActivationSpec>().unwrap().to_string(), s);
        }
        assert!("rational:v=3".parse::<ActivationSpec>().is_err());
        assert!("relu".parse::<ActivationSpec>().is_err());
    }

    #[test]
    fn sech_polynomials() {
        // (sech)' = -sech·tanh, (sech)'' = sech·(2 tanh² - 1).
        assert_eq!(sech_poly(1), vec![0.0, -1.0]);
        assert_eq!(sech_poly(2), vec![-1.0, 0.0, 2.0]);
    }

    #[test]
    fn bump_branches_agree() {
        let rho: ActivationSpec = "bump:B=2".parse().unwrap();
        let c = PI / 2.0;
        let t = c + 2.0;
        for k in 0..5 {
            let lo = bump_derivative(k, 2.0, t - 1e-9);
            let hi = bump_derivative(k, 2.0, t + 1e-9);
            assert!((lo - hi).abs() < 1e-8, "k={k}: {lo} vs {hi}");
        }
        assert_relative_eq!(eval_activation(&rho, 0, 0.0).unwrap(), (2.0 * PI).powf(-0.5) * 2.0, max_relative = 1e-12);
    }

    #[test]
    fn tau_selection() {
        let g = ActivationSpec::gaussian();
        assert_eq!(select_tau(&g, &[-2.0, -1.0, -0.5, 0.5, 1.0, 2.0]).unwrap(), 0.5);
        assert_eq!(select_tau(&g, &[1.0]).unwrap(), 1.0);
        let bump: ActivationSpec = "bump:B=1".parse().unwrap();
        assert!(matches!(select_tau(&bump, &[1.5, -3.0]), Err(Error::NoValidTau(_))));
    }

    #[test]
    fn text_round_trip() {
        let atoms = vec![
            Atom { xi: vec![0.3, -1.2], b: 0.25, tau: 1.0, prefactor: 1.5, coefficient: -0.125 },
            Atom { xi: vec![1.0 / 3.0, 2.0], b: -4.0, tau: 1.0, prefactor: 0.75, coefficient: 0.5 },
        ];
        let net = ShallowNetwork::new(2, 1.0, ActivationSpec::gaussian(), 1.0, atoms).unwrap();
        let back = ShallowNetwork::from_text(&net.to_text()).unwrap();
        assert_eq!(back, net);
    }
}
