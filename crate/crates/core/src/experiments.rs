//! Convergence-rate sweeps: sample networks for every (N, seed), measure the weighted Sobolev
//! error on one fixed grid, and fit log(error) against log(N). Also the flat run configuration
//! shared with the command-line front end.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::TargetFunction;
use crate::dictionary::ActivationSpec;
use crate::error::{Error, Result};
use crate::function::Difference;
use crate::norms::{build_quadrature, DomainSpec, SobolevNorm};
use crate::sampler::{MaureyConfig, MaureySampler, Variant};
use crate::weights::{sobolev_weight_from_upsilon, WeightSpec};

/// How the error ‖f - f_N‖ is measured.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorNormSpec {
    pub ell: usize,
    pub p: f64,
    pub weight: WeightSpec,
    pub domain: DomainSpec,
    pub grid_resolution: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateExperiment {
    pub config: MaureyConfig,
    pub n_values: Vec<usize>,
    pub seeds: Vec<u64>,
    pub norm: ErrorNormSpec,
}

impl RateExperiment {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Contract(format!("N values must be strictly increasing, got {:?}", self.n_values)));
        }
        if self.n_values.len() < 2 {
            return Err(Error::Contract("a rate sweep needs at least two N values".into()));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() || seeds.is_empty() {
            return Err(Error::Contract(format!("seeds must be distinct and nonempty, got {:?}", self.seeds)));
        }
        match self.config.variant {
            Variant::Bounded if !self.norm.domain.is_bounded() => {
                Err(Error::Contract("the bounded variant is measured on a bounded domain".into()))
            }
            Variant::Unbounded if self.norm.domain.is_bounded() => {
                Err(Error::Contract("the unbounded variant is measured on a truncated full-space grid".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateCell {
    pub n: usize,
    pub seed: u64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NSummary {
    pub n: usize,
    pub median: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// Sorted by (N, seed).
    pub cells: Vec<RateCell>,
    pub per_n: Vec<NSummary>,
    /// Fit of log(median) against log(N); absent for an empty report.
    pub fit: Option<RateFit>,
    /// Spearman rank correlation of (N, median).
    pub spearman: Option<f64>,
    pub mass: f64,
}

impl RateReport {
    pub fn empty() -> Self {
        RateReport { cells: Vec::new(), per_n: Vec::new(), fit: None, spearman: None, mass: 0.0 }
    }

    /// Builds the summaries and the fit from raw cells.
    pub fn from_cells(mut cells: Vec<RateCell>, mass: f64) -> Result<Self> {
        cells.sort_by_key(|c| (c.n, c.seed));
        let mut per_n = Vec::new();
        let mut i = 0;
        while i < cells.len() {
            let n = cells[i].n;
            let j = cells[i..].iter().position(|c| c.n != n).map_or(cells.len(), |k| i + k);
            let errs: Vec<f64> = cells[i..j].iter().map(|c| c.error).collect();
            per_n.push(NSummary { n, median: median(&errs), mean: errs.iter().sum::<f64>() / errs.len() as f64 });
            i = j;
        }
        let (fit, spearman) = if per_n.len() >= 2 {
            let pts: Vec<(f64, f64)> = per_n.iter().map(|s| (s.n as f64, s.median)).collect();
            let ns: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let ms: Vec<f64> = pts.iter().map(|p| p.1).collect();
            (Some(fit_rate(&pts)?), Some(spearman(&ns, &ms)))
        } else {
            (None, None)
        };
        Ok(RateReport { cells, per_n, fit, spearman, mass })
    }
}

pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = 0.5 * (i + j) as f64 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Least squares of log(error) on log(N).
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if let Some(p) = points.iter().find(|p| !(p.1 > 0.0) || !p.1.is_finite()) {
        return Err(Error::Fit(format!("error {} at N = {} is not a positive number", p.1, p.0)));
    }
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0) || !p.0.is_finite()) {
        return Err(Error::Fit(format!("N = {} is not positive", p.0)));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("need at least two distinct N".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RateFit { slope, intercept, r_squared })
}

/// Runs every (N, seed) cell in parallel on one shared grid; the budget Σ|a_n| ≤ M of every
/// assembled network is checked inline.
pub fn run_rate_sweep(exp: &RateExperiment) -> Result<RateReport> {
    exp.validate()?;
    let sampler = MaureySampler::new(&exp.config)?;
    let spec = &exp.norm;
    let grid = build_quadrature(&spec.domain, &spec.weight, spec.p, spec.grid_resolution)?;
    let norm = SobolevNorm::new(grid, &spec.weight, spec.ell, spec.p)?;
    let target = &exp.config.target;
    let jobs: Vec<(usize, u64)> =
        exp.n_values.iter().flat_map(|&n| exp.seeds.iter().map(move |&s| (n, s))).collect();
    let cells = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let rep = sampler.sample(n, seed)?;
            let net = sampler.assemble(&rep)?;
            net.check_budget()?;
            let error = norm.eval(&Difference::new(target, &net)?)?;
            Ok(RateCell { n, seed, error })
        })
        .collect::<Result<Vec<_>>>()?;
    RateReport::from_cells(cells, sampler.mass().value)
}

pub const RATE_CSV_HEADER: &str = "N,seed,error";

/// `N,seed,error` rows followed by a `#`-prefixed summary block. Floats use the shortest
/// representation that parses back to the same value.
pub fn rates_csv(report: &RateReport) -> String {
    let mut out = String::from(RATE_CSV_HEADER);
    out.push('\n');
    for c in &report.cells {
        let _ = writeln!(out, "{},{},{:e}", c.n, c.seed, c.error);
    }
    if report.cells.is_empty() {
        return out;
    }
    out.push_str("# summary\n# N,median,mean\n");
    for s in &report.per_n {
        let _ = writeln!(out, "# {},{:e},{:e}", s.n, s.median, s.mean);
    }
    if let Some(f) = report.fit {
        let _ = writeln!(out, "# slope,{:e}\n# intercept,{:e}\n# r_squared,{:e}", f.slope, f.intercept, f.r_squared);
    }
    if let Some(s) = report.spearman {
        let _ = writeln!(out, "# spearman,{s:e}");
    }
    let _ = writeln!(out, "# mass,{:e}", report.mass);
    out
}

/// Parses the cell rows of [`rates_csv`] output.
pub fn parse_rates_csv(text: &str) -> Result<Vec<RateCell>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == RATE_CSV_HEADER => {}
        other => return Err(Error::Parse(format!("expected header '{RATE_CSV_HEADER}', got {other:?}"))),
    }
    let mut cells = Vec::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("bad rate row '{line}'")));
        }
        let bad = |_| Error::Parse(format!("bad rate row '{line}'"));
        cells.push(RateCell {
            n: parts[0].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            seed: parts[1].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            error: parts[2].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
        });
    }
    Ok(cells)
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const MARGIN: f64 = 60.0;

/// Log-log scatter of every cell and the per-N medians, the fitted line, and an N^{-1/2} guide
/// through the first median.
pub fn rates_svg(report: &RateReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">"
    );
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>");
    let pts: Vec<(f64, f64)> =
        report.cells.iter().filter(|c| c.error > 0.0).map(|c| ((c.n as f64).log10(), c.error.log10())).collect();
    if pts.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 - x0 < 1e-9 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (SVG_W - 2.0 * MARGIN);
    let sy = |y: f64| SVG_H - MARGIN - (y - y0) / (y1 - y0) * (SVG_H - 2.0 * MARGIN);
    let _ = writeln!(
        out,
        "<path class=\"axes\" d=\"M {m} {t} L {m} {b} L {r} {b}\" stroke=\"black\" fill=\"none\"/>",
        m = MARGIN,
        t = MARGIN,
        b = SVG_H - MARGIN,
        r = SVG_W - MARGIN
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">log10 N</text>",
        SVG_W / 2.0,
        SVG_H - 15.0
    );
    let _ = writeln!(
        out,
        "<text x=\"15\" y=\"{}\" font-size=\"14\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">log10 error</text>",
        SVG_H / 2.0,
        SVG_H / 2.0
    );
    for &(x, y) in &pts {
        let _ = writeln!(out, "<circle class=\"cell\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"2\" fill=\"#9aa\"/>", sx(x), sy(y));
    }
    for s in report.per_n.iter().filter(|s| s.median > 0.0) {
        let _ = writeln!(
            out,
            "<circle class=\"median\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"#c33\"/>",
            sx((s.n as f64).log10()),
            sy(s.median.log10())
        );
    }
    if let Some(f) = report.fit {
        let ln10 = std::f64::consts::LN_10;
        // log10 e = slope log10 N + intercept / ln 10
        let yf = |x: f64| f.slope * x + f.intercept / ln10;
        let _ = writeln!(
            out,
            "<line class=\"fit\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#c33\" stroke-width=\"2\"/>",
            sx(x0),
            sy(yf(x0)),
            sx(x1),
            sy(yf(x1))
        );
        if let Some(first) = report.per_n.iter().find(|s| s.median > 0.0) {
            let (gx, gy) = ((first.n as f64).log10(), first.median.log10());
            let yg = |x: f64| gy - 0.5 * (x - gx);
            let _ = writeln!(
                out,
                "<line class=\"guide\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#36c\" stroke-dasharray=\"6 4\"/>",
                sx(x0),
                sy(yg(x0)),
                sx(x1),
                sy(yg(x1))
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"13\">slope {:.4}, R² {:.4}; dashed: N^(-1/2)</text>",
            MARGIN + 10.0,
            MARGIN - 20.0,
            f.slope,
            f.r_squared
        );
    }
    out.push_str("</svg>\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Svg,
}

pub fn emit_report(report: &RateReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => rates_csv(report),
        ReportFormat::Svg => rates_svg(report),
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Flat key-value run configuration. Every key is optional; [`RunConfig::resolved`] fills the
/// defaults, and the resolved form is what gets echoed next to the outputs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub activation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "N_list", skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(format!("config echo: {e}")))
    }

    /// Values set in `other` replace those in `self`.
    pub fn overlay(&mut self, other: &RunConfig) {
        overlay!(self, other; variant, target, activation, tau, gamma, ell, s, r, u, p, q, domain, weight,
            upsilon, d, case, n, n_list, seeds, seed, grid_resolution, output_dir);
    }

    pub fn variant(&self) -> Result<Variant> {
        self.variant.as_deref().unwrap_or("unbounded").parse()
    }

    pub fn target(&self) -> Result<TargetFunction> {
        self.target.as_deref().unwrap_or("gauss:d=1").parse()
    }

    /// Defaults for everything the sampling subcommands use.
    pub fn resolved(&self) -> Result<RunConfig> {
        let variant = self.variant()?;
        let target = self.target()?;
        let d = target.dim();
        let mut out = self.clone();
        out.variant = Some(variant.to_string());
        out.target = Some(target.to_string());
        out.activation = Some(self.activation.clone().unwrap_or_else(|| "gaussian".into()));
        out.tau.get_or_insert(1.0);
        out.gamma.get_or_insert(0.0);
        out.ell.get_or_insert(0);
        out.p.get_or_insert(2.0);
        out.grid_resolution.get_or_insert(16);
        out.seed.get_or_insert(0);
        out.output_dir.get_or_insert_with(|| ".".into());
        match variant {
            Variant::Bounded => {
                out.s.get_or_insert(2.0);
                out.domain.get_or_insert_with(|| {
                    DomainSpec::Box(vec![(-1.0, 1.0); d]).to_string()
                });
                if out.weight.is_none() {
                    out.weight = Some(match &self.upsilon {
                        Some(u) => {
                            let ups: WeightSpec = u.parse()?;
                            sobolev_weight_from_upsilon(&ups, out.p.unwrap_or(2.0))?.to_string()
                        }
                        None => WeightSpec::Constant.to_string(),
                    });
                }
            }
            Variant::Unbounded => {
                out.r.get_or_insert(2.0);
                out.u.get_or_insert(4.5);
                out.domain.get_or_insert_with(|| DomainSpec::FullSpace(d).to_string());
                let u = out.u.unwrap_or(4.5);
                out.weight.get_or_insert_with(|| WeightSpec::BracketDecay(u).to_string());
            }
        }
        Ok(out)
    }

    pub fn maurey_config(&self) -> Result<MaureyConfig> {
        let r = self.resolved()?;
        let target = r.target()?;
        let activation: ActivationSpec = r.activation.as_deref().unwrap_or("gaussian").parse()?;
        let domain: DomainSpec = r.domain.as_deref().unwrap_or_default().parse()?;
        let mut cfg = match r.variant()? {
            Variant::Bounded => MaureyConfig::bounded(
                target,
                domain,
                r.gamma.unwrap_or(0.0),
                r.ell.unwrap_or(0),
                r.s.unwrap_or(2.0),
            ),
            Variant::Unbounded => {
                let mut c = MaureyConfig::unbounded(target, r.ell.unwrap_or(0), r.r.unwrap_or(2.0));
                c.domain = domain;
                c
            }
        };
        cfg.activation = activation;
        cfg.tau = r.tau.unwrap_or(1.0);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn error_norm(&self) -> Result<ErrorNormSpec> {
        let r = self.resolved()?;
        Ok(ErrorNormSpec {
            ell: r.ell.unwrap_or(0),
            p: r.p.unwrap_or(2.0),
            weight: r.weight.as_deref().unwrap_or("const").parse()?,
            domain: r.domain.as_deref().unwrap_or_default().parse()?,
            grid_resolution: r.grid_resolution.unwrap_or(16),
        })
    }

    pub fn rate_experiment(&self) -> Result<RateExperiment> {
        Ok(RateExperiment {
            config: self.maurey_config()?,
            n_values: self.n_list.clone().unwrap_or_else(|| (4..=10).map(|k| 1usize << k).collect()),
            seeds: self.seeds.clone().unwrap_or_else(|| (1..=20).collect()),
            norm: self.error_norm()?,
        })
    }
}
