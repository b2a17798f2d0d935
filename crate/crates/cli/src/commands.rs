//! Argument model and subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, ValueEnum};
use serde::Serialize;

use barron_core::embedding::{
    embedding_constant_scan, gaussian_family, optimized_tau1, ratio_csv, validate_params, CaseKind, EmbeddingCase,
    VerifySettings,
};
use barron_core::experiments::{rates_csv, rates_svg, run_rate_sweep, RateCell, RateReport, RunConfig};
use barron_core::function::Difference;
use barron_core::norms::{build_quadrature, norm_csv_row, weighted_sobolev_estimate, DomainSpec, NORM_CSV_HEADER};
use barron_core::sampler::MaureySampler;
use barron_core::weights::{check_ap, sobolev_weight_from_upsilon, BallFamily, WeightSpec};
use barron_core::{Error, ErrorClass, Result, TargetFunction};

pub const EXIT_CONTRACT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_PARSE: u8 = 65;
pub const EXIT_IO: u8 = 74;

pub const ECHO_FILE: &str = "config.echo.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Weighted Sobolev norm of a catalog target on a domain.
    Norm,
    /// Sampled Muckenhoupt A_p check of a radial weight.
    Apcheck,
    /// Embedding ratios over a target family.
    Embed,
    /// Sample one network and measure its error.
    Approx,
    /// Convergence-rate sweep over N and seeds.
    Rates,
}

#[derive(Debug, Parser)]
#[command(name = "barron", version, about = "Shallow-network approximation in weighted Sobolev norms")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Catalog target, e.g. gauss:d=1 or mix:d=2:coefs=1,-0.5:centers=0,0|1,0:scales=1,0.5
    #[arg(long)]
    pub target: Option<String>,
    /// gaussian | sech | rational | bump:B=2, optionally with :v=<decay>
    #[arg(long)]
    pub activation: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    /// bounded | unbounded
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub u: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Second exponent (Hausdorff-Young q, Fourier-Lebesgue exponent)
    #[arg(long)]
    pub q: Option<f64>,
    /// box:a,b;c,d | ball:c1,c2:R | rd:d
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// const | pow:a | bracket:s | decay:u | derived:<w>:p=P | raised:<w>:e=E | reflected:<w>:delta=D
    #[arg(long, allow_hyphen_values = true)]
    pub weight: Option<String>,
    /// Radial weight υ for Muckenhoupt checks and derived Sobolev weights
    #[arg(long, allow_hyphen_values = true)]
    pub upsilon: Option<String>,
    /// Network width (approx) or comma-separated widths (rates)
    #[arg(long = "N")]
    pub n: Option<String>,
    /// Comma-separated seeds or a range a..b
    #[arg(long)]
    pub seeds: Option<String>,
    /// Quadrature nodes per panel
    #[arg(long)]
    pub grid: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<String>,
    /// Flat TOML configuration; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dimension for apcheck and embed
    #[arg(long)]
    pub d: Option<usize>,
    /// Embedding case, e.g. optimized-barron or general-barron:tau0=2:tau1=inf:t1=0.6:t2=0.6
    #[arg(long = "case")]
    pub case: Option<String>,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<T>().map_err(|_| Error::Parse(format!("bad {what} entry '{x}'"))))
        .collect()
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad seed range '{s}'")))?;
        let b: u64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad seed range '{s}'")))?;
        if b < a {
            return Err(Error::Parse(format!("empty seed range '{s}'")));
        }
        return Ok((a..=b).collect());
    }
    parse_list(s, "seed")
}

impl Flags {
    fn to_config(&self, command: Command) -> Result<RunConfig> {
        let mut c = RunConfig {
            variant: self.variant.clone(),
            target: self.target.clone(),
            activation: self.activation.clone(),
            tau: self.tau,
            gamma: self.gamma,
            ell: self.ell,
            s: self.s,
            r: self.r,
            u: self.u,
            p: self.p,
            q: self.q,
            domain: self.domain.clone(),
            weight: self.weight.clone(),
            upsilon: self.upsilon.clone(),
            d: self.d,
            case: self.case.clone(),
            seed: self.seed,
            grid_resolution: self.grid,
            output_dir: self.out.clone(),
            ..RunConfig::default()
        };
        if let Some(s) = &self.seeds {
            c.seeds = Some(parse_seeds(s)?);
        }
        if let Some(n) = &self.n {
            let list: Vec<usize> = parse_list(n, "N")?;
            match command {
                Command::Rates => c.n_list = Some(list),
                _ => match list.as_slice() {
                    [one] => c.n = Some(*one),
                    _ => return Err(Error::Parse(format!("--N takes a single width here, got '{n}'"))),
                },
            }
        }
        Ok(c)
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Contract => EXIT_CONTRACT,
        ErrorClass::Numerical => EXIT_NUMERICAL,
        ErrorClass::Parse => EXIT_PARSE,
        ErrorClass::Io => EXIT_IO,
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut cfg = match &cli.flags.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.overlay(&cli.flags.to_config(cli.command)?);
    match cli.command {
        Command::Norm => norm(cfg),
        Command::Apcheck => apcheck(cfg),
        Command::Embed => embed(cfg),
        Command::Approx => approx(cfg),
        Command::Rates => rates(cfg),
    }
}

fn output_dir(cfg: &mut RunConfig) -> Result<PathBuf> {
    let dir = PathBuf::from(cfg.output_dir.get_or_insert_with(|| ".".into()).clone());
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn echo(dir: &Path, cfg: &RunConfig) -> Result<()> {
    write(dir, ECHO_FILE, &cfg.to_toml()?)
}

fn unit_box(d: usize) -> DomainSpec {
    DomainSpec::Box(vec![(-1.0, 1.0); d])
}

/// ω from `weight`, else υ^{-1/p'} from `upsilon`, else ω ≡ 1.
fn sobolev_weight(cfg: &RunConfig, p: f64) -> Result<WeightSpec> {
    match (&cfg.weight, &cfg.upsilon) {
        (Some(w), _) => w.parse(),
        (None, Some(u)) => sobolev_weight_from_upsilon(&u.parse()?, p),
        (None, None) => Ok(WeightSpec::Constant),
    }
}

fn norm(mut cfg: RunConfig) -> Result<()> {
    let target = cfg.target()?;
    let d = target.dim();
    let p = *cfg.p.get_or_insert(2.0);
    let ell = *cfg.ell.get_or_insert(0);
    let res = *cfg.grid_resolution.get_or_insert(16);
    let domain: DomainSpec = match &cfg.domain {
        Some(s) => s.parse()?,
        None => unit_box(d),
    };
    let w = sobolev_weight(&cfg, p)?;
    cfg.target = Some(target.to_string());
    cfg.domain = Some(domain.to_string());
    cfg.weight = Some(w.to_string());
    let dir = output_dir(&mut cfg)?;
    let grid = build_quadrature(&domain, &w, p, res)?;
    let est = weighted_sobolev_estimate(&target, ell, p, &w, &grid)?;
    println!("value = {:.15e}, tail_bound = {:.3e}", est.value, est.tail_bound);
    write(&dir, "report.csv", &format!("{NORM_CSV_HEADER}\n{}\n", norm_csv_row(&domain, &w, ell, p, &est)))?;
    echo(&dir, &cfg)
}

fn apcheck(mut cfg: RunConfig) -> Result<()> {
    let ups: WeightSpec = cfg
        .upsilon
        .as_deref()
        .ok_or_else(|| Error::Parameter("apcheck needs --upsilon".into()))?
        .parse()?;
    let p = *cfg.p.get_or_insert(2.0);
    let d = *cfg.d.get_or_insert(1);
    cfg.upsilon = Some(ups.to_string());
    let dir = output_dir(&mut cfg)?;
    let report = check_ap(&ups, p, &BallFamily::standard(d))?;
    println!("verdict = {}, supremum = {:e}", report.verdict, report.supremum);
    let mut csv = String::from("center,radius,statistic\n");
    for (b, s) in report.balls.iter().zip(&report.statistics) {
        let c: Vec<String> = b.center.iter().map(|x| format!("{x:e}")).collect();
        csv.push_str(&format!("\"{}\",{:e},{:e}\n", c.join(","), b.radius, s));
    }
    csv.push_str(&format!("# verdict,{}\n# supremum,{:e}\n", report.verdict, report.supremum));
    write(&dir, "report.csv", &csv)?;
    echo(&dir, &cfg)
}

/// `name[:key=value]*` with keys tau0, tau1, tau2, t1, t2.
fn parse_case(s: &str) -> Result<(CaseKind, Vec<(String, f64)>)> {
    let mut parts = s.split(':');
    let kind: CaseKind = parts.next().unwrap_or_default().parse()?;
    let mut kv = Vec::new();
    for part in parts {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("bad case parameter '{part}'")))?;
        if !matches!(k, "tau0" | "tau1" | "tau2" | "t1" | "t2") {
            return Err(Error::Parse(format!("unknown case parameter '{k}'")));
        }
        let v: f64 = match v {
            "inf" => f64::INFINITY,
            _ => v.parse().map_err(|_| Error::Parse(format!("bad value in '{part}'")))?,
        };
        kv.push((k.to_string(), v));
    }
    Ok((kind, kv))
}

fn embed(mut cfg: RunConfig) -> Result<()> {
    let (kind, kv) = parse_case(cfg.case.as_deref().unwrap_or("barron-sobolev"))?;
    let get = |k: &str| kv.iter().find(|(n, _)| n == k).map(|x| x.1);
    let target: Option<TargetFunction> = cfg.target.as_deref().map(str::parse).transpose()?;
    let domain: Option<DomainSpec> = cfg.domain.as_deref().map(str::parse).transpose()?;
    let d = cfg.d.or(target.as_ref().map(|t| t.dim())).or(domain.as_ref().map(|x| x.dim())).unwrap_or(1);
    cfg.d = Some(d);
    let domain = domain.unwrap_or_else(|| unit_box(d));
    let p = *cfg.p.get_or_insert(2.0);
    let q = *cfg.q.get_or_insert(2.0);
    let gamma = *cfg.gamma.get_or_insert(0.0);
    let ell = *cfg.ell.get_or_insert(0);
    let r = *cfg.r.get_or_insert(2.0);
    let u = *cfg.u.get_or_insert(2.0);
    let ups: WeightSpec = cfg.upsilon.as_deref().unwrap_or("const").parse()?;
    let res = *cfg.grid_resolution.get_or_insert(8);
    let case = match kind {
        CaseKind::General => EmbeddingCase::general(
            domain,
            ell,
            p,
            q,
            gamma,
            ups.clone(),
            (get("tau1").unwrap_or(2.0), get("tau2").unwrap_or(1.0)),
            (get("t1").unwrap_or(0.0), get("t2").unwrap_or(0.0)),
        ),
        CaseKind::BarronSobolev => EmbeddingCase::barron_sobolev(domain, ell),
        CaseKind::GeneralBarron => EmbeddingCase::general_barron(
            domain,
            ell,
            p,
            gamma,
            ups.clone(),
            (get("tau0").unwrap_or(p), get("tau1").unwrap_or(optimized_tau1(p))),
            (get("t1").unwrap_or(gamma), get("t2").unwrap_or(gamma)),
        ),
        CaseKind::OptimizedBarron => EmbeddingCase::optimized_barron(domain, ell, p, gamma, ups.clone()),
        CaseKind::ConjugateFourierLebesgue => EmbeddingCase::conjugate_fl(domain, ell, gamma, q, ups.clone()),
        CaseKind::LowDegree => EmbeddingCase::low_degree(domain, ell, p, q, r, ups.clone()),
        CaseKind::UnboundedDomain => EmbeddingCase::unbounded(d, ell, p, q, u),
        CaseKind::HausdorffYoungI => EmbeddingCase::hausdorff_young_i(d, p, q, ups.clone()),
        CaseKind::HausdorffYoungII => EmbeddingCase::hausdorff_young_ii(d, p, q, ups.clone()),
    };
    cfg.upsilon = Some(ups.to_string());
    let dir = output_dir(&mut cfg)?;
    let violations = validate_params(&case);
    if !violations.is_empty() {
        for v in &violations {
            println!("violated: {v}");
        }
        return Err(Error::Contract(format!("{} violated condition(s) for {}", violations.len(), case.kind)));
    }
    let family = match target {
        Some(t) => vec![t],
        None => gaussian_family(d, 0.25, 4.0, 10)?,
    };
    let settings = VerifySettings { resolution: res, ..VerifySettings::default() };
    let scan = embedding_constant_scan(&case, &family, &settings)?;
    println!("case = {}, max_ratio = {:e}, members = {}", case.kind, scan.max_ratio, scan.records.len());
    write(&dir, "report.csv", &ratio_csv(&scan.records))?;
    echo(&dir, &cfg)
}

#[derive(Serialize)]
struct NetworkSidecar<'a> {
    config: &'a RunConfig,
    mass: f64,
    mass_uncertainty: f64,
    seed: u64,
    width: usize,
    error: f64,
}

fn approx(cfg: RunConfig) -> Result<()> {
    let mut cfg = cfg.resolved()?;
    let n = *cfg.n.get_or_insert(64);
    let seed = *cfg.seed.get_or_insert(0);
    let dir = output_dir(&mut cfg)?;
    let mc = cfg.maurey_config()?;
    let spec = cfg.error_norm()?;
    let sampler = MaureySampler::new(&mc)?;
    let rep = sampler.sample(n, seed)?;
    let net = sampler.assemble(&rep)?;
    net.check_budget()?;
    let grid = build_quadrature(&spec.domain, &spec.weight, spec.p, spec.grid_resolution)?;
    let error = weighted_sobolev_estimate(&Difference::new(&mc.target, &net)?, spec.ell, spec.p, &spec.weight, &grid)?;
    println!("N = {n}, seed = {seed}, mass = {:e}, error = {:e}", rep.mass, error.value);
    write(&dir, "network.txt", &net.to_text())?;
    let sidecar = NetworkSidecar {
        config: &cfg,
        mass: rep.mass,
        mass_uncertainty: rep.mass_uncertainty,
        seed,
        width: n,
        error: error.value,
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Parse(e.to_string()))?;
    write(&dir, "network.json", &(json + "\n"))?;
    let report = RateReport::from_cells(vec![RateCell { n, seed, error: error.value }], rep.mass)?;
    write(&dir, "report.csv", &rates_csv(&report))?;
    echo(&dir, &cfg)
}

fn rates(cfg: RunConfig) -> Result<()> {
    let mut cfg = cfg.resolved()?;
    let base = cfg.seed.unwrap_or(0);
    cfg.seeds.get_or_insert_with(|| (base + 1..=base + 20).collect());
    cfg.n_list.get_or_insert_with(|| (4..=10).map(|k| 1usize << k).collect());
    let dir = output_dir(&mut cfg)?;
    let exp = cfg.rate_experiment()?;
    let report = run_rate_sweep(&exp)?;
    if let Some(f) = report.fit {
        println!(
            "slope = {:.6}, intercept = {:.6}, r_squared = {:.6}, spearman = {:.6}",
            f.slope,
            f.intercept,
            f.r_squared,
            report.spearman.unwrap_or(f64::NAN)
        );
    }
    write(&dir, "report.csv", &rates_csv(&report))?;
    write(&dir, "report.svg", &rates_svg(&report))?;
    echo(&dir, &cfg)
}
