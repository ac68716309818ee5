use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use tauforge::algebra::{ChargedPoly, MPoly, Rat};
use tauforge::fock::{apply_window_matrix, sigma_inverse, sigma_map, WindowMatrix};
use tauforge::grassmannian::{
    companion_vectors, dtk_decomposition, dtk_vectors, generate_from_matrix, point_of_wedge,
    stable_subspace, window_point, Companions, GrPoint, RatMatrix,
};
use tauforge::hirota::{suite_vars, verify_suite};
use tauforge::psdo::{dress_from_tau, verify_constraint, verify_flows, LaxOptions};
use tauforge::Error;

#[derive(Parser)]
#[command(
    name = "tauforge",
    version,
    about = "Polynomial tau-functions of the vector constrained KP hierarchy"
)]
struct Cli {
    /// JSON run configuration: {"D", "window", "truncation", "seed", "trials"}, all optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Truncation depth for pseudo-differential operators.
    #[arg(long, global = true)]
    order: Option<u32>,
    /// Indented output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build τ from a rational matrix whose columns span the finite part of W.
    TauFromMatrix {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
        /// Allowed number of chain violations; defaults to the column count.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run the bilinear identity suite.
    Verify {
        #[command(flatten)]
        pairs: PairArgs,
        #[arg(long)]
        k: i64,
    },
    /// Grassmannian queries on a point W.
    #[command(subcommand)]
    Grass(GrassCmd),
    /// Dressing operator P and Lax operator L from τ.
    Dress {
        #[arg(long)]
        tau: PathBuf,
    },
    /// Check the constraint on L^k and the Lax flows.
    Lax {
        #[command(flatten)]
        pairs: PairArgs,
        #[arg(long)]
        k: u32,
        /// Keep only the first n pairs (pairs are derived from τ when not given).
        #[arg(long)]
        n: Option<usize>,
        /// Flow times to check.
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        times: Vec<u32>,
    },
    /// Apply a window matrix to |m⟩ and map the result through σ.
    FockApply {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        charge: i64,
    },
}

#[derive(Subcommand)]
enum GrassCmd {
    /// Codimension n of W' = {w ∈ W : s^k w ∈ W}, and W'.
    MinN(PointArgs),
    Companions(PointArgs),
    /// Decomposable summands of ∂τ/∂t_k.
    Dtk(PointArgs),
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    point: PathBuf,
    #[arg(long)]
    k: i64,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    tau: Option<PathBuf>,
    #[arg(long)]
    rho: Vec<PathBuf>,
    #[arg(long)]
    sigma: Vec<PathBuf>,
    /// A file holding {"tau", "rho", "sigma"} as emitted by `grass companions`.
    #[arg(long, conflicts_with_all = ["tau", "rho", "sigma"])]
    companions: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(rename = "D")]
    d: Option<usize>,
    window: Option<i64>,
    truncation: Option<u32>,
    seed: Option<u64>,
    trials: Option<usize>,
}

struct Settings {
    d: Option<usize>,
    window: Option<i64>,
    truncation: u32,
    seed: u64,
    trials: usize,
    pretty: bool,
}

/// Either a bare polynomial (charge 0) or `{"charge", "poly"}`.
#[derive(Deserialize)]
#[serde(untagged)]
enum PolyInput {
    Charged(ChargedPoly),
    Bare(MPoly),
}

impl From<PolyInput> for ChargedPoly {
    fn from(p: PolyInput) -> Self {
        match p {
            PolyInput::Charged(c) => c,
            PolyInput::Bare(p) => ChargedPoly::new(0, p),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_poly(path: &Path) -> anyhow::Result<ChargedPoly> {
    Ok(read_json::<PolyInput>(path)?.into())
}

fn positive(name: &str, v: u64) -> anyhow::Result<()> {
    if v == 0 {
        return Err(Error::InvalidInput(format!("{name} must be positive")).into());
    }
    Ok(())
}

impl Settings {
    fn new(cli: &Cli) -> anyhow::Result<Self> {
        let cfg: RunConfig = match &cli.config {
            Some(p) => read_json(p)?,
            None => RunConfig::default(),
        };
        let s = Settings {
            d: cfg.d,
            window: cfg.window,
            truncation: cli.order.or(cfg.truncation).unwrap_or(5),
            seed: cli.seed.or(cfg.seed).unwrap_or(0),
            trials: cli.trials.or(cfg.trials).unwrap_or(20),
            pretty: cli.pretty,
        };
        if let Some(d) = s.d {
            positive("D", d as u64)?;
        }
        if let Some(w) = s.window {
            positive("window", w.max(0) as u64)?;
        }
        positive("truncation", s.truncation as u64)?;
        positive("trials", s.trials as u64)?;
        Ok(s)
    }

    /// The configured variable count, raised to `needed` with a notice.
    fn vars(&self, needed: usize) -> usize {
        match self.d {
            Some(d) if d < needed => {
                eprintln!("notice: raising D from {d} to {needed}");
                needed
            }
            Some(d) => d,
            None => needed.max(1),
        }
    }

    fn emit<T: Serialize>(&self, v: &T) -> anyhow::Result<()> {
        let s = if self.pretty {
            serde_json::to_string_pretty(v)?
        } else {
            serde_json::to_string(v)?
        };
        let mut out = std::io::stdout().lock();
        match writeln!(out, "{s}") {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => Ok(r?),
        }
    }
}

type Pairs = (Vec<ChargedPoly>, Vec<ChargedPoly>);

fn load_pairs(a: &PairArgs) -> anyhow::Result<(ChargedPoly, Option<Pairs>)> {
    if let Some(p) = &a.companions {
        let c: Companions = read_json(p)?;
        return Ok((c.tau, Some((c.rho, c.sigma))));
    }
    let tau = read_poly(
        a.tau
            .as_deref()
            .ok_or_else(|| anyhow!(Error::InvalidInput("--tau is required".into())))?,
    )?;
    if a.rho.is_empty() && a.sigma.is_empty() {
        return Ok((tau, None));
    }
    let rho = a
        .rho
        .iter()
        .map(|p| read_poly(p))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let sigma = a
        .sigma
        .iter()
        .map(|p| read_poly(p))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok((tau, Some((rho, sigma))))
}

/// `a = c·b` for a single nonzero rational `c`.
fn ratio(a: &MPoly, b: &MPoly) -> Option<Rat> {
    let (m, cb) = b.terms().next()?;
    let c = a.coeff(m.exps()) / cb;
    (a == &b.scale(&c) && !a.is_zero()).then_some(c)
}

/// Companion pairs of τ read off from the point W with τ_W ∝ τ, rescaled so
/// that they belong to τ itself.
fn derive_pairs(tau: &ChargedPoly, k: i64) -> anyhow::Result<Pairs> {
    let w = point_of_wedge(&sigma_inverse(tau)?)?;
    let nvars = tau.poly.nvars();
    let c = companion_vectors(&w, k)?;
    let c = c.to_polys(nvars.max(c.max_weight() as usize).max(1))?;
    let lambda = ratio(
        &c.tau.poly.with_vars(nvars.max(c.tau.poly.nvars()))?,
        &tau.poly.with_vars(nvars.max(c.tau.poly.nvars()))?,
    )
    .ok_or_else(|| Error::InvalidInput("tau is not the tau-function of its own point".into()))?;
    let inv = Rat::from_integer(1.into()) / lambda;
    let rescale = |v: Vec<ChargedPoly>| -> Vec<ChargedPoly> {
        v.into_iter()
            .map(|p| ChargedPoly::new(p.charge, p.poly.scale(&inv)))
            .collect()
    };
    Ok((rescale(c.rho), rescale(c.sigma)))
}

fn compact(p: ChargedPoly) -> anyhow::Result<ChargedPoly> {
    let n = p.poly.max_var_used().max(1);
    Ok(ChargedPoly::new(p.charge, p.poly.with_vars(n)?))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let s = Settings::new(&cli)?;
    match &cli.cmd {
        Cmd::TauFromMatrix { matrix, k, n } => {
            let a: RatMatrix = read_json(matrix)?;
            let nvars = s.vars(a.rows());
            let g = generate_from_matrix(&a, *k, n.unwrap_or(a.cols()), nvars)?;
            let tau = if s.d.is_some() {
                g.tau
            } else {
                compact(g.tau)?
            };
            s.emit(&json!({ "tau": tau, "report": g.report, "point": g.point }))?;
            Ok(true)
        }
        Cmd::Verify { pairs, k } => {
            let (tau, p) = load_pairs(pairs)?;
            let (rho, sigma) = p.unwrap_or_default();
            let nvars = s.vars(suite_vars(&tau, &rho, &sigma, *k));
            let report = verify_suite(&tau, &rho, &sigma, *k, nvars)?;
            s.emit(&report)?;
            Ok(report.pass())
        }
        Cmd::Grass(g) => {
            let (PointArgs { point, k }, which) = match g {
                GrassCmd::MinN(a) => (a, 0),
                GrassCmd::Companions(a) => (a, 1),
                GrassCmd::Dtk(a) => (a, 2),
            };
            let w: GrPoint = read_json(point)?;
            match which {
                0 => {
                    let st = stable_subspace(&w, *k)?;
                    s.emit(&json!({ "n": st.n, "wprime": st.wprime }))?;
                }
                1 => {
                    let c = companion_vectors(&w, *k)?;
                    s.emit(&c.to_polys(s.vars(c.max_weight() as usize))?)?;
                }
                _ => {
                    let weight = dtk_vectors(&w, *k)?
                        .iter()
                        .map(|x| x.max_weight())
                        .max()
                        .unwrap_or(0);
                    let polys = dtk_decomposition(&w, *k, s.vars(weight as usize))?;
                    s.emit(&polys)?;
                }
            }
            Ok(true)
        }
        Cmd::Dress { tau } => {
            let tau = read_poly(tau)?;
            let nvars = s.vars(tau.poly.max_var_used());
            s.emit(&dress_from_tau(&tau, s.truncation, nvars)?)?;
            Ok(true)
        }
        Cmd::Lax { pairs, k, n, times } => {
            let (tau, p) = load_pairs(pairs)?;
            if tau.is_zero() {
                return Err(Error::ZeroTau.into());
            }
            let (mut rho, mut sigma) = match p {
                Some(p) => p,
                None => derive_pairs(&tau, *k as i64)?,
            };
            if let Some(n) = n {
                rho.truncate(*n);
                sigma.truncate(*n);
            }
            let opts = LaxOptions {
                truncation: s.truncation,
                trials: s.trials,
                seed: s.seed,
                ..LaxOptions::default()
            };
            let constraint = verify_constraint(&tau, &rho, &sigma, *k, &opts)?;
            let flows = verify_flows(&tau, &rho, &sigma, *k, times, &opts)?;
            let pass = constraint.pass && flows.pass;
            s.emit(&json!({ "constraint": constraint, "flows": flows }))?;
            Ok(pass)
        }
        Cmd::FockApply { matrix, charge } => {
            let a: WindowMatrix = read_json(matrix)?;
            let target = s.window.unwrap_or(a.window());
            let v = apply_window_matrix(&a, *charge, target)?;
            let nvars = s.vars(v.max_weight() as usize);
            let sigma = sigma_map(&v, nvars)?;
            s.emit(&json!({ "vector": v, "sigma": sigma, "point": window_point(&a, *charge) }))?;
            Ok(true)
        }
    }
}

/// Failed checks and failed construction conditions exit 1, bad input exits 2.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(
            Error::RankDeficient { .. }
            | Error::TooManyViolations { .. }
            | Error::ChainExclusion { .. }
            | Error::PoleBudgetExhausted { .. }
            | Error::JetPrecision { .. },
        ) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = tauforge::init_threads_from_env() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
