//! Command-line front end. Exit status 0 on success, 1 on usage or input errors, 2 on domain
//! errors (singular model, insolubility, budget or precision failures) and on selftest failures.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactmath::rational::{format_rational, parse_rational, Rational};
use crate::heights::{height_bounds, model_shift, point_report, search_points, HeightOptions};
use crate::localsolve::{is_soluble, is_soluble_real};
use crate::models::{invariants, GenusOneModel, WeierstrassCurve};
use crate::realplace::delta_epsilon_real;
use crate::redgeom::{classify, reduce_model, Chart};
use crate::tamagawa::tamagawa_distances;

pub mod selftest;

#[derive(Parser, Debug)]
#[command(name = "ncover", version, about = "Genus one models, n-covering maps and explicit height bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit JSON (sorted keys) instead of plain text; errors go to stderr as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for the parallel stages (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Args, Debug)]
pub struct ModelArg {
    /// Path to a model JSON file.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ChartArg {
    Full,
    Affine,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// a-, b- and c-invariants and the discriminant.
    Invariants(ModelArg),
    /// Geometry of the reduction mod p.
    Classify {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        prime: u64,
    },
    /// Local solubility at p, or over R when --prime is omitted.
    IsSoluble {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        prime: Option<u64>,
        /// Lift the witness to a point mod p^k.
        #[arg(long)]
        lift: Option<u32>,
    },
    /// Tamagawa distances A_p.
    Tamagawa {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value = "full")]
        chart: ChartArg,
    },
    /// Extrema of max(|F|, |rF + G|) / max|x_i|^(2n) over the real points.
    RealBounds {
        #[command(flatten)]
        model: ModelArg,
        /// The x-shift r; taken from --curve when omitted.
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<String>,
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        digits: u32,
    },
    /// Height bounds B1, B2 for h(P) - h_E(pi P)/(2n).
    HeightBounds {
        #[command(flatten)]
        model: ModelArg,
        /// Minimal Weierstrass curve JSON.
        #[arg(long)]
        curve: PathBuf,
        /// Primes left out of the finite-place sum.
        #[arg(long = "ignore-prime")]
        ignore_prime: Vec<u64>,
        #[arg(long, default_value_t = 10)]
        digits: u32,
    },
    /// Rational points with coordinates bounded by --height.
    Search {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        height: u64,
    },
    /// Contributions and height difference of one point.
    PointReport {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        curve: PathBuf,
        /// Colon-separated coordinates, e.g. 1:0:0.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long = "ignore-prime")]
        ignore_prime: Vec<u64>,
    },
    /// Runs the acceptance suite on the shipped fixtures.
    Selftest {
        /// Fixture directory (defaults to the crate's data directory).
        #[arg(long)]
        data: Option<PathBuf>,
        /// Only criteria whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
}

/// Default fixture directory.
pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn read_json(path: &Path) -> Result<Value> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&s).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

pub fn load_model(path: &Path) -> Result<GenusOneModel> {
    GenusOneModel::from_json(&read_json(path)?)
}

pub fn load_curve(path: &Path) -> Result<WeierstrassCurve> {
    WeierstrassCurve::from_json(&read_json(path)?)
}

fn parse_point(s: &str) -> Result<Vec<Rational>> {
    s.split(':').map(parse_rational).collect()
}

fn check_prime_arg(p: u64) -> Result<u64> {
    crate::exactmath::rational::check_prime(p).map(|_| p)
}

/// Parses arguments, dispatches and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return 0;
            }
            if args.iter().any(|a| a == "--json") {
                eprintln!("{}", json!({"error": "usage", "message": e.render().to_string().trim()}));
            } else {
                let _ = e.print();
            }
            return 1;
        }
    };
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    if let Command::Selftest { data, filter } = &cli.command {
        let dir = data.clone().unwrap_or_else(data_dir);
        let outcomes = selftest::run(&dir, filter.as_deref());
        for o in &outcomes {
            emit(&if cli.json { o.to_json().to_string() } else { o.line() }, true);
        }
        return if outcomes.iter().all(|o| o.passed) { 0 } else { 2 };
    }
    match dispatch(&cli.command) {
        Ok((value, text)) => {
            if cli.json {
                emit(&serde_json::to_string_pretty(&value).unwrap_or_default(), true);
            } else {
                emit(&text, false);
            }
            0
        }
        Err(e) => {
            let (code, kind) = match &e {
                Error::Input(_) => (1, "input"),
                Error::Domain(_) => (2, "domain"),
                Error::Precision(_) => (2, "precision"),
                Error::Budget(_) => (2, "budget"),
            };
            if cli.json {
                eprintln!("{}", json!({"error": kind, "message": e.to_string()}));
            } else {
                eprintln!("ncover: {e}");
            }
            code
        }
    }
}

/// Writes to stdout; a closed pipe ends output silently.
fn emit(s: &str, newline: bool) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| if newline { out.write_all(b"\n") } else { Ok(()) });
}

fn rat_str(q: &Rational) -> String {
    format_rational(q)
}

fn dispatch(cmd: &Command) -> Result<(Value, String)> {
    match cmd {
        Command::Invariants(m) => {
            let model = load_model(&m.model)?;
            let inv = invariants(&model);
            let v = serde_json::to_value(&inv).map_err(|e| Error::Input(e.to_string()))?;
            let mut t = String::new();
            for (k, q) in [
                ("a1", &inv.a1),
                ("a2", &inv.a2),
                ("a3", &inv.a3),
                ("a4", &inv.a4),
                ("a6", &inv.a6),
                ("c4", &inv.c4),
                ("c6", &inv.c6),
                ("disc", &inv.disc),
            ] {
                t += &format!("{k} = {}\n", rat_str(q));
            }
            Ok((v, t))
        }
        Command::Classify { model, prime } => {
            let m = load_model(&model.model)?;
            let red = reduce_model(&m, check_prime_arg(*prime)?)?;
            let rep = classify(&red)?;
            let v = serde_json::to_value(&rep).map_err(|e| Error::Input(e.to_string()))?;
            let t = format!("p = {prime}\nsingular = {}\nlabel = {}\n", rep.singular, rep.label);
            Ok((v, t))
        }
        Command::IsSoluble { model, prime, lift } => {
            let m = load_model(&model.model)?;
            match prime {
                None => {
                    let s = is_soluble_real(&m)?;
                    Ok((json!({"place": "infinity", "soluble": s}), format!("soluble over R: {s}\n")))
                }
                Some(p) => {
                    let p = check_prime_arg(*p)?;
                    let cert = is_soluble(&m, p)?;
                    let mut v = json!({"place": p, "soluble": cert.is_some()});
                    if let Some(c) = &cert {
                        v["certificate"] = c.to_json(p, *lift)?;
                    }
                    Ok((v, format!("soluble over Q_{p}: {}\n", cert.is_some())))
                }
            }
        }
        Command::Tamagawa { model, prime, chart } => {
            let m = load_model(&model.model)?;
            let chart = match chart {
                ChartArg::Full => Chart::Full,
                ChartArg::Affine => Chart::Affine,
            };
            let a = tamagawa_distances(&m, check_prime_arg(*prime)?, chart)?;
            let d: Vec<String> = a.distances.iter().map(|x| x.to_string()).collect();
            Ok((a.to_json(), format!("A_{} = {{{}}}\n", a.p, d.join(", "))))
        }
        Command::RealBounds { model, shift, curve, digits } => {
            let m = load_model(&model.model)?;
            let r = match (shift, curve) {
                (Some(s), _) => parse_rational(s)?,
                (None, Some(c)) => model_shift(&m, &load_curve(c)?)?.r,
                (None, None) => Rational::from_integer(0.into()),
            };
            let b = delta_epsilon_real(&m, &r, *digits)?;
            let t = format!("r = {}\ndelta = {:.12e}\nepsilon = {:.12e}\n", rat_str(&r), b.delta_inf, b.epsilon_inf);
            Ok((b.to_json(), t))
        }
        Command::HeightBounds { model, curve, ignore_prime, digits } => {
            let m = load_model(&model.model)?;
            let e = load_curve(curve)?;
            let rep = height_bounds(&m, &e, &HeightOptions { ignore_primes: ignore_prime.clone(), digits: *digits })?;
            let mut t = format!("E = {}\nr = {}\n", rep.e_min, rat_str(&rep.shift.r));
            for a in &rep.primes {
                let d: Vec<String> = a.distances.iter().map(|x| x.to_string()).collect();
                t += &format!("A_{} = {{{}}}\n", a.p, d.join(", "));
            }
            t += &format!("delta = {:.12e}\nepsilon = {:.12e}\n", rep.real.delta_inf, rep.real.epsilon_inf);
            t += &format!("{:.5} <= h(P) - h_E(pi P)/{} <= {:.5}\n", rep.b1, 2 * rep.degree, rep.b2);
            Ok((rep.to_json(), t))
        }
        Command::Search { model, height } => {
            let m = load_model(&model.model)?;
            let pts = search_points(&m, *height)?;
            let strs: Vec<Vec<String>> = pts.iter().map(|p| p.iter().map(|x| x.to_string()).collect()).collect();
            let t: String = strs.iter().map(|p| format!("({})\n", p.join(":"))).collect();
            Ok((json!({"height": height, "points": strs}), t))
        }
        Command::PointReport { model, curve, point, ignore_prime } => {
            let m = load_model(&model.model)?;
            let e = load_curve(curve)?;
            let rep = height_bounds(&m, &e, &HeightOptions { ignore_primes: ignore_prime.clone(), digits: 10 })?;
            let pr = point_report(&m, &parse_point(point)?, &rep)?;
            let contrib: Vec<String> = pr.contributions.iter().map(|(p, a)| format!("{p}: {a}")).collect();
            let t = format!(
                "point = ({})\ncontributions = {}\nh(P) = {:.5}\nh_E(pi P) = {:.5}\ndifference = {:.5}\n",
                pr.point.join(":"),
                contrib.join(", "),
                pr.height,
                pr.height_e,
                pr.difference
            );
            Ok((pr.to_json(), t))
        }
        Command::Selftest { .. } => Err(Error::Input("selftest is handled separately".into())),
    }
}
