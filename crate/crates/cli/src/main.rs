use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use perfred::rootdata::json::{root_datum_to_json, RootDatumJson};
use perfred::rootdata::{builtin, builtin_names, weyl_group, RootDatum, DEFAULT_ENUMERATION_CAP};
use perfred::scalars::{LocalizedRational, Zp};
use perfred::sl2_classical::{decomposition_numbers, Sl2Oracle};
use perfred::sl2_perfect::{ExtTarget, PerfectSl2, DEFAULT_TRUNCATION};
use perfred::zp_equiv::{check_isogeny, check_isomorphism_detailed, decide_isomorphism, parse_rational_matrix, IsoStatus, SearchBudget};

const EXIT_UNKNOWN: u8 = 2;
const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "perfred", version, about = "Root data over Z[1/p] and perfected SL2")]
struct Cli {
    /// The prime p.
    #[arg(short = 'p', long = "prime", global = true)]
    p: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report (or image, for `sl2 fractal`) to this file instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Root data over Z[1/p].
    #[command(subcommand)]
    Rootdatum(RootdatumCmd),
    /// Perfected SL2.
    #[command(subcommand)]
    Sl2(Sl2Cmd),
}

#[derive(Args, Debug)]
struct DatumArg {
    /// `builtin:NAME` or `file:PATH`.
    #[arg(long = "a")]
    a: String,
}

#[derive(Subcommand, Debug)]
enum RootdatumCmd {
    /// Check the axioms one by one.
    Validate(DatumArg),
    /// Decide whether two root data are isomorphic, or check a given map.
    Iso {
        #[arg(long = "a")]
        a: String,
        #[arg(long = "b")]
        b: String,
        /// Candidate map, rows separated by `;`, entries by `,`.
        #[arg(long)]
        phi: Option<String>,
        #[arg(long, default_value_t = SearchBudget::default().coeff_bound)]
        coeff_bound: i64,
        #[arg(long, default_value_t = SearchBudget::default().exp_bound)]
        exp_bound: i64,
        #[arg(long, default_value_t = SearchBudget::default().node_budget)]
        node_budget: u64,
    },
    /// Check that a map is an isogeny.
    Isogeny {
        #[arg(long = "a")]
        a: String,
        #[arg(long = "b")]
        b: String,
        #[arg(long)]
        phi: String,
    },
    Dual(DatumArg),
    /// Weyl group order, type and longest element.
    Weyl {
        #[arg(long = "a")]
        a: String,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        /// Include all elements as root permutations.
        #[arg(long)]
        elements: bool,
    },
    /// Print a builtin datum, or list the names.
    Builtin {
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Simple,
    Costandard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ImageKind {
    Svg,
    Pgm,
}

#[derive(Subcommand, Debug)]
enum Sl2Cmd {
    /// Weights of L(n).
    Weights {
        #[arg(long)]
        n: String,
    },
    /// dim Ext^1(L(lambda), L(mu)) or Ext^1(L(lambda), costandard(mu)).
    Ext {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        mu: String,
        #[arg(long, value_enum)]
        target: TargetArg,
    },
    /// Composition factors of the costandard module.
    Decomp {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: u32,
    },
    /// Composition factors of the Weyl-type module.
    Weyltype {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: u32,
    },
    Socle {
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        depth: u32,
    },
    Blocks {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        mu: Option<String>,
    },
    /// Weight fractal of the simple modules.
    Fractal {
        #[arg(long)]
        max_n: u64,
        #[arg(long, default_value_t = 0)]
        depth: u32,
        /// Image format for `-o`; inferred from the extension when omitted.
        #[arg(long, value_enum)]
        image: Option<ImageKind>,
    },
    /// Classical decomposition numbers and Ext^1 for integer weights.
    Oracle {
        #[arg(long, conflicts_with_all = ["lambda", "mu"])]
        lambda_max: Option<u64>,
        #[arg(long, requires = "mu")]
        lambda: Option<u64>,
        #[arg(long, requires = "lambda")]
        mu: Option<u64>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(perfred::Error),
    Io(String),
}

impl From<perfred::Error> for Failure {
    fn from(e: perfred::Error) -> Self {
        Failure::Core(e)
    }
}

enum Output {
    Report(Value),
    /// A report whose table form is given verbatim.
    WithTable(Value, String),
}

struct Outcome {
    output: Output,
    unknown: bool,
}

impl Outcome {
    fn report(v: Value) -> Self {
        Outcome { output: Output::Report(v), unknown: false }
    }
}

fn require_p(p: Option<u64>) -> Result<u64, Failure> {
    p.ok_or_else(|| Failure::Usage("this command needs -p <prime>".into()))
}

fn load_datum(spec: &str, p: Option<u64>, validate: bool) -> Result<RootDatum, Failure> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok(builtin(name, require_p(p)?)?);
    }
    let Some(path) = spec.strip_prefix("file:") else {
        return Err(Failure::Usage(format!("datum must be builtin:NAME or file:PATH, got {spec:?}")));
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))?;
    let j: RootDatumJson = serde_json::from_str(&text)
        .map_err(|e| Failure::Core(perfred::Error::InvalidDatum(format!("{path}: malformed JSON: {e}"))))?;
    if let Some(p) = p {
        if p != j.p {
            return Err(perfred::Error::PrimeMismatch(p, j.p).into());
        }
    }
    Ok(if validate { j.to_datum()? } else { j.to_datum_unvalidated()? })
}

fn parse_phi(s: &str) -> Result<Vec<Vec<String>>, Failure> {
    let rows: Vec<Vec<String>> =
        s.split(';').map(|r| r.split(',').map(|x| x.trim().to_string()).collect()).collect();
    if rows.iter().any(|r| r.iter().any(String::is_empty)) {
        return Err(Failure::Usage(format!("cannot read matrix {s:?}; expected rows like \"1,0;0,1\"")));
    }
    Ok(rows)
}

fn scalar(zp: &Zp, s: &str) -> Result<LocalizedRational, Failure> {
    Ok(zp.parse(s)?)
}

fn run_rootdatum(cmd: RootdatumCmd, p: Option<u64>) -> Result<Outcome, Failure> {
    match cmd {
        RootdatumCmd::Validate(d) => {
            let rd = load_datum(&d.a, p, false)?;
            let rep = rd.validate();
            Ok(Outcome::report(json!({
                "p": rd.p(),
                "name": rd.name(),
                "valid": rep.passed(),
                "checks": rep.checks,
            })))
        }
        RootdatumCmd::Iso { a, b, phi, coeff_bound, exp_bound, node_budget } => {
            let rd1 = load_datum(&a, p, true)?;
            let rd2 = load_datum(&b, p, true)?;
            if rd1.p() != rd2.p() {
                return Err(perfred::Error::PrimeMismatch(rd1.p(), rd2.p()).into());
            }
            let zp = rd1.zp();
            if let Some(phi) = phi {
                let m = parse_rational_matrix(&parse_phi(&phi)?)?;
                let check = check_isomorphism_detailed(&rd1, &rd2, &m)?;
                let status = if check.valid { IsoStatus::Isomorphic } else { IsoStatus::NotIsomorphic };
                return Ok(Outcome::report(json!({
                    "p": zp.p(),
                    "status": status,
                    "map_check": check,
                })));
            }
            let budget = SearchBudget { coeff_bound, exp_bound, node_budget };
            let verdict = decide_isomorphism(&rd1, &rd2, budget)?;
            let mut v = verdict.to_json(&zp);
            v["p"] = json!(zp.p());
            Ok(Outcome { output: Output::Report(v), unknown: verdict.status == IsoStatus::Unknown })
        }
        RootdatumCmd::Isogeny { a, b, phi } => {
            let rd1 = load_datum(&a, p, true)?;
            let rd2 = load_datum(&b, p, true)?;
            if rd1.p() != rd2.p() {
                return Err(perfred::Error::PrimeMismatch(rd1.p(), rd2.p()).into());
            }
            let m = parse_rational_matrix(&parse_phi(&phi)?)?;
            let rep = check_isogeny(&rd1, &rd2, &m)?;
            let mut v = rep.to_json(&rd1.zp());
            v["p"] = json!(rd1.p());
            Ok(Outcome::report(v))
        }
        RootdatumCmd::Dual(d) => {
            let rd = load_datum(&d.a, p, true)?;
            Ok(Outcome::report(root_datum_to_json(&rd.dual())))
        }
        RootdatumCmd::Weyl { a, cap, elements } => {
            let rd = load_datum(&a, p, true)?;
            let mut w = weyl_group(&rd, cap)?;
            if !elements {
                w.elements = None;
            }
            let mut v = serde_json::to_value(&w).expect("serializable");
            v["order"] = json!(w.order.to_string());
            v["enumerated"] = json!(elements && w.elements.is_some());
            Ok(Outcome::report(v))
        }
        RootdatumCmd::Builtin { name, list } => match (name, list) {
            (_, true) => Ok(Outcome::report(json!({ "builtins": builtin_names() }))),
            (Some(name), false) => {
                let rd = builtin(&name, require_p(p)?)?;
                Ok(Outcome::report(root_datum_to_json(&rd)))
            }
            (None, false) => Err(Failure::Usage("give a builtin name or --list".into())),
        },
    }
}

fn fmt_list(zp: &Zp, v: &[LocalizedRational]) -> Vec<String> {
    v.iter().map(|x| zp.format(x)).collect()
}

fn run_sl2(cmd: Sl2Cmd, p: Option<u64>, output: Option<&PathBuf>) -> Result<Outcome, Failure> {
    let p = require_p(p)?;
    let engine = PerfectSl2::new(p)?;
    let zp = *engine.zp();
    match cmd {
        Sl2Cmd::Weights { n } => {
            let n = scalar(&zp, &n)?;
            let ws = engine.weights(&n)?;
            Ok(Outcome::report(json!({
                "p": p,
                "n": zp.format(&n),
                "dim": ws.len(),
                "weights": fmt_list(&zp, &ws),
            })))
        }
        Sl2Cmd::Ext { lambda, mu, target } => {
            let (l, m) = (scalar(&zp, &lambda)?, scalar(&zp, &mu)?);
            let t = match target {
                TargetArg::Simple => ExtTarget::Simple,
                TargetArg::Costandard => ExtTarget::Costandard,
            };
            Ok(Outcome::report(json!({
                "p": p,
                "lambda": zp.format(&l),
                "mu": zp.format(&m),
                "target": t,
                "dim": engine.ext1(&l, &m, t),
            })))
        }
        Sl2Cmd::Decomp { lambda, mu, truncation } => {
            let l = scalar(&zp, &lambda)?;
            let mut v = engine.costandard_factors(&l, truncation)?.to_json(&zp);
            if let Some(mu) = mu {
                let m = scalar(&zp, &mu)?;
                v["query"] = json!({"mu": zp.format(&m), "multiplicity": engine.costandard_multiplicity(&l, &m)});
            }
            Ok(Outcome::report(v))
        }
        Sl2Cmd::Weyltype { lambda, mu, truncation } => {
            let l = scalar(&zp, &lambda)?;
            let mut v = engine.weyl_type_factors(&l, truncation)?.to_json(&zp);
            if let Some(mu) = mu {
                let m = scalar(&zp, &mu)?;
                v["query"] = json!({"mu": zp.format(&m), "multiplicity": engine.weyl_type_multiplicity(&l, &m)?});
            }
            Ok(Outcome::report(v))
        }
        Sl2Cmd::Socle { lambda, depth } => {
            let l = scalar(&zp, &lambda)?;
            Ok(Outcome::report(engine.socle_series(&l, depth)?.to_json(&zp)))
        }
        Sl2Cmd::Blocks { lambda, mu } => {
            let l = scalar(&zp, &lambda)?;
            let mut v = json!({"p": p, "lambda": zp.format(&l), "label": engine.block_label(&l)});
            if let Some(mu) = mu {
                let m = scalar(&zp, &mu)?;
                let lm = engine.block_label(&m);
                v["mu"] = json!(zp.format(&m));
                v["mu_label"] = json!(lm);
                v["same_block"] = json!(lm == engine.block_label(&l));
            }
            Ok(Outcome::report(v))
        }
        Sl2Cmd::Fractal { max_n, depth, image } => {
            let f = engine.fractal(max_n, depth);
            let mut v = json!({"p": p, "max_n": max_n, "depth": depth, "point_count": f.points.len()});
            match output {
                Some(path) => {
                    let kind = image.unwrap_or_else(|| {
                        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
                            ImageKind::Pgm
                        } else {
                            ImageKind::Svg
                        }
                    });
                    let body = match kind {
                        ImageKind::Svg => f.to_svg(&zp),
                        ImageKind::Pgm => f.to_pgm(),
                    };
                    fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                    v["file"] = json!(path.display().to_string());
                    v["image"] = json!(if kind == ImageKind::Svg { "svg" } else { "pgm" });
                    // The image took the -o slot; the summary goes to stdout.
                    Ok(Outcome::report(v))
                }
                None => {
                    let label = |x: i64| zp.format(&zp.mul_pow(&zp.int(x), -(depth as i64)));
                    let pts: Vec<[String; 2]> =
                        f.points.iter().map(|&(n, w)| [label(n as i64), label(w)]).collect();
                    v["points"] = json!(pts);
                    Ok(Outcome::report(v))
                }
            }
        }
        Sl2Cmd::Oracle { lambda_max, lambda, mu } => match (lambda_max, lambda, mu) {
            (Some(lmax), _, _) => {
                let t = decomposition_numbers(lmax, p)?;
                let mut entries = Vec::new();
                for l in 0..=lmax {
                    for &(m, k) in t.row(l).iter().rev() {
                        entries.push(json!({"lambda": l, "mu": m, "multiplicity": k}));
                    }
                }
                let v = json!({"p": p, "lambda_max": lmax, "entries": entries});
                Ok(Outcome { output: Output::WithTable(v, t.to_csv()), unknown: false })
            }
            (None, Some(l), Some(m)) => {
                let o = Sl2Oracle::new(p)?;
                let opt = |r: perfred::Result<u64>| r.ok();
                Ok(Outcome::report(json!({
                    "p": p,
                    "lambda": l,
                    "mu": m,
                    "multiplicity": o.multiplicity(l, m),
                    "ext1_simple_costandard": opt(o.ext1_simple_costandard(l, m)),
                    "ext1_simple_simple": opt(o.ext1_simple_simple(l, m)),
                })))
            }
            _ => Err(Failure::Usage("give --lambda-max, or both --lambda and --mu".into())),
        },
    }
}

/// Flattens a report into `key<TAB>value` lines.
fn table(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
                let items: Vec<String> = a.iter().map(scalar_text).collect();
                out.push_str(&format!("{prefix}\t{}\n", items.join(" ")));
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            _ => out.push_str(&format!("{prefix}\t{}\n", scalar_text(v))),
        }
    }
    fn scalar_text(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}

fn render(outcome: &Outcome, format: Format) -> String {
    match (&outcome.output, format) {
        (Output::Report(v) | Output::WithTable(v, _), Format::Json) => {
            let mut s = serde_json::to_string_pretty(v).expect("serializable");
            s.push('\n');
            s
        }
        (Output::WithTable(_, t), Format::Table) => t.clone(),
        (Output::Report(v), Format::Table) => table(v),
    }
}

fn run(argv: Vec<String>) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let image_takes_output = matches!(cli.command, Command::Sl2(Sl2Cmd::Fractal { .. }));
    let result = match cli.command {
        Command::Rootdatum(c) => run_rootdatum(c, cli.p),
        Command::Sl2(c) => run_sl2(c, cli.p, cli.output.as_ref()),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_ERROR;
        }
    };
    let text = render(&outcome, cli.format);
    match (&cli.output, image_takes_output) {
        (Some(path), false) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_ERROR;
            }
        }
        _ => print!("{text}"),
    }
    if outcome.unknown {
        EXIT_UNKNOWN
    } else {
        0
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args().collect()))
}
