mod model;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use trialg::dialg::{check_right_leibniz, dminus_bracket, format_structure_constants, subalgebra_structure_constants};
use trialg::embed::{build_u, build_u2, EmbedError, Embedding};
use trialg::eval::{render_combination, CheckOptions, Mode, Report, EVAL_CAP_ENV};
use trialg::exactlin::Scalar;
use trialg::identity_dsl::{format_file, parse, IdentityChain};
use trialg::kp::{compare_with_golden, kp_apply, Collapse};
use trialg::trisys::{ann_subspace, complement_closure_check, jtd_products, leibts_bracket, THEOREMS};

use model::{Kind, ModelArgs};

#[derive(Parser)]
#[command(name = "trialg", version, about = "Identity expansion and exact verification for dialgebras and triple trisystems")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Subcommand)]
enum Command {
    /// Expand an identity in one operation into subscripted identities.
    Kp {
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        input: PathBuf,
        /// Reference identities: a DSL file, or a catalog set name.
        #[arg(long)]
        golden: Option<String>,
    },
    /// Verify axioms or theorems on a model.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Write the triple products (or their Jordan/Leibniz derivatives) as JSON.
    Derive {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value = "first")]
        kind: Kind,
        #[arg(long, value_enum, default_value = "triple")]
        products: Products,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a dialgebra model as JSON.
    Export {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the standard embedding of a trisystem into a dialgebra.
    Embed {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value = "first")]
        kind: Kind,
        #[arg(long, default_value = "embedding.json")]
        out: PathBuf,
    },
    /// Annihilator part of a trisystem, and optionally a complement check.
    Ann {
        #[command(flatten)]
        model: ModelArgs,
        /// Used when the input is a dialgebra.
        #[arg(long, value_enum, default_value = "second")]
        kind: Kind,
        /// Complement basis vectors such as `e11` or `e12+2*e21`.
        #[arg(long)]
        complement: Vec<String>,
        #[arg(long, default_value = "ATS2")]
        set: String,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Structure constants of a subalgebra of the bracket a⊣b − b⊢a on block matrices.
    Leibniz {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        m1: usize,
        #[arg(long)]
        p: Option<u64>,
        /// Comma-separated names (E1,E2,E3,X,B1,B2,B3 on 2×2) or label combinations.
        #[arg(long, value_delimiter = ',')]
        subspace: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Products {
    Triple,
    Jtd,
    Leibts,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Every chain of a catalog set.
    Variety {
        #[arg(long)]
        set: String,
        /// Which triple products to form on a dialgebra; defaults by set.
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// A named statement on a dialgebra model.
    Theorem {
        #[arg(long)]
        name: String,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Dialgebra axioms, and involution axioms when present.
    Dialgebra {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Right Leibniz identity for a⊣b − b⊢a.
    Leibniz {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Required with `--mode sampled`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Overrides the evaluation cap and TRISYS_EVAL_CAP.
    #[arg(long)]
    eval_cap: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Auto,
    Exhaustive,
    Sampled,
    Generators,
}

impl CheckArgs {
    fn options(&self) -> Result<CheckOptions> {
        let mode = match (self.mode, self.seed) {
            (ModeArg::Auto, _) => Mode::Auto,
            (ModeArg::Exhaustive, _) => Mode::Exhaustive,
            (ModeArg::Generators, _) => Mode::Generators,
            (ModeArg::Sampled, Some(seed)) => Mode::Sampled { count: self.samples, seed },
            (ModeArg::Sampled, None) => bail!("--mode sampled needs an explicit --seed"),
        };
        let mut opts = CheckOptions::from_env().with_mode(mode);
        if let Some(cap) = self.eval_cap {
            opts.eval_cap = cap;
        }
        if opts.eval_cap == 0 {
            bail!("evaluation cap ({EVAL_CAP_ENV}) must be at least 1");
        }
        Ok(opts)
    }
}

/// A mathematical falsifier was found and reported.
#[derive(Debug)]
pub struct Falsified;

impl fmt::Display for Falsified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("falsified")
    }
}

impl std::error::Error for Falsified {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Falsified>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let mathematical = matches!(
                e.downcast_ref::<EmbedError>(),
                Some(EmbedError::NotInVariety { .. } | EmbedError::NotClosed(_) | EmbedError::StarNotWellDefined { .. })
            );
            ExitCode::from(if mathematical { 1 } else { 2 })
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let format = cli.format;
    match &cli.command {
        Command::Kp { arity, input, golden } => cmd_kp(*arity, input, golden.as_deref(), format),
        Command::Check { what } => cmd_check(what, format),
        Command::Derive { model, kind, products, out } => {
            let t = model.load()?.trisystem(*kind)?;
            let v = match products {
                Products::Triple => t.to_json(),
                Products::Jtd => jtd_products(&t).to_json(),
                Products::Leibts => leibts_bracket(&t).to_json(),
            };
            write_json(&v, out.as_deref())
        }
        Command::Export { model, out } => write_json(&model.load()?.dialgebra()?.to_json(), out.as_deref()),
        Command::Embed { model, kind, out } => cmd_embed(model, *kind, out, format),
        Command::Ann { model, kind, complement, set, check } => cmd_ann(model, *kind, complement, set, check, format),
        Command::Leibniz { m, m1, p, subspace } => cmd_leibniz(*m, *m1, *p, subspace, format),
    }
}

fn render_vector_labels(v: &[Scalar], labels: &[String]) -> String {
    render_combination(v, |i| labels[i].clone())
}

fn write_json(v: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_chains(source: &str, what: &str) -> Result<Vec<IdentityChain>> {
    parse(source).map_err(|e| anyhow::anyhow!("{what}:{e}"))
}

/// A DSL file, or a catalog entry named directly or as `catalog/<name>.ids`.
fn golden_chains(name: &str) -> Result<Vec<IdentityChain>> {
    let path = Path::new(name);
    if path.exists() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {name}"))?;
        return read_chains(&text, name);
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(name);
    match trialg::catalog::source(stem) {
        Some(src) => read_chains(src, name),
        None => bail!("golden {name}: no such file or catalog set"),
    }
}

fn cmd_kp(arity: usize, input: &Path, golden: Option<&str>, format: Format) -> Result<()> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let chains = read_chains(&text, &input.display().to_string())?;
    if chains.is_empty() {
        bail!("{}: no identities", input.display());
    }
    let mut outputs = Vec::new();
    for c in &chains {
        if c.arity() != arity {
            bail!("identity {} has arity {}, expected {arity}", c.name(), c.arity());
        }
        outputs.push(kp_apply(c)?);
    }
    let deduped: Vec<IdentityChain> = outputs.iter().flat_map(|o| o.deduped.clone()).collect();
    let diff = golden.map(|g| golden_chains(g).map(|gold| compare_with_golden(&deduped, &gold))).transpose()?;

    match format {
        Format::Json => {
            let mut v = json!({ "outputs": outputs });
            if let Some(d) = &diff {
                v["golden"] = json!({ "match": d.is_match(), "missing": d.missing, "extra": d.extra });
            }
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        Format::Latex => {
            println!("\\begin{{align*}}");
            for c in &deduped {
                println!("  &{} \\\\", c.to_latex());
            }
            println!("\\end{{align*}}");
        }
        Format::Text => {
            for (c, o) in chains.iter().zip(&outputs) {
                println!("# input: {c}");
                println!("# part 1 ({})\n{}", o.part1.len(), format_file(&o.part1));
                println!("# part 2 ({})\n{}", o.part2.len(), format_file(&o.part2));
                println!("# deduplicated ({})\n{}", o.deduped.len(), format_file(&o.deduped));
                for Collapse { dropped, kept } in &o.collapsed {
                    println!("# {dropped} coincides with {kept}");
                }
            }
        }
    }
    if let Some(d) = diff {
        if format != Format::Json {
            for m in &d.missing {
                eprintln!("missing: {m}");
            }
            for x in &d.extra {
                eprintln!("extra: {x}");
            }
            eprintln!("golden: {}", if d.is_match() { "match" } else { "MISMATCH" });
        }
        if !d.is_match() {
            return Err(Falsified.into());
        }
    }
    Ok(())
}

fn report_json(r: &Report) -> Value {
    let mut v = serde_json::to_value(r).expect("reports serialize");
    v["status"] = json!(if r.passed() { "pass" } else { "fail" });
    v
}

fn report_latex(r: &Report) -> String {
    let mut s = format!("% {}\n\\begin{{tabular}}{{lll}}\nchain & status & evaluations \\\\\n\\hline\n", r.set);
    for c in &r.chains {
        s.push_str(&format!("{} & {:?} & {} \\\\\n", c.name.replace('_', "\\_"), c.status, c.evaluations));
    }
    s.push_str("\\end{tabular}\n");
    s
}

fn print_report(r: &Report, format: Format) {
    match format {
        Format::Text => print!("{}", r.render_text()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report_json(r)).expect("json")),
        Format::Latex => print!("{}", report_latex(r)),
    }
}

fn cmd_check(what: &CheckCommand, format: Format) -> Result<()> {
    let report = match what {
        CheckCommand::Variety { set, kind, model, check } => model::variety(&model.load()?, set, *kind, &check.options()?)?,
        CheckCommand::Theorem { name, model, check } => {
            if !THEOREMS.iter().any(|(n, _, _)| n == name) {
                let known: Vec<&str> = THEOREMS.iter().map(|(n, _, _)| *n).collect();
                bail!("unknown theorem {name}; known: {}", known.join(", "));
            }
            model::theorem(&model.load()?, name, &check.options()?)?
        }
        CheckCommand::Dialgebra { model, check } => model::dialgebra_axioms(&model.load()?, &check.options()?)?,
        CheckCommand::Leibniz { model, check } => model::leibniz(&model.load()?, &check.options()?)?,
    };
    print_report(&report, format);
    model::finish(&report)
}

fn cmd_embed(model: &ModelArgs, kind: Kind, out: &Path, format: Format) -> Result<()> {
    let t = model.load()?.trisystem(kind)?;
    let opts = CheckOptions::from_env();
    let e: Embedding = match kind {
        Kind::First => build_u(&t, &opts)?,
        Kind::Second => build_u2(&t, &opts)?,
    };
    fs::write(out, serde_json::to_string_pretty(&e.to_json())? + "\n")
        .with_context(|| format!("writing {}", out.display()))?;
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&e.to_json())?),
        _ => {
            println!("embedding of dimension {} written to {}", e.algebra.dim(), out.display());
            for b in &e.blocks {
                println!("  block {:<5} offset {:>3} dim {:>3}", b.name, b.offset, b.dim);
            }
            for r in [&e.axioms, &e.recovery, &e.operators] {
                match format {
                    Format::Latex => print!("{}", report_latex(r)),
                    _ => print!("{}", r.render_text()),
                }
            }
        }
    }
    if e.passed() {
        Ok(())
    } else {
        Err(Falsified.into())
    }
}

fn cmd_ann(
    model: &ModelArgs,
    kind: Kind,
    complement: &[String],
    set: &str,
    check: &CheckArgs,
    format: Format,
) -> Result<()> {
    let t = model.load()?.trisystem(kind)?;
    let ann = ann_subspace(&t);
    let labels = t.labels().to_vec();
    let report = if complement.is_empty() {
        None
    } else {
        let vs = complement
            .iter()
            .map(|c| model::parse_vector(c, &labels, t.kind()))
            .collect::<Result<Vec<_>>>()?;
        Some(complement_closure_check(&t, &vs, set, &check.options()?)?)
    };
    match format {
        Format::Json => {
            let basis: Vec<String> = ann.iter().map(|v| render_vector_labels(v, &labels)).collect();
            let mut v = json!({ "dim": ann.len(), "basis": basis });
            if let Some(r) = &report {
                v["complement"] = report_json(r);
            }
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        _ => {
            println!("dim A^ann = {}", ann.len());
            for v in &ann {
                println!("  {}", render_vector_labels(v, &labels));
            }
            if let Some(r) = &report {
                print_report(r, format);
            }
        }
    }
    report.as_ref().map_or(Ok(()), model::finish)
}

/// Named elements of `M_2^1`.
fn named_element(name: &str) -> Option<&'static str> {
    Some(match name {
        "E1" => "e11",
        "E2" => "e12",
        "E3" => "e21",
        "X" => "e22",
        "B1" => "e12",
        "B2" => "e21",
        "B3" => "e12+e22",
        _ => return None,
    })
}

fn cmd_leibniz(m: usize, m1: usize, p: Option<u64>, subspace: &[String], format: Format) -> Result<()> {
    let args = ModelArgs { model: None, from: None, gens: 1, deg: 1, m, m1, p, split: false, dim: 0 };
    let d = args.load()?.dialgebra()?;
    let bracket = dminus_bracket(&d);
    let labels = d.labels().to_vec();
    let names: Vec<String> = if subspace.is_empty() { labels.clone() } else { subspace.to_vec() };
    let vectors = names
        .iter()
        .map(|n| {
            let expr = if m == 2 { named_element(n).unwrap_or(n) } else { n };
            model::parse_vector(expr, &labels, d.kind())
        })
        .collect::<Result<Vec<Vec<Scalar>>>>()?;
    let sub = subalgebra_structure_constants(&bracket, &vectors)?;
    let mut basis_names: Vec<String> = Vec::new();
    let mut vi = 0;
    for b in &sub.basis {
        match vectors.iter().position(|v| v == b) {
            Some(i) if !basis_names.contains(&names[i]) => basis_names.push(names[i].clone()),
            _ => {
                vi += 1;
                basis_names.push(format!("v{vi}"));
            }
        }
    }
    let leib = check_right_leibniz(&bracket)?;
    match format {
        Format::Json => {
            let table: Vec<Value> = sub
                .constants
                .indices()
                .into_iter()
                .map(|idx| {
                    let v = sub.constants.entry_dense(&idx);
                    json!({ "a": basis_names[idx[0]], "b": basis_names[idx[1]], "bracket": render_vector_labels(&v, &basis_names) })
                })
                .collect();
            let basis: Vec<Value> = basis_names
                .iter()
                .zip(&sub.basis)
                .map(|(n, b)| json!({ "name": n, "vector": render_vector_labels(b, &labels) }))
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "dim": sub.basis.len(),
                    "added_by_closure": sub.added,
                    "basis": basis,
                    "constants": table,
                    "right_leibniz": report_json(&leib),
                }))?
            );
        }
        _ => {
            println!("subalgebra of dimension {} ({} added by closure)", sub.basis.len(), sub.added);
            for (n, b) in basis_names.iter().zip(&sub.basis) {
                println!("  {n} = {}", render_vector_labels(b, &labels));
            }
            print!("{}", format_structure_constants(&sub, &basis_names));
            print_report(&leib, format);
        }
    }
    model::finish(&leib)
}
