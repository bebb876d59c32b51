use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde_json::Value;

use trialg::dialg::{
    check_dialgebra_model, check_involution_model, check_right_leibniz_model, differential_dialgebra,
    matrix_dialgebra, triangular_example, BlockContext, DMinus, DialgebraInstance, FreeDialgebra,
};
use trialg::eval::{CheckOptions, Model, Report, TensorModel};
use trialg::exactlin::{Scalar, ScalarKind};
use trialg::trisys::{
    att1_from_dialgebra, att2_from_dialgebra, check_theorem, check_variety, Att1, Att2, Jtd, Leibts,
    TrisystemInstance,
};

use crate::Falsified;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Free dialgebra on `--gens` letters truncated at degree `--deg`.
    Free,
    /// Block matrices `M_m^{m1}` with conjugate transpose.
    Matrix,
    /// Upper triangular 2×2 matrices with `d = [e12, ·]`.
    Differential,
    /// The zero trisystem of dimension `--dim`.
    Zero,
    /// A dialgebra or trisystem JSON file given by `--from`.
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    First,
    Second,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Defaults to `file` when `--from` is given, `matrix` otherwise.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub from: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub gens: usize,
    #[arg(long, default_value_t = 5)]
    pub deg: usize,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub m1: usize,
    /// Odd prime modulus; rationals when omitted.
    #[arg(long)]
    pub p: Option<u64>,
    /// Coefficients in GF(p)×GF(p) with the swap as conjugation.
    #[arg(long)]
    pub split: bool,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
}

impl ModelArgs {
    pub fn scalar_kind(&self) -> Result<ScalarKind> {
        match self.p {
            None => Ok(ScalarKind::Rational),
            Some(2) => bail!("--p must be an odd prime"),
            Some(p) => Ok(ScalarKind::prime(p)?),
        }
    }

    pub fn load(&self) -> Result<Loaded> {
        let kind = self.scalar_kind()?;
        let model = self.model.unwrap_or(if self.from.is_some() { ModelKind::File } else { ModelKind::Matrix });
        Ok(match model {
            ModelKind::Free => {
                if self.gens == 0 || self.deg == 0 {
                    bail!("--gens and --deg must be at least 1");
                }
                Loaded::Free(FreeDialgebra::new(kind, self.gens, self.deg))
            }
            ModelKind::Matrix => {
                let mut ctx = BlockContext::new(self.m, self.m1, kind)?;
                if self.split {
                    ctx = ctx.split();
                }
                Loaded::Dialgebra(matrix_dialgebra(ctx)?)
            }
            ModelKind::Differential => {
                let (mult, d, labels) = triangular_example(kind);
                Loaded::Dialgebra(differential_dialgebra(&mult, &d, labels)?)
            }
            ModelKind::Zero => Loaded::Trisystem(TrisystemInstance::zero(kind, self.dim)),
            ModelKind::File => {
                let path = self.from.as_deref().context("--model file needs --from")?;
                load_file(path)?
            }
        })
    }
}

pub enum Loaded {
    Free(FreeDialgebra),
    Dialgebra(DialgebraInstance),
    Trisystem(TrisystemInstance),
}

pub fn load_file(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    match v.get("type").and_then(Value::as_str) {
        Some("dialgebra") => Ok(Loaded::Dialgebra(DialgebraInstance::from_json(&v)?)),
        Some("trisystem") => Ok(Loaded::Trisystem(TrisystemInstance::from_json(&v)?)),
        other => bail!("{}: expected type dialgebra or trisystem, found {other:?}", path.display()),
    }
}

impl Loaded {
    /// The trisystem of the requested kind; dialgebras are converted.
    pub fn trisystem(self, kind: Kind) -> Result<TrisystemInstance> {
        match (self, kind) {
            (Loaded::Trisystem(t), _) => Ok(t),
            (Loaded::Dialgebra(d), Kind::First) => Ok(att1_from_dialgebra(&d)),
            (Loaded::Dialgebra(d), Kind::Second) => Ok(att2_from_dialgebra(&d)?),
            (Loaded::Free(_), _) => bail!("the free model has no finite structure tensor; choose another model"),
        }
    }

    pub fn dialgebra(self) -> Result<DialgebraInstance> {
        match self {
            Loaded::Dialgebra(d) => Ok(d),
            _ => bail!("this command needs a finite dialgebra (matrix, differential or a dialgebra file)"),
        }
    }
}

fn ats_model(t: &TrisystemInstance) -> TensorModel<'_> {
    TensorModel::new(t.kind(), t.dim(), vec![(None, &t.products()[0])]).with_labels(t.labels())
}

fn on_trisystem<M: Model>(t: &M, set: &str, opts: &CheckOptions) -> Result<Report> {
    Ok(match set {
        "ATT1" | "ATT2" => check_variety(t, set, opts)?,
        "JTD" => check_variety(&Jtd(t), set, opts)?,
        "LEIBTS" => check_variety(&Leibts(t), set, opts)?,
        _ => bail!("set {set} does not apply to a trisystem"),
    })
}

fn on_dialgebra<M: Model>(d: &M, set: &str, kind: Option<Kind>, opts: &CheckOptions) -> Result<Report> {
    Ok(match set {
        "DIALGEBRA" | "LEFT_SYMMETRIC_DI" => check_variety(d, set, opts)?,
        "LEIBNIZ" => check_right_leibniz_model(&DMinus(d), opts)?,
        "ATT1" | "ATT2" | "JTD" | "LEIBTS" => {
            let kind = kind.unwrap_or(if set == "ATT2" { Kind::Second } else { Kind::First });
            if kind == Kind::Second && d.star(&d.element(0)).is_none() {
                bail!("second-kind products need a model with an involution");
            }
            match kind {
                Kind::First => on_trisystem(&Att1(d), set, opts)?,
                Kind::Second => on_trisystem(&Att2(d), set, opts)?,
            }
        }
        _ => bail!("set {set} does not apply to a dialgebra"),
    })
}

pub fn variety(loaded: &Loaded, set: &str, kind: Option<Kind>, opts: &CheckOptions) -> Result<Report> {
    let set = set.to_ascii_uppercase();
    if trialg::catalog::source(&set).is_none() {
        bail!("unknown axiom set {set}; known: {}", trialg::catalog::names().collect::<Vec<_>>().join(", "));
    }
    match loaded {
        Loaded::Free(f) => on_dialgebra(f, &set, kind, opts),
        Loaded::Dialgebra(d) => on_dialgebra(&d.model(), &set, kind, opts),
        Loaded::Trisystem(t) => match set.as_str() {
            "ATS1" | "ATS2" => {
                if t.products()[0] != t.products()[1] || t.products()[0] != t.products()[2] {
                    bail!("{set} needs a trisystem whose three products coincide");
                }
                Ok(check_variety(&ats_model(t), &set, opts)?)
            }
            _ => on_trisystem(&t.model(), &set, opts),
        },
    }
}

pub fn theorem(loaded: &Loaded, name: &str, opts: &CheckOptions) -> Result<Report> {
    Ok(match loaded {
        Loaded::Free(f) => check_theorem(name, f, opts)?,
        Loaded::Dialgebra(d) => check_theorem(name, &d.model(), opts)?,
        Loaded::Trisystem(_) => bail!("theorems are stated for dialgebra models"),
    })
}

/// Dialgebra axioms, plus involution axioms when the model has one.
pub fn dialgebra_axioms(loaded: &Loaded, opts: &CheckOptions) -> Result<Report> {
    let started = std::time::Instant::now();
    Ok(match loaded {
        Loaded::Free(f) => check_dialgebra_model(f, opts)?
            .with_note("involution axioms hold by construction on the free model and are not enumerated"),
        Loaded::Dialgebra(d) => {
            let m = d.model();
            let mut parts = vec![check_dialgebra_model(&m, opts)?];
            if d.involution().is_some() {
                parts.push(check_involution_model(&m, opts.max_witnesses)?);
            }
            Report::merge("DIALGEBRA", parts, started)
        }
        Loaded::Trisystem(_) => bail!("a trisystem is not a dialgebra"),
    })
}

pub fn leibniz(loaded: &Loaded, opts: &CheckOptions) -> Result<Report> {
    Ok(match loaded {
        Loaded::Free(f) => check_right_leibniz_model(&DMinus(f), opts)?,
        Loaded::Dialgebra(d) => check_right_leibniz_model(&DMinus(&d.model()), opts)?,
        Loaded::Trisystem(_) => bail!("the bracket a⊣b − b⊢a needs a dialgebra"),
    })
}

/// Parses `e11 + 2*e12 - 1/2*e21` against basis labels.
pub fn parse_vector(text: &str, labels: &[String], kind: ScalarKind) -> Result<Vec<Scalar>> {
    let mut v = vec![Scalar::zero(kind); labels.len()];
    let spaced = text.replace('-', "+-");
    for term in spaced.split('+').map(str::trim).filter(|t| !t.is_empty()) {
        let (neg, term) = match term.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, term),
        };
        let (coeff, label) = match term.split_once('*') {
            Some((c, l)) => (Scalar::parse(kind, c)?, l.trim()),
            None => (Scalar::one(kind), term),
        };
        let coeff = if neg { -coeff } else { coeff };
        let i = labels
            .iter()
            .position(|l| l == label)
            .with_context(|| format!("unknown basis label {label:?}; known: {}", labels.join(", ")))?;
        v[i] += &coeff;
    }
    Ok(v)
}

pub fn finish(report: &Report) -> Result<()> {
    if report.passed() {
        Ok(())
    } else {
        Err(Falsified.into())
    }
}
