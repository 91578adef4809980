//! `courant`: validate standard Courant algebroid instances, apply changes of
//! dissection, and check automorphisms and their infinitesimal generators.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on bad input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use courant_core::foliated::{Chart, TForm};
use courant_core::gallery::{aff1_constants, heterotic_4d, make_bn, make_dn, make_point_manin, so3_flat};
use courant_core::io;
use courant_core::qforms::QForm;
use courant_core::report::Report;
use courant_core::ring::Rat;
use courant_core::standard::{axiom_suite, validate_stdca, GSec, StdCA};
use courant_core::transform::{
    aut_compose, aut_invert, check_aut, check_infaut, dissection_apply, dissection_change, infaut_bracket, intertwining_report, linearize,
    Aut, GaugePath, InfAut, QAutPair,
};
use courant_core::Error;

#[derive(Parser)]
#[command(name = "courant", version, about = "Exact checks for standard Courant algebroids on polynomial charts")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunConfig {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random trials per identity.
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Degree bound for sampled polynomials.
    #[arg(long = "max-degree", global = true, default_value_t = 2)]
    max_degree: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compatibility relations and Courant axioms of an instance.
    Validate { instance: PathBuf },
    /// Change of dissection by `{"tau", "A", "B"}` (each optional).
    Transform {
        instance: PathBuf,
        delta: PathBuf,
        /// Also require `(id, τ, A, B)` to be an automorphism of the input.
        #[arg(long)]
        strict_aut: bool,
        /// Write the transformed instance to this file.
        #[arg(long)]
        instance_out: Option<PathBuf>,
    },
    /// Automorphisms `(φ, τ, A, B)`.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Infinitesimal automorphisms `(X, θ, a, b)`.
    #[command(subcommand)]
    Inf(InfCmd),
    /// Emit an example instance.
    Gallery {
        #[arg(value_enum)]
        family: Family,
        /// Chart dimension for dn, bn and so3.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Closed 3-form for dn and bn, as a form JSON array.
        #[arg(long)]
        h: Option<PathBuf>,
        /// Bialgebra constants for manin: `{"c": [...], "f": [...]}`.
        #[arg(long)]
        bialgebra: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    Compose {
        instance: PathBuf,
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        expect: Option<PathBuf>,
    },
    Invert {
        instance: PathBuf,
        element: PathBuf,
        #[arg(long)]
        expect: Option<PathBuf>,
    },
    Check { instance: PathBuf, element: PathBuf },
}

#[derive(Subcommand)]
enum InfCmd {
    Check {
        instance: PathBuf,
        generator: PathBuf,
    },
    Bracket {
        instance: PathBuf,
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        expect: Option<PathBuf>,
    },
    /// Generator of the gauge path `Ψ_{tA} ∘ Ψ_{tB}` given as `{"A", "B"}`.
    Linearize {
        instance: PathBuf,
        path: PathBuf,
        #[arg(long)]
        expect: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Dn,
    Bn,
    Heterotic,
    So3,
    Manin,
}

/// Command output: the JSON document and whether every check passed.
struct Outcome {
    doc: Value,
    passed: bool,
}

impl Outcome {
    fn report(report: Report, result: Option<Value>) -> Self {
        let passed = report.passed();
        let mut doc = json!({"passed": passed, "report": report.to_json()});
        if let Some(r) = result {
            doc["result"] = r;
        }
        Outcome { doc, passed }
    }
}

fn read_json(path: &Path) -> courant_core::Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    io::parse_text(&text)
}

fn load_instance(path: &Path) -> courant_core::Result<StdCA> {
    StdCA::from_json(&read_json(path)?)
}

fn load_aut(path: &Path, e: &StdCA) -> courant_core::Result<Aut> {
    Aut::from_json(&read_json(path)?, e.chart, e.dim())
}

fn load_infaut(path: &Path, e: &StdCA) -> courant_core::Result<InfAut> {
    InfAut::from_json(&read_json(path)?, e.chart, e.dim())
}

/// Adds a `matches_expected` check comparing `got` with the fixture.
fn expect<T: PartialEq>(r: &mut Report, got: &T, got_json: &Value, fixture: Option<T>) {
    if let Some(want) = fixture {
        r.record("matches_expected", (got != &want).then(|| json!({"got": got_json})));
    }
}

fn cmd_validate(path: &Path, cfg: &RunConfig) -> courant_core::Result<Outcome> {
    let e = load_instance(path)?;
    let mut r = Report::new();
    r.absorb("validate", validate_stdca(&e));
    r.absorb("axioms", axiom_suite(&e, cfg.trials as usize, cfg.seed, cfg.max_degree));
    Ok(Outcome::report(r, None))
}

fn cmd_transform(path: &Path, delta: &Path, strict: bool, instance_out: Option<&Path>, cfg: &RunConfig) -> courant_core::Result<Outcome> {
    let e = load_instance(path)?;
    let v = read_json(delta)?;
    let (c, d) = (e.chart, e.dim());
    let tau = match v.get("tau") {
        Some(t) => QAutPair::from_json(t, d)?,
        None => QAutPair::identity(d),
    };
    let a = match v.get("A") {
        Some(a) => io::qform_from_json(a, c, d, 1)?,
        None => QForm::zero(c, d, 1),
    };
    let b = match v.get("B") {
        Some(b) => io::tform_from_json(b, c, 2)?,
        None => TForm::zero(c, 2),
    };

    let mut r = Report::new();
    r.absorb("tau", tau.validate(&e.qlie));
    let target = dissection_change(&tau, &a, &b, &e)?;
    let g = e.qlie.clone();
    let (t2, a2, b2) = (tau.clone(), a.clone(), b.clone());
    let map = move |s: &GSec| dissection_apply(&g, &t2, &a2, &b2, s);
    r.absorb("intertwining", intertwining_report(&e, &target, &map, cfg.trials as usize, cfg.seed, cfg.max_degree));
    if strict {
        let f = Aut::new(courant_core::foliated::FolAffine::identity(c), tau, a, b)?;
        r.absorb("aut", check_aut(&f, &e, cfg.trials as usize, cfg.seed, cfg.max_degree));
    }
    let inst = target.to_json();
    if let Some(p) = instance_out {
        write_text(p, &io::to_text(&inst))?;
    }
    Ok(Outcome::report(r, Some(inst)))
}

fn cmd_group(cmd: &GroupCmd, cfg: &RunConfig) -> courant_core::Result<Outcome> {
    match cmd {
        GroupCmd::Compose { instance, first, second, expect: fx } => {
            let e = load_instance(instance)?;
            let (f, h) = (load_aut(first, &e)?, load_aut(second, &e)?);
            let out = aut_compose(&e.qlie, &f, &h)?;
            let want = fx.as_deref().map(|p| load_aut(p, &e)).transpose()?;
            let mut r = Report::new();
            let j = out.to_json();
            expect(&mut r, &out, &j, want);
            Ok(Outcome::report(r, Some(j)))
        }
        GroupCmd::Invert { instance, element, expect: fx } => {
            let e = load_instance(instance)?;
            let out = aut_invert(&load_aut(element, &e)?)?;
            let want = fx.as_deref().map(|p| load_aut(p, &e)).transpose()?;
            let mut r = Report::new();
            let j = out.to_json();
            expect(&mut r, &out, &j, want);
            Ok(Outcome::report(r, Some(j)))
        }
        GroupCmd::Check { instance, element } => {
            let e = load_instance(instance)?;
            let f = load_aut(element, &e)?;
            Ok(Outcome::report(check_aut(&f, &e, cfg.trials as usize, cfg.seed, cfg.max_degree), None))
        }
    }
}

fn cmd_inf(cmd: &InfCmd, cfg: &RunConfig) -> courant_core::Result<Outcome> {
    match cmd {
        InfCmd::Check { instance, generator } => {
            let e = load_instance(instance)?;
            let dd = load_infaut(generator, &e)?;
            Ok(Outcome::report(check_infaut(&dd, &e, cfg.trials as usize, cfg.seed, cfg.max_degree), None))
        }
        InfCmd::Bracket { instance, first, second, expect: fx } => {
            let e = load_instance(instance)?;
            let out = infaut_bracket(&e.qlie, &load_infaut(first, &e)?, &load_infaut(second, &e)?)?;
            let want = fx.as_deref().map(|p| load_infaut(p, &e)).transpose()?;
            let mut r = Report::new();
            let j = out.to_json();
            expect(&mut r, &out, &j, want);
            Ok(Outcome::report(r, Some(j)))
        }
        InfCmd::Linearize { instance, path, expect: fx } => {
            let e = load_instance(instance)?;
            let family = GaugePath::from_json(&read_json(path)?, e.chart, e.dim())?;
            let want = fx.as_deref().map(|p| load_infaut(p, &e)).transpose()?;
            let mut r = Report::new();
            match linearize(&family, &e) {
                Ok(out) => {
                    r.pass("linearize");
                    let j = out.to_json();
                    expect(&mut r, &out, &j, want);
                    Ok(Outcome::report(r, Some(j)))
                }
                Err(Error::Invalid(msg)) => {
                    r.note("linearize", false, msg);
                    Ok(Outcome::report(r, None))
                }
                Err(err) => Err(err),
            }
        }
    }
}

fn constants(v: &Value, key: &str) -> courant_core::Result<Vec<Vec<Vec<Rat>>>> {
    let slices = v.get(key).and_then(Value::as_array).ok_or_else(|| Error::Parse(format!("bialgebra needs an array {key:?}")))?;
    let d = slices.len();
    slices.iter().map(|m| io::rmat_from_json(m, d, d)).collect()
}

fn cmd_gallery(family: Family, n: usize, h: Option<&Path>, bialgebra: Option<&Path>) -> courant_core::Result<Outcome> {
    let three_form = |n: usize| -> courant_core::Result<TForm> {
        let c = Chart::new(n, n)?;
        match h {
            Some(p) => io::tform_from_json(&read_json(p)?, c, 3),
            None => Ok(TForm::zero(c, 3)),
        }
    };
    let doc = match family {
        Family::Dn => make_dn(n, three_form(n)?)?.to_json(),
        Family::Bn => make_bn(n, three_form(n)?)?.to_json(),
        Family::Heterotic => heterotic_4d().to_json(),
        Family::So3 => so3_flat(n).to_json(),
        Family::Manin => {
            let g = match bialgebra {
                Some(p) => {
                    let v = read_json(p)?;
                    make_point_manin(&constants(&v, "c")?, &constants(&v, "f")?)?
                }
                None => make_point_manin(&aff1_constants(false), &vec![vec![vec![Rat::default(); 2]; 2]; 2])?,
            };
            io::qlie_to_json(&g)
        }
    };
    Ok(Outcome { doc, passed: true })
}

fn write_text(path: &Path, text: &str) -> courant_core::Result<()> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> courant_core::Result<Outcome> {
    let cfg = &cli.cfg;
    match &cli.cmd {
        Cmd::Validate { instance } => cmd_validate(instance, cfg),
        Cmd::Transform { instance, delta, strict_aut, instance_out } => {
            cmd_transform(instance, delta, *strict_aut, instance_out.as_deref(), cfg)
        }
        Cmd::Group(g) => cmd_group(g, cfg),
        Cmd::Inf(i) => cmd_inf(i, cfg),
        Cmd::Gallery { family, n, h, bialgebra } => cmd_gallery(*family, *n, h.as_deref(), bialgebra.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Format::Json = cli.cfg.format;
    let outcome = match run(&cli) {
        Ok(o) => o,
        // Constructors that reject their data still produce a report.
        Err(Error::Rejected(rep)) => Outcome::report(*rep, None),
        Err(err) => {
            eprintln!("courant: {err}");
            return ExitCode::from(2);
        }
    };
    let text = io::to_text(&outcome.doc);
    match &cli.cfg.out {
        Some(p) => {
            if let Err(err) = write_text(p, &text) {
                eprintln!("courant: {err}");
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if outcome.passed { ExitCode::SUCCESS } else { ExitCode::from(1) }
}
