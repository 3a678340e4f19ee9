use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wfock::degeneration::{self, DegenConfig, Degeneration, SpecModule, Specialization};
use wfock::ham::{self, HamElement};
use wfock::hecke::Engine;
use wfock::lefschetz::{self, FiltSpace, FiltSpaceJson};
use wfock::linalg::{Matrix, MatrixJson};
use wfock::par::Exec;
use wfock::rational::parse_q;
use wfock::relations::{self, Relation, SweepBounds};
use wfock::report::Report;
use wfock::ring::{self, RingSpec};
use wfock::series;
use wfock::walgebra::{self, WBounds};
use wfock::{Error, Q};

#[derive(Parser)]
#[command(name = "wfock", version, about = "Exact checks for the W-algebra action on Fock spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Relations (Q0)-(Q3), the generating-series oracle and the cubic kernel.
    CheckRelations(RelArgs),
    /// Undeformed W relations, the Lehn suite and the F-vanishing probe.
    CheckW(WArgs),
    /// The Lie algebra of Hamiltonian vector fields.
    H2 {
        #[command(subcommand)]
        cmd: H2Cmd,
    },
    /// Specialization, Weyl reduction and the sl2-triple.
    Degenerate(DegenArgs),
    /// Weight filtrations and Lefschetz structures.
    Lefschetz {
        #[command(subcommand)]
        cmd: LefCmd,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads (defaults to WFOCK_JOBS, then all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RelKind {
    #[value(name = "Q0")]
    Q0,
    #[value(name = "Q1")]
    Q1,
    #[value(name = "Q2")]
    Q2,
    #[value(name = "Q3")]
    Q3,
    All,
    Oracle,
    Cubic,
}

#[derive(Args)]
struct RelArgs {
    /// Built-in instance name or path to a ring JSON file.
    #[arg(long)]
    instance: String,
    #[arg(long, visible_alias = "suite", value_enum, default_value_t = RelKind::All)]
    relation: RelKind,
    #[arg(long, default_value_t = 8)]
    max_degree: i64,
    #[arg(long, default_value_t = 3)]
    max_index: i64,
    /// Series order for the oracle and the cubic kernel.
    #[arg(long, default_value_t = 4)]
    order: i64,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WSuite {
    Undeformed,
    Lehn,
    Fprobe,
}

#[derive(Args)]
struct WArgs {
    #[arg(long)]
    instance: String,
    #[arg(long, value_enum)]
    suite: WSuite,
    #[arg(long, default_value_t = 8)]
    max_degree: i64,
    #[arg(long, default_value_t = 4)]
    max_index: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Expressions sampled per T-degree by the probe.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum H2Cmd {
    /// Prints the bracket of two Hamiltonians, e.g. "V(2,3)" "V(1,1)".
    Bracket { a: String, b: String },
    /// Realization, Jacobi identity and S_n-equivariance checks.
    Verify {
        #[arg(long, default_value_t = 4)]
        index_cap: u32,
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DSuite {
    Weyl,
    #[value(name = "tildeD")]
    TildeD,
    Sl2,
    Reduced,
    Unred,
    Parabolic,
    Synthetic,
}

#[derive(Args)]
struct DegenArgs {
    #[arg(long)]
    instance: String,
    #[arg(long, default_value = "1")]
    r: String,
    #[arg(long, default_value = "0")]
    chi: String,
    #[arg(long, default_value_t = 6)]
    window: i64,
    #[arg(long, value_enum)]
    suite: DSuite,
    /// Index-sum cap for the relation suites, power cap for the parabolic suite.
    #[arg(long, default_value_t = 3)]
    max_index: u32,
    /// Largest probe point of the interpolation in m.
    #[arg(long, default_value_t = 7)]
    order: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum LefCmd {
    /// Weight filtration of a nilpotent matrix and its defining properties.
    WeightFiltration {
        #[arg(long)]
        matrix: PathBuf,
        /// Writes the Lefschetz structure of N (opposite Jordan filtration, omega = N) as a space file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// With --out, write W(N) itself with omega = N instead.
        #[arg(long)]
        literal: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Checks that a filtered space with operator is a Lefschetz structure.
    Verify {
        #[arg(long)]
        space: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded random weight-filtration and Lefschetz suites.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 12)]
        max_dim: usize,
        #[arg(long, default_value_t = 6)]
        max_unique: usize,
        #[arg(long, default_value_t = 100)]
        maps: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn load_instance(name: &str) -> Result<RingSpec, Error> {
    let path = Path::new(name);
    if name.ends_with(".json") && path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(e.to_string()))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(name);
        return RingSpec::from_json(stem, &text);
    }
    ring::instance(name)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_rational(s: &str) -> Result<Q, Error> {
    parse_q(s.trim())
}

struct Output {
    report: Report,
    extra: Option<(&'static str, serde_json::Value)>,
}

impl From<Report> for Output {
    fn from(report: Report) -> Self {
        Self { report, extra: None }
    }
}

fn emit(out: &Output, format: Format) -> ExitCode {
    match format {
        Format::Text => print!("{}", out.report.to_text()),
        Format::Json => {
            let mut v = serde_json::to_value(&out.report).expect("report serializes");
            if let (Some((k, x)), Some(obj)) = (&out.extra, v.as_object_mut()) {
                obj.insert(k.to_string(), x.clone());
            }
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
    }
    if out.report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn check_relations(a: &RelArgs) -> Result<Output, Error> {
    let engine = Engine::new(load_instance(&a.instance)?);
    let exec = Exec::with_jobs(a.common.jobs);
    let bounds = SweepBounds {
        max_degree: a.max_degree,
        max_index: a.max_index,
    };
    let rels = match a.relation {
        RelKind::Q0 => vec![Relation::Q0],
        RelKind::Q1 => vec![Relation::Q1],
        RelKind::Q2 => vec![Relation::Q2],
        RelKind::Q3 => vec![Relation::Q3],
        RelKind::All => vec![Relation::Q0, Relation::Q1, Relation::Q2, Relation::Q3],
        RelKind::Oracle => return Ok(series::oracle_suite(&engine, a.order, exec).into()),
        RelKind::Cubic => return Ok(series::cubic_kernel_check(&engine.ring, a.order).into()),
    };
    let parts = rels
        .into_iter()
        .map(|r| relations::check_relation(&engine, r, &bounds, exec))
        .collect::<Vec<_>>();
    if parts.len() == 1 {
        return Ok(parts.into_iter().next().unwrap().into());
    }
    Ok(Report::merge("relations", engine.ring.name.clone(), parts).into())
}

fn check_w(a: &WArgs) -> Result<Output, Error> {
    let engine = Engine::new(load_instance(&a.instance)?);
    let exec = Exec::with_jobs(a.common.jobs);
    let bounds = WBounds {
        max_degree: a.max_degree,
        max_index: a.max_index,
    };
    Ok(match a.suite {
        WSuite::Undeformed => walgebra::check_undeformed(&engine, &bounds, exec),
        WSuite::Lehn => walgebra::lehn_suite(&engine, &bounds, exec),
        WSuite::Fprobe => {
            let parts = (0..=2)
                .map(|m| walgebra::f_vanishing_probe(&engine, m, a.samples, a.seed, a.max_degree, exec))
                .collect();
            Report::merge("fprobe", engine.ring.name.clone(), parts)
        }
    }
    .into())
}

fn h2_verify(index_cap: u32, max_degree: u32) -> Report {
    Report::merge(
        "h2",
        "plane",
        vec![
            ham::check_realization(index_cap, max_degree),
            ham::check_jacobi(index_cap),
            ham::sn_equivariance_and_j2(index_cap, max_degree.min(5)),
        ],
    )
}

fn degenerate(a: &DegenArgs) -> Result<Output, Error> {
    if a.suite == DSuite::Synthetic {
        return Ok(degeneration::synthetic_suite(a.seed).into());
    }
    let engine = Engine::new(load_instance(&a.instance)?);
    let r = parse_rational(&a.r)?;
    let chi = parse_rational(&a.chi)?;
    if a.window < 0 {
        return Err(Error::Precondition("window must be nonnegative".into()));
    }
    let spec = Specialization::new(&engine, r.clone(), chi.clone())?;
    let module = SpecModule::new(&engine, spec, a.window);
    if a.suite == DSuite::Parabolic {
        return Ok(degeneration::parabolic_suite(&module, a.max_index)?.into());
    }
    let cfg = DegenConfig {
        r,
        chi,
        window: a.window,
        probes: a.order,
    };
    let mut deg = Degeneration::new(&module, cfg);
    Ok(match a.suite {
        DSuite::Weyl => degeneration::weyl_suite(&mut deg)?.into(),
        DSuite::TildeD => degeneration::tilde_suite(&mut deg)?.into(),
        DSuite::Sl2 => {
            let (report, spectrum) = degeneration::sl2_suite(&mut deg)?;
            Output {
                report,
                extra: Some(("h_spectrum", degeneration::spectrum_json(&spectrum))),
            }
        }
        DSuite::Reduced => degeneration::reduced_relations_suite(&mut deg, a.max_index)?.into(),
        DSuite::Unred => {
            let xcap = (a.window / 2).max(1) as u32;
            degeneration::unreduced_suite(&mut deg, a.max_index.min(3), xcap)?.into()
        }
        DSuite::Parabolic | DSuite::Synthetic => unreachable!(),
    })
}

fn weight_filtration(matrix: &Path, out: Option<&Path>, literal: bool) -> Result<Output, Error> {
    let j: MatrixJson = read_json(matrix)?;
    let n = Matrix::from_json(&j)?;
    let w = lefschetz::weight_filtration(&n)?;
    let name = matrix.display().to_string();
    let mut cases = lefschetz::check_weight_properties(&n, &w, "W");
    let dims = w
        .gr_dims()
        .into_iter()
        .map(|(k, d)| format!("{k}:{d}"))
        .collect::<Vec<_>>()
        .join(" ");
    cases.push(wfock::report::Case::ok(format!("Gr dimensions {dims}")));
    if let Some(path) = out {
        let space = if literal {
            lefschetz::weight_filtration_with_operator(&n)?
        } else {
            lefschetz::lefschetz_of_nilpotent(&n)?
        };
        let text = serde_json::to_string_pretty(&space.to_json()).expect("json");
        std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    Ok(Report::new("weight-filtration", name, cases).into())
}

fn lefschetz_verify(space: &Path) -> Result<Output, Error> {
    let j: FiltSpaceJson = read_json(space)?;
    let l = FiltSpace::from_json(&j)?;
    let mut r = lefschetz::lefschetz_verify(&l);
    r.instance = space.display().to_string();
    Ok(r.into())
}

fn run(cli: &Cli) -> Result<(Output, Format), Error> {
    Ok(match &cli.cmd {
        Cmd::CheckRelations(a) => (check_relations(a)?, a.common.format),
        Cmd::CheckW(a) => (check_w(a)?, a.common.format),
        Cmd::H2 { cmd } => match cmd {
            H2Cmd::Bracket { .. } => unreachable!(),
            H2Cmd::Verify {
                index_cap,
                max_degree,
                common,
            } => (h2_verify(*index_cap, *max_degree).into(), common.format),
        },
        Cmd::Degenerate(a) => (degenerate(a)?, a.common.format),
        Cmd::Lefschetz { cmd } => match cmd {
            LefCmd::WeightFiltration {
                matrix,
                out,
                literal,
                common,
            } => (weight_filtration(matrix, out.as_deref(), *literal)?, common.format),
            LefCmd::Verify { space, common } => (lefschetz_verify(space)?, common.format),
            LefCmd::Random {
                seed,
                samples,
                max_dim,
                max_unique,
                maps,
                common,
            } => {
                let parts = vec![
                    lefschetz::weight_filtration_suite(*seed, *samples, *max_dim, *max_unique),
                    lefschetz::lefschetz_suite(*seed, *samples, *max_dim, *maps),
                ];
                (Report::merge("lefschetz", format!("seed={seed}"), parts).into(), common.format)
            }
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Cmd::H2 {
        cmd: H2Cmd::Bracket { a, b },
    } = &cli.cmd
    {
        return match (HamElement::parse(a), HamElement::parse(b)) {
            (Ok(a), Ok(b)) => {
                println!("{}", ham::h2_bracket(&a, &b));
                ExitCode::SUCCESS
            }
            (Err(e), _) | (_, Err(e)) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }
    if let Some(jobs) = job_count(&cli) {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((out, format)) => emit(&out, format),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn job_count(cli: &Cli) -> Option<usize> {
    match &cli.cmd {
        Cmd::CheckRelations(a) => a.common.jobs,
        Cmd::CheckW(a) => a.common.jobs,
        Cmd::Degenerate(a) => a.common.jobs,
        Cmd::H2 {
            cmd: H2Cmd::Verify { common, .. },
        } => common.jobs,
        Cmd::Lefschetz { cmd } => match cmd {
            LefCmd::WeightFiltration { common, .. } | LefCmd::Verify { common, .. } | LefCmd::Random { common, .. } => {
                common.jobs
            }
        },
        _ => None,
    }
}
