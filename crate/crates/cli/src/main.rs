mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use dtc_core::higher::{global_section_refuter, tcn_classify};
use dtc_core::lattice::{
    canonical_name, connected_images, detect_simple_closed_curve, generate_curve, parse_image,
    search_cycles, serialize_image,
};
use dtc_core::loops::{count_loop_classes, LoopCount};
use dtc_core::morph::{
    homotopy_equivalent, is_contractible, is_reducible, is_rigid, parse_homotopy,
    serialize_homotopy, Budget, TriState,
};
use dtc_core::planner::csp::MAX_TUPLES;
use dtc_core::planner::{
    check_planner, contraction_planner, parse_planner, serialize_planner,
    synthesize_cycle_planner_with, tc_classify, tc_oracle, TcResult, VerifyLevel,
};
use dtc_core::{AdjacencyKind, DigitalImage, Error, Point};

use report::{Format, Report};

#[derive(Parser)]
#[command(name = "dtc", version, about = "Digital homotopy and topological complexity of finite digital images")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Maximum maps visited by homotopy searches.
    #[arg(long, global = true, default_value_t = 5_000_000)]
    budget: usize,

    /// Maximum nodes for section searches.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    node_budget: usize,

    /// Worker cap; all searches are deterministic and run on one thread.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Kv)]
    format: Format,
}

#[derive(Args)]
struct ImageArg {
    #[arg(long)]
    image: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Size, adjacency, components and curve detection.
    Info(ImageArg),
    Connected(ImageArg),
    Contractible {
        #[arg(long)]
        image: PathBuf,
        /// Write the contracting homotopy here.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    Reducible {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    Rigid(ImageArg),
    Equiv {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        image2: PathBuf,
    },
    Loops {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        m: usize,
    },
    Tc {
        #[arg(long)]
        image: PathBuf,
        /// Also run the search oracle.
        #[arg(long)]
        oracle: bool,
        /// Longest walk length for the oracle.
        #[arg(long)]
        length: Option<usize>,
    },
    Tcn {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        n: usize,
        /// Longest walk length for the refuter.
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, overrides_with = "no_refute")]
        refute: bool,
        #[arg(long)]
        no_refute: bool,
    },
    PlannerSynth {
        #[arg(long)]
        image: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Write the planner here.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    PlannerVerify {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        planner: PathBuf,
        #[arg(long, value_enum, default_value_t = Level::Full)]
        level: Level,
    },
    CurveGen {
        #[arg(long)]
        m: usize,
        /// Adjacency count: 4 or 8.
        #[arg(long)]
        k: usize,
        #[arg(long)]
        save: Option<PathBuf>,
    },
    CurveSearch {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        window: Option<usize>,
    },
    Corpus {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        window: usize,
        #[arg(long, default_value_t = 9)]
        max_points: usize,
        /// Directory for the image files.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Re-checks a homotopy certificate.
    Verify {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        image2: Option<PathBuf>,
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Full,
    Anchors,
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::Info(_) => "info",
        Command::Connected(_) => "connected",
        Command::Contractible { .. } => "contractible",
        Command::Reducible { .. } => "reducible",
        Command::Rigid(_) => "rigid",
        Command::Equiv { .. } => "equiv",
        Command::Loops { .. } => "loops",
        Command::Tc { .. } => "tc",
        Command::Tcn { .. } => "tcn",
        Command::PlannerSynth { .. } => "planner-synth",
        Command::PlannerVerify { .. } => "planner-verify",
        Command::CurveGen { .. } => "curve-gen",
        Command::CurveSearch { .. } => "curve-search",
        Command::Corpus { .. } => "corpus",
        Command::Verify { .. } => "verify",
    }
}

/// An input problem, reported with exit status 1.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn load(path: &Path) -> Run<DigitalImage> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse_image(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Run<()> {
    fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn coords(p: &Point) -> Value {
    json!(p.coords())
}

fn points(x: &DigitalImage, idx: &[usize]) -> Value {
    Value::Array(idx.iter().map(|&i| coords(x.point(i))).collect())
}

fn kind(k: usize) -> Run<AdjacencyKind> {
    Ok(AdjacencyKind::from_count(k)?)
}

fn tristate<Y, N>(r: &mut Report, key: &str, t: &TriState<Y, N>) {
    r.put(key, t.label());
    if let TriState::Unknown(e) = t {
        r.put("exhaustion", e.to_string());
        r.unknown();
    }
}

fn tc_fields(r: &mut Report, res: &TcResult, prefix: &str) {
    let key = |k: &str| format!("{prefix}{k}");
    match res.value {
        Some(v) => r.put(&key("value"), v),
        None => {
            r.put(&key("value"), "unknown");
            r.unknown();
        }
    }
    r.put(&key("method"), res.method.to_string());
    if let Some(w) = &res.witness {
        r.put(&key("witness_parts"), w.used_parts());
        r.put(&key("witness_length"), w.length());
    }
    if let Some(img) = &res.witness_image {
        r.put(&key("witness_image_points"), img.len());
    }
    if let Some(eq) = &res.equivalence {
        r.put(&key("equivalence_verified"), eq.verify());
    }
    if let Some(lb) = &res.lower_bound {
        r.put(&key("lower_bound"), lb.to_string());
    }
    if res.consult_oracle {
        r.put(&key("consult_oracle"), true);
    }
    if !res.evidence.is_empty() {
        r.put(&key("evidence"), res.evidence.join("; "));
    }
}

fn run(cli: &Cli, r: &mut Report) -> Run<()> {
    let budget = Budget::default()
        .with_maps(cli.budget)
        .with_nodes(cli.node_budget);
    match &cli.command {
        Command::Info(a) => {
            let x = load(&a.image)?;
            r.put("points", x.len());
            r.put("dim", x.dim());
            r.put("k", x.kind().k());
            r.put("adjacency", x.kind().count());
            r.put("components", x.components().len());
            r.put("connected", x.is_connected());
            let degs: Vec<usize> = (0..x.len()).map(|i| x.degree(i)).collect();
            r.put("max_degree", degs.iter().copied().max().unwrap_or(0));
            r.put(
                "bounding_box",
                Value::Array(x.bounding_box().iter().map(|(a, b)| json!([a, b])).collect()),
            );
            match detect_simple_closed_curve(&x) {
                Some(c) => {
                    r.put("simple_closed_curve", c.len());
                    r.put("curve_order", points(&x, c.ordering()));
                }
                None => r.put("simple_closed_curve", "none"),
            }
        }
        Command::Connected(a) => {
            let x = load(&a.image)?;
            r.put("connected", if x.is_connected() { "yes" } else { "no" });
            r.put("components", x.components().len());
        }
        Command::Contractible { image, cert } => {
            let x = load(image)?;
            let t = is_contractible(&x, &budget)?;
            tristate(r, "contractible", &t);
            match &t {
                TriState::Yes(h) => {
                    r.put("steps", h.steps());
                    r.put("certificate_verified", h.verify());
                    if let Some(p) = cert {
                        write(p, &serialize_homotopy(h))?;
                        r.put("certificate_file", p.display().to_string());
                    }
                }
                TriState::No(log) => r.put("evidence", log.to_string()),
                TriState::Unknown(_) => {}
            }
        }
        Command::Reducible { image, cert } => {
            let x = load(image)?;
            let t = is_reducible(&x, &budget)?;
            tristate(r, "reducible", &t);
            match &t {
                TriState::Yes(red) => {
                    r.put("reduced_points", red.image.len());
                    r.put("certificate_verified", red.certificate.verify());
                    r.put("homotopy_steps", red.homotopy.steps());
                    if let Some(p) = cert {
                        write(p, &serialize_homotopy(&red.homotopy))?;
                        r.put("certificate_file", p.display().to_string());
                    }
                }
                TriState::No(log) => r.put("evidence", log.to_string()),
                TriState::Unknown(_) => {}
            }
        }
        Command::Rigid(a) => {
            let x = load(&a.image)?;
            let t = is_rigid(&x, &budget)?;
            tristate(r, "rigid", &t);
            match &t {
                TriState::No(h) => {
                    r.put("neighbor_map", Value::Array(
                        h.end().table().iter().map(|&v| coords(x.point(v))).collect(),
                    ));
                }
                TriState::Yes(log) => r.put("evidence", log.to_string()),
                TriState::Unknown(_) => {}
            }
        }
        Command::Equiv { image, image2 } => {
            let x = load(image)?;
            let y = load(image2)?;
            if !x.is_connected() || !y.is_connected() {
                return Err(Error::Disconnected.into());
            }
            let t = homotopy_equivalent(&x, &y, &budget)?;
            tristate(r, "equivalent", &t);
            match &t {
                TriState::Yes(c) => {
                    r.put("certificate_verified", c.verify());
                    r.put("h1_steps", c.h1.steps());
                    r.put("h2_steps", c.h2.steps());
                }
                TriState::No(log) => r.put("evidence", log.to_string()),
                TriState::Unknown(_) => {}
            }
        }
        Command::Loops { image, m } => {
            let x = load(image)?;
            let table = count_loop_classes(&x, *m, &budget)?;
            r.put("m", *m);
            r.put("total_loops", table.total());
            match &table.count {
                LoopCount::Exact(n) => r.put("classes", *n),
                LoopCount::Bounds {
                    lower,
                    upper,
                    exhaustion,
                } => {
                    r.put("classes", "unknown");
                    r.put("classes_lower", *lower);
                    r.put("classes_upper", *upper);
                    r.put("exhaustion", exhaustion.to_string());
                    r.unknown();
                }
            }
            r.put(
                "representatives",
                Value::Array(
                    table
                        .representatives()
                        .iter()
                        .map(|l| points(&x, l.table()))
                        .collect(),
                ),
            );
        }
        Command::Tc {
            image,
            oracle,
            length,
        } => {
            let x = load(image)?;
            let res = tc_classify(&x, &budget)?;
            tc_fields(r, &res, "");
            if *oracle {
                let o = tc_oracle(&x, *length, &budget)?;
                let status = r.status;
                tc_fields(r, &o, "oracle_");
                // The oracle is reported side by side; it does not decide the exit code.
                r.status = status;
                if let (Some(a), Some(b)) = (res.value, o.value) {
                    r.put("oracle_agrees", a == b);
                }
            }
        }
        Command::Tcn {
            image,
            n,
            length,
            no_refute,
            ..
        } => {
            let x = load(image)?;
            let res = tcn_classify(&x, *n, &budget)?;
            tc_fields(r, &res, "");
            let small = x
                .len()
                .checked_pow(*n as u32)
                .is_some_and(|c| c <= MAX_TUPLES);
            if !*no_refute && *n >= 1 && small {
                let l_max = length.unwrap_or_else(|| {
                    res.witness
                        .as_ref()
                        .map_or(x.len() * (*n - 1), |w| w.length())
                });
                r.put("refute_length", l_max);
                let t = global_section_refuter(&x, *n, l_max, &budget)?;
                r.put(
                    "global_section",
                    match &t {
                        TriState::Yes(_) => "found",
                        TriState::No(_) => "refuted",
                        TriState::Unknown(_) => "unknown",
                    },
                );
                match &t {
                    TriState::No(log) => r.put("refutation", log.to_string()),
                    TriState::Unknown(e) => r.put("refuter_exhaustion", e.to_string()),
                    TriState::Yes(p) => r.put("global_section_length", p.length()),
                }
            }
        }
        Command::PlannerSynth { image, n, save } => {
            let x = load(image)?;
            let plan = if let Some(c) = detect_simple_closed_curve(&x) {
                let s = synthesize_cycle_planner_with(&c, *n, &budget, VerifyLevel::Full)?;
                r.put("strategy", s.strategy.to_string());
                r.put(
                    "rejected",
                    s.rejected
                        .iter()
                        .map(|(st, why)| format!("{st}: {why}"))
                        .collect::<Vec<_>>()
                        .join("; "),
                );
                s.planner
            } else {
                match is_contractible(&x, &budget)? {
                    TriState::Yes(h) => {
                        r.put("strategy", "contraction");
                        contraction_planner(&x, &h, *n)?
                    }
                    TriState::No(_) if *n == 2 => {
                        let res = tc_classify(&x, &budget)?;
                        r.put("strategy", "transport");
                        res.witness.ok_or_else(|| {
                            Failure("no planner is known for this image".into())
                        })?
                    }
                    TriState::No(_) => {
                        return Err(Failure(
                            "higher planners are synthesized for simple closed curves and contractible images".into(),
                        ))
                    }
                    TriState::Unknown(e) => {
                        r.put("exhaustion", e.to_string());
                        r.unknown();
                        return Ok(());
                    }
                }
            };
            let report = check_planner(&x, &plan, VerifyLevel::Full, 16)?;
            r.put("verified", report.ok);
            r.put("parts", plan.used_parts());
            r.put("length", plan.length());
            r.put("n", plan.arity());
            if let Some(p) = save {
                write(p, &serialize_planner(&x, &plan))?;
                r.put("planner_file", p.display().to_string());
            }
        }
        Command::PlannerVerify {
            image,
            planner,
            level,
        } => {
            let x = load(image)?;
            let text = fs::read_to_string(planner)
                .map_err(|e| Failure(format!("{}: {e}", planner.display())))?;
            let plan = parse_planner(&x, &text)
                .map_err(|e| Failure(format!("{}: {e}", planner.display())))?;
            let level = match level {
                Level::Full => VerifyLevel::Full,
                Level::Anchors => VerifyLevel::AnchorsOnly,
            };
            let report = check_planner(&x, &plan, level, usize::MAX)?;
            r.put("valid", report.ok);
            r.put("tuples", report.tuples);
            r.put("pairs_checked", report.pairs_checked);
            r.put("parts", plan.used_parts());
            r.put("violations", report.violations.len());
            for (i, v) in report.violations.iter().take(20).enumerate() {
                r.put(&format!("violation_{i}"), v.to_string());
            }
        }
        Command::CurveGen { m, k, save } => {
            let c = generate_curve(*m, kind(*k)?)?;
            let x = c.image();
            r.put("m", c.len());
            r.put("points", points(x, c.ordering()));
            r.put("detected", detect_simple_closed_curve(x).is_some());
            if let Some(p) = save {
                write(p, &serialize_image(x))?;
                r.put("image_file", p.display().to_string());
            }
        }
        Command::CurveSearch { m, k, window } => {
            let window = window.unwrap_or(*m);
            let found = search_cycles(*m, kind(*k)?, window)?;
            r.put("m", *m);
            r.put("window", window);
            r.put("curves", found.len());
            r.put(
                "images",
                Value::Array(
                    found
                        .iter()
                        .map(|x| Value::Array(x.points().iter().map(coords).collect()))
                        .collect(),
                ),
            );
        }
        Command::Corpus {
            k,
            window,
            max_points,
            dir,
        } => {
            let images = connected_images(kind(*k)?, *window, *max_points)?;
            r.put("images", images.len());
            if let Some(d) = dir {
                fs::create_dir_all(d).map_err(|e| Failure(format!("{}: {e}", d.display())))?;
                for x in &images {
                    write(&d.join(format!("{}.dimg", canonical_name(x))), &serialize_image(x))?;
                }
                r.put("dir", d.display().to_string());
            } else {
                r.put(
                    "names",
                    Value::Array(images.iter().map(|x| canonical_name(x).into()).collect()),
                );
            }
        }
        Command::Verify {
            image,
            image2,
            cert,
        } => {
            let x = Arc::new(load(image)?);
            let y = match image2 {
                Some(p) => Arc::new(load(p)?),
                None => x.clone(),
            };
            let text = fs::read_to_string(cert)
                .map_err(|e| Failure(format!("{}: {e}", cert.display())))?;
            let h = parse_homotopy(x, y, &text)
                .map_err(|e| Failure(format!("{}: {e}", cert.display())))?;
            let ok = h.verify();
            r.put("valid", ok);
            r.put("stages", h.len());
            r.put("starts_at_identity", h.start().is_identity());
            let end = h.end();
            let t = end.table();
            r.put("ends_constant", t.iter().all(|&v| v == t[0]));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut flags = Map::new();
    flags.insert(
        "argv".into(),
        Value::Array(std::env::args().skip(1).map(Value::from).collect()),
    );
    flags.insert("budget".into(), cli.budget.into());
    flags.insert("node_budget".into(), cli.node_budget.into());
    flags.insert("jobs".into(), cli.jobs.into());
    flags.insert(
        "format".into(),
        match cli.format {
            Format::Kv => "kv",
            Format::Json => "json",
        }
        .into(),
    );
    let mut report = Report::new(name(&cli.command), flags);
    if let Err(Failure(msg)) = run(&cli, &mut report) {
        eprintln!("dtc: {msg}");
        return ExitCode::from(1);
    }
    let text = report.render(cli.format);
    match &cli.out {
        Some(p) => {
            if let Err(e) = fs::write(p, &text) {
                eprintln!("dtc: {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.status.exit_code() as u8)
}
