//! Command-line front end: file validation, regular-open enumeration,
//! way-below queries, order classification, representation round trips,
//! relation calculus, the rational-ray carrier, and the seeded
//! counterexample miner. Exit codes: 0 ok, 1 a checked property failed,
//! 2 unusable input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};

use fgcs::closure::GCSpace;
use fgcs::format::{
    self, doc_from_mapping, doc_from_space, mapping_from_doc, poset_from_doc, space_from_doc,
    Document, RunReport,
};
use fgcs::miner::{self, MinerConfig};
use fgcs::morphism::AMRelation;
use fgcs::poset::FinPoset;
use fgcs::ray;
use fgcs::report::{Report, Violation, Witness};
use fgcs::set::{Subset, DEFAULT_CAP};
use fgcs::space::{FGCSpace, Mode, WAY_BELOW_ORACLE_CAP};
use fgcs::subclass;
use fgcs::Error;

#[derive(Parser)]
#[command(name = "fgcs", version, about = "Verifier for family-augmented closure spaces")]
struct Cli {
    /// Universe-size bound for exhaustive sweeps.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Also run the definitional oracles where they apply.
    #[arg(long, global = true)]
    oracle: bool,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Render the report as text instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    /// Also write the JSON report to a file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the hull conditions and the family refinement axiom of a
    /// space file.
    Validate { file: PathBuf },
    /// List all regular open sets of a space file.
    Regulars { file: PathBuf },
    /// List the basis (family hulls) of a space file.
    Basis { file: PathBuf },
    /// Decide way-below between two regular opens of a space file.
    Waybelow { file: PathBuf, u1: String, u2: String },
    /// Order classification flags of a poset file.
    Classify { file: PathBuf },
    /// Space classification (general / locally-consistent / consistent)
    /// plus the order flags of its regular opens.
    #[command(name = "classify-space")]
    ClassifySpace { file: PathBuf },
    /// Emit the derived space of a poset file.
    Represent { file: PathBuf },
    /// Verify the representation round trip of a poset file.
    Roundtrip { file: PathBuf },
    /// Run every applicable check on a space or poset file.
    Pipeline { file: PathBuf },
    /// Relation calculus on mapping files.
    Am {
        #[command(subcommand)]
        op: AmOp,
    },
    /// The symbolic rational-ray carrier.
    Ray {
        #[command(subcommand)]
        op: RayOp,
    },
    /// Seeded random-instance search for theorem violations.
    Mine {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long = "max-n", default_value_t = 5)]
        max_n: usize,
        /// Comma-separated target list; defaults to all.
        #[arg(long)]
        targets: Option<String>,
    },
}

#[derive(Subcommand)]
enum AmOp {
    /// Check the approximable-mapping conditions of a mapping file.
    Validate { file: PathBuf },
    /// Apply a mapping to a regular open of its source.
    Apply { file: PathBuf, set: String },
    /// Compose two mapping files and emit the composite.
    Compose { first: PathBuf, second: PathBuf },
    /// Tabulate the induced function on regular opens and check the
    /// conversion round trip.
    Convert { file: PathBuf },
}

#[derive(Subcommand)]
enum RayOp {
    /// Hull of a finite set of rationals.
    Hull { values: Vec<String> },
    /// Way-below between two regular rays.
    Wb { u1: String, u2: String },
    /// Family sups of M relative to F.
    Sigma {
        #[arg(long = "F")]
        f: String,
        #[arg(long = "M", default_value = "")]
        m: String,
    },
    /// Regularity of a ray from the input grammar.
    Regular { set: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let command_echo: Vec<String> = std::env::args().skip(1).collect();
    let mut run = RunReport::new(command_echo.join(" "));
    run.seed = cli.seed;

    let outcome = execute(&cli, &mut run);
    run.timing_ms = started.elapsed().as_millis();

    match outcome {
        Ok(Output::Report) => {
            emit(&cli, &run);
            if run.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Ok(Output::Document(text)) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

enum Output {
    Report,
    Document(String),
}

fn emit(cli: &Cli, run: &RunReport) {
    let json = run.to_json();
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: cannot write {}: {e}", path.display());
        }
    }
    if cli.human {
        print!("{}", run.render_human());
    } else {
        println!("{json}");
    }
}

fn execute(cli: &Cli, run: &mut RunReport) -> Result<Output, Error> {
    match &cli.command {
        Command::Validate { file } => {
            let doc = read_space_doc(file)?;
            if validate_space_doc(&doc, cli.cap, run)?.is_some() {
                // Reports already pushed; nothing else to do.
            }
            Ok(Output::Report)
        }
        Command::Regulars { file } => {
            let Some(space) = load_valid_space(file, cli.cap, run)? else {
                return Ok(Output::Report);
            };
            let regulars = space.regular_opens(cli.cap)?;
            let mut report = Report::new();
            report.note(format!("count: {}", regulars.len()));
            report.note("the empty set is excluded by definition".to_string());
            for u in regulars.members().members() {
                report.note(u.to_string());
            }
            if cli.oracle {
                report.merge(regular_mode_agreement(&space)?);
            }
            run.push("regular-opens", report);
            Ok(Output::Report)
        }
        Command::Basis { file } => {
            let Some(space) = load_valid_space(file, cli.cap, run)? else {
                return Ok(Output::Report);
            };
            let basis = space.basis()?;
            let mut report = Report::new();
            report.note(format!("count: {}", basis.len()));
            for b in basis.members() {
                report.note(b.to_string());
            }
            run.push("basis", report);
            Ok(Output::Report)
        }
        Command::Waybelow { file, u1, u2 } => {
            let Some(space) = load_valid_space(file, cli.cap, run)? else {
                return Ok(Output::Report);
            };
            let u1 = Subset::parse(space.universe(), u1)?;
            let u2 = Subset::parse(space.universe(), u2)?;
            let fast = space.way_below(&u1, &u2, Mode::Fast, cli.cap)?;
            let mut report = Report::new();
            report.note(format!("way-below: {fast}"));
            if cli.oracle {
                match space.way_below(&u1, &u2, Mode::Oracle, cli.cap) {
                    Ok(oracle) => {
                        if oracle != fast {
                            report.push(Violation::new(
                                "way-below-mode-disagreement",
                                vec![Witness::set("U1", &u1), Witness::set("U2", &u2)],
                                format!("fast={fast} oracle={oracle}"),
                            ));
                        } else {
                            report.note("oracle agrees".to_string());
                        }
                    }
                    Err(Error::CapExceeded { .. }) => {
                        report.note("oracle skipped: too many regular opens".to_string());
                    }
                    Err(e) => return Err(e),
                }
            }
            run.push("way-below", report);
            Ok(Output::Report)
        }
        Command::Classify { file } => {
            let poset = read_poset(file)?;
            let classification = poset.classify();
            let mut report = Report::new();
            report.note(render_flags(&classification.flags));
            for n in classification.notes {
                report.note(n);
            }
            run.push("classify", report);
            Ok(Output::Report)
        }
        Command::ClassifySpace { file } => {
            let Some(space) = load_valid_space(file, cli.cap, run)? else {
                return Ok(Output::Report);
            };
            let c = subclass::classify_space(&space, cli.cap)?;
            let mut report = Report::new();
            report.note(format!("class: {}", c.class));
            report.note(format!("regular-opens: {}", c.regular_count));
            report.note(render_flags(&c.flags));
            run.push("classify-space", report);
            Ok(Output::Report)
        }
        Command::Represent { file } => {
            let poset = read_poset(file)?;
            let space = poset.to_fgcs(cli.cap)?;
            let doc = doc_from_space(space.space(), Some(space.family()));
            Ok(Output::Document(serde_json::to_string_pretty(&doc).expect("serializable")))
        }
        Command::Roundtrip { file } => {
            let poset = read_poset(file)?;
            push_roundtrip(&poset, cli.cap, run)?;
            Ok(Output::Report)
        }
        Command::Pipeline { file } => {
            match format::read_document(file)? {
                Document::Poset(doc) => {
                    let poset = poset_from_doc(&doc)?;
                    let classification = poset.classify();
                    let mut report = Report::new();
                    report.note(render_flags(&classification.flags));
                    run.push("classify", report);
                    let space = poset.to_fgcs(cli.cap)?;
                    let mut derived = Report::new();
                    derived.note(format!("family-members: {}", space.family().len()));
                    run.push("represent", derived);
                    push_roundtrip(&poset, cli.cap, run)?;
                    push_space_pipeline(&Arc::new(space), cli.cap, run)?;
                }
                Document::Space(doc) => {
                    if let Some(space) = validate_space_doc(&doc, cli.cap, run)? {
                        push_space_pipeline(&space, cli.cap, run)?;
                    }
                }
            }
            Ok(Output::Report)
        }
        Command::Am { op } => am_command(cli, op, run),
        Command::Ray { op } => {
            ray_command(op, run)?;
            Ok(Output::Report)
        }
        Command::Mine { count, max_n, targets } => {
            let mut cfg = MinerConfig::new(cli.seed.unwrap_or(42), *count, *max_n);
            if let Some(list) = targets {
                cfg.targets = list
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_, _>>()?;
            }
            let outcome = miner::mine(&cfg, cli.cap);
            let mined = outcome.to_run_report(&run.command);
            run.seed = Some(cfg.seed);
            run.ok = mined.ok;
            run.checks = mined.checks;
            Ok(Output::Report)
        }
    }
}

fn read_space_doc(path: &Path) -> Result<format::SpaceDoc, Error> {
    match format::read_document(path)? {
        Document::Space(doc) => Ok(doc),
        Document::Poset(_) => Err(Error::parse(format!(
            "{} is a poset file; a space file was expected",
            path.display()
        ))),
    }
}

fn read_poset(path: &Path) -> Result<FinPoset, Error> {
    match format::read_document(path)? {
        Document::Poset(doc) => poset_from_doc(&doc),
        Document::Space(_) => Err(Error::parse(format!(
            "{} is a space file; a poset file was expected",
            path.display()
        ))),
    }
}

/// Builds and validates a space document, pushing the closure, hull and
/// family reports. Returns the space only when everything passed.
fn validate_space_doc(
    doc: &format::SpaceDoc,
    cap: usize,
    run: &mut RunReport,
) -> Result<Option<Arc<FGCSpace>>, Error> {
    let loaded = match space_from_doc(doc) {
        Ok(loaded) => loaded,
        Err(Error::NotAClosureSystem { reason }) | Err(Error::NotAClosureOperator { reason }) => {
            let mut report = Report::new();
            report.push(Violation::new("closure-axioms", vec![], reason));
            run.push("closure-axioms", report);
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    let mut space: GCSpace = loaded.space;
    let hull_report = space.validate(cap)?;
    let hull_ok = hull_report.ok;
    run.push("hull-conditions", hull_report);
    if !hull_ok {
        return Ok(None);
    }
    match loaded.family {
        None => {
            let mut report = Report::new();
            report.note("no family present; refinement check skipped".to_string());
            run.push("family-refinement", report);
            Ok(None)
        }
        Some(family) => {
            if family.is_empty() {
                return Err(Error::EmptyFamily);
            }
            let mut x = FGCSpace::new(space, family)?;
            let family_report = x.validate(cap)?;
            let family_ok = family_report.ok;
            run.push("family-refinement", family_report);
            if family_ok {
                Ok(Some(Arc::new(x)))
            } else {
                Ok(None)
            }
        }
    }
}

fn load_valid_space(path: &Path, cap: usize, run: &mut RunReport) -> Result<Option<Arc<FGCSpace>>, Error> {
    let doc = read_space_doc(path)?;
    if doc.family.is_none() {
        return Err(Error::parse("this command needs a space file with a family"));
    }
    validate_space_doc(&doc, cap, run)
}

fn regular_mode_agreement(space: &FGCSpace) -> Result<Report, Error> {
    let mut report = Report::new();
    for bits in 0..space.universe().subset_count() {
        let s = Subset::from_bits(space.universe(), bits);
        let fast = space.is_regular_open(&s, Mode::Fast)?;
        let oracle = space.is_regular_open(&s, Mode::Oracle)?;
        if fast != oracle {
            report.push(Violation::new(
                "regular-mode-disagreement",
                vec![Witness::set("U", &s)],
                format!("fast={fast} oracle={oracle}"),
            ));
        }
    }
    if report.ok {
        report.note("regularity oracle agrees on every subset".to_string());
    }
    Ok(report)
}

fn push_roundtrip(poset: &FinPoset, cap: usize, run: &mut RunReport) -> Result<(), Error> {
    let outcome = poset.roundtrip(cap)?;
    let mut report = outcome.report;
    report.note(format!("regular-opens: {}", outcome.regular_count));
    for (x, fx) in outcome.f.iter().enumerate() {
        report.note(format!("f({}) = {fx}", poset.elements().label(x)));
    }
    run.push("roundtrip", report);
    Ok(())
}

fn push_space_pipeline(space: &Arc<FGCSpace>, cap: usize, run: &mut RunReport) -> Result<(), Error> {
    let regulars = space.regular_opens(cap)?;
    let mut reg_report = Report::new();
    reg_report.note(format!("count: {}", regulars.len()));
    for u in regulars.members().members() {
        reg_report.note(u.to_string());
    }
    reg_report.merge(regular_mode_agreement(space)?);
    run.push("regular-opens", reg_report);

    let basis = space.basis()?;
    let mut basis_report = Report::new();
    basis_report.note(format!("count: {}", basis.len()));
    run.push("basis", basis_report);

    let mut wb_report = Report::new();
    if regulars.len() > WAY_BELOW_ORACLE_CAP {
        wb_report.note(format!(
            "oracle skipped: {} regular opens exceed the cap {WAY_BELOW_ORACLE_CAP}",
            regulars.len()
        ));
    } else {
        for u1 in regulars.members().members() {
            for u2 in regulars.members().members() {
                let fast = space.way_below(u1, u2, Mode::Fast, cap)?;
                let oracle = space.way_below(u1, u2, Mode::Oracle, cap)?;
                if fast != oracle {
                    wb_report.push(Violation::new(
                        "way-below-mode-disagreement",
                        vec![Witness::set("U1", u1), Witness::set("U2", u2)],
                        format!("fast={fast} oracle={oracle}"),
                    ));
                }
            }
        }
        if wb_report.ok {
            wb_report.note("way-below oracle agrees on every pair".to_string());
        }
    }
    run.push("way-below-agreement", wb_report);

    let c = subclass::classify_space(space, cap)?;
    let mut class_report = Report::new();
    class_report.note(format!("class: {}", c.class));
    class_report.note(render_flags(&c.flags));
    if c.class == subclass::SpaceClass::General {
        let locally = subclass::is_locally_consistent(space, cap)?;
        if let Some(v) = locally.violations.first() {
            class_report.note(format!(
                "not locally consistent: {}",
                v.witnesses.iter().map(|w| w.render()).collect::<Vec<_>>().join(", ")
            ));
        }
    }
    run.push("classify-space", class_report);

    run.push("subclass-theorems", subclass::verify_subclass_theorems(space, cap)?);
    Ok(())
}

fn am_command(cli: &Cli, op: &AmOp, run: &mut RunReport) -> Result<Output, Error> {
    match op {
        AmOp::Validate { file } => {
            let doc = format::read_mapping(file)?;
            let base = file.parent().unwrap_or(Path::new(".")).to_path_buf();
            let mut relation = mapping_from_doc(&doc, &base, cli.cap)?;
            let report = relation.validate(cli.cap)?;
            run.push("approximable-mapping", report);
            Ok(Output::Report)
        }
        AmOp::Apply { file, set } => {
            let relation = load_valid_mapping(file, cli.cap, run)?;
            let Some(relation) = relation else { return Ok(Output::Report) };
            let u = Subset::parse(relation.source().universe(), set)?;
            let image = relation.apply(&u)?;
            let regular = relation.target().is_regular_open(&image, Mode::Fast)?;
            let mut report = Report::new();
            report.note(format!("image: {image}"));
            report.note(format!("regular: {regular}"));
            if !regular {
                report.note("image is not a regular open of the target".to_string());
            }
            run.push("apply", report);
            Ok(Output::Report)
        }
        AmOp::Compose { first, second } => {
            let Some(t1) = load_valid_mapping(first, cli.cap, run)? else {
                return Ok(Output::Report);
            };
            let Some(t2) = load_valid_mapping(second, cli.cap, run)? else {
                return Ok(Output::Report);
            };
            let mut composed = AMRelation::compose(&t1, &t2)?;
            let report = composed.validate(cli.cap)?;
            if !report.ok {
                run.push("composite-mapping", report);
                return Ok(Output::Report);
            }
            let doc = doc_from_mapping(&composed);
            Ok(Output::Document(serde_json::to_string_pretty(&doc).expect("serializable")))
        }
        AmOp::Convert { file } => {
            let Some(relation) = load_valid_mapping(file, cli.cap, run)? else {
                return Ok(Output::Report);
            };
            let phi = relation.to_scott(cli.cap)?;
            let mut report = Report::new();
            for (pos, u) in phi.source_regulars().members().members().iter().enumerate() {
                let v = &phi.target_regulars().members().members()[phi.table()[pos]];
                report.note(format!("{u} -> {v}"));
            }
            let back = AMRelation::from_scott(&phi)?;
            if back.pairs() != relation.pairs() {
                report.push(Violation::new(
                    "conversion-roundtrip",
                    vec![],
                    "rebuilding the relation from its function changes the pairs",
                ));
            } else {
                report.note("conversion round trip holds".to_string());
            }
            run.push("induced-function", report);
            Ok(Output::Report)
        }
    }
}

fn load_valid_mapping(
    path: &Path,
    cap: usize,
    run: &mut RunReport,
) -> Result<Option<AMRelation>, Error> {
    let doc = format::read_mapping(path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut relation = mapping_from_doc(&doc, &base, cap)?;
    let report = relation.validate(cap)?;
    let ok = report.ok;
    run.push(format!("mapping-conditions {}", path.display()), report);
    Ok(if ok { Some(relation) } else { None })
}

fn ray_command(op: &RayOp, run: &mut RunReport) -> Result<(), Error> {
    let mut report = Report::new();
    match op {
        RayOp::Hull { values } => {
            let f: Vec<ray::Rat> =
                values.iter().map(|v| ray::parse_rat(v)).collect::<Result<_, _>>()?;
            let hull = ray::ray_hull(&f)?;
            report.note(format!("hull: {hull}"));
            run.push("ray-hull", report);
        }
        RayOp::Wb { u1, u2 } => {
            let r1: ray::RaySet = u1.parse()?;
            let r2: ray::RaySet = u2.parse()?;
            let (Some(o1), Some(o2)) = (r1.as_open(), r2.as_open()) else {
                return Err(Error::NotRegular {
                    set: if r1.as_open().is_none() { r1.to_string() } else { r2.to_string() },
                });
            };
            report.note(format!("way-below: {}", ray::ray_way_below(&o1, &o2)));
            run.push("ray-way-below", report);
        }
        RayOp::Sigma { f, m } => {
            let parse_list = |text: &str| -> Result<Vec<ray::Rat>, Error> {
                text.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(ray::parse_rat)
                    .collect()
            };
            let f = parse_list(f)?;
            let m = parse_list(m)?;
            let sigma = ray::ray_sigma(&f, &m)?;
            report.note(format!("sigma: {sigma}"));
            run.push("ray-sigma", report);
        }
        RayOp::Regular { set } => {
            let r: ray::RaySet = set.parse()?;
            report.note(format!("regular: {}", ray::ray_is_regular(&r)));
            run.push("ray-regular", report);
        }
    }
    Ok(())
}

fn render_flags(flags: &fgcs::poset::PosetFlags) -> String {
    format!(
        "dcpo={} continuous={} algebraic={} complete-lattice={} l-domain={} bounded-complete={}",
        flags.dcpo,
        flags.continuous,
        flags.algebraic,
        flags.complete_lattice,
        flags.l_domain,
        flags.bounded_complete
    )
}
