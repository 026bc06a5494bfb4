//! Command-line surface for the internal-symmetry toolkit.
//!
//! Subcommands load a plain-text category description, run the requested
//! verification or construction, and print a deterministic report (see
//! [`report`]). Exit codes: 0 every requested verdict passes, 1 a
//! verdict fails or is absent, 2 usage or parse error, 3 a budget or
//! cap was exceeded. The `CATSYM_MAX_ARROWS` environment variable
//! overrides the default arrow cap everywhere a category is
//! materialized.

mod report;

use std::io::Read as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use catsym_core::comma::{LevelCaps, LevelTower};
use catsym_core::finset::{build_model, check_set_claims, ClaimMode, FinSetCaps};
use catsym_core::format::{parse_category_file, print_category_file, tokenize_category, LowerError, LoweredFile};
use catsym_core::internal::{act_arr, act_obj, build_e, orbit_arr, orbit_obj, IcsElement};
use catsym_core::symmetry::{
    check_psc, classify, search_cocc, search_psc, Budget, LayerVerdict, PscStructure,
    SearchOutcome,
};

use report::Report;

#[derive(Parser)]
#[command(
    name = "catsym",
    version,
    about = "Verify internal-symmetry structure on finite categories"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Layer {
    Psc,
    Cocc,
    Sec,
    Imc,
    All,
}

impl Layer {
    fn name(self) -> &'static str {
        match self {
            Layer::Psc => "psc",
            Layer::Cocc => "cocc",
            Layer::Sec => "sec",
            Layer::Imc => "imc",
            Layer::All => "all",
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Check structure layers, using declared sections or searching.
    Check {
        /// Category description file, or `-` for stdin.
        path: String,
        /// Which layer's verdict decides the exit code.
        #[arg(long, value_enum, default_value_t = Layer::All)]
        layer: Layer,
        /// Node allowance for structure searches.
        #[arg(long)]
        budget: Option<u64>,
        /// Machine-readable output.
        #[arg(long)]
        json: bool,
    },
    /// Materialize a tower level and print it as a description file.
    Level {
        path: String,
        /// Tower level; 1 is the category itself.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_objects: Option<usize>,
        #[arg(long)]
        max_arrows: Option<usize>,
    },
    /// Apply a power of the internal-symmetry endofunctor to a target.
    ApplyE {
        path: String,
        /// Object or arrow name.
        #[arg(long)]
        target: String,
        /// Power of the endofunctor.
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Iterate the endofunctor from a target and report the orbit.
    Orbit {
        path: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Verify the structural equations of the finite-set model.
    FinsetDemo {
        /// Ground set size; 2 and below run exhaustively, larger sample.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Sample count for the sampled mode.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Search for a duality structure and print it in section form.
    SearchPsc {
        path: String,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Usage(String),
    Caps(String),
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("catsym: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Caps(msg)) => {
            eprintln!("catsym: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Check { path, layer, budget, json } => cmd_check(&path, layer, budget, json),
        Cmd::Level { path, n, max_objects, max_arrows } => {
            cmd_level(&path, n, max_objects, max_arrows)
        }
        Cmd::ApplyE { path, target, n, budget, json } => {
            cmd_apply_e(&path, &target, n, budget, json)
        }
        Cmd::Orbit { path, target, depth, budget, json } => {
            cmd_orbit(&path, &target, depth, budget, json)
        }
        Cmd::FinsetDemo { n, samples, seed, json } => cmd_finset_demo(n, samples, seed, json),
        Cmd::SearchPsc { path, budget, json } => cmd_search_psc(&path, budget, json),
    }
}

fn read_input(path: &str) -> Result<(String, String), Failure> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("reading {path}: {e}")))?
    };
    let digest = format!("sha256:{:x}", Sha256::digest(text.as_bytes()));
    Ok((text, digest))
}

fn env_max_arrows() -> Result<Option<usize>, Failure> {
    match std::env::var("CATSYM_MAX_ARROWS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Failure::Usage(format!("CATSYM_MAX_ARROWS must be an integer, got `{v}`"))
        }),
        Err(_) => Ok(None),
    }
}

fn level_caps(max_objects: Option<usize>, max_arrows: Option<usize>) -> Result<LevelCaps, Failure> {
    let mut caps = LevelCaps::default();
    if let Some(v) = env_max_arrows()? {
        caps.max_arrows = v;
    }
    if let Some(v) = max_objects {
        caps.max_objects = v;
    }
    if let Some(v) = max_arrows {
        caps.max_arrows = v;
    }
    Ok(caps)
}

fn budget_of(flag: Option<u64>) -> Budget {
    Budget { max_nodes: flag.unwrap_or(Budget::default().max_nodes) }
}

fn lower_input(text: &str, caps: LevelCaps) -> Result<LoweredFile, Failure> {
    let file = parse_category_file(text).map_err(|e| Failure::Usage(e.to_string()))?;
    file.lower(caps).map_err(|e| match e {
        LowerError::Level(inner) => Failure::Caps(inner.to_string()),
        other => Failure::Usage(other.to_string()),
    })
}

/// One verdict line: layer, PASS/FAIL/ABSENT/BUDGET, optional witness.
type Row = (&'static str, &'static str, Option<String>);

fn absent(layer: &'static str) -> Row {
    (layer, "ABSENT", Some("no structure below".into()))
}

fn layer_row(name: &'static str, v: &LayerVerdict) -> Row {
    match v {
        LayerVerdict::Pass => (name, "PASS", None),
        LayerVerdict::Fail { reason } => (name, "FAIL", Some(reason.clone())),
        LayerVerdict::Unknown { reason } => (name, "BUDGET", Some(reason.clone())),
    }
}

fn psc_only_row(lowered: &LoweredFile, budget: Budget) -> Row {
    match &lowered.psc {
        Some(p) => match check_psc(p) {
            Ok(()) => ("psc", "PASS", None),
            Err(e) => ("psc", "FAIL", Some(e.to_string())),
        },
        None => match search_psc(&lowered.cat, budget) {
            SearchOutcome::Found(_) => ("psc", "PASS", None),
            SearchOutcome::AbsentProven => {
                ("psc", "FAIL", Some("no duality structure exists".into()))
            }
            SearchOutcome::BudgetExhausted => {
                ("psc", "BUDGET", Some("duality search budget exhausted".into()))
            }
        },
    }
}

fn full_rows(
    lowered: &LoweredFile,
    caps: LevelCaps,
    budget: Budget,
) -> Result<(Vec<Row>, Option<String>), Failure> {
    if let Some(c) = &lowered.cocc {
        let v = classify(c, budget);
        let rows = vec![
            layer_row("psc", &v.psc),
            layer_row("cocc", &v.cocc),
            layer_row("sec", &v.sec),
            layer_row("imc", &v.imc),
        ];
        return Ok((rows, v.cross_check));
    }
    let psc = match &lowered.psc {
        Some(p) => p.clone(),
        None => match search_psc(&lowered.cat, budget) {
            SearchOutcome::Found(p) => p,
            SearchOutcome::AbsentProven => {
                let rows = vec![
                    ("psc", "FAIL", Some("no duality structure exists".to_string())),
                    absent("cocc"),
                    absent("sec"),
                    absent("imc"),
                ];
                return Ok((rows, None));
            }
            SearchOutcome::BudgetExhausted => {
                let rows = vec![
                    ("psc", "BUDGET", Some("duality search budget exhausted".to_string())),
                    absent("cocc"),
                    absent("sec"),
                    absent("imc"),
                ];
                return Ok((rows, None));
            }
        },
    };
    if let Err(e) = check_psc(&psc) {
        let rows = vec![
            ("psc", "FAIL", Some(e.to_string())),
            absent("cocc"),
            absent("sec"),
            absent("imc"),
        ];
        return Ok((rows, None));
    }
    match search_cocc(&psc, caps, budget).map_err(|e| Failure::Caps(e.to_string()))? {
        SearchOutcome::Found(c) => {
            let v = classify(&c, budget);
            let rows = vec![
                layer_row("psc", &v.psc),
                layer_row("cocc", &v.cocc),
                layer_row("sec", &v.sec),
                layer_row("imc", &v.imc),
            ];
            Ok((rows, v.cross_check))
        }
        SearchOutcome::AbsentProven => {
            let rows = vec![
                ("psc", "PASS", None),
                ("cocc", "FAIL", Some("no te square map exists".to_string())),
                absent("sec"),
                absent("imc"),
            ];
            Ok((rows, None))
        }
        SearchOutcome::BudgetExhausted => {
            let rows = vec![
                ("psc", "PASS", None),
                ("cocc", "BUDGET", Some("te search budget exhausted".to_string())),
                absent("sec"),
                absent("imc"),
            ];
            Ok((rows, None))
        }
    }
}

fn summary_of(rows: &[Row]) -> String {
    let mark = |verdict: &str| match verdict {
        "PASS" => '+',
        "BUDGET" => '?',
        _ => '-',
    };
    let label = |layer: &str| match layer {
        "psc" => "PSC",
        "cocc" => "CoCC",
        "sec" => "SEC",
        _ => "IMC",
    };
    rows.iter()
        .map(|(l, v, _)| format!("{}{}", label(l), mark(v)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn exit_for(rows: &[Row], requested: &[&str]) -> u8 {
    let picked: Vec<&Row> = rows.iter().filter(|(l, _, _)| requested.contains(l)).collect();
    if picked.iter().any(|(_, v, _)| *v == "BUDGET") {
        3
    } else if picked.iter().any(|(_, v, _)| *v != "PASS") {
        1
    } else {
        0
    }
}

fn cmd_check(path: &str, layer: Layer, budget: Option<u64>, json: bool) -> Result<u8, Failure> {
    let started = Instant::now();
    let (text, digest) = read_input(path)?;
    let caps = level_caps(None, None)?;
    let lowered = lower_input(&text, caps)?;
    let budget = budget_of(budget);

    let mut report = Report::new("check");
    report.push("input.path", path);
    report.push("input.digest", digest);
    report.push("layer", layer.name());

    let (rows, cross_check) = if layer == Layer::Psc {
        (vec![psc_only_row(&lowered, budget)], None)
    } else {
        full_rows(&lowered, caps, budget)?
    };
    for (name, verdict, witness) in &rows {
        report.push(format!("verdict.{name}"), *verdict);
        if let Some(w) = witness {
            report.push(format!("witness.{name}"), w.clone());
        }
    }
    if rows.len() == 4 {
        report.push("summary", summary_of(&rows));
    }
    if let Some(c) = cross_check {
        report.push("warning.cross_check", c);
    }

    let requested: Vec<&str> = match layer {
        Layer::All => vec!["psc", "cocc", "sec", "imc"],
        other => vec![other.name()],
    };
    print!("{}", report.render(json, started.elapsed()));
    Ok(exit_for(&rows, &requested))
}

fn cmd_level(
    path: &str,
    n: usize,
    max_objects: Option<usize>,
    max_arrows: Option<usize>,
) -> Result<u8, Failure> {
    if n == 0 {
        return Err(Failure::Usage("level numbering starts at 1".into()));
    }
    let caps = level_caps(max_objects, max_arrows)?;
    let (text, _) = read_input(path)?;
    let lowered = lower_input(&text, caps)?;
    let mut tower = LevelTower::new(lowered.cat.clone(), caps);
    let cat = tower.category(n).map_err(|e| Failure::Caps(e.to_string()))?;
    let (file, back_map) = tokenize_category(&cat);
    let mut out = String::new();
    out.push_str(&format!("# level {n} of {path}\n"));
    for line in &back_map {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str(&print_category_file(&file));
    print!("{out}");
    Ok(0)
}

enum PscFailure {
    Invalid(String),
    Absent,
    Budget,
}

fn obtain_psc(
    lowered: &LoweredFile,
    budget: Budget,
) -> Result<(PscStructure, &'static str), PscFailure> {
    if let Some(psc) = &lowered.psc {
        return match check_psc(psc) {
            Ok(()) => Ok((psc.clone(), "declared")),
            Err(e) => Err(PscFailure::Invalid(e.to_string())),
        };
    }
    match search_psc(&lowered.cat, budget) {
        SearchOutcome::Found(p) => Ok((p, "searched")),
        SearchOutcome::AbsentProven => Err(PscFailure::Absent),
        SearchOutcome::BudgetExhausted => Err(PscFailure::Budget),
    }
}

/// Shared head of apply-e and orbit: loads the file and produces a valid
/// duality structure, or finishes the report with a NoPscStructure error.
fn with_psc(
    command: &str,
    path: &str,
    budget: Option<u64>,
    json: bool,
    started: Instant,
    fill: impl FnOnce(&mut Report, &PscStructure) -> Result<u8, Failure>,
) -> Result<u8, Failure> {
    let (text, digest) = read_input(path)?;
    let caps = level_caps(None, None)?;
    let lowered = lower_input(&text, caps)?;
    let mut report = Report::new(command);
    report.push("input.path", path);
    report.push("input.digest", digest);
    match obtain_psc(&lowered, budget_of(budget)) {
        Ok((psc, source)) => {
            report.push("psc.source", source);
            let code = fill(&mut report, &psc)?;
            print!("{}", report.render(json, started.elapsed()));
            Ok(code)
        }
        Err(PscFailure::Invalid(w)) => {
            report.push("error", format!("NoPscStructure: declared section invalid: {w}"));
            print!("{}", report.render(json, started.elapsed()));
            Ok(1)
        }
        Err(PscFailure::Absent) => {
            report.push("error", "NoPscStructure: no duality structure exists");
            print!("{}", report.render(json, started.elapsed()));
            Ok(1)
        }
        Err(PscFailure::Budget) => {
            Err(Failure::Caps("duality search budget exhausted".into()))
        }
    }
}

fn cmd_apply_e(
    path: &str,
    target: &str,
    n: u64,
    budget: Option<u64>,
    json: bool,
) -> Result<u8, Failure> {
    let started = Instant::now();
    with_psc("apply-e", path, budget, json, started, |report, psc| {
        report.push("target", target);
        report.push("n", n.to_string());
        let e = build_e(psc).map_err(|er| Failure::Usage(er.to_string()))?;
        let cat = psc.cat();
        if let Some(o) = cat.obj_by_name(target) {
            let r = act_obj(&e, IcsElement(n), o);
            report.push("result.object", cat.obj_name(r));
        } else if let Some(f) = cat.arr_by_name(target) {
            let r = act_arr(&e, IcsElement(n), f);
            report.push("result.arrow", cat.arr_name(r));
        } else {
            return Err(Failure::Usage(format!("target `{target}` names no object or arrow")));
        }
        Ok(0)
    })
}

fn cmd_orbit(
    path: &str,
    target: &str,
    depth: usize,
    budget: Option<u64>,
    json: bool,
) -> Result<u8, Failure> {
    let started = Instant::now();
    with_psc("orbit", path, budget, json, started, |report, psc| {
        report.push("target", target);
        report.push("depth", depth.to_string());
        let e = build_e(psc).map_err(|er| Failure::Usage(er.to_string()))?;
        let cat = psc.cat();
        if let Some(o) = cat.obj_by_name(target) {
            let orbit = orbit_obj(&e, o, depth);
            for (i, &p) in orbit.points.iter().enumerate() {
                report.push(format!("orbit.point.{i}"), cat.obj_name(p));
                if i + 1 < orbit.points.len() {
                    let w = psc.iso(p);
                    report.push(
                        format!("orbit.witness.{i}"),
                        format!(
                            "{} : {} -> {}",
                            cat.arr_name(w),
                            cat.obj_name(cat.dom(w)),
                            cat.obj_name(cat.cod(w))
                        ),
                    );
                }
            }
            push_cycle(report, orbit.cycle);
        } else if let Some(f) = cat.arr_by_name(target) {
            let orbit = orbit_arr(&e, f, depth);
            for (i, &p) in orbit.points.iter().enumerate() {
                report.push(format!("orbit.point.{i}"), cat.arr_name(p));
                if i + 1 < orbit.points.len() {
                    let (a, b) = (cat.dom(p), cat.cod(p));
                    report.push(
                        format!("orbit.witness.{i}"),
                        format!(
                            "conjugate by {} and {}",
                            cat.arr_name(psc.iso(a)),
                            cat.arr_name(psc.iso(b))
                        ),
                    );
                }
            }
            push_cycle(report, orbit.cycle);
        } else {
            return Err(Failure::Usage(format!("target `{target}` names no object or arrow")));
        }
        Ok(0)
    })
}

fn push_cycle(report: &mut Report, cycle: Option<(usize, usize)>) {
    match cycle {
        Some((start, len)) => report.push("orbit.cycle", format!("start={start} len={len}")),
        None => report.push("orbit.cycle", "none within depth"),
    }
}

fn cmd_finset_demo(n: usize, samples: usize, seed: u64, json: bool) -> Result<u8, Failure> {
    let started = Instant::now();
    let mut caps = FinSetCaps::default();
    if let Some(v) = env_max_arrows()? {
        caps.max_arrows = v;
    }
    let mode = if n <= 2 {
        ClaimMode::Exhaustive
    } else {
        ClaimMode::Sampled { samples, seed }
    };
    let mut report = Report::new("finset-demo");
    report.push("ground", n.to_string());
    match &mode {
        ClaimMode::Exhaustive => report.push("mode", "exhaustive"),
        ClaimMode::Sampled { samples, seed } => {
            report.push("mode", format!("sampled samples={samples} seed={seed}"))
        }
    }
    if matches!(mode, ClaimMode::Exhaustive) {
        let model = build_model(n, caps).map_err(|e| Failure::Caps(e.to_string()))?;
        report.push("model.objects", model.cat().n_objects().to_string());
        report.push("model.arrows", model.cat().n_arrows().to_string());
    }
    let claims = check_set_claims(n, mode, caps).map_err(|e| Failure::Caps(e.to_string()))?;
    report.push("claim.hom_law", claims.hom_law.to_string());
    report.push("claim.representability", claims.representability.to_string());
    report.push("claim.te_functoriality", claims.te_functoriality.to_string());
    report.push("claim.te_naturality", claims.te_naturality.to_string());
    report.push("claim.sec_identity", claims.sec_identity.to_string());
    report.push("claim.rho_naturality", claims.rho_naturality.to_string());
    report.push("claim.imc_refuted", claims.imc_refuted.to_string());
    let ok = claims.all_verified();
    report.push("all_verified", if ok { "yes" } else { "no" });
    print!("{}", report.render(json, started.elapsed()));
    Ok(if ok { 0 } else { 1 })
}

fn cmd_search_psc(path: &str, budget: Option<u64>, json: bool) -> Result<u8, Failure> {
    let started = Instant::now();
    let (text, digest) = read_input(path)?;
    let caps = level_caps(None, None)?;
    let lowered = lower_input(&text, caps)?;
    let mut report = Report::new("search-psc");
    report.push("input.path", path);
    report.push("input.digest", digest);
    let code = match search_psc(&lowered.cat, budget_of(budget)) {
        SearchOutcome::Found(p) => {
            report.push("verdict.psc", "FOUND");
            let cat = p.cat().as_ref();
            for f in cat.arrows() {
                report.push(
                    "psc.btop",
                    format!("{} -> {}", cat.arr_name(f), cat.obj_name(p.btop(f))),
                );
            }
            for (&(x, y), &z) in p.star_table() {
                report.push(
                    "psc.star",
                    format!(
                        "{} * {} = {}",
                        cat.obj_name(x),
                        cat.obj_name(y),
                        cat.obj_name(z)
                    ),
                );
            }
            for a in cat.objects() {
                report.push(
                    "psc.iso",
                    format!("{} = {}", cat.obj_name(a), cat.arr_name(p.iso(a))),
                );
            }
            0
        }
        SearchOutcome::AbsentProven => {
            report.push("verdict.psc", "ABSENT");
            report.push("witness.psc", "search space exhausted, no structure exists");
            1
        }
        SearchOutcome::BudgetExhausted => {
            report.push("verdict.psc", "BUDGET");
            3
        }
    };
    print!("{}", report.render(json, started.elapsed()));
    Ok(code)
}
