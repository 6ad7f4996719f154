use std::fs;
use std::io::Write;
use std::ops::{ControlFlow, RangeInclusive};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use equistar::closed_form::status;
use equistar::gadgets::{family, registry};
use equistar::reduction::{equitable_2colorable, extract_partition, orientation_coloring, partition_exists, reduce_partition};
use equistar::report::{results_csv, results_markdown, run_checks, table, table_csv, table_markdown, Scale, Section};
use equistar::{
    canonicalize, enumerate_canonical, is_equitable_l_coloring, is_equitably_k_choosable, sample_assignment, solve,
    solve_with, theorem_main_color, Budget, ChoosabilityOptions, Coloring, EnumerateOptions, ListAssignment, Mode,
    StarForest, Strategy,
};

/// Equitable list coloring of star forests.
#[derive(Parser)]
#[command(name = "equistar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Deterministic,
    Fast,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Centers,
    Dp,
    Backtracking,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one instance. Exit 0 if colorable, 1 if not, 2 on bad input.
    Solve {
        /// Forest JSON; if omitted, the lists file must carry a "forest" key.
        #[arg(long)]
        forest: Option<PathBuf>,
        /// Assignment JSON.
        #[arg(long)]
        lists: PathBuf,
        /// List size; defaults to the common size of the lists.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
    },
    /// Exhaustive choosability. Exit 0 choosable, 1 not, 3 inconclusive.
    Choosable {
        /// Leaf counts, e.g. 1,3.
        stars: String,
        #[arg(long)]
        k: usize,
        /// Stop after this many classes.
        #[arg(long)]
        budget: Option<u64>,
        /// Stop after this many solver nodes.
        #[arg(long)]
        nodes: Option<u64>,
        #[arg(long, value_enum, default_value = "deterministic")]
        mode: ModeArg,
        /// Cap the palette (heuristic: a complete run is then not a proof).
        #[arg(long)]
        palette: Option<usize>,
        /// Also enumerate classes with free colors.
        #[arg(long)]
        keep_free_colors: bool,
        /// Write the defeating assignment here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run the reproduction checks. Nonzero exit on any failure.
    Verify {
        #[arg(long, default_value = "all")]
        section: String,
        /// Reduced sample counts.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Closed-form status of two stars over a grid.
    Table {
        /// Range like 1..8 (inclusive).
        #[arg(long)]
        m1: String,
        #[arg(long)]
        m2: String,
        #[arg(long)]
        k: usize,
        /// Decide unknown cells exhaustively.
        #[arg(long)]
        refine: bool,
        /// Class budget per refined cell.
        #[arg(long)]
        budget: Option<u64>,
        /// Directory for witnesses found while refining.
        #[arg(long)]
        cert_dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Closed-form status of one forest.
    Status {
        stars: String,
        #[arg(long)]
        k: usize,
    },
    /// Map a PARTITION instance to stars and solve it. Exit 0 if it splits.
    Reduce {
        /// Positive integers, e.g. 1,1,2.
        values: String,
    },
    /// Build a named gadget (see --list).
    Gadget {
        name: Option<String>,
        #[arg(long)]
        stars: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        /// Also run the solver on it.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        list: bool,
    },
    /// Random k-assignment with lists drawn from 1..=palette.
    Sample {
        stars: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        palette: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Print the canonical form instead.
        #[arg(long)]
        canonical: bool,
    },
    /// Stream canonical k-assignments as JSON lines.
    Enumerate {
        stars: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        palette: Option<usize>,
        #[arg(long)]
        max: Option<u64>,
        #[arg(long)]
        skip_free_colors: bool,
        /// Write the manifest here instead of stderr.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Trace the layered colorer on two stars.
    Explain {
        #[arg(long)]
        forest: Option<PathBuf>,
        #[arg(long)]
        lists: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
}

type CmdResult = Result<ExitCode, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { forest, lists, k, strategy } => cmd_solve(forest.as_deref(), &lists, k, strategy),
        Command::Choosable { stars, k, budget, nodes, mode, palette, keep_free_colors, witness } => {
            let opts = ChoosabilityOptions {
                budget: Budget { max_classes: budget, max_nodes: nodes },
                mode: match mode {
                    ModeArg::Deterministic => Mode::Deterministic,
                    ModeArg::Fast => Mode::Fast,
                },
                palette_bound: palette,
                skip_free_colors: !keep_free_colors,
            };
            cmd_choosable(&stars, k, &opts, witness.as_deref())
        }
        Command::Verify { section, quick, seed, format } => cmd_verify(&section, quick, seed, format),
        Command::Table { m1, m2, k, refine, budget, cert_dir, format } => {
            cmd_table(&m1, &m2, k, refine, budget, cert_dir.as_deref(), format)
        }
        Command::Status { stars, k } => cmd_status(&stars, k),
        Command::Reduce { values } => cmd_reduce(&values),
        Command::Gadget { name, stars, k, verify, list } => cmd_gadget(name, stars, k, verify, list),
        Command::Sample { stars, k, palette, seed, canonical } => cmd_sample(&stars, k, palette, seed, canonical),
        Command::Enumerate { stars, k, palette, max, skip_free_colors, manifest } => {
            cmd_enumerate(&stars, k, palette, max, skip_free_colors, manifest.as_deref())
        }
        Command::Explain { forest, lists, k } => cmd_explain(forest.as_deref(), &lists, k),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse_stars(s: &str) -> Result<StarForest, String> {
    let stars = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad leaf count {t:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    StarForest::new(stars).map_err(err)
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad range {s:?}"));
    match s.split_once("..") {
        Some((a, b)) => Ok(num(a)?..=num(b.trim_start_matches('='))?),
        None => num(s).map(|n| n..=n),
    }
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Forest from its own file, or from the "forest" key of the lists file.
fn load_instance(forest: Option<&Path>, lists: &Path, k: Option<usize>) -> Result<(StarForest, ListAssignment, usize), String> {
    let lists_json = read_json(lists)?;
    let forest_json = match forest {
        Some(p) => read_json(p)?,
        None => lists_json
            .get("forest")
            .cloned()
            .ok_or("no --forest given and the lists file has no \"forest\" key")?,
    };
    let forest: StarForest = serde_json::from_value(forest_json).map_err(err)?;
    let l = ListAssignment::from_json_value(&forest, lists_json).map_err(err)?;
    let k = match k {
        Some(k) => k,
        None => l.uniform_size().ok_or("lists differ in size; pass --k")?,
    };
    Ok((forest, l, k))
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json(v: &Value) {
    emit(&(serde_json::to_string_pretty(v).expect("json prints") + "\n"));
}

fn cmd_solve(forest: Option<&Path>, lists: &Path, k: Option<usize>, strategy: Option<StrategyArg>) -> CmdResult {
    let (forest, l, k) = load_instance(forest, lists, k)?;
    let out = match strategy {
        None => solve(&forest, &l, k),
        Some(s) => solve_with(
            &forest,
            &l,
            k,
            match s {
                StrategyArg::Centers => Strategy::CenterEnumeration,
                StrategyArg::Dp => Strategy::UsageDp,
                StrategyArg::Backtracking => Strategy::Backtracking,
            },
        ),
    }
    .map_err(err)?;
    print_json(&out.to_json_value());
    Ok(if out.colorable { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_choosable(stars: &str, k: usize, opts: &ChoosabilityOptions, witness: Option<&Path>) -> CmdResult {
    let forest = parse_stars(stars)?;
    let report = is_equitably_k_choosable(&forest, k, opts).map_err(err)?;
    let mut v = report.to_json_value();
    if let (Some(w), Some(path)) = (report.verdict.witness(), witness) {
        let mut body = w.assignment().to_json_value();
        body["forest"] = json!(forest);
        body["k"] = json!(k);
        fs::write(path, body.to_string()).map_err(|e| format!("{}: {e}", path.display()))?;
        v["witness_path"] = json!(path.display().to_string());
    }
    print_json(&v);
    Ok(match report.verdict.is_choosable() {
        Some(true) => ExitCode::SUCCESS,
        Some(false) => ExitCode::from(1),
        None => ExitCode::from(3),
    })
}

fn cmd_verify(section: &str, quick: bool, seed: u64, format: Format) -> CmdResult {
    let section = match section {
        "all" => None,
        s => Some(s.parse::<Section>().map_err(err)?),
    };
    let scale = Scale { seed, ..if quick { Scale::quick() } else { Scale::full() } };
    let results = run_checks(section, &scale);
    match format {
        Format::Csv => emit(&results_csv(&results).map_err(err)?),
        Format::Md => emit(&results_markdown(&results)),
        Format::Json => print_json(&serde_json::to_value(&results).map_err(err)?),
    }
    Ok(if results.iter().all(|r| r.passed) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_table(
    m1: &str,
    m2: &str,
    k: usize,
    refine: bool,
    budget: Option<u64>,
    cert_dir: Option<&Path>,
    format: Format,
) -> CmdResult {
    let opts = ChoosabilityOptions {
        budget: Budget { max_classes: budget, max_nodes: None },
        ..Default::default()
    };
    let rows = table(parse_range(m1)?, parse_range(m2)?, k, refine.then_some(&opts), cert_dir).map_err(err)?;
    match format {
        Format::Csv => emit(&table_csv(&rows).map_err(err)?),
        Format::Md => emit(&table_markdown(&rows)),
        Format::Json => print_json(&serde_json::to_value(&rows).map_err(err)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_status(stars: &str, k: usize) -> CmdResult {
    let forest = parse_stars(stars)?;
    if k == 0 {
        return Err("k must be positive".into());
    }
    let st = status(&forest, k);
    print_json(&json!({"forest": forest, "k": k, "status": st.tag(), "rule": st.rule().map(|r| r.tag())}));
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce(values: &str) -> CmdResult {
    let inst: equistar::reduction::PartitionInstance = values.parse().map_err(err)?;
    let forest = reduce_partition(&inst).map_err(err)?;
    let orientation = equitable_2colorable(&forest);
    let mut v = json!({
        "instance": inst.values(),
        "forest": forest,
        "partition_exists": partition_exists(&inst),
        "orientation": orientation.as_ref().map(|o| o.to_string()),
    });
    if let Some(o) = &orientation {
        v["coloring"] = orientation_coloring(&forest, o).map_err(err)?.to_json_value();
        let p = extract_partition(&inst, o).map_err(err)?;
        v["partition"] = json!({"a": p.a, "b": p.b});
    }
    print_json(&v);
    Ok(if orientation.is_some() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_gadget(name: Option<String>, stars: Option<String>, k: Option<usize>, verify: bool, list: bool) -> CmdResult {
    if list || name.is_none() {
        for g in registry() {
            emit(&format!("{:<22} {}\n", g.name, g.summary));
        }
        return Ok(ExitCode::SUCCESS);
    }
    let name = name.expect("checked above");
    let fam = family(&name).ok_or_else(|| format!("unknown gadget {name:?}; see --list"))?;
    let k = k.ok_or("pass --k")?;
    let forest = match stars {
        Some(s) => parse_stars(&s)?,
        None if name == "subset-blocks" => equistar::gadgets::tconstruct_forest(k).map_err(err)?,
        None => return Err("pass --stars".into()),
    };
    if !(fam.applies)(&forest, k) {
        return Err(format!("{name} does not apply to {forest} with k = {k}"));
    }
    let g = (fam.build)(&forest, k).map_err(err)?;
    let mut v = g.to_json_value();
    let mut code = ExitCode::SUCCESS;
    if verify {
        let colorable = solve(&g.forest, &g.lists, g.k).map_err(err)?.colorable;
        v["colorable"] = json!(colorable);
        if colorable {
            code = ExitCode::from(1);
        }
    }
    print_json(&v);
    Ok(code)
}

fn cmd_sample(stars: &str, k: usize, palette: usize, seed: u64, canonical: bool) -> CmdResult {
    let forest = parse_stars(stars)?;
    let mut l = sample_assignment(&forest, k, palette, seed).map_err(err)?;
    if canonical {
        l = canonicalize(&forest, &l).map_err(err)?.into_assignment();
    }
    let mut v = l.to_json_value();
    v["forest"] = json!(forest);
    v["k"] = json!(k);
    emit(&format!("{v}\n"));
    Ok(ExitCode::SUCCESS)
}

fn cmd_enumerate(
    stars: &str,
    k: usize,
    palette: Option<usize>,
    max: Option<u64>,
    skip_free_colors: bool,
    manifest: Option<&Path>,
) -> CmdResult {
    let forest = parse_stars(stars)?;
    let opts = EnumerateOptions { palette_bound: palette, max_classes: max, skip_free_colors };
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let mut write_error = None;
    let m = enumerate_canonical(&forest, k, &opts, |c| match writeln!(out, "{}", c.assignment().to_json()) {
        Ok(()) => ControlFlow::Continue(()),
        Err(e) => {
            write_error = Some(e);
            ControlFlow::Break(())
        }
    })
    .map_err(err)?;
    let _ = out.flush();
    if let Some(e) = write_error.filter(|e| e.kind() != std::io::ErrorKind::BrokenPipe) {
        return Err(e.to_string());
    }
    let text = serde_json::to_string(&m).map_err(err)?;
    match manifest {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))?,
        None => eprintln!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_explain(forest: Option<&Path>, lists: &Path, k: Option<usize>) -> CmdResult {
    let (forest, l, k) = load_instance(forest, lists, k)?;
    let out = theorem_main_color(&forest, &l, k).map_err(err)?;
    emit(&out.trace_jsonl());
    let coloring: Option<&Coloring> = out.coloring.as_ref();
    let verified = match coloring {
        Some(c) => is_equitable_l_coloring(&forest, &l, c, k).map_err(err)?,
        None => false,
    };
    emit(&format!(
        "{}\n",
        json!({
            "event": "result",
            "path": out.path,
            "fallback": out.used_fallback(),
            "fallback_reason": out.fallback_reason,
            "verified": verified,
            "coloring": coloring.map(|c| c.to_json_value()),
        })
    ));
    Ok(if verified { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
