use clap::{Args, Parser, Subcommand};
use extend_core::arrangement::{ArrangementError, StrataError};
use extend_core::cancellation::round_trip;
use extend_core::complexes::good::TwoComplex;
use extend_core::complexes::simple::SimpleComplex;
use extend_core::extension::classify_set;
use extend_core::inscribed::{canonical_key, good_elements, inscribed_set, key_hex, Config, Context, PipelineError};
use extend_core::report::{self, Mesh};
use extend_core::surface::{jitter, parse_surface, ImmersedSurface};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

const EXIT_NO_EXTENSION: u8 = 1;
const EXIT_PARTIAL: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "extend", version, about = "Enumerate immersed 3-manifolds bounded by an immersed surface")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunConfig,
}

/// Budgets and execution knobs shared by every command.
#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Maximum number of arrangement cells.
    #[arg(long, global = true, default_value_t = Config::default().cell_budget, value_parser = positive)]
    cell_budget: usize,
    /// Coset table size limit for the appropriateness test.
    #[arg(long, global = true, default_value_t = Config::default().coset_limit, value_parser = positive)]
    coset_limit: usize,
    /// Maximum number of subcomplexes examined per enumeration.
    #[arg(long, global = true, default_value_t = Config::default().subset_budget, value_parser = positive)]
    subset_budget: usize,
    /// Maximum number of inscribed elements per level.
    #[arg(long, global = true, default_value_t = Config::default().element_budget, value_parser = positive)]
    element_budget: usize,
    /// Maximum number of presentation simplification moves.
    #[arg(long, global = true, default_value_t = Config::default().tietze_budget, value_parser = positive)]
    tietze_budget: usize,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Ordered output with no timing fields; pass `--deterministic false` to
    /// record timings in JSON reports.
    #[arg(long, global = true, default_value_t = true, action = clap::ArgAction::Set)]
    deterministic: bool,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

impl RunConfig {
    fn config(&self) -> Config {
        Config {
            cell_budget: self.cell_budget,
            coset_limit: self.coset_limit,
            subset_budget: self.subset_budget,
            element_budget: self.element_budget,
            tietze_budget: self.tietze_budget,
            ..Config::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Winding strata D_k and their graphs G_k.
    Strata {
        file: PathBuf,
        /// Directory for one OFF mesh of ∂D_k per level.
        #[arg(long)]
        export_off: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Simple complexes built at one level and their good subcomplexes.
    Complexes {
        file: PathBuf,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        dump_json: Option<PathBuf>,
    },
    /// The inscribed set, level by level.
    Inscribed {
        file: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Equivalence classes of extensions with their invariants.
    Classify {
        file: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Directory for the boundary and X_k meshes of every class.
        #[arg(long)]
        export_off: Option<PathBuf>,
    },
    /// Assemble and decompose every good element, checking the keys agree.
    Roundtrip { file: PathBuf },
    /// Perturb vertices by a small seeded rational offset.
    Jitter {
        file: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_INPUT, message: message.to_string() }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let code = match &e {
            PipelineError::Strata(StrataError::NegativeWinding { .. }) => EXIT_NO_EXTENSION,
            PipelineError::Arrangement(ArrangementError::CellBudget { .. }) => EXIT_PARTIAL,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

struct Input {
    surface: ImmersedSurface,
    digest: String,
}

fn read_input(path: &Path) -> Result<Input, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let surface = parse_surface(text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(Input { surface, digest: report::input_digest(&bytes) })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_off(dir: &Path, name: &str, mesh: &Mesh) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    write_file(&dir.join(name), &mesh.to_off())
}

fn with_timing(mut v: Value, run: &RunConfig, start: Instant) -> Value {
    if !run.deterministic {
        v["timing_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    v
}

fn strata_cmd(run: &RunConfig, file: &Path, export_off: Option<&Path>, json_out: Option<&Path>) -> Result<u8, Failure> {
    let start = Instant::now();
    let input = read_input(file)?;
    let ctx = Context::new(&input.surface, run.config())?;
    let v = report::strata_json(&input.digest, &ctx);
    for level in v["levels"].as_array().unwrap() {
        println!(
            "D_{}: {} cells, {} components, {} boundary faces (euler {}), G_{}: {} edges",
            level["k"], level["cells"], level["components"], level["boundary_faces"], level["boundary_euler"], level["k"], level["graph_edges"]
        );
    }
    if let Some(dir) = export_off {
        for st in &ctx.strata {
            write_off(dir, &format!("stratum_{}.off", st.k), &report::stratum_boundary(&ctx.t.arr, st))?;
        }
    }
    if let Some(p) = json_out {
        write_file(p, &report::to_text(&with_timing(v, run, start)))?;
    }
    Ok(0)
}

fn lattice_json(tilde: &SimpleComplex, budget: usize) -> Value {
    let good = match tilde.good_subcomplexes(budget) {
        Ok(g) => g,
        Err(e) => return json!({ "complex": tilde, "good": Value::Null, "error": e.to_string() }),
    };
    let subset = |a: &TwoComplex, b: &TwoComplex| a.tris.len() < b.tris.len() && a.tris.is_subset(&b.tris);
    // Covering relations of the inclusion order.
    let mut covers = Vec::new();
    for (i, a) in good.iter().enumerate() {
        for (j, b) in good.iter().enumerate() {
            if subset(a, b) && !good.iter().any(|c| subset(a, c) && subset(c, b)) {
                covers.push([i, j]);
            }
        }
    }
    json!({ "complex": tilde, "good": good, "covers": covers })
}

fn complexes_cmd(run: &RunConfig, file: &Path, level: u32, dump: Option<&Path>) -> Result<u8, Failure> {
    let start = Instant::now();
    let input = read_input(file)?;
    let (ctx, z) = inscribed_set(&input.surface, run.config())?;
    if level == 0 || level > z.n {
        return Err(Failure::input(format!("level {level} outside 1..={}", z.n)));
    }
    let mut seen: Vec<Arc<SimpleComplex>> = Vec::new();
    for e in z.zeta(level) {
        if let Some(p) = e.pair(level) {
            if !seen.iter().any(|s| Arc::ptr_eq(s, &p.tilde)) {
                seen.push(p.tilde.clone());
            }
        }
    }
    let complexes: Vec<Value> = seen.iter().map(|s| lattice_json(s, ctx.config.subset_budget)).collect();
    for (i, c) in complexes.iter().enumerate() {
        let good = c["good"].as_array().map_or("?".to_string(), |g| g.len().to_string());
        println!("complex {i}: {} triangles, {} parts, {good} good subcomplexes", c["complex"]["x"]["tris"].as_array().map_or(0, Vec::len), c["complex"]["parts"].as_array().map_or(0, Vec::len));
    }
    if let Some(p) = dump {
        let mut v = json!({
            "schema_version": report::SCHEMA_VERSION,
            "kind": "complexes",
            "input_digest": input.digest,
            "config": report::config_json(&ctx.config),
            "level": level,
            "refinement": z.refinement,
            "complexes": complexes,
        });
        v = with_timing(v, run, start);
        write_file(p, &report::to_text(&v))?;
    }
    Ok(if z.partial { EXIT_PARTIAL } else { 0 })
}

fn inscribed_cmd(run: &RunConfig, file: &Path, json_out: Option<&Path>) -> Result<u8, Failure> {
    let start = Instant::now();
    let input = read_input(file)?;
    let (ctx, z) = inscribed_set(&input.surface, run.config())?;
    let good = good_elements(&z);
    for k in (1..=z.n).rev() {
        println!("|zeta_{k}| = {}", z.zeta(k).len());
    }
    println!("|I(zeta)| = {}", good.len());
    let elements: Vec<Value> = good
        .iter()
        .map(|e| {
            let key = key_hex(&canonical_key(e));
            let x: BTreeMap<u32, usize> = e.pairs.iter().map(|p| (p.k, p.chosen.tris.len())).collect();
            println!("  {} {}", &key[..16], x.iter().map(|(k, n)| format!("X_{k}:{n}")).collect::<Vec<_>>().join(" "));
            json!({ "key": key, "x_sizes": x })
        })
        .collect();
    for d in &z.diagnostics {
        eprintln!("partial: {d}");
    }
    if let Some(p) = json_out {
        let v = json!({
            "schema_version": report::SCHEMA_VERSION,
            "kind": "inscribed",
            "input_digest": input.digest,
            "config": report::config_json(&ctx.config),
            "n": z.n,
            "zeta_sizes": z.level_sizes(),
            "good_count": good.len(),
            "elements": elements,
            "partial": z.partial,
            "diagnostics": z.diagnostics,
            "refinement": z.refinement,
        });
        write_file(p, &report::to_text(&with_timing(v, run, start)))?;
    }
    Ok(if z.partial { EXIT_PARTIAL } else if good.is_empty() { EXIT_NO_EXTENSION } else { 0 })
}

fn classify_cmd(run: &RunConfig, file: &Path, json_out: Option<&Path>, export_off: Option<&Path>) -> Result<u8, Failure> {
    let start = Instant::now();
    let input = read_input(file)?;
    let (ctx, z) = inscribed_set(&input.surface, run.config())?;
    let (rep, exts) = classify_set(&ctx, &z);
    println!("n = {}, |I(zeta)| = {}", rep.n, rep.class_count);
    for c in &rep.classes {
        match &c.invariants {
            Some(inv) => {
                let h = inv.homology.as_ref().map_or("overflow".to_string(), |h| h.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "));
                let verdict = serde_json::to_value(inv.ball_verdict).unwrap();
                println!("  {}: euler {}, H = [{h}], pi1 {} gens / {} relators, {}", &c.key[..16], inv.euler, inv.pi1.simplified.n_gens, inv.pi1.simplified.relators.len(), verdict.as_str().unwrap());
            }
            None => println!("  {}: {}", &c.key[..16], c.error.as_deref().unwrap_or("no invariants")),
        }
    }
    for d in &rep.diagnostics {
        eprintln!("partial: {d}");
    }
    if let Some(dir) = export_off {
        let by_key: BTreeMap<String, _> = good_elements(&z).into_iter().map(|e| (key_hex(&canonical_key(e)), e)).collect();
        for (i, (c, ext)) in rep.classes.iter().zip(&exts).enumerate() {
            if let Some(ext) = ext {
                write_off(dir, &format!("class_{i}_boundary.off"), &report::extension_boundary(&ctx, ext))?;
            }
            for p in &by_key[&c.key].pairs {
                write_off(dir, &format!("class_{i}_x{}.off", p.k), &report::triangles_mesh(&ctx, &p.chosen))?;
            }
        }
    }
    eprintln!("classify: {} ms", start.elapsed().as_millis());
    if let Some(p) = json_out {
        let v = report::classification_json(&input.digest, &ctx.config, &rep);
        write_file(p, &report::to_text(&with_timing(v, run, start)))?;
    }
    Ok(if rep.partial { EXIT_PARTIAL } else if rep.class_count == 0 { EXIT_NO_EXTENSION } else { 0 })
}

fn roundtrip_cmd(run: &RunConfig, file: &Path) -> Result<u8, Failure> {
    let input = read_input(file)?;
    let (ctx, z) = inscribed_set(&input.surface, run.config())?;
    let results = round_trip(&ctx, &z);
    let mut failed = false;
    for (key, r) in &results {
        match r {
            Ok(_) => println!("PASS {key}"),
            Err(e) => {
                failed = true;
                println!("FAIL {key}: {e}");
            }
        }
    }
    if results.is_empty() {
        eprintln!("no good elements");
        return Ok(EXIT_NO_EXTENSION);
    }
    Ok(if failed || z.partial { EXIT_PARTIAL } else { 0 })
}

fn jitter_cmd(file: &Path, seed: u64, output: Option<&Path>) -> Result<u8, Failure> {
    let input = read_input(file)?;
    let moved = jitter(&input.surface, seed).map_err(Failure::input)?;
    let text = report::to_text(&moved.to_json());
    match output {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if cli.run.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.run.threads).build_global().map_err(Failure::input)?;
    }
    let run = &cli.run;
    match &cli.command {
        Command::Strata { file, export_off, json } => strata_cmd(run, file, export_off.as_deref(), json.as_deref()),
        Command::Complexes { file, level, dump_json } => complexes_cmd(run, file, *level, dump_json.as_deref()),
        Command::Inscribed { file, json } => inscribed_cmd(run, file, json.as_deref()),
        Command::Classify { file, json, export_off } => classify_cmd(run, file, json.as_deref(), export_off.as_deref()),
        Command::Roundtrip { file } => roundtrip_cmd(run, file),
        Command::Jitter { file, seed, output } => jitter_cmd(file, *seed, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
