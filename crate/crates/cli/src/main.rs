//! `netlearn`: generate networks, estimate learning rates, boost, run
//! robustness experiments and property suites, and plot results.

mod plot;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netlearn::booster::{greedy_boost, CoverageParams};
use netlearn::engine::EngineConfig;
use netlearn::exhaustive::{Corpus, EXHAUSTIVE_CAP};
use netlearn::families::{self, FamilyInstance};
use netlearn::graph::{Graph, Modification, Vertex};
use netlearn::rates::{graph_rate, rate_random, OracleConfig, OracleKind};
use netlearn::robustness::{celebrity_worstcase_with, degradation, params_string, q_sweep};
use netlearn::seed::{derive_rng, rng_from_seed};
use netlearn::verify::{self, Suite, SuiteReport};
use serde::Serialize;
use serde_json::{json, Value};

use report::{Provenance, RateRow, RobustnessRow};

#[derive(Debug, Parser, Serialize)]
#[command(name = "netlearn", version, about = "Sequential Bayesian learning on networks")]
struct Cli {
    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Signal quality in (1/2, 1).
    #[arg(long, global = true, default_value_t = 0.7)]
    q: f64,
    #[arg(long, global = true, value_enum, default_value_t = Engine::Exact)]
    engine: Engine,
    /// Monte-Carlo trials (sampled orderings).
    #[arg(long, global = true, default_value_t = 1000)]
    trials: usize,
    /// Forward simulations per state when tabulating.
    #[arg(long, global = true)]
    forward_samples: Option<usize>,
    /// Most prior neighbors a tabulated agent observes.
    #[arg(long, global = true)]
    obs_cap: Option<usize>,
    /// Output path; standard output when omitted.
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Engine {
    Exact,
    Tabulated,
}

#[derive(Debug, Subcommand, Serialize)]
enum Command {
    /// Write a family instance as graph JSON plus a sidecar.
    Generate(FamilyArgs),
    /// Random-order learning rates as CSV.
    Rate(RateArgs),
    /// Greedy boosting plan as JSON.
    Boost(BoostArgs),
    /// Rates before and after modifications as CSV.
    Robustness(RobustnessArgs),
    /// Rates across a grid of signal qualities as CSV.
    SweepQ(SweepArgs),
    /// Run a property suite; exits 3 on any violation.
    Verify(VerifyArgs),
    /// Render CSV columns as an SVG line plot.
    Plot(PlotArgs),
}

#[derive(Debug, Args, Serialize)]
struct FamilyArgs {
    /// complete, celebrity, guinea, embedded, fragile-low-q, fragile-high-q,
    /// path, star, star-forest or erdos-renyi.
    family: String,
    /// Generator parameters, in order.
    params: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
struct RateArgs {
    graph: PathBuf,
    #[arg(long = "vertex", conflicts_with = "all")]
    vertices: Vec<Vertex>,
    /// Every vertex, plus the graph-level rate.
    #[arg(long)]
    all: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OracleArg {
    Exact,
    Mc,
    Heuristic,
    Labels,
}

#[derive(Debug, Args, Serialize)]
struct BoostArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Non-learners that may stay uncovered; ⌈√n⌉ when omitted.
    #[arg(long)]
    tolerance: Option<usize>,
    #[arg(long, value_enum, default_value_t = OracleArg::Heuristic)]
    oracle: OracleArg,
    #[arg(long, default_value_t = 0.9)]
    threshold: f64,
    #[arg(long, default_value_t = 8.0)]
    tau: f64,
    /// JSON list of learner ids, for the labels oracle.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Absolute coverage tolerance; 0.05 n when omitted.
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    fail_prob: f64,
}

#[derive(Debug, Args, Serialize)]
struct RobustnessArgs {
    /// Graph JSON; omit with --celebrity.
    graph: Option<PathBuf>,
    #[arg(long, required_unless_present = "celebrity")]
    vertex: Option<Vertex>,
    /// JSON list of modifications.
    #[arg(long, required_unless_present = "celebrity")]
    mods: Option<PathBuf>,
    /// `N K`: delete every celebrity of celebrity(N, K).
    #[arg(long, num_args = 2, value_names = ["N", "K"], conflicts_with_all = ["graph", "vertex", "mods"])]
    celebrity: Option<Vec<usize>>,
}

#[derive(Debug, Args, Serialize)]
struct SweepArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long = "vertex")]
    vertices: Vec<Vertex>,
    /// Every vertex carrying this role label.
    #[arg(long)]
    role: Option<String>,
    /// Comma-separated signal qualities.
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    /// monotonicity, improvement, submodularity, concentration, bounds,
    /// greedy, or all.
    suite: String,
    /// Largest graph in the corpus; the suite's default when omitted.
    #[arg(long)]
    max_n: Option<usize>,
    /// Random tuples, orderings or graphs for the sampled suites.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
struct PlotArgs {
    csv: PathBuf,
    #[arg(long, default_value = "q")]
    x: String,
    #[arg(long, default_value = "rate")]
    y: String,
    /// Column splitting rows into series; `none` for a single series.
    #[arg(long, default_value = "vertex")]
    series: String,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Validation(String),
    Violation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Violation(_) => 3,
        }
    }
}

impl From<netlearn::Error> for Failure {
    fn from(e: netlearn::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<netlearn::GraphError> for Failure {
    fn from(e: netlearn::GraphError) -> Self {
        Failure::Validation(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Validation(m) | Failure::Violation(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let prov = Provenance::new(cli.seed, cli);
    match &cli.command {
        Command::Generate(a) => generate(cli, a, &prov),
        Command::Rate(a) => rate(cli, a, &prov),
        Command::Boost(a) => boost(cli, a, &prov),
        Command::Robustness(a) => robustness(cli, a, &prov),
        Command::SweepQ(a) => sweep(cli, a, &prov),
        Command::Verify(a) => verify_cmd(cli, a, &prov),
        Command::Plot(a) => plot_cmd(cli, a),
    }
}

fn engine(cli: &Cli) -> Result<EngineConfig, Failure> {
    let mut cfg = match cli.engine {
        Engine::Exact => EngineConfig::exact(cli.q),
        Engine::Tabulated => EngineConfig::tabulated(cli.q),
    };
    if let Some(r) = cli.forward_samples {
        cfg.forward_samples = r;
    }
    if let Some(c) = cli.obs_cap {
        cfg.obs_cap = c;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))
}

fn emit(cli: &Cli, bytes: &[u8]) -> Outcome {
    match &cli.out {
        Some(p) => write(p, bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| Failure::Validation(format!("cannot write output: {e}")))
        }
    }
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    Ok(Graph::from_json_str(&read(path)?)?)
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s.into_bytes()
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn build_family(cli: &Cli, a: &FamilyArgs) -> Result<FamilyInstance, Failure> {
    let want = |k: usize| {
        if a.params.len() == k {
            Ok(())
        } else {
            Err(Failure::Usage(format!("{} takes {k} parameters, got {}", a.family, a.params.len())))
        }
    };
    let int = |i: usize| {
        a.params[i]
            .parse::<usize>()
            .map_err(|_| Failure::Usage(format!("parameter {:?} is not a non-negative integer", a.params[i])))
    };
    let inst = match a.family.as_str() {
        "complete" | "path" | "star" => {
            want(1)?;
            match a.family.as_str() {
                "complete" => families::complete(int(0)?)?,
                "path" => families::path(int(0)?)?,
                _ => families::star(int(0)?)?,
            }
        }
        "celebrity" => {
            want(2)?;
            families::celebrity(int(0)?, int(1)?)?
        }
        "guinea" => {
            want(3)?;
            families::guinea_boosted_complete(int(0)?, int(1)?, int(2)?)?
        }
        "embedded" => {
            want(3)?;
            let depth = u32::try_from(int(2)?).map_err(|_| Failure::Usage("tree depth too large".into()))?;
            let gadget = families::binary_tree_gadget(depth)?;
            families::embedded_boosted_complete(int(0)?, int(1)?, &gadget)?
        }
        "fragile-low-q" => {
            want(2)?;
            families::fragile_low_q(int(0)?, int(1)?)?
        }
        "fragile-high-q" => {
            want(2)?;
            families::fragile_high_q(int(0)?, int(1)?)?
        }
        "star-forest" => {
            want(2)?;
            families::star_forest(int(0)?, int(1)?)?
        }
        "erdos-renyi" => {
            want(2)?;
            let p: f64 = a.params[1]
                .parse()
                .map_err(|_| Failure::Usage(format!("edge probability {:?} is not a number", a.params[1])))?;
            families::erdos_renyi(int(0)?, p, &mut derive_rng(cli.seed, "generate", 0))?
        }
        other => return Err(Failure::Usage(format!("unknown family {other:?}"))),
    };
    Ok(inst)
}

fn generate(cli: &Cli, a: &FamilyArgs, prov: &Provenance) -> Outcome {
    let inst = build_family(cli, a)?;
    let graph = prov.stamp(serde_json::to_value(inst.graph.to_json()).expect("graph serializes"));
    let sidecar = prov.stamp(serde_json::to_value(inst.sidecar()).expect("sidecar serializes"));
    match &cli.out {
        Some(p) => {
            write(p, &pretty(&graph))?;
            write(&sibling(p, ".sidecar.json"), &pretty(&sidecar))
        }
        None => emit(cli, &pretty(&json!({ "graph": graph, "sidecar": sidecar }))),
    }
}

fn rate(cli: &Cli, a: &RateArgs, prov: &Provenance) -> Outcome {
    let g = load_graph(&a.graph)?;
    let cfg = engine(cli)?;
    let mut vertices = if a.all { (0..g.n()).collect() } else { a.vertices.clone() };
    if vertices.is_empty() {
        return Err(Failure::Usage("give --vertex or --all".into()));
    }
    vertices.sort_unstable();
    vertices.dedup();
    let mut rows = Vec::new();
    for &v in &vertices {
        let estimate = rate_random(&g, v, &cfg, cli.trials, &mut derive_rng(cli.seed, "rate", v as u64))?;
        rows.push(RateRow { vertex: v.to_string(), estimate });
    }
    if a.all {
        let estimate = graph_rate(&g, &cfg, cli.trials, &mut derive_rng(cli.seed, "graph-rate", 0))?;
        rows.push(RateRow { vertex: "all".into(), estimate });
    }
    emit(cli, &report::rate_csv(&rows, cfg.q, prov))
}

fn boost(cli: &Cli, a: &BoostArgs, prov: &Provenance) -> Outcome {
    let g = load_graph(&a.graph)?;
    let cfg = engine(cli)?;
    let kind = match a.oracle {
        OracleArg::Exact => OracleKind::Exact,
        OracleArg::Mc => OracleKind::Mc,
        OracleArg::Heuristic => OracleKind::Heuristic,
        OracleArg::Labels => OracleKind::Labels,
    };
    let labels = match (&a.labels, kind) {
        (Some(p), _) => Some(
            serde_json::from_str::<Vec<Vertex>>(&read(p)?)
                .map_err(|e| Failure::Validation(format!("labels file: {e}")))?,
        ),
        (None, OracleKind::Labels) => return Err(Failure::Usage("the labels oracle needs --labels".into())),
        (None, _) => None,
    };
    let oracle = OracleConfig {
        kind,
        threshold: a.threshold,
        tau: a.tau,
        trials: cli.trials,
        labels,
    };
    let params = CoverageParams {
        abs_tol: a.abs_tol,
        fail_prob: a.fail_prob,
        ..CoverageParams::default()
    };
    let tolerance = a.tolerance.unwrap_or_else(|| (g.n() as f64).sqrt().ceil() as usize);
    let plan = greedy_boost(&g, &oracle, &cfg, a.k, tolerance, &params, &mut rng_from_seed(cli.seed))?;
    let doc = prov.stamp(serde_json::to_value(&plan).expect("plan serializes"));
    emit(cli, &pretty(&doc))?;
    if let Some(p) = &cli.out {
        let graph = prov.stamp(serde_json::to_value(plan.resulting_graph.to_json()).expect("graph serializes"));
        write(&sibling(p, ".graph.json"), &pretty(&graph))?;
    }
    Ok(())
}

fn robustness(cli: &Cli, a: &RobustnessArgs, prov: &Provenance) -> Outcome {
    let cfg = engine(cli)?;
    let mut rng = rng_from_seed(cli.seed);
    let row = if let Some(nk) = &a.celebrity {
        let (n, k) = (nk[0], nk[1]);
        let result = celebrity_worstcase_with(n, k, &cfg, cli.trials, &mut rng)?;
        RobustnessRow {
            family: "celebrity".into(),
            params: format!("k={k};n={n}"),
            vertex: "all".into(),
            result,
        }
    } else {
        let path = a.graph.as_ref().ok_or_else(|| Failure::Usage("give a graph file or --celebrity".into()))?;
        let g = load_graph(path)?;
        let mods_path = a.mods.as_ref().ok_or_else(|| Failure::Usage("--mods is required".into()))?;
        let mods: Vec<Modification> = serde_json::from_str(&read(mods_path)?)
            .map_err(|e| Failure::Validation(format!("modification file: {e}")))?;
        let v = a.vertex.ok_or_else(|| Failure::Usage("--vertex is required".into()))?;
        let result = degradation(&g, v, &cfg, &mods, cli.trials, &mut rng)?;
        RobustnessRow {
            family: "graph".into(),
            params: format!("mods={}", mods.len()),
            vertex: v.to_string(),
            result,
        }
    };
    emit(cli, &report::robustness_csv(&[row], prov))
}

fn sweep(cli: &Cli, a: &SweepArgs, prov: &Provenance) -> Outcome {
    let inst = build_family(cli, &a.family)?;
    let cfg = engine(cli)?;
    let mut vertices = a.vertices.clone();
    if let Some(r) = &a.role {
        vertices.extend(inst.with_role(r));
    }
    if vertices.is_empty() {
        return Err(Failure::Usage("give --vertex or a --role present in the family".into()));
    }
    vertices.sort_unstable();
    vertices.dedup();
    let mut rows = Vec::new();
    for &v in &vertices {
        if v >= inst.graph.n() {
            return Err(Failure::Validation(format!("vertex {v} not in {} ({})", inst.family, params_string(&inst))));
        }
        rows.extend(q_sweep(&inst, v, &a.grid, &cfg, cli.trials, &mut derive_rng(cli.seed, "sweep", v as u64))?);
    }
    emit(cli, &report::sweep_csv(&rows, cli.trials, prov))
}

fn run_suite(cli: &Cli, suite: Suite, a: &VerifyArgs, corpus: &mut Option<Corpus>) -> Result<SuiteReport, Failure> {
    let mut rng = derive_rng(cli.seed, "verify", suite as u64);
    let mut exhaustive = |f: fn(&Corpus) -> SuiteReport| -> Result<SuiteReport, Failure> {
        if corpus.is_none() {
            let n = a.max_n.unwrap_or(EXHAUSTIVE_CAP);
            *corpus = Some(Corpus::build(n, cli.q)?);
        }
        Ok(f(corpus.as_ref().unwrap()))
    };
    Ok(match suite {
        Suite::Monotonicity => exhaustive(verify::monotonicity)?,
        Suite::Improvement => exhaustive(verify::improvement)?,
        Suite::Bounds => exhaustive(verify::bounds)?,
        Suite::Submodularity => verify::submodularity(a.samples.unwrap_or(200), a.max_n.unwrap_or(6), &mut rng)?,
        Suite::Concentration => verify::concentration(a.samples.unwrap_or(10_000), &mut rng),
        Suite::Greedy => verify::greedy_approximation(
            a.samples.unwrap_or(30),
            a.max_n.unwrap_or(12),
            &CoverageParams::default(),
            &mut rng,
        )?,
    })
}

fn verify_cmd(cli: &Cli, a: &VerifyArgs, prov: &Provenance) -> Outcome {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse().map_err(|_| Failure::Usage(format!("unknown suite {:?}", a.suite)))?]
    };
    let mut corpus = None;
    let mut reports = Vec::new();
    for s in suites {
        reports.push(run_suite(cli, s, a, &mut corpus)?);
    }
    for r in &reports {
        println!(
            "{} {} checked={} violations={}",
            if r.passed() { "PASS" } else { "FAIL" },
            r.suite,
            r.checked,
            r.violations
        );
        for e in &r.examples {
            println!("  {e}");
        }
    }
    if let Some(p) = &cli.out {
        write(p, &pretty(&prov.stamp(json!({ "reports": reports }))))?;
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("violations in {}", failed.join(", "))))
    }
}

fn plot_cmd(cli: &Cli, a: &PlotArgs) -> Outcome {
    let table = plot::parse_csv(&read(&a.csv)?).map_err(Failure::Validation)?;
    let spec = plot::PlotSpec {
        x: a.x.clone(),
        y: a.y.clone(),
        series: (a.series != "none").then(|| a.series.clone()),
    };
    let svg = plot::render_svg(&table, &spec).map_err(Failure::Validation)?;
    let out = cli.out.clone().unwrap_or_else(|| a.csv.with_extension("svg"));
    write(&out, svg.as_bytes())
}
