use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mlsub::datagen::{
    builtin_pattern, embed_pattern, generate_base, parse_split, split_layers, Alphabet,
    EmbedOptions, Manifest, BUILTIN_PATTERNS,
};
use mlsub::{
    compare_rankings, discover, parse_edge_list, run_ground_truth, DiscoveryConfig,
    DiscoveryResult, ExactScore, HoMln, Layer, Metric, RangePartitioning, ResultDocument, Scalar,
    Score, Strategy,
};

const EXIT_DIFFERENT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LOAD: u8 = 3;
const EXIT_CONTRACT: u8 = 4;

#[derive(Parser)]
#[command(name = "mlsub", version, about = "Substructure discovery in multilayer networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discover the best substructures of a multilayer network.
    Discover {
        #[command(flatten)]
        run: RunArgs,
        /// Output directory for ranked.txt, result.json and timing.csv.
        #[arg(long, default_value = "mlsub-out")]
        out: PathBuf,
    },
    /// Run discovery on the OR-conflated layers and compare with a previous result.
    GroundTruth {
        #[command(flatten)]
        run: RunArgs,
        /// Directory written by `mlsub discover`.
        #[arg(long)]
        compare: PathBuf,
        /// Also write the ground-truth result files here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic layered dataset with embedded patterns.
    Generate(GenerateArgs),
    /// Time discovery over several worker and partition counts.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Edge-list file of one layer; repeat once per layer.
    #[arg(long = "layer", required = true)]
    layers: Vec<PathBuf>,
    #[arg(long, default_value_t = 4)]
    beam: usize,
    #[arg(long, default_value_t = 5)]
    max_size: usize,
    #[arg(long, default_value_t = 1)]
    partitions: usize,
    #[arg(long, env = "MLSUB_WORKERS", default_value_t = 1)]
    workers: usize,
    /// mdl or freq.
    #[arg(long, default_value = "mdl")]
    metric: Metric,
    /// equal-load or equal-width.
    #[arg(long, default_value = "equal-load")]
    strategy: Strategy,
    /// Explicit vertex ranges such as `1-3,4-5`; overrides --partitions.
    #[arg(long)]
    ranges: Option<RangePartitioning>,
    /// Score with exact rationals instead of f64.
    #[arg(long)]
    exact: bool,
}

impl RunArgs {
    fn config(&self) -> DiscoveryConfig {
        DiscoveryConfig {
            beam: self.beam,
            max_size: self.max_size,
            partitions: self.partitions,
            workers: self.workers,
            metric: self.metric,
            strategy: self.strategy,
            ranges: self.ranges.clone(),
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    vertices: usize,
    #[arg(long)]
    edges: usize,
    #[arg(long, default_value_t = 5)]
    vertex_labels: usize,
    #[arg(long, default_value_t = 5)]
    edge_labels: usize,
    /// Pattern edge-list file or builtin name (star3, star5, path3, path5); repeatable.
    #[arg(long = "pattern")]
    patterns: Vec<String>,
    /// Copies embedded per pattern.
    #[arg(long, default_value_t = 5)]
    copies: usize,
    /// Layer split such as 50/50, 70/30, 90/10 or 20/30/50.
    #[arg(long, default_value = "50/50")]
    split: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave embedded copies disconnected from the base graph.
    #[arg(long)]
    no_bridge: bool,
    #[arg(long, default_value = "mlsub-data")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Worker counts to time.
    #[arg(long = "worker-counts", value_delimiter = ',', default_value = "1,2,4")]
    worker_counts: Vec<usize>,
    /// Partition counts to time.
    #[arg(long = "partition-counts", value_delimiter = ',', default_value = "1")]
    partition_counts: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    repeat: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<mlsub::Error> for Failure {
    fn from(e: mlsub::Error) -> Self {
        use mlsub::Error::*;
        let code = match e {
            Parse { .. } | Validation(_) | UnknownLayer(_) | Io(_) | Json(_) => EXIT_LOAD,
            Config(_) => EXIT_USAGE,
            Routing(_) | Contract(_) => EXIT_CONTRACT,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_LOAD, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_LOAD, format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Outcome {
    fs::create_dir_all(path).map_err(|e| Failure::new(EXIT_LOAD, format!("{}: {e}", path.display())))
}

fn load_mln(paths: &[PathBuf]) -> Outcome<HoMln> {
    let layers = paths
        .iter()
        .map(|p| {
            parse_edge_list(&read(p)?)
                .map_err(|e| Failure::new(EXIT_LOAD, format!("{}: {e}", p.display())))
        })
        .collect::<Outcome<Vec<Layer>>>()?;
    Ok(HoMln::new(layers)?)
}

struct Rendered {
    json: String,
    ranked: String,
    timing: String,
    document: ResultDocument,
}

fn render<T: Scalar>(r: &DiscoveryResult<T>) -> Rendered {
    Rendered { json: r.to_json(), ranked: r.ranked_text(), timing: r.timing_csv(), document: r.document() }
}

fn run_discovery(mln: &HoMln, run: &RunArgs, ground_truth: bool) -> Outcome<Rendered> {
    let cfg = run.config();
    let all: Vec<usize> = (0..mln.num_layers()).collect();
    Ok(match (run.exact, ground_truth) {
        (false, false) => render(&discover::<Score>(mln, &cfg)?),
        (true, false) => render(&discover::<ExactScore>(mln, &cfg)?),
        (false, true) => render(&run_ground_truth::<Score>(mln, &all, &cfg)?),
        (true, true) => render(&run_ground_truth::<ExactScore>(mln, &all, &cfg)?),
    })
}

fn write_outputs(dir: &Path, out: &Rendered) -> Outcome {
    create_dir(dir)?;
    write(&dir.join("ranked.txt"), &out.ranked)?;
    write(&dir.join("result.json"), &out.json)?;
    write(&dir.join("timing.csv"), &out.timing)
}

fn cmd_discover(run: &RunArgs, out: &Path) -> Outcome<u8> {
    let mln = load_mln(&run.layers)?;
    let rendered = run_discovery(&mln, run, false)?;
    write_outputs(out, &rendered)?;
    print!("{}", rendered.ranked);
    Ok(0)
}

fn cmd_ground_truth(run: &RunArgs, compare: &Path, out: Option<&Path>) -> Outcome<u8> {
    let mln = load_mln(&run.layers)?;
    let previous = ResultDocument::from_json(&read(&compare.join("result.json"))?)
        .map_err(|e| Failure::new(EXIT_LOAD, format!("{}: {e}", compare.display())))?;
    let gt = run_discovery(&mln, run, true)?;
    if let Some(dir) = out {
        write_outputs(dir, &gt)?;
    }
    let divergences = compare_rankings(&gt.document, &previous);
    if divergences.is_empty() {
        println!("EQUAL ({} classes)", gt.document.ranked.len());
        Ok(0)
    } else {
        println!("DIVERGENT ({} differences)", divergences.len());
        for d in &divergences {
            println!("  {d}");
        }
        Ok(EXIT_DIFFERENT)
    }
}

fn load_pattern(spec: &str) -> Outcome<Layer> {
    let path = Path::new(spec);
    if path.exists() {
        return parse_edge_list(&read(path)?)
            .map_err(|e| Failure::new(EXIT_LOAD, format!("{spec}: {e}")));
    }
    builtin_pattern(spec).ok_or_else(|| {
        Failure::new(
            EXIT_USAGE,
            format!("pattern {spec:?} is neither a file nor one of {}", BUILTIN_PATTERNS.join(", ")),
        )
    })
}

fn cmd_generate(args: &GenerateArgs) -> Outcome<u8> {
    let fractions = parse_split(&args.split)?;
    let patterns = args.patterns.iter().map(|p| load_pattern(p)).collect::<Outcome<Vec<_>>>()?;
    let alphabet = Alphabet { vertex_labels: args.vertex_labels, edge_labels: args.edge_labels };
    let mut graph = generate_base(args.vertices, args.edges, alphabet, args.seed)?;
    let mut manifest = Manifest { seed: args.seed, patterns: Vec::new() };
    let opts = EmbedOptions { bridge: !args.no_bridge };
    for (i, pattern) in patterns.iter().enumerate() {
        if args.copies == 0 {
            break;
        }
        let seed = args.seed.wrapping_add(1 + i as u64);
        let (next, embedded) = embed_pattern(&graph, pattern, args.copies, seed, opts)?;
        graph = next;
        manifest.patterns.push(embedded);
    }
    let mln = split_layers(&graph, &fractions, args.seed.wrapping_add(0x5eed))?;
    create_dir(&args.out)?;
    for layer in mln.layers() {
        let name = format!("layer{}.txt", layer.id());
        write(&args.out.join(&name), &layer.to_edge_list())?;
        println!("{name}\t{}", layer.len());
    }
    write(&args.out.join("manifest.json"), &manifest.to_json())?;
    Ok(0)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn cmd_bench(args: &BenchArgs) -> Outcome<u8> {
    if args.repeat == 0 || args.worker_counts.is_empty() || args.partition_counts.is_empty() {
        return Err(Failure::new(EXIT_USAGE, "bench needs at least one repeat, worker count and partition count"));
    }
    let mln = load_mln(&args.run.layers)?;
    let mut csv = String::from("workers,partitions,iteration,size,stage,median_seconds\n");
    for &partitions in &args.partition_counts {
        for &workers in &args.worker_counts {
            let cfg = DiscoveryConfig { workers, partitions, ..args.run.config() };
            let mut stages: BTreeMap<(usize, usize, String), Vec<f64>> = BTreeMap::new();
            let mut totals = Vec::with_capacity(args.repeat);
            for _ in 0..args.repeat {
                let start = Instant::now();
                let r = discover::<Score>(&mln, &cfg)?;
                totals.push(start.elapsed().as_secs_f64());
                for it in &r.iterations {
                    let mut push = |stage: String, secs: f64| {
                        stages.entry((it.iteration, it.size, stage)).or_default().push(secs)
                    };
                    for (l, s) in it.job1_seconds.iter().enumerate() {
                        push(format!("job1:layer{l}"), *s);
                    }
                    push("job2:compose".into(), it.job2_seconds);
                    push("job3:count+beam".into(), it.job3_seconds);
                }
            }
            for ((iteration, size, stage), secs) in stages {
                csv.push_str(&format!("{workers},{partitions},{iteration},{size},{stage},{:.6}\n", median(secs)));
            }
            csv.push_str(&format!("{workers},{partitions},all,all,total,{:.6}\n", median(totals)));
        }
    }
    match &args.out {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Discover { run, out } => cmd_discover(run, out),
        Command::GroundTruth { run, compare, out } => cmd_ground_truth(run, compare, out.as_deref()),
        Command::Generate(args) => cmd_generate(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
