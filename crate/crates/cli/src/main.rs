use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cuspidal::boundary::{boundary_product, RayApprox, RowCache, VisualMetricSpec};
use cuspidal::cusped::CuspedGraph;
use cuspidal::group::GroupModel;
use cuspidal::hyperbolicity::gromov_product;
use cuspidal::presentation::parse_presentation;
use cuspidal::pvmetric::PiecewiseMetric;
use cuspidal::splitting::{cut_point_sequence, CosetIndex};
use cuspidal::verify::{delta_estimate, run_suite, Suite, SuiteParams};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_FAIL: u8 = 1;
const EXIT_INFRA: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "cuspidal", version, about = "Truncated cusped spaces and their boundaries")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the cusped space of a presentation and write its cache.
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        cache: PathBuf,
        #[arg(long, default_value_t = 6)]
        radius: u32,
        #[arg(long, default_value_t = 5)]
        depth: u32,
        #[arg(long, default_value_t = 20_000_000)]
        budget: usize,
    },
    /// Answer one query against a cache, as JSON on stdout.
    Query {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(value_parser = ["dist", "geodesic", "gromov", "delta", "boundary-pair", "cutpoints", "dl"])]
        kind: String,
        /// Vertices, written as words (`a^2 b`) or `word:k` in a horoball.
        vertices: Vec<String>,
    },
    /// Run a verification suite. Exit 0 on pass, 1 on a failed assertion,
    /// 2 on an infrastructure failure.
    Verify {
        #[arg(long, value_parser = Suite::ALL.map(Suite::name))]
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long, default_value_t = 20)]
        net: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    cache: PathBuf,
}

#[derive(Args)]
struct Tuning {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 20_000_000)]
    budget: usize,
}

impl Tuning {
    fn params(&self, net: usize) -> Result<SuiteParams> {
        if self.samples == 0 || net == 0 || self.budget == 0 {
            bail!("--samples, --net and --budget must be positive");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            bail!("--epsilon must be positive");
        }
        Ok(SuiteParams {
            samples: self.samples,
            seed: self.seed,
            net,
            epsilon: self.epsilon,
            budget: self.budget,
            ..SuiteParams::default()
        })
    }
}

fn load_model(path: &Path) -> Result<GroupModel> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_presentation(&text)?)
}

fn load_space(config: &Path, cache: &Path) -> Result<(GroupModel, CuspedGraph)> {
    let model = load_model(config)?;
    let text = std::fs::read_to_string(cache).with_context(|| format!("reading {}", cache.display()))?;
    let space = CuspedGraph::from_cache(&text, &model)?;
    Ok((model, space))
}

fn print(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn build(config: &Path, cache: &Path, radius: u32, depth: u32, budget: usize) -> Result<()> {
    let model = load_model(config)?;
    let space = CuspedGraph::build_with_budget(&model, radius, depth, budget)?;
    if let Some(dir) = cache.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(cache, space.to_cache(&model))?;
    print(&json!({ "cache": cache, "summary": space.summary() }))
}

fn vertices<const N: usize>(space: &CuspedGraph, model: &GroupModel, args: &[String]) -> Result<[u32; N]> {
    if args.len() != N {
        bail!("expected {N} vertices, got {}", args.len());
    }
    let mut out = [0; N];
    for (o, a) in out.iter_mut().zip(args) {
        *o = space.parse_vertex(model, a)?;
    }
    Ok(out)
}

fn query(args: &SpaceArgs, tuning: &Tuning, kind: &str, words: &[String]) -> Result<()> {
    let (model, space) = load_space(&args.config, &args.cache)?;
    let params = tuning.params(1)?;
    let label = |v: u32| space.label(&model, v);
    let rays = || -> Result<(RayApprox, RayApprox, [u32; 2])> {
        let [x, y] = vertices(&space, &model, words)?;
        let from = space.bfs(space.basepoint());
        let rx = RayApprox::canonical_to(&space, space.basepoint(), x, &from)?;
        let ry = RayApprox::canonical_to(&space, space.basepoint(), y, &from)?;
        Ok((rx, ry, [x, y]))
    };
    let out = match kind {
        "dist" => {
            let [x, y] = vertices(&space, &model, words)?;
            json!({ "x": label(x), "y": label(y), "distance": space.distance(x, y)? })
        }
        "geodesic" => {
            let [x, y] = vertices(&space, &model, words)?;
            let g = space.geodesic(x, y)?;
            let path: Vec<String> = g.vertices.iter().map(|&v| label(v)).collect();
            json!({ "x": label(x), "y": label(y), "length": g.length, "path": path })
        }
        "gromov" => {
            let [x, y] = vertices(&space, &model, words)?;
            let p = gromov_product(&space, space.basepoint(), x, y);
            json!({ "x": label(x), "y": label(y), "product": p.to_f64() })
        }
        "delta" => {
            vertices::<0>(&space, &model, words)?;
            json!(delta_estimate(&space, &params))
        }
        "boundary-pair" => {
            let (rx, ry, [x, y]) = rays()?;
            let delta = delta_estimate(&space, &params).delta();
            let p = boundary_product(&space, &rx, &ry, delta, &mut RowCache::new())?;
            json!({ "x": label(x), "y": label(y), "delta": delta, "product": p })
        }
        "cutpoints" => {
            let (rx, ry, [x, y]) = rays()?;
            let index = CosetIndex::new(&space, &model)?;
            let seq = cut_point_sequence(&space, &model, &rx, &ry, &index)?;
            let points: Vec<Value> = seq
                .points
                .iter()
                .map(|c| json!({ "coset": model.format(&c.coset_key), "q": c.q.map(label), "depth": c.dist_to_base }))
                .collect();
            json!({ "x": label(x), "y": label(y), "kind": seq.kind, "points": points })
        }
        "dl" => {
            let (rx, ry, [x, y]) = rays()?;
            let delta = delta_estimate(&space, &params).delta();
            let pm = PiecewiseMetric::new(&space, &model, &[rx, ry], delta, VisualMetricSpec::new(params.epsilon))?;
            json!({
                "x": label(x),
                "y": label(y),
                "delta": delta,
                "same_limit_set": pm.same_limit_set(0, 1),
                "d_v": pm.d_v(0, 1),
                "d_l": pm.interval(0, 1, None),
            })
        }
        _ => unreachable!("clap restricts the kind"),
    };
    print(&out)
}

fn verify(
    suite: Suite,
    config: Option<&Path>,
    cache: Option<&Path>,
    params: &SuiteParams,
    out: Option<&Path>,
) -> Result<bool> {
    let loaded = if suite.standalone() {
        None
    } else {
        let (Some(config), Some(cache)) = (config, cache) else {
            bail!("suite {suite} needs --config and --cache");
        };
        Some(load_space(config, cache)?)
    };
    let outcome = run_suite(suite, loaded.as_ref().map(|(m, s)| (s, m)), params)?;
    let report = outcome.to_json(params);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{suite}.json")), serde_json::to_string_pretty(&report)? + "\n")?;
        for (name, csv) in &outcome.matrices {
            std::fs::write(dir.join(format!("{suite}.{name}")), csv)?;
        }
    }
    print(&report)?;
    Ok(outcome.passed)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Build {
            config,
            cache,
            radius,
            depth,
            budget,
        } => build(&config, &cache, radius, depth, budget).map(|_| 0),
        Cmd::Query {
            space,
            tuning,
            kind,
            vertices,
        } => query(&space, &tuning, &kind, &vertices).map(|_| 0),
        Cmd::Verify {
            suite,
            config,
            cache,
            tuning,
            net,
            out,
        } => {
            let suite: Suite = suite.parse()?;
            let params = tuning.params(net)?;
            let passed = verify(suite, config.as_deref(), cache.as_deref(), &params, out.as_deref())?;
            Ok(if passed { 0 } else { EXIT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INFRA)
        }
    }
}
