//! Command-line front end. Every artifact is a JSON envelope holding the tool
//! version, the resolved configuration and the result.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::estimator::{preset, preset_names, run_experiment, ExperimentConfig};
use crate::exponents::certify::summary;
use crate::exponents::{
    certify_with, chain3_constructed_region, hull_membership, necessary_halfspaces, region_compare, replay,
    sufficient_vertices, CaseKind, Certificate, CertifyOptions, Outer,
};
use crate::graph::{block_decomposition_of, contract_pendant_trees, is_tree, parse_graph};
use crate::rational::{fmt_q, parse_q, q, Q};
use crate::rigidity::{evaluate_at, regularity_probe, regularity_probe_with, Point, RankPolicy, Verdict};
use crate::{Graph, VERSION};

#[derive(Parser, Debug)]
#[command(name = "lpgraph", version = VERSION, about = "Exponent certificates, polytopes, rigidity probes and form estimates for circle-kernel forms on graphs")]
struct Cli {
    /// Cap on worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON artifact here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structural report: tree flag, 2-core, blocks and a rigidity probe per block.
    Analyze(AnalyzeArgs),
    /// Exponent certificate for a graph, or replay of a saved certificate.
    Certify(CertifyArgs),
    /// Necessary halfspaces, sufficient polygons and membership checks.
    Polytope(PolytopeArgs),
    /// Unit-distance realizations and rigidity ranks.
    Realize(RealizeArgs),
    /// Scaling and ratio experiments on planar grids.
    Estimate(EstimateArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 16)]
    probe_seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(required_unless_present = "verify")]
    graph: Option<PathBuf>,
    /// Replay a certificate file instead of certifying.
    #[arg(long, conflicts_with = "graph")]
    verify: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, default_value_t = 16)]
    probe_seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct PolytopeArgs {
    #[arg(long)]
    kind: CaseKind,
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Exponent point `u1 u2 u3` as exact rationals.
    #[arg(long, num_args = 3, value_names = ["U1", "U2", "U3"], allow_hyphen_values = true)]
    check: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct RealizeArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 16)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also solve from the collinear breadth-first layout.
    #[arg(long)]
    seed_near_collinear: bool,
    /// Evaluate at the given points instead of solving, e.g. "0,0 1,0 2,0 1,0".
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present_any = ["preset", "list_presets"])]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    list_presets: bool,
    /// Directory for the JSON and CSV artifacts.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Overrides the seed recorded in the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Compute(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Compute(m) => m,
        }
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: Value,
    result: T,
}

/// Runs the tool and returns the exit code: 0 on success, 1 on a usage
/// error, 2 when a computation fails.
pub fn execute<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return 1;
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Analyze(a) => analyze(a, cli.out.as_deref()),
        Command::Certify(a) => certify_cmd(a, cli.out.as_deref()),
        Command::Polytope(a) => polytope(a, cli.out.as_deref()),
        Command::Realize(a) => realize(a, cli.out.as_deref()),
        Command::Estimate(a) => estimate(a, cli.out.as_deref()),
    }
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read graph file {}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| Failure::Usage(format!("invalid graph file {}: {e}", path.display())))
}

fn emit<T: Serialize>(out: Option<&Path>, config: Value, result: T) -> Result<(), Failure> {
    let env = Envelope {
        tool: "lpgraph",
        version: VERSION,
        config,
        result,
    };
    let text = serde_json::to_string_pretty(&env).expect("artifacts serialize") + "\n";
    write_text(out, &text)
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn analyze(a: &AnalyzeArgs, out: Option<&Path>) -> Result<(), Failure> {
    let g = read_graph(&a.graph)?;
    let dec = contract_pendant_trees(&g);
    let mut probes = Vec::new();
    let blocks = if dec.is_tree {
        None
    } else {
        let b = block_decomposition_of(&dec.core);
        for block in &b.blocks {
            if block.edges.len() < 2 {
                continue;
            }
            let bg = block.to_graph().map_err(|e| Failure::Compute(e.to_string()))?;
            let r = regularity_probe(&bg, a.probe_seeds, a.seed, RankPolicy::default());
            probes.push(json!({
                "vertices": block.vertices,
                "verdict": r.verdict,
                "ranks": r.ranks,
                "expected_rank": r.expected_rank,
                "manifold_dim": r.manifold_dim,
                "found": r.found,
                "samples": r.samples,
            }));
        }
        Some(b)
    };
    let config = json!({
        "command": "analyze",
        "graph": a.graph.display().to_string(),
        "probe_seeds": a.probe_seeds,
        "seed": a.seed,
    });
    let result = json!({
        "graph": g,
        "is_tree": is_tree(&g),
        "two_core": dec.core,
        "pendant_trees": dec.pendant_forest,
        "blocks": blocks,
        "probes": probes,
        "probe_note": crate::rigidity::PROBE_NOTE,
    });
    emit(out, config, result)
}

fn certify_cmd(a: &CertifyArgs, out: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = &a.verify {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let cert = parse_certificate(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let verdict = replay(&cert);
        let config = json!({ "command": "certify", "verify": path.display().to_string() });
        let result = json!({
            "valid": verdict.is_ok(),
            "status": cert.status,
            "error": verdict.as_ref().err().map(|e| e.to_string()),
        });
        emit(out, config, result)?;
        return match verdict {
            Ok(()) => {
                eprintln!("replay: valid ({})", summary(&cert));
                Ok(())
            }
            Err(e) => Err(Failure::Compute(format!("replay failed: {e}"))),
        };
    }
    let path = a.graph.as_ref().expect("clap requires a graph");
    let g = read_graph(path)?;
    let opts = CertifyOptions {
        dimension: a.d,
        probe_seeds: a.probe_seeds,
        probe_seed: a.seed,
    };
    let cert = certify_with(&g, &opts).map_err(|e| Failure::Usage(format!("d = {}: {e}", a.d)))?;
    eprintln!("{}", summary(&cert));
    let config = json!({
        "command": "certify",
        "graph": path.display().to_string(),
        "d": a.d,
        "probe_seeds": a.probe_seeds,
        "seed": a.seed,
    });
    emit(out, config, &cert)
}

/// Accepts a bare certificate or a `certify` envelope.
fn parse_certificate(text: &str) -> Result<Certificate, String> {
    if let Ok(c) = Certificate::from_json(text) {
        return Ok(c);
    }
    let v: Value = serde_json::from_str(text).map_err(|e| format!("not JSON: {e}"))?;
    let inner = v.get("result").ok_or("neither a certificate nor a certify envelope")?;
    Certificate::from_json(&inner.to_string()).map_err(|e| e.to_string())
}

/// Endpoints that the chain remark names as missing from the polygon.
fn remark_endpoints() -> [Vec<Q>; 2] {
    [vec![q(1, 2), q(5, 6), q(1, 3)], vec![q(5, 6), q(1, 2), q(1, 3)]]
}

fn fmt_point(x: &[Q]) -> String {
    format!("({})", x.iter().map(fmt_q).collect::<Vec<_>>().join(", "))
}

fn polytope(a: &PolytopeArgs, out: Option<&Path>) -> Result<(), Failure> {
    let nec = necessary_halfspaces(a.kind, a.d).map_err(|e| Failure::Usage(e.to_string()))?;
    let usage = |e: crate::exponents::ExponentError| Failure::Usage(e.to_string());
    // the sufficient polygons are stated for the plane
    let suff = (a.d == 2).then(|| sufficient_vertices(a.kind));
    let constructed = match a.kind {
        CaseKind::Chain3 => Some(chain3_constructed_region(a.d).map_err(usage)?),
        CaseKind::Triangle => None,
    };
    let mut comparisons = Vec::new();
    if let Some(s) = &suff {
        comparisons.push(region_compare(s, Outer::Halfspaces(&nec)).map_err(usage)?);
    }
    let mut discrepancies = Vec::new();
    if let Some(c) = &constructed {
        comparisons.push(region_compare(c, Outer::Halfspaces(&nec)).map_err(usage)?);
        if let Some(s) = &suff {
            let cmp = region_compare(c, Outer::Polytope(s)).map_err(usage)?;
            for off in &cmp.offending {
                discrepancies.push(json!({
                    "point": off.vertex.iter().map(fmt_q).collect::<Vec<_>>(),
                    "message": discrepancy_message(&off.vertex),
                }));
            }
            comparisons.push(cmp);
        }
    }

    let check = match &a.check {
        None => None,
        Some(raw) => {
            let x: Vec<Q> = raw
                .iter()
                .map(|s| parse_q(s).map_err(|e| Failure::Usage(format!("--check value `{s}`: {e}"))))
                .collect::<Result<_, _>>()?;
            let membership = nec.membership(&x).map_err(usage)?;
            let in_suff = match &suff {
                Some(s) => Some(hull_membership(s, &x).map_err(usage)?.is_some()),
                None => None,
            };
            let in_constructed = match &constructed {
                Some(c) => Some(hull_membership(c, &x).map_err(usage)?.is_some()),
                None => None,
            };
            let flagged = in_constructed == Some(true) && in_suff == Some(false);
            eprintln!(
                "necessary: {}{}",
                if membership.satisfied { "satisfied" } else { "violated" },
                if membership.tight.is_empty() {
                    String::new()
                } else {
                    format!(" (tight on rows {:?})", membership.tight)
                }
            );
            if let Some(b) = in_suff {
                eprintln!("sufficient polygon: {}", if b { "inside" } else { "outside" });
            }
            if let Some(b) = in_constructed {
                eprintln!("constructed region: {}", if b { "inside" } else { "outside" });
            }
            if flagged {
                eprintln!("discrepancy: {}", discrepancy_message(&x));
            }
            Some(json!({
                "point": x.iter().map(fmt_q).collect::<Vec<_>>(),
                "necessary": membership,
                "sufficient_polygon_contains": in_suff,
                "constructed_region_contains": in_constructed,
                "discrepancy": flagged.then(|| discrepancy_message(&x)),
            }))
        }
    };

    let config = json!({
        "command": "polytope",
        "kind": a.kind.to_string(),
        "d": a.d,
        "check": a.check,
    });
    let result = json!({
        "necessary": nec,
        "sufficient": suff,
        "constructed": constructed,
        "comparisons": comparisons,
        "discrepancies": discrepancies,
        "check": check,
    });
    emit(out, config, result)
}

fn discrepancy_message(x: &[Q]) -> String {
    let [a, b] = remark_endpoints();
    let mid: Vec<Q> = a.iter().zip(&b).map(|(s, t)| (s + t) / Q::from_integer(2.into())).collect();
    let relation = if x == mid.as_slice() {
        "it is the midpoint of".to_string()
    } else {
        "compare".to_string()
    };
    format!(
        "{} lies in the region constructed from two bounded circular averages but outside the stated sufficient polygon; {relation} the endpoints {} and {} that the remark lists as missing",
        fmt_point(x),
        fmt_point(&a),
        fmt_point(&b)
    )
}

fn parse_points(s: &str) -> Result<Vec<Point>, Failure> {
    s.split(|c: char| c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (x, y) = t
                .split_once(',')
                .ok_or_else(|| Failure::Usage(format!("point `{t}` is not of the form x,y")))?;
            let p = |v: &str| v.trim().parse::<f64>().map_err(|e| Failure::Usage(format!("coordinate `{v}`: {e}")));
            Ok([p(x)?, p(y)?])
        })
        .collect()
}

fn realize(a: &RealizeArgs, out: Option<&Path>) -> Result<(), Failure> {
    let g = read_graph(&a.graph)?;
    let policy = RankPolicy::default();
    let report = match &a.at {
        Some(s) => {
            let pts = parse_points(s)?;
            if pts.len() != g.n() {
                return Err(Failure::Usage(format!("--at gives {} points for {} vertices", pts.len(), g.n())));
            }
            evaluate_at(&g, &pts, policy).map_err(|e| Failure::Compute(format!("--at {s}: {e}")))?
        }
        None => regularity_probe_with(&g, a.seeds, a.seed, policy, a.seed_near_collinear),
    };
    let config = json!({
        "command": "realize",
        "graph": a.graph.display().to_string(),
        "seeds": a.seeds,
        "seed": a.seed,
        "seed_near_collinear": a.seed_near_collinear,
        "at": a.at,
    });
    eprintln!("verdict {} ranks {:?}", report.verdict, report.ranks);
    emit(out, config, &report)?;
    if report.verdict == Verdict::NoRealizationFound {
        return Err(Failure::Compute(format!("no realization found for {}", a.graph.display())));
    }
    Ok(())
}

fn estimate(a: &EstimateArgs, out: Option<&Path>) -> Result<(), Failure> {
    if a.list_presets {
        return write_text(out, &(preset_names().join("\n") + "\n"));
    }
    let mut config: ExperimentConfig = match (&a.preset, &a.config) {
        (Some(name), _) => preset(name).ok_or_else(|| {
            Failure::Usage(format!("unknown preset `{name}`; known: {}", preset_names().join(", ")))
        })?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))?
        }
        (None, None) => return Err(Failure::Usage("either --preset or --config is required".into())),
    };
    if let Some(s) = a.seed {
        config.seed = s;
    }
    let output = run_experiment(&config).map_err(|e| match e {
        crate::estimator::EstimatorError::Config(_) | crate::estimator::EstimatorError::InvalidParameter(_) => {
            Failure::Usage(e.to_string())
        }
        _ => Failure::Compute(e.to_string()),
    })?;
    if let Some(s) = &output.scaling {
        eprintln!("{}: slope {:.6} (residual {:.3e})", config.name, s.fit.slope, s.fit.residual);
    }
    if let Some(ts) = &output.ratio {
        for t in ts {
            eprintln!(
                "{}: (p, q) = ({}, {}) max/min {:.6} grows {}",
                config.name, t.p, t.q, t.max_over_min, t.grows_as_param_shrinks
            );
        }
    }
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
        let json_path = dir.join(format!("{}.json", config.name));
        write_text(Some(&json_path), &(output.to_json() + "\n"))?;
        for (suffix, text) in output.csv_files() {
            write_text(Some(&dir.join(format!("{}{suffix}.csv", config.name))), &text)?;
        }
        return Ok(());
    }
    write_text(out, &(output.to_json() + "\n"))
}
