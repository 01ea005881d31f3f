use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use rpdp::analytics::{kmeans, scores_from_private_basis, PccMode, PccScores};
use rpdp::format::{self, FileKind};
use rpdp::publisher::{publish_with_diagnostics, sigma_requirement};
use rpdp::spectral::{topk_eigen_symmetric, topk_left_singular, LanczosOptions};
use rpdp::{
    degree_distribution, gen_preferential_attachment, gen_sbm, nmi, parse_edge_list, pcc_scores, private_pcc_scores,
    run_experiment, top_t, Basis, Clustering, ExperimentPlan, KMeansOptions, PrivacyParams, ProjectionConfig,
    Published, SparseGraph,
};
use serde::Serialize;

use crate::manifest::{captured_env, hash_file, manifest_path, now_unix, FileRecord, HashingWriter, Manifest};
use crate::{
    ClusterArgs, Command, DegreeArgs, EigenArgs, EvaluateArgs, GenKind, ModeArg, PccArgs, PublishArgs, ReplayArgs,
};

#[derive(Debug)]
pub enum CliError {
    Core(rpdp::Error),
    Io(io::Error),
    Usage(String),
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(rpdp::Error::Usage(_)) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Mismatch(m) => write!(f, "{m}"),
        }
    }
}

impl From<rpdp::Error> for CliError {
    fn from(e: rpdp::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

/// `VmHWM` of this process, from `/proc/self/status`.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// Bookkeeping for one command invocation: inputs, outputs and the manifest.
struct Run {
    command: &'static str,
    args: Vec<String>,
    started: f64,
    seeds: BTreeMap<String, u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<FileRecord>,
}

impl Run {
    fn new(command: &'static str, args: Vec<String>) -> Self {
        Self {
            command,
            args,
            started: now_unix(),
            seeds: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn seed(&mut self, name: &str, v: u64) {
        self.seeds.insert(name.to_string(), v);
    }

    /// Writes `path` through `body`, then checks the bytes on disk hash to
    /// what was written.
    fn write(&mut self, path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let file = File::create(path)?;
        let mut w = HashingWriter::new(BufWriter::new(file));
        body(&mut w)?;
        let digest = w.finish()?;
        let record = FileRecord::of(path)?;
        if record.sha256 != digest {
            return Err(CliError::Mismatch(format!("{} changed while being written", path.display())));
        }
        self.outputs.push(record);
        Ok(())
    }

    fn finish(self, primary: &Path, params: &impl Serialize) -> Result<()> {
        let inputs = self
            .inputs
            .iter()
            .map(|p| FileRecord::of(p))
            .collect::<io::Result<Vec<_>>>()?;
        let manifest = Manifest {
            command: self.command.to_string(),
            args: self.args,
            env: captured_env(),
            cwd: std::env::current_dir()?.display().to_string(),
            params: serde_json::to_value(params).map_err(io::Error::other)?,
            seeds: self.seeds,
            inputs,
            outputs: self.outputs,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: self.started,
            finished_unix: now_unix(),
        };
        manifest.write(&manifest_path(primary))?;
        Ok(())
    }
}

enum Input {
    Graph(SparseGraph),
    Published(Published),
    Basis(Basis),
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load(path: &Path, directed: bool) -> Result<Input> {
    let mut head = Vec::with_capacity(16);
    open(path)?.take(16).read_to_end(&mut head)?;
    Ok(match format::sniff(&head)? {
        FileKind::EdgeList => Input::Graph(parse_edge_list(open(path)?, directed)?),
        FileKind::Published => Input::Published(format::read_published(open(path)?)?),
        FileKind::Basis => Input::Basis(format::read_basis(open(path)?)?),
    })
}

fn load_graph(path: &Path, directed: bool) -> Result<SparseGraph> {
    match load(path, directed)? {
        Input::Graph(g) => Ok(g),
        _ => usage(format!("{} is not an edge list", path.display())),
    }
}

fn read_labels(path: &Path, ids: &[u64]) -> Result<Clustering> {
    Ok(format::read_clustering_csv(open(path)?, ids)?)
}

pub fn run(command: Command, args: Vec<String>) -> Result<()> {
    match command {
        Command::Gen(kind) => gen(kind, args),
        Command::Publish(a) => publish(a, args),
        Command::Eigen(a) => eigen(a, args),
        Command::Cluster(a) => cluster(a, args),
        Command::Pcc(a) => pcc(a, args),
        Command::Evaluate(a) => evaluate(a, args),
        Command::DegreeDist(a) => degree(a, args),
        Command::Replay(a) => replay(a),
    }
}

fn write_graph(run: &mut Run, g: &SparseGraph, out: &Path) -> Result<()> {
    run.write(out, |w| Ok(g.write_edge_list(w)?))?;
    let back = parse_edge_list(open(out)?, false)?;
    if &back != g {
        return Err(CliError::Mismatch(format!("{} does not read back as the same graph", out.display())));
    }
    Ok(())
}

fn gen(kind: GenKind, args: Vec<String>) -> Result<()> {
    let mut run = Run::new("gen", args);
    let out = match &kind {
        GenKind::Sbm(a) => {
            run.seed("graph", a.seed);
            let (g, planted) = gen_sbm(&a.blocks, a.p_in, a.p_out, a.seed)?;
            write_graph(&mut run, &g, &a.out)?;
            let labels = a.labels.clone().unwrap_or_else(|| {
                let mut s = a.out.as_os_str().to_owned();
                s.push(".labels.csv");
                PathBuf::from(s)
            });
            run.write(&labels, |w| Ok(format::write_clustering_csv(w, &planted, g.node_ids())?))?;
            if read_labels(&labels, g.node_ids())? != planted {
                return Err(CliError::Mismatch("planted labels do not read back".into()));
            }
            println!("nodes={}\nedges={}", g.n(), g.edge_count());
            a.out.clone()
        }
        GenKind::Ba(a) => {
            run.seed("graph", a.seed);
            let g = gen_preferential_attachment(a.n, a.links, a.seed)?;
            write_graph(&mut run, &g, &a.out)?;
            println!("nodes={}\nedges={}", g.n(), g.edge_count());
            a.out.clone()
        }
        GenKind::Er(a) => {
            run.seed("graph", a.seed);
            let g = rpdp::graph::gen_erdos_renyi(a.n, a.p, a.seed)?;
            write_graph(&mut run, &g, &a.out)?;
            println!("nodes={}\nedges={}", g.n(), g.edge_count());
            a.out.clone()
        }
    };
    run.finish(&out, &kind)
}

fn publish(a: PublishArgs, args: Vec<String>) -> Result<()> {
    let mut run = Run::new("publish", args);
    run.inputs.push(a.graph.clone());
    let g = load_graph(&a.graph, a.directed)?;
    let n = g.n();
    let privacy = match (a.sigma, a.epsilon, a.delta) {
        (Some(s), None, None) => PrivacyParams::uncalibrated(s)?,
        (None, Some(e), Some(d)) => PrivacyParams::calibrated(e, d, n)?,
        _ => return usage("give either --sigma or both --epsilon and --delta"),
    };
    let cfg = ProjectionConfig {
        m: a.m,
        seed: a.seed,
        noise_seed: a.noise_seed.unwrap_or(a.seed.wrapping_add(1)),
    };
    run.seed("projection", cfg.seed);
    run.seed("noise", cfg.noise_seed);

    let started = Instant::now();
    let publication = publish_with_diagnostics::<f64>(&g, &cfg, &privacy)?;
    let secs = started.elapsed().as_secs_f64();
    let check = publication.row_norms;
    println!("n={n}");
    println!("m={}", cfg.m);
    println!("sigma={}", privacy.sigma);
    println!("status={}", if privacy.calibrated { "calibrated" } else { "uncalibrated" });
    if let (Some(e), Some(d)) = (privacy.epsilon, privacy.delta) {
        println!("epsilon={e}");
        println!("delta={d}");
        let need = sigma_requirement(check.w2_squared.sqrt(), e, d);
        println!("sigma_required_by_projection={need}");
        println!("noise_covers_projection={}", privacy.sigma >= need);
    }
    println!("w2_squared={}", check.w2_squared);
    println!("row_norm_bound={}", check.bound);
    println!("row_norm_ok={}", check.ok);
    eprintln!("secs_publish={secs}");
    eprintln!("graph_bytes={}", g.memory_bytes());
    eprintln!("matrix_bytes={}", publication.matrix.memory_bytes());
    eprintln!("mem_estimate_bytes={}", g.memory_bytes() + publication.matrix.memory_bytes());

    let matrix = publication.matrix;
    let meta = matrix.meta().clone();
    run.write(&a.out, |w| Ok(format::write_published(w, &matrix)?))?;
    if let Some(csv) = &a.csv {
        run.write(csv, |w| Ok(format::write_published_csv(w, &matrix)?))?;
    }
    drop(matrix);
    let back: Published = format::read_published(open(&a.out)?)?;
    if back.meta() != &meta {
        return Err(CliError::Mismatch("published header does not read back".into()));
    }
    drop(back);
    run.finish(&a.out, &a)
}

fn eigen_of(input: Input, k: usize, tol: Option<f64>, max_iter: Option<usize>, seed: u64) -> Result<(Basis, Option<SparseGraph>)> {
    Ok(match input {
        Input::Graph(g) => {
            let opts = LanczosOptions::new(k, seed);
            let b = topk_eigen_symmetric(&g, k, tol.unwrap_or(opts.tol), max_iter.unwrap_or(opts.max_iter), seed)?;
            (b, Some(g))
        }
        Input::Published(p) => {
            if k > p.m() {
                return usage(format!("k={k} exceeds the {} published columns", p.m()));
            }
            (topk_left_singular(&p, k, tol.unwrap_or(1e-8))?, None)
        }
        Input::Basis(b) => (b, None),
    })
}

fn eigen(a: EigenArgs, args: Vec<String>) -> Result<()> {
    let mut run = Run::new("eigen", args);
    run.inputs.push(a.input.clone());
    run.seed("start_vector", a.seed);
    let input = load(&a.input, a.directed)?;
    if let Input::Basis(_) = input {
        return usage("eigen needs an edge list or a published matrix");
    }
    let started = Instant::now();
    let (basis, _) = eigen_of(input, a.k, a.tol, a.max_iter, a.seed)?;
    eprintln!("secs_eigen={}", started.elapsed().as_secs_f64());
    println!("source={}", basis.source().as_str());
    for (i, v) in basis.values().iter().enumerate() {
        println!("value_{}={v}", i + 1);
    }
    println!("orthonormality_error={:e}", basis.orthonormality_error());
    run.write(&a.out, |w| Ok(format::write_basis(w, &basis)?))?;
    if let Some(csv) = &a.csv {
        run.write(csv, |w| Ok(format::write_basis_csv(w, &basis)?))?;
    }
    let back: Basis = format::read_basis(open(&a.out)?)?;
    if back != basis {
        return Err(CliError::Mismatch("basis does not read back".into()));
    }
    run.finish(&a.out, &a)
}

/// Node ids for an output: from the input graph, a `--graph` file, or 0..n.
fn node_ids(run: &mut Run, own: Option<&SparseGraph>, graph: Option<&PathBuf>, n: usize, directed: bool) -> Result<Vec<u64>> {
    let ids: Vec<u64> = match (own, graph) {
        (Some(g), _) => g.node_ids().to_vec(),
        (None, Some(p)) => {
            run.inputs.push(p.clone());
            load_graph(p, directed)?.node_ids().to_vec()
        }
        (None, None) => (0..n as u64).collect(),
    };
    if ids.len() != n {
        return usage(format!("graph has {} nodes, basis has {n} rows", ids.len()));
    }
    Ok(ids)
}

fn cluster(a: ClusterArgs, args: Vec<String>) -> Result<()> {
    let mut run = Run::new("cluster", args);
    run.inputs.push(a.input.clone());
    run.seed("kmeans", a.seed);
    let input = load(&a.input, a.directed)?;
    let started = Instant::now();
    let (basis, own) = eigen_of(input, a.k, None, None, a.seed)?;
    eprintln!("secs_eigen={}", started.elapsed().as_secs_f64());
    if a.k > basis.k() {
        return usage(format!("k={} exceeds the {} basis columns", a.k, basis.k()));
    }
    let ids = node_ids(&mut run, own.as_ref(), a.graph.as_ref(), basis.n(), a.directed)?;
    let started = Instant::now();
    let opts = KMeansOptions {
        seed: a.seed,
        max_iter: a.max_iter,
        restarts: a.restarts,
    };
    let result = kmeans(&basis.vectors().leading_columns(a.k), a.k, &opts)?;
    eprintln!("secs_cluster={}", started.elapsed().as_secs_f64());
    let c = &result.clustering;
    println!("wcss={:e}", result.wcss);
    println!("empty_clusters={}", c.empty_clusters().len());
    if let Some(p) = &a.planted {
        run.inputs.push(p.clone());
        let planted = read_labels(p, &ids)?;
        println!("nmi_planted={}", nmi(c, &planted)?);
    }
    run.write(&a.out, |w| Ok(format::write_clustering_csv(w, c, &ids)?))?;
    if read_labels(&a.out, &ids)?.labels() != c.labels() {
        return Err(CliError::Mismatch("clustering does not read back".into()));
    }
    run.finish(&a.out, &a)
}

fn pcc(a: PccArgs, args: Vec<String>) -> Result<()> {
    let mut run = Run::new("pcc", args);
    run.inputs.push(a.input.clone());
    run.seed("start_vector", a.seed);
    let normalize = !a.no_normalize;
    let input = load(&a.input, a.directed)?;
    let graph = match (&input, &a.graph) {
        (Input::Graph(_), _) | (_, None) => None,
        (_, Some(p)) => {
            run.inputs.push(p.clone());
            Some(load_graph(p, a.directed)?)
        }
    };
    let started = Instant::now();
    let (scores, ids): (PccScores, Vec<u64>) = match input {
        Input::Graph(g) => {
            let opts = LanczosOptions::new(a.k, a.seed);
            let b = topk_eigen_symmetric::<f64>(&g, a.k, opts.tol, opts.max_iter, a.seed)?;
            (pcc_scores(&g, &b, normalize)?, g.node_ids().to_vec())
        }
        Input::Published(p) => {
            let mode = match a.mode {
                ModeArg::SelfContained => PccMode::SelfContained,
                ModeArg::Evaluation => PccMode::Evaluation(graph.as_ref()),
            };
            let s = private_pcc_scores(&p, a.k, mode, normalize, 1e-8)?;
            let ids = graph.as_ref().map_or_else(|| (0..p.n() as u64).collect(), |g| g.node_ids().to_vec());
            (s, ids)
        }
        Input::Basis(b) => {
            let b = b.truncate(a.k)?;
            let mode = match a.mode {
                ModeArg::SelfContained => PccMode::SelfContained,
                ModeArg::Evaluation => PccMode::Evaluation(graph.as_ref()),
            };
            let s = scores_from_private_basis(&b, mode, normalize)?;
            let ids = graph.as_ref().map_or_else(|| (0..b.n() as u64).collect(), |g| g.node_ids().to_vec());
            (s, ids)
        }
    };
    eprintln!("secs_pcc={}", started.elapsed().as_secs_f64());
    if ids.len() != scores.len() {
        return usage(format!("graph has {} nodes, scores cover {}", ids.len(), scores.len()));
    }
    let order = match a.t {
        Some(t) => top_t(&scores, t)?,
        None => (0..scores.len()).collect(),
    };
    println!("rows={}", order.len());
    println!("normalized={normalize}");
    run.write(&a.out, |w| Ok(format::write_pcc_csv(w, &scores, &ids, &order, a.rank)?))?;
    run.finish(&a.out, &a)
}

fn evaluate(a: EvaluateArgs, args: Vec<String>) -> Result<()> {
    let mut run = Run::new("evaluate", args);
    run.inputs.push(a.graph.clone());
    let g = load_graph(&a.graph, a.directed)?;
    let planted = match &a.planted {
        Some(p) => {
            run.inputs.push(p.clone());
            Some(read_labels(p, g.node_ids())?)
        }
        None => None,
    };
    let mut plan = ExperimentPlan::new(a.dataset.clone());
    plan.ms = a.ms.clone();
    plan.sigmas = a.sigmas.clone();
    plan.ks = a.ks.clone();
    plan.ts = a.ts.clone();
    plan.lnpp_scales = a.lnpp.clone();
    plan.seeds = a.seeds.clone();
    plan.base_seed = a.base_seed;
    plan.repeats = a.repeats;
    plan.normalize_pcc = !a.no_normalize;
    plan.pcc = match a.pcc_mode {
        ModeArg::Evaluation => rpdp::experiment::PccPolicy::Evaluation,
        ModeArg::SelfContained => rpdp::experiment::PccPolicy::SelfContained,
    };
    run.seed("base", a.base_seed);
    for s in &a.seeds {
        run.seed(&format!("trial_{s}"), *s);
    }
    let started = Instant::now();
    let reports = run_experiment(&g, &plan, planted.as_ref())?;
    eprintln!("secs_evaluate={}", started.elapsed().as_secs_f64());
    let failed = reports.iter().filter(|r| r.error.is_some()).count();
    println!("reports={}", reports.len());
    println!("failed_cells={failed}");
    for r in reports.iter().filter(|r| r.error.is_some()) {
        eprintln!("cell_error k={} m={:?} seed={}: {}", r.k, r.m, r.seed, r.error.as_deref().unwrap_or(""));
    }
    run.write(&a.out, |w| Ok(rpdp::experiment::write_reports_csv(w, &reports, a.record_timings)?))?;
    if let Some(j) = &a.jsonl {
        run.write(j, |w| Ok(rpdp::experiment::write_reports_jsonl(w, &reports, a.record_timings)?))?;
    }
    run.finish(&a.out, &a)
}

fn degree(a: DegreeArgs, args: Vec<String>) -> Result<()> {
    let mut run = Run::new("degree-dist", args);
    run.inputs.push(a.graph.clone());
    let g = load_graph(&a.graph, a.directed)?;
    let h = degree_distribution(&g);
    println!("nodes={}", h.total_nodes());
    println!("distinct_degrees={}", h.pairs.len());
    run.write(&a.out, |w| Ok(h.write_csv(w)?))?;
    run.finish(&a.out, &a)
}

fn replay(a: ReplayArgs) -> Result<()> {
    let manifest = Manifest::read(&a.manifest)?;
    if manifest.command == "replay" {
        return usage("a replay manifest cannot be replayed");
    }
    for k in crate::manifest::ENV_VARS {
        match manifest.env.get(*k) {
            Some(v) => std::env::set_var(k, v),
            None => std::env::remove_var(k),
        }
    }
    std::env::set_current_dir(&manifest.cwd)?;
    for input in &manifest.inputs {
        let (sha, _) = hash_file(Path::new(&input.path))?;
        if sha != input.sha256 {
            return Err(CliError::Mismatch(format!("input {} changed since the recorded run", input.path)));
        }
    }
    let argv = std::iter::once("rpdp".to_string()).chain(manifest.args.iter().cloned());
    let cli = crate::Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli.command, manifest.args.clone())?;
    let mut identical = true;
    for out in &manifest.outputs {
        let (sha, _) = hash_file(Path::new(&out.path))?;
        let same = sha == out.sha256;
        println!("output {} identical={same}", out.path);
        identical &= same;
    }
    println!("replay_outputs_identical={identical}");
    if identical {
        Ok(())
    } else {
        Err(CliError::Mismatch("replayed outputs differ from the manifest".into()))
    }
}
