//! Command-line driver: `generate` (emit θ/A files), `fit`
//! (full-observation estimation), `complete` (link prediction),
//! `lowerbound` (hard instances + divergence audit), `sweep`
//! (Monte Carlo grid), `report` (rate summaries).
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use graphon::rng::derive_seed;
use graphon::{
    chi2_fano_bound, chi2_product_bernoulli, fano_bound, finite_k_instance, fit_alternating,
    fit_completion, fit_exact, io as gio, kl_product_bernoulli, mse_loss, predict, sample_design,
    sample_adjacency, scale_to_sparsity, t1_family, t2_assignment, t2_instance,
    theta_from_graphon, vg_packing, vg_packing_with_target, Adjacency, Assignment,
    CompletionOptions, DesignDist, FitOptions, FitResult, GraphonSpec, HardInstance,
    InitStrategy, LatentDesign, ObservationSet,
};
use graphon_cli::{report, run_experiment, write_csv, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "graphon",
    version,
    about = "Stochastic block model and graphon estimation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an edge-probability matrix and a sampled graph from a
    /// built-in graphon
    Generate(GenerateArgs),
    /// Fit the least-squares block estimator to a fully observed graph
    Fit(FitArgs),
    /// Link prediction: fit the completion program to a partially
    /// observed graph
    Complete(CompleteArgs),
    /// Emit lower-bound hard instances and run the divergence audit
    Lowerbound(LowerboundArgs),
    /// Run a Monte Carlo sweep from a TOML config
    Sweep(SweepArgs),
    /// Summarize sweep records: grid means, rate slopes, verdicts
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixFormat {
    Csv,
    Bin,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdjacencyFormat {
    Edges,
    Csv,
    Bin,
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignKind {
    Grid,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitKind {
    Spectral,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodKind {
    Alternating,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    T1,
    T2,
    FiniteK,
}

#[derive(Args)]
struct GenerateArgs {
    /// Graphon id: constant:c, product, min, additive, smooth, holder:a,
    /// sbm:k:within:between
    #[arg(long)]
    graphon: String,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "grid")]
    design: DesignKind,
    /// Read the latent design from a file (one value per line) instead
    #[arg(long)]
    design_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sparsity level: rescale θ so its largest entry is at most beta
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long)]
    theta_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    theta_format: MatrixFormat,
    #[arg(long)]
    adjacency_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "edges")]
    adjacency_format: AdjacencyFormat,
    /// Write the latent design (one value per line)
    #[arg(long)]
    design_out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    adjacency: PathBuf,
    #[arg(long, value_enum, default_value = "edges")]
    format: AdjacencyFormat,
    /// Number of nodes; required for edge-list input
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "alternating")]
    method: MethodKind,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, value_enum, default_value = "spectral")]
    init: InitKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path for the fit JSON; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompleteArgs {
    /// Observation multiset: "i j multiplicity" lines, 1-based
    #[arg(long)]
    omega: PathBuf,
    /// Masked edge list: the observed pairs that carry an edge, "i j"
    /// lines, 1-based; observed pairs absent from this file are zeros
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, value_enum, default_value = "spectral")]
    init: InitKind,
    #[arg(long, default_value_t = graphon::DEFAULT_COVERAGE_FLOOR)]
    coverage_floor: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pairs to predict: "i j" lines, 1-based
    #[arg(long)]
    predict_pairs: Option<PathBuf>,
    /// Output for predictions ("i j theta_hat" lines); stdout when omitted
    #[arg(long)]
    predictions_out: Option<PathBuf>,
}

#[derive(Args)]
struct LowerboundArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    #[arg(long)]
    n: usize,
    /// Cluster count; used by t1 and t2
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    c1: f64,
    #[arg(long, default_value_t = 0.1)]
    c2: f64,
    /// Finite-k construction constant
    #[arg(long, default_value_t = 0.1)]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    /// How many instances to emit
    #[arg(long, default_value_t = 8)]
    count: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the config output path
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override the config base seed
    #[arg(long)]
    base_seed: Option<u64>,
    /// Override the config replicate count
    #[arg(long)]
    replicates: Option<usize>,
    /// Override the design kind
    #[arg(long, value_enum)]
    design: Option<DesignKind>,
    /// Override the oracle-z switch (sbm-rate)
    #[arg(long)]
    oracle_z: Option<bool>,
    /// Override the slope tolerance used by report
    #[arg(long)]
    slope_tolerance: Option<f64>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    records: PathBuf,
    /// The sweep config; enables theory verdicts that depend on options
    #[arg(long)]
    config: Option<PathBuf>,
    /// Only report on this scenario
    #[arg(long)]
    scenario: Option<String>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Complete(args) => cmd_complete(args),
        Command::Lowerbound(args) => cmd_lowerbound(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Report(args) => cmd_report(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

type CmdResult = Result<(), CliError>;

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(&format!("creating {}", path.display()), e))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(&format!("opening {}", path.display()), e))
}

fn cmd_generate(args: GenerateArgs) -> CmdResult {
    if args.theta_out.is_none() && args.adjacency_out.is_none() && args.design_out.is_none() {
        return Err(CliError::Config(
            "nothing to do: pass --theta-out, --adjacency-out or --design-out".into(),
        ));
    }
    let spec = GraphonSpec::parse(&args.graphon)?;
    if !(0.0..=1.0).contains(&args.beta) {
        return Err(CliError::Config(format!("beta {} outside [0,1]", args.beta)));
    }
    let design = match &args.design_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
            let values: Vec<f64> = text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    l.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Config(format!("bad design value `{l}`")))
                })
                .collect::<Result<_, _>>()?;
            sample_design(&DesignDist::Given(values), args.n, 0)?
        }
        None => match args.design {
            DesignKind::Grid => LatentDesign::grid(args.n),
            DesignKind::Uniform => LatentDesign::iid_uniform(args.n, derive_seed(args.seed, &[0])),
        },
    };
    let theta = scale_to_sparsity(&theta_from_graphon(&spec, &design), args.beta);

    if let Some(path) = &args.theta_out {
        let mut w = create(path)?;
        match args.theta_format {
            MatrixFormat::Csv => gio::write_matrix_csv(&theta, &mut w)?,
            MatrixFormat::Bin => gio::write_matrix_binary(&theta, &mut w)?,
        }
    }
    if let Some(path) = &args.adjacency_out {
        let a = sample_adjacency(&theta, derive_seed(args.seed, &[1]));
        let mut w = create(path)?;
        match args.adjacency_format {
            AdjacencyFormat::Edges => gio::write_edge_list(&a, &mut w)?,
            AdjacencyFormat::Csv => gio::write_matrix_csv(&a, &mut w)?,
            AdjacencyFormat::Bin => gio::write_matrix_binary(&a, &mut w)?,
        }
    }
    if let Some(path) = &args.design_out {
        let mut w = create(path)?;
        for x in design.xi() {
            writeln!(w, "{x:.16e}").map_err(|e| CliError::io("writing design", e))?;
        }
    }
    Ok(())
}

fn read_adjacency(path: &Path, format: AdjacencyFormat, n: Option<usize>) -> Result<Adjacency, CliError> {
    let r = open(path)?;
    let a = match format {
        AdjacencyFormat::Edges => {
            let n = n.ok_or_else(|| {
                CliError::Config("--n is required for edge-list input".into())
            })?;
            gio::read_edge_list(r, n)?
        }
        AdjacencyFormat::Csv => gio::read_adjacency_csv(r)?,
        AdjacencyFormat::Bin => gio::read_adjacency_binary(open(path)?)?,
    };
    if let Some(n) = n {
        if a.n() != n {
            return Err(CliError::Config(format!(
                "adjacency has {} nodes but --n {n} was given",
                a.n()
            )));
        }
    }
    Ok(a)
}

fn write_fit(fit: &FitResult, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => gio::write_fit_result_json(fit, create(path)?)?,
        None => gio::write_fit_result_json(fit, std::io::stdout().lock())?,
    }
    Ok(())
}

fn fit_options(restarts: usize, max_iterations: usize, tolerance: f64, init: InitKind) -> FitOptions {
    FitOptions {
        restarts,
        max_iterations,
        tolerance,
        init: match init {
            InitKind::Spectral => InitStrategy::Spectral,
            InitKind::Random => InitStrategy::Random,
        },
    }
}

fn cmd_fit(args: FitArgs) -> CmdResult {
    let a = read_adjacency(&args.adjacency, args.format, args.n)?;
    let fit = match args.method {
        MethodKind::Exact => fit_exact(&a, args.k)?,
        MethodKind::Alternating => {
            if args.k > a.n() {
                return Err(CliError::Config(format!(
                    "k = {} exceeds the number of nodes {}",
                    args.k,
                    a.n()
                )));
            }
            let opts = fit_options(args.restarts, args.max_iterations, args.tolerance, args.init);
            fit_alternating(&a, args.k, &opts, args.seed)
        }
    };
    write_fit(&fit, args.out.as_deref())
}

fn read_pairs(path: &Path) -> Result<Vec<(usize, usize)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(CliError::Config(format!(
                "line {}: expected `i j`, got `{trimmed}`",
                lineno + 1
            )));
        }
        let parse = |t: &str| -> Result<usize, CliError> {
            let v: usize = t
                .parse()
                .map_err(|_| CliError::Config(format!("line {}: bad index `{t}`", lineno + 1)))?;
            if v == 0 {
                return Err(CliError::Config(format!(
                    "line {}: indices are 1-based",
                    lineno + 1
                )));
            }
            Ok(v - 1)
        };
        pairs.push((parse(toks[0])?, parse(toks[1])?));
    }
    Ok(pairs)
}

fn cmd_complete(args: CompleteArgs) -> CmdResult {
    let omega: ObservationSet = gio::read_observations(open(&args.omega)?)?;
    if let Some(max) = omega.max_index() {
        if max >= args.n {
            return Err(CliError::Config(format!(
                "observation index {} outside 1..={}",
                max + 1,
                args.n
            )));
        }
    }
    let edge_pairs = read_pairs(&args.edges)?;
    let mut observed_edges = std::collections::HashSet::new();
    for (i, j) in edge_pairs {
        if i == j {
            return Err(CliError::Config(format!("self-loop ({},{}) in edges", i + 1, i + 1)));
        }
        observed_edges.insert((i.min(j), i.max(j)));
    }
    let omega_pairs: std::collections::HashSet<(usize, usize)> =
        omega.pairs().iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
    if let Some(&(i, j)) = observed_edges.difference(&omega_pairs).next() {
        return Err(CliError::Config(format!(
            "edge ({},{}) is not covered by the observation set",
            i + 1,
            j + 1
        )));
    }
    let observed: Vec<bool> = omega
        .pairs()
        .iter()
        .map(|&(i, j)| observed_edges.contains(&(i.min(j), i.max(j))))
        .collect();

    let opts = CompletionOptions {
        fit: fit_options(args.restarts, args.max_iterations, args.tolerance, args.init),
        coverage_floor: args.coverage_floor,
    };
    let fit = fit_completion(&observed, args.n, args.k, &omega, &opts, args.seed)?;
    write_fit(&fit, args.out.as_deref())?;

    if let Some(pairs_path) = &args.predict_pairs {
        let pairs = read_pairs(pairs_path)?;
        let values = predict(&fit.theta_hat, &pairs)?;
        let mut lines = String::new();
        for ((i, j), v) in pairs.iter().zip(values) {
            lines.push_str(&format!("{} {} {v:.16e}\n", i + 1, j + 1));
        }
        match &args.predictions_out {
            Some(path) => create(path)?
                .write_all(lines.as_bytes())
                .map_err(|e| CliError::io("writing predictions", e))?,
            None => print!("{lines}"),
        }
    }
    Ok(())
}

fn write_instance(
    dir: &Path,
    idx: usize,
    inst: &HardInstance,
    extra: serde_json::Value,
) -> CmdResult {
    let theta_file = format!("theta_{idx:03}.csv");
    gio::write_matrix_csv(&inst.theta, create(&dir.join(&theta_file))?)?;
    let mut meta = serde_json::json!({
        "family": inst.family.to_string(),
        "n": inst.theta.n(),
        "constant": inst.constant,
        "codeword_indices": inst.codeword_indices,
        "theta_file": theta_file,
    });
    if let Some(z) = &inst.assignment {
        meta["labels"] = serde_json::json!(z.labels());
    }
    if let serde_json::Value::Object(extra_map) = extra {
        meta.as_object_mut().unwrap().extend(extra_map);
    }
    let text = serde_json::to_string_pretty(&meta)
        .map_err(|e| CliError::Config(format!("metadata serialization: {e}")))?;
    create(&dir.join(format!("instance_{idx:03}.json")))?
        .write_all(format!("{text}\n").as_bytes())
        .map_err(|e| CliError::io("writing metadata", e))?;
    Ok(())
}

fn divergence_diameters(instances: &[HardInstance]) -> Result<(f64, f64), CliError> {
    let mut kl_diam = 0.0f64;
    let mut chi2_diam = 0.0f64;
    for i in 0..instances.len() {
        for j in 0..instances.len() {
            if i != j {
                kl_diam = kl_diam.max(kl_product_bernoulli(&instances[i].theta, &instances[j].theta)?);
                chi2_diam =
                    chi2_diam.max(chi2_product_bernoulli(&instances[i].theta, &instances[j].theta)?);
            }
        }
    }
    Ok((kl_diam, chi2_diam))
}

fn cmd_lowerbound(args: LowerboundArgs) -> CmdResult {
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::io(&format!("creating {}", args.out_dir.display()), e))?;
    let (n, k) = (args.n, args.k);
    match args.family {
        FamilyKind::T1 => {
            if n % k != 0 {
                return Err(CliError::Config(format!("t1 needs k | n, got n={n}, k={k}")));
            }
            let z = Assignment::contiguous(n, k);
            let packing = vg_packing(k * (k - 1) / 2, args.seed)?;
            let family = t1_family(n, k, args.c1, &packing, &z)?;
            let emit = args.count.min(family.len());
            for (idx, inst) in family.iter().take(emit).enumerate() {
                let cw = packing.codeword(inst.codeword_indices[0]);
                write_instance(&args.out_dir, idx, inst, serde_json::json!({ "codeword": cw }))?;
            }
            let mut min_ratio = f64::INFINITY;
            for i in 0..family.len() {
                for j in (i + 1)..family.len() {
                    let rho_sq = mse_loss(&family[i].theta, &family[j].theta)?;
                    let floor =
                        args.c1 * args.c1 / (n * n) as f64 * packing.distance(i, j) as f64;
                    min_ratio = min_ratio.min(rho_sq / floor);
                }
            }
            let audited: Vec<HardInstance> = family.iter().take(emit).cloned().collect();
            let (kl_diam, chi2_diam) = divergence_diameters(&audited)?;
            println!("family t1: {} instances generated, {emit} written", family.len());
            println!(
                "packing-distance audit: min ratio rho^2 n^2 / (c1^2 rho_H) = {min_ratio:.4} -> {}",
                if min_ratio >= 1.0 { "OK" } else { "VIOLATION" }
            );
            println!("kl diameter (emitted instances): {kl_diam:.6}");
            println!("chi2 diameter (emitted instances): {chi2_diam:.6}");
            println!(
                "chi2-fano bound at the full family size: {:.4}",
                chi2_fano_bound(chi2_diam, family.len() as f64)
            );
        }
        FamilyKind::T2 => {
            let packing = vg_packing_with_target(k / 2, k / 2, args.seed)?;
            let mut instances = Vec::new();
            for idx in 0..args.count {
                let z = t2_assignment(n, k, derive_seed(args.seed, &[idx as u64]))?;
                let inst = t2_instance(n, k, args.c2, &packing, &z)?;
                let codewords: Vec<Vec<u8>> =
                    (0..k / 2).map(|c| packing.codeword(c)).collect();
                write_instance(
                    &args.out_dir,
                    idx,
                    &inst,
                    serde_json::json!({ "k": k, "codewords": codewords }),
                )?;
                instances.push(inst);
            }
            let eps_sq = args.c2 * (k as f64).ln() / n as f64;
            let sep_floor = args.c2 * k as f64 * (k as f64).ln() / (8.0 * n as f64);
            let mut min_ratio = f64::INFINITY;
            for a in 0..k / 2 {
                for b in (a + 1)..k / 2 {
                    min_ratio =
                        min_ratio.min(eps_sq * packing.distance(a, b) as f64 / sep_floor);
                }
            }
            let (kl_diam, chi2_diam) = divergence_diameters(&instances)?;
            println!("family t2: {} instances written", instances.len());
            if k > 2 {
                println!(
                    "column-separation audit: min ratio = {min_ratio:.4} -> {}",
                    if min_ratio >= 1.0 { "OK" } else { "VIOLATION" }
                );
            } else {
                println!("column-separation audit: k = 2 has a single column, nothing to check");
            }
            println!("kl diameter (emitted instances): {kl_diam:.6}");
            println!("chi2 diameter (emitted instances): {chi2_diam:.6}");
            println!(
                "fano bound with the assignment-class packing exponent n log k / 12: {:.4}",
                fano_bound(kl_diam, (n as f64) * (k as f64).ln() / 12.0)
            );
        }
        FamilyKind::FiniteK => {
            let mut instances = Vec::new();
            let mut masks: Vec<Vec<bool>> = Vec::new();
            for idx in 0..args.count {
                let mut rng = graphon::rng::seeded_rng(derive_seed(args.seed, &[idx as u64]));
                let mask: Vec<bool> =
                    (0..n).map(|_| graphon::rng::uniform01(&mut rng) < 0.5).collect();
                let inst = finite_k_instance(n, args.c, &mask)?;
                let members: Vec<usize> =
                    mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i + 1).collect();
                write_instance(&args.out_dir, idx, &inst, serde_json::json!({ "members": members }))?;
                instances.push(inst);
                masks.push(mask);
            }
            // distance identity: n² ρ² = (2c²/n) |SΔS'| (n − |SΔS'|)
            let mut max_dev = 0.0f64;
            for i in 0..instances.len() {
                for j in (i + 1)..instances.len() {
                    let lhs =
                        (n * n) as f64 * mse_loss(&instances[i].theta, &instances[j].theta)?;
                    let sym_diff =
                        masks[i].iter().zip(&masks[j]).filter(|(a, b)| a != b).count();
                    let rhs =
                        2.0 * args.c * args.c / n as f64 * (sym_diff * (n - sym_diff)) as f64;
                    max_dev = max_dev.max((lhs - rhs).abs());
                }
            }
            let (kl_diam, chi2_diam) = divergence_diameters(&instances)?;
            println!("family finite-k: {} instances written", instances.len());
            println!(
                "distance-identity audit: max |n^2 rho^2 - (2c^2/n)|SdS'|(n-|SdS'|)| = {max_dev:.3e} -> {}",
                if max_dev <= 1e-9 { "OK" } else { "VIOLATION" }
            );
            println!("kl diameter (emitted instances): {kl_diam:.6}");
            println!("chi2 diameter (emitted instances): {chi2_diam:.6}");
            println!(
                "fano bound with the subset-packing exponent n/8: {:.4}",
                fano_bound(8.0 * args.c * args.c * n as f64, n as f64 / 8.0)
            );
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> CmdResult {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(output) = args.output {
        cfg.output = output.display().to_string();
    }
    if let Some(seed) = args.base_seed {
        cfg.base_seed = seed;
    }
    if let Some(replicates) = args.replicates {
        cfg.replicates = replicates;
    }
    if let Some(design) = args.design {
        cfg.design = match design {
            DesignKind::Grid => "grid".into(),
            DesignKind::Uniform => "uniform".into(),
        };
    }
    if let Some(oracle) = args.oracle_z {
        cfg.oracle_z = oracle;
    }
    if let Some(tol) = args.slope_tolerance {
        cfg.slope_tolerance = tol;
    }
    cfg.build_grid()?; // validate before any computation
    let out_path = PathBuf::from(&cfg.output);
    let mut writer = create(&out_path)?; // fail on unwritable output up front
    let records = run_experiment(&cfg)?;
    write_csv(&records, &mut writer)?;
    writer.flush().map_err(|e| CliError::io("flushing output", e))?;
    println!("wrote {} records to {}", records.len(), out_path.display());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> CmdResult {
    let records = graphon_cli::read_csv(open(&args.records)?)?;
    let records: Vec<_> = match &args.scenario {
        Some(name) => records.into_iter().filter(|r| &r.scenario == name).collect(),
        None => records,
    };
    let config = match &args.config {
        Some(path) => Some(ExperimentConfig::from_path(path)?),
        None => None,
    };
    let text = report(&records, config.as_ref())?;
    print!("{text}");
    Ok(())
}
