//! Command-line runner: each subcommand reads one JSON config document,
//! runs the corresponding experiment, and writes report.json plus report.csv
//! under --out. Exit codes: 0 ok, 1 i/o, 2 bad config, 3 support-hypothesis
//! violation outside probe mode, 4 numerical non-convergence.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use twistpar::cutoffs::{partition_check, partition_sample};
use twistpar::decompose::Decomposition;
use twistpar::error::CoreError;
use twistpar::grid::{
    lp_norm, mixed_sobolev_norm, read_gfn, sample, sobolev_norm, write_gfn, Generator,
};
use twistpar::harness::config::{ExperimentConfig, GridCfg};
use twistpar::harness::experiments::{
    leibniz_check, prop1_probe, ratio_sweep, recover_symbol, unit_paraproduct, RatioOperator,
};
use twistpar::harness::expr::parse_symbol_expression;
use twistpar::harness::report::{report_value, write_reports, CsvRow};

#[derive(Parser)]
#[command(
    name = "twistpar",
    version,
    about = "Spectral experiments with twisted multipliers and paraproducts on periodic grids"
)]
struct Cli {
    /// JSON config document; defaults apply for every omitted section
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for report.json, report.csv, and subcommand artifacts
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    out: PathBuf,

    /// Overrides the config's RNG seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the config's grid, e.g. --grid 128,16
    #[arg(long, global = true, value_name = "N,L")]
    grid: Option<String>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Max deviation of the dyadic annuli from a partition of unity
    PartitionCheck,
    /// Expand the configured symbol into modulated paraproduct tables
    Decompose,
    /// Reconstruction error of the expansion across a list of truncation radii
    ReconstructError,
    /// Run the operator on two .gfn inputs and write a .gfn output
    Apply,
    /// Sobolev ratio table over a random ensemble and a dilation sweep
    RatioSweep,
    /// Wave-packet pairings converging to a pointwise symbol value
    RecoverSymbol,
    /// Carrier-frequency growth probe for unrestricted symbols
    Prop1Probe,
    /// Product-rule identity for paraproduct derivatives
    LeibnizCheck,
}

fn exit_for(e: &CoreError) -> u8 {
    match e {
        CoreError::Config(_) | CoreError::Geometry(_) | CoreError::Parse(_) => 2,
        CoreError::SupportViolation(_) => 3,
        CoreError::NonConvergence(_) => 4,
        CoreError::Io(_) => 1,
    }
}

fn parse_grid(s: &str) -> Result<GridCfg, CoreError> {
    let bad = || CoreError::Config(format!("--grid expects N,L, got '{}'", s));
    let (n, l) = s.split_once(',').ok_or_else(bad)?;
    Ok(GridCfg {
        n: n.trim().parse().map_err(|_| bad())?,
        l: l.trim().parse().map_err(|_| bad())?,
    })
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CoreError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CoreError::Io(format!("reading {:?}: {}", path, e)))?;
            ExperimentConfig::from_json_str(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(grid) = &cli.grid {
        cfg.grid = parse_grid(grid)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_for(&e))
        }
    }
}

fn run(cli: &Cli) -> Result<(), CoreError> {
    let cfg = load_config(cli)?;
    match cli.cmd {
        Cmd::PartitionCheck => partition_cmd(cli, &cfg),
        Cmd::Decompose => decompose_cmd(cli, &cfg),
        Cmd::ReconstructError => reconstruct_cmd(cli, &cfg),
        Cmd::Apply => apply_cmd(cli, &cfg),
        Cmd::RatioSweep => sweep_cmd(cli, &cfg),
        Cmd::RecoverSymbol => recover_cmd(cli, &cfg),
        Cmd::Prop1Probe => probe_cmd(cli, &cfg),
        Cmd::LeibnizCheck => leibniz_cmd(cli, &cfg),
    }
}

fn finish(
    cli: &Cli,
    cfg: &ExperimentConfig,
    subcommand: &str,
    results: serde_json::Value,
    rows: &[CsvRow],
) -> Result<(), CoreError> {
    let report = report_value(subcommand, cfg.to_json(), results);
    let (json_path, csv_path) = write_reports(&cli.out, &report, rows)?;
    println!("{}", json_path.display());
    println!("{}", csv_path.display());
    Ok(())
}

fn partition_cmd(cli: &Cli, cfg: &ExperimentConfig) -> Result<(), CoreError> {
    let p = &cfg.partition;
    if p.k_min > p.k_max {
        return Err(CoreError::Config(format!(
            "partition range {}..{} is empty",
            p.k_min, p.k_max
        )));
    }
    let taus = partition_sample(p.k_min, p.k_max, p.samples);
    let defect = partition_check(p.k_min, p.k_max, &taus);
    let rows = vec![CsvRow {
        trial_id: 0,
        a_dilation: 0,
        ratio: defect,
        norm_out: defect,
        norm_f: 0.0,
        norm_g: 0.0,
        flags: format!("samples={}", p.samples),
    }];
    let results = serde_json::json!({
        "k_min": p.k_min,
        "k_max": p.k_max,
        "samples": p.samples,
        "max_defect": defect,
    });
    finish(cli, cfg, "partition-check", results, &rows)
}

fn decompose_cmd(cli: &Cli, cfg: &ExperimentConfig) -> Result<(), CoreError> {
    let geo = cfg.grid.geometry()?;
    let m = parse_symbol_expression(&cfg.symbol, geo)?;
    let d = Decomposition::build_verified(&m, geo, cfg.decompose.n_max, cfg.decompose.m_quad)?;
    let decay = d.decay_report();

    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CoreError::Io(format!("creating {:?}: {}", cli.out, e)))?;
    let path = cli.out.join("decomposition.json");
    let mut body = serde_json::to_string_pretty(&d.to_json())
        .map_err(|e| CoreError::Io(format!("serializing decomposition: {}", e)))?;
    body.push('\n');
    std::fs::write(&path, body).map_err(|e| CoreError::Io(format!("writing {:?}: {}", path, e)))?;

    let rows: Vec<CsvRow> = decay
        .rows
        .iter()
        .enumerate()
        .map(|(i, &(r, weighted))| CsvRow {
            trial_id: i,
            a_dilation: d.a as i32,
            ratio: weighted,
            norm_out: weighted,
            norm_f: r as f64,
            norm_g: 0.0,
            flags: format!("n_max={}", d.n_max),
        })
        .collect();
    let results = serde_json::json!({
        "decomposition": path.display().to_string(),
        "a": d.a,
        "k_range": d.k_range,
        "n_max": d.n_max,
        "error_budget": d.error_budget,
        "decay": serde_json::to_value(&decay).unwrap(),
    });
    finish(cli, cfg, "decompose", results, &rows)?;
    println!("{}", path.display());
    Ok(())
}

fn reconstruct_cmd(cli: &Cli, cfg: &ExperimentConfig) -> Result<(), CoreError> {
    let geo = cfg.grid.geometry()?;
    let m = parse_symbol_expression(&cfg.symbol, geo)?;
    if cfg.decompose.n_max_list.is_empty() {
        return Err(CoreError::Config("n_max_list is empty".into()));
    }
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for (i, &n_max) in cfg.decompose.n_max_list.iter().enumerate() {
        let d = Decomposition::build(&m, geo, n_max, cfg.decompose.m_quad)?;
        rows.push(CsvRow {
            trial_id: i,
            a_dilation: d.a as i32,
            ratio: d.error_budget,
            norm_out: d.error_budget,
            norm_f: 0.0,
            norm_g: 0.0,
            flags: format!("n_max={}", n_max),
        });
        table.push(serde_json::json!({"n_max": n_max, "error": d.error_budget}));
    }
    finish(cli, cfg, "reconstruct-error", serde_json::json!({ "errors": table }), &rows)
}

fn read_field(path: &str) -> Result<twistpar::grid::Field, CoreError> {
    let mut fh = std::fs::File::open(path)
        .map_err(|e| CoreError::Io(format!("opening {}: {}", path, e)))?;
    read_gfn(&mut fh)
}

fn apply_cmd(cli: &Cli, cfg: &ExperimentConfig) -> Result<(), CoreError> {
    let a = &cfg.apply;
    if a.f.is_empty() || a.g.is_empty() {
        return Err(CoreError::Config("apply needs input paths in apply.f and apply.g".into()));
    }
    let f = read_field(&a.f)?;
    let g = read_field(&a.g)?;
    if f.geo != g.geo {
        return Err(CoreError::Geometry(format!(
            "inputs disagree: {}x{} box {} vs {}x{} box {}",
            f.geo.n, f.geo.n, f.geo.l, g.geo.n, g.geo.n, g.geo.l
        )));
    }
    let geo = f.geo;
    let (out, label) = match &a.decomposition {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CoreError::Io(format!("reading {}: {}", path, e)))?;
            let v: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CoreError::Config(format!("decomposition {}: {}", path, e)))?;
            let d = Decomposition::from_json(&v)?;
            (d.apply_decomposed(&f, &g), format!("decomposition {}", path))
        }
        None => {
            let m = parse_symbol_expression(&cfg.symbol, geo)?;
            if !cfg.probe_mode {
                m.check_support(geo)?;
            }
            (
                RatioOperator::Twisted(m).apply(&f, &g),
                format!("symbol '{}'", cfg.symbol.trim()),
            )
        }
    };

    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CoreError::Io(format!("creating {:?}: {}", cli.out, e)))?;
    let out_path = if a.output.is_empty() {
        cli.out.join("out.gfn")
    } else {
        PathBuf::from(&a.output)
    };
    let mut fh = std::fs::File::create(&out_path)
        .map_err(|e| CoreError::Io(format!("creating {:?}: {}", out_path, e)))?;
    write_gfn(&out, &mut fh)?;

    let exps = &cfg.exponents;
    let norm_out = mixed_sobolev_norm(&out, exps.s, exps.r);
    let norm_f = lp_norm(&f, exps.p);
    let norm_g = sobolev_norm(&g, exps.s, exps.q);
    let rows = vec![CsvRow {
        trial_id: 0,
        a_dilation: 0,
        ratio: norm_out / (norm_f * norm_g),
        norm_out,
        norm_f,
        norm_g,
        flags: String::new(),
    }];
    let results = serde_json::json!({
        "operator": label,
        "n": geo.n,
        "l": geo.l,
        "output": out_path.display().to_string(),
        "norm_out": norm_out,
    });
    finish(cli, cfg, "apply", results, &rows)?;
    println!("{}", out_path.display());
    Ok(())
}

fn sweep_cmd(cli: &Cli, cfg: &ExperimentConfig) -> Result<(), CoreError> {
    let geo = cfg.grid.geometry()?;
    let m = parse_symbol_expression(&cfg.symbol, geo)?;
    let op = match &cfg.spatial_amplitude {
        Some(amp) => RatioOperator::Spatial(amp.spatial_symbol(geo, m)),
        None => RatioOperator::Twisted(m),
    };
    let outcome = ratio_sweep(
        &op,
        geo,
        &cfg.exponents,
        &cfg.ensemble,
        &cfg.sweep.dilations,
        cfg.seed,
        cfg.probe_mode,
    )?;
    let rows = outcome.rows.clone();
    let mut results = serde_json::to_value(&outcome)
        .map_err(|e| CoreError::Io(format!("serializing sweep: {}", e)))?;
    if cfg.probe_mode {
        results["label"] = serde_json::Value::String("out-of-range probe".into());
    }
    finish(cli, cfg, "ratio-sweep", results, &rows)
}

fn recover_cmd(cli: &Cli, cfg: &ExperimentConfig) -> Result<(), CoreError> {
    let r = &cfg.recovery;
    let geo = r.grid.unwrap_or(cfg.grid).geometry()?;
    let src = r.symbol.as_deref().unwrap_or(&cfg.symbol);
    let m = parse_symbol_expression(src, geo)?;
    let outcome = recover_symbol(&m, geo, r.xi0, r.eta0, &r.eps)?;
    let rows: Vec<CsvRow> = outcome
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| CsvRow {
            trial_id: i,
            a_dilation: 0,
            ratio: row.error,
            norm_out: row.value.norm(),
            norm_f: outcome.target.norm(),
            norm_g: 0.0,
            flags: format!("eps={}", row.eps),
        })
        .collect();
    let results = serde_json::to_value(&outcome)
        .map_err(|e| CoreError::Io(format!("serializing recovery: {}", e)))?;
    finish(cli, cfg, "recover-symbol", results, &rows)?;
    if !outcome.converged {
        return Err(CoreError::NonConvergence(
            "pairing errors did not decrease across the eps schedule".into(),
        ));
    }
    Ok(())
}

fn probe_cmd(cli: &Cli, cfg: &ExperimentConfig) -> Result<(), CoreError> {
    let p = &cfg.probe;
    let geo = p.grid.unwrap_or(cfg.grid).geometry()?;
    let src = p.symbol.as_deref().unwrap_or(&cfg.symbol);
    let m = parse_symbol_expression(src, geo)?;
    let outcome = prop1_probe(
        &m,
        geo,
        &cfg.exponents,
        &p.lambdas,
        p.g_carrier,
        p.g_tracks,
        p.packet_width,
    )?;
    let rows: Vec<CsvRow> = outcome
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| CsvRow {
            trial_id: i,
            a_dilation: 0,
            ratio: row.ratio,
            norm_out: row.norm_out,
            norm_f: row.norm_f,
            norm_g: row.norm_g,
            flags: format!("lambda={}", row.lambda),
        })
        .collect();
    let mut results = serde_json::to_value(&outcome)
        .map_err(|e| CoreError::Io(format!("serializing probe: {}", e)))?;
    results["label"] = serde_json::Value::String("out-of-range probe".into());
    finish(cli, cfg, "prop1-probe", results, &rows)
}

fn leibniz_cmd(cli: &Cli, cfg: &ExperimentConfig) -> Result<(), CoreError> {
    let lc = &cfg.leibniz;
    if !(1..=3).contains(&lc.s) {
        return Err(CoreError::Config(format!("leibniz.s = {} is not in 1..=3", lc.s)));
    }
    let geo = cfg.grid.geometry()?;
    let spec = unit_paraproduct(geo);
    let y_indices: Vec<i64> = (lc.y_band.0 + 1..=lc.y_band.1).collect();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for t in 0..lc.trials {
        let f = sample(
            &Generator::BandLimitedRandom {
                x_indices: lc.x_indices.clone(),
                y_indices: y_indices.clone(),
                seed: cfg.seed.wrapping_add(2 * t as u64),
            },
            geo,
        )?;
        let g = sample(
            &Generator::BandLimitedRandom {
                x_indices: lc.x_indices.clone(),
                y_indices: y_indices.clone(),
                seed: cfg.seed.wrapping_add(2 * t as u64 + 1),
            },
            geo,
        )?;
        let defect = leibniz_check(&spec, &f, &g, lc.s);
        worst = worst.max(defect);
        rows.push(CsvRow {
            trial_id: t,
            a_dilation: 0,
            ratio: defect,
            norm_out: defect,
            norm_f: lp_norm(&f, 2.0),
            norm_g: lp_norm(&g, 2.0),
            flags: format!("s={}", lc.s),
        });
    }
    let results = serde_json::json!({
        "s": lc.s,
        "trials": lc.trials,
        "max_defect": worst,
    });
    finish(cli, cfg, "leibniz-check", results, &rows)
}
