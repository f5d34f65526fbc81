//! Subcommand implementations.

use std::io::Write;
use std::path::Path;

use alignment::align;
use hyperbolic::{contour_grid, reduction_applies, run_counterexample, CounterexampleTriple, Gamma, Mat2};
use matrixkit::{hadamard, DenseMatrix};
use mcharness::{
    emit_results, emit_trials, rates_from_rows, read_results_csv, read_results_json, ExperimentConfig, Format, Preset,
    Provenance, Regime, Schedule,
};
use netmodel::{sample_adjacency_trial, write_edge_list, AdjacencyMatrix, DiagonalMode, ProbabilityMatrix, Signature};
use packing::{
    build_packing_constant, build_packing_growing, default_zeta, verify_family, PackingFamily, PackingParams,
    VerifyOptions, DEFAULT_C0,
};
use serde::Serialize;
use serde_json::{json, Value};
use spectral::{adjacency_spectral_embedding, latent_estimate};

use crate::error::{CliError, Result};
use crate::output::{self, file_digest, RunInfo};
use crate::{
    display, resolve_seed, AlignArgs, Cli, Command, CounterexampleAction, EmbedArgs, EmbedDiagonal, ExperimentAction,
    GlobalOptions, OutputFormat, PackAction, PackParamArgs, PresetArg, RegimeArg, SampleArgs, TripleArgs,
};

pub fn dispatch(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Hadamard { k, out } => cmd_hadamard(g, *k, out.as_deref()),
        Command::Sample(a) => cmd_sample(g, a),
        Command::Embed(a) => cmd_embed(g, a),
        Command::Align(a) => cmd_align(g, a),
        Command::Pack { action } => match action {
            PackAction::Build { params, out, frames_dir } => cmd_pack_build(g, params, out.as_deref(), frames_dir.as_deref()),
            PackAction::Verify { params, sample_pairs, grid_step, diagonal, out } => {
                cmd_pack_verify(g, params, *sample_pairs, *grid_step, (*diagonal).into(), out.as_deref())
            }
        },
        Command::Experiment { action } => match action {
            ExperimentAction::Run { config, preset, full, trials, diagonal, out, records } => cmd_experiment_run(
                g,
                config.as_deref(),
                *preset,
                *full,
                *trials,
                diagonal.map(Into::into),
                out.as_deref(),
                records.as_deref(),
            ),
            ExperimentAction::Rates { input, out } => cmd_experiment_rates(g, input, out.as_deref()),
            ExperimentAction::Config { preset, full, out } => cmd_experiment_config(g, *preset, *full, out.as_deref()),
        },
        Command::Counterexample { action } => match action {
            CounterexampleAction::Run { triple, resolution, out } => cmd_counterexample_run(g, triple, *resolution, out.as_deref()),
            CounterexampleAction::Contour { triple, resolution, out_dir } => {
                cmd_counterexample_contour(g, triple, *resolution, out_dir)
            }
        },
    }
}

fn announce(info: &RunInfo) {
    eprintln!("{}", info.banner());
}

fn verbose(g: &GlobalOptions, msg: impl FnOnce() -> String) {
    if g.verbose > 0 {
        eprintln!("{}", msg());
    }
}

fn rows_of(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn signature(p: usize, q: usize) -> Result<Signature> {
    Ok(Signature::new(p, q)?)
}

// ---------------------------------------------------------------- hadamard

fn cmd_hadamard(g: &GlobalOptions, k: u32, out: Option<&Path>) -> Result<()> {
    let info = RunInfo::from_params(&json!({ "command": "hadamard", "k": k }), resolve_seed(g.seed, None)?);
    announce(&info);
    let h = hadamard(k)?;
    match out {
        Some(path) => output::write_integer_matrix_file(path, &h, &info),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            output::write_integer_matrix(&h, &mut lock, None)?;
            lock.flush()?;
            Ok(())
        }
    }
}

// ---------------------------------------------------------------- sample

fn cmd_sample(g: &GlobalOptions, a: &SampleArgs) -> Result<()> {
    let seed = resolve_seed(g.seed, None)?;
    let sig = signature(a.p, a.q)?;
    let mode: DiagonalMode = a.diagonal.into();
    let mut params = json!({
        "command": "sample", "p": a.p, "q": a.q, "rho": a.rho, "trial": a.trial,
        "diagonal": mode.as_str(), "seed": seed,
    });
    let (pm, truth) = match &a.latent {
        Some(path) => {
            params["latent_digest"] = Value::from(file_digest(path)?);
            let x = output::read_matrix(path)?;
            if x.cols() != sig.d() {
                return Err(CliError::validation(format!("{}: {} columns, expected p + q = {}", display(path), x.cols(), sig.d())));
            }
            if !(a.rho > 0.0 && a.rho <= 1.0) {
                return Err(CliError::validation(format!("rho = {} must lie in (0, 1]", a.rho)));
            }
            let signs: Vec<f64> = (0..sig.d()).map(|j| a.rho * sig.sign(j)).collect();
            let mut p = x.scale_columns(&signs).matmul(&x.transpose())?;
            p.symmetrize();
            let truth = x.scale(a.rho.sqrt());
            (ProbabilityMatrix::from_matrix(p, a.rho)?, truth)
        }
        None => {
            params["n"] = Value::from(a.n);
            params["kappa"] = Value::from(a.kappa);
            let (pm, pair) = mcharness::build_experiment_model(a.n, a.rho, a.kappa, a.p, a.q)?;
            (pm, pair.latent_positions())
        }
    };
    let info = RunInfo::from_params(&params, seed);
    announce(&info);
    let adj = sample_adjacency_trial(&pm, seed, a.trial, mode);
    output::write_integer_matrix_file(&a.out, &adj.to_dense(), &info)?;
    if let Some(path) = &a.edges {
        let mut w = output::create(path)?;
        writeln!(w, "{}", info.csv_comment())?;
        write_edge_list(&adj, &mut w)?;
        w.flush()?;
    }
    if let Some(path) = &a.truth {
        output::write_matrix(path, &truth, &info)?;
    }
    let n = adj.n();
    let summary = json!({
        "n": n,
        "edges": adj.edge_count(),
        "mean_degree": (0..n).map(|i| adj.degree(i) as f64).sum::<f64>() / n as f64,
    });
    output::emit_json(None, &summary, &info)
}

// ---------------------------------------------------------------- embed

fn cmd_embed(g: &GlobalOptions, a: &EmbedArgs) -> Result<()> {
    let seed = resolve_seed(g.seed, None)?;
    let sig = signature(a.p, a.q)?;
    let digest = file_digest(&a.input)?;
    let m = output::read_matrix(&a.input)?;
    let mode = match a.diagonal {
        EmbedDiagonal::Hollow => DiagonalMode::Hollow,
        EmbedDiagonal::Bernoulli => DiagonalMode::Bernoulli,
        EmbedDiagonal::Auto => {
            if m.rows() == m.cols() && m.diagonal().iter().any(|&v| v != 0.0) {
                DiagonalMode::Bernoulli
            } else {
                DiagonalMode::Hollow
            }
        }
    };
    let info = RunInfo::from_params(
        &json!({ "command": "embed", "input_digest": digest, "p": a.p, "q": a.q, "diagonal": mode.as_str() }),
        seed,
    );
    announce(&info);
    let adj = AdjacencyMatrix::from_dense(&m, mode)?;
    let e = adjacency_spectral_embedding(&adj, sig)?;
    let dir = &a.out_dir;
    output::write_matrix(&dir.join("frame.csv"), e.frame(), &info)?;
    let eig = DenseMatrix::new(1, e.eigenvalue_signs.len(), e.eigenvalue_signs.clone())?;
    output::write_matrix(&dir.join("eigenvalues.csv"), &eig, &info)?;
    output::write_matrix(&dir.join("latent.csv"), &latent_estimate(&e), &info)?;
    let summary = json!({
        "n": adj.n(),
        "p": a.p,
        "q": a.q,
        "eigenvalues": e.eigenvalue_signs,
        "tie_at_cutoff": e.tie_at_cutoff,
        "input_norm": e.input_norm,
    });
    output::write_json(&dir.join("embed.json"), &summary, &info)?;
    output::emit_json(None, &summary, &info)
}

// ---------------------------------------------------------------- align

fn cmd_align(g: &GlobalOptions, a: &AlignArgs) -> Result<()> {
    let seed = resolve_seed(g.seed, None)?;
    let sig = signature(a.p, a.q)?;
    let info = RunInfo::from_params(
        &json!({
            "command": "align", "xhat_digest": file_digest(&a.xhat)?, "x_digest": file_digest(&a.x)?,
            "p": a.p, "q": a.q,
        }),
        seed,
    );
    announce(&info);
    let xhat = output::read_matrix(&a.xhat)?;
    let x = output::read_matrix(&a.x)?;
    let res = align(&xhat, &x, sig)?;
    let body = json!({
        "w_p": rows_of(res.rotation.w_p()),
        "w_q": rows_of(res.rotation.w_q()),
        "frobenius": res.frobenius,
        "two_to_infinity": res.two_to_infinity,
        "rank_deficient": res.rotation.rank_deficient,
    });
    output::emit_json(a.out.as_deref(), &body, &info)
}

// ---------------------------------------------------------------- pack

/// Effective packing parameters: defaults of the regime, overridden by the
/// configuration file, overridden by flags.
pub fn pack_params(a: &PackParamArgs) -> Result<PackingParams> {
    let base: Option<PackingParams> = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", display(path))))?;
            Some(serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", display(path))))?)
        }
        None => None,
    };
    let regime = match (a.regime, &base) {
        (Some(RegimeArg::Constant), _) => packing::Regime::ConstantKappa,
        (Some(RegimeArg::Growing), _) => packing::Regime::GrowingKappa,
        (None, Some(b)) => b.regime,
        (None, None) => packing::Regime::ConstantKappa,
    };
    let default_kappa = match regime {
        packing::Regime::ConstantKappa => 9.0,
        packing::Regime::GrowingKappa => 32.0,
    };
    let n = a.n.or(base.as_ref().map(|b| b.n)).unwrap_or(1024);
    let p = a.p.or(base.as_ref().map(|b| b.p)).unwrap_or(2);
    let q = a.q.or(base.as_ref().map(|b| b.q)).unwrap_or(1);
    let kappa = a.kappa.or(base.as_ref().map(|b| b.kappa)).unwrap_or(default_kappa);
    let derived_lambda1 = match regime {
        packing::Regime::ConstantKappa => kappa * (n as f64 / (3.0 * kappa)).floor(),
        packing::Regime::GrowingKappa => n as f64 / 3.0,
    };
    // A configured λ₁ only survives when n and κ are not overridden.
    let lambda1 = a
        .lambda1
        .or(base.as_ref().filter(|_| a.n.is_none() && a.kappa.is_none()).map(|b| b.lambda1))
        .unwrap_or(derived_lambda1);
    let c0 = a.c0.or(base.as_ref().map(|b| b.c0)).unwrap_or(DEFAULT_C0);
    let zeta = a
        .zeta
        .or(base.as_ref().filter(|_| a.p.is_none() && a.q.is_none()).map(|b| b.zeta_d))
        .unwrap_or(default_zeta(p + q));
    let params = match regime {
        packing::Regime::ConstantKappa => PackingParams { zeta_d: zeta, ..PackingParams::constant(n, p, q, kappa, lambda1, c0) },
        packing::Regime::GrowingKappa => PackingParams { c0, ..PackingParams::growing(n, p, q, kappa, lambda1, zeta) },
    };
    params.validate()?;
    Ok(params)
}

fn build_family(params: &PackingParams) -> Result<PackingFamily> {
    Ok(match params.regime {
        packing::Regime::ConstantKappa => build_packing_constant(params)?,
        packing::Regime::GrowingKappa => build_packing_growing(params)?,
    })
}

#[derive(Serialize)]
struct FamilySummary<'a> {
    params: &'a PackingParams,
    derived: &'a packing::Derived,
    member_count: usize,
    separation_bound: f64,
    frobenius_budget: f64,
    kl_budget: f64,
    thresholds: &'a [packing::ThresholdCheck],
}

fn cmd_pack_build(g: &GlobalOptions, a: &PackParamArgs, out: Option<&Path>, frames_dir: Option<&Path>) -> Result<()> {
    let seed = resolve_seed(g.seed, None)?;
    let params = pack_params(a)?;
    let info = RunInfo::from_params(&json!({ "command": "pack build", "params": params }), seed);
    announce(&info);
    let family = build_family(&params)?;
    verbose(g, || format!("built {} members", family.member_count()));
    if let Some(dir) = frames_dir {
        output::write_matrix(&dir.join("base.csv"), family.frame(0), &info)?;
        for k in 1..=family.member_count() {
            output::write_matrix(&dir.join(format!("member_{k:04}.csv")), family.frame(k), &info)?;
        }
    }
    let summary = FamilySummary {
        params: &params,
        derived: &family.derived,
        member_count: family.member_count(),
        separation_bound: params.separation_bound(),
        frobenius_budget: params.frobenius_budget(),
        kl_budget: params.kl_budget(),
        thresholds: &family.thresholds,
    };
    output::emit_json(out, &summary, &info)
}

fn cmd_pack_verify(
    g: &GlobalOptions,
    a: &PackParamArgs,
    sample_pairs: usize,
    grid_step: f64,
    diagonal_mode: DiagonalMode,
    out: Option<&Path>,
) -> Result<()> {
    let seed = resolve_seed(g.seed, None)?;
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(CliError::validation(format!("--grid-step {grid_step} must be positive")));
    }
    let params = pack_params(a)?;
    let info = RunInfo::from_params(
        &json!({
            "command": "pack verify", "params": params, "sample_pairs": sample_pairs,
            "grid_step": grid_step, "diagonal": diagonal_mode.as_str(), "seed": seed,
        }),
        seed,
    );
    announce(&info);
    let family = build_family(&params)?;
    let opts = VerifyOptions { sample_pairs, seed, grid_step, diagonal_mode };
    let report = verify_family(&family, &opts);
    output::emit_json(out, &report, &info)?;
    if report.pass {
        Ok(())
    } else {
        let failed: Vec<String> = report.checks.iter().filter(|c| !c.pass()).map(|c| format!("{:?}", c.kind)).collect();
        Err(CliError::runtime(format!("certification failed: {}", failed.join(", "))))
    }
}

// ---------------------------------------------------------------- experiment

/// Configuration of a preset at desk or full scale.
pub fn preset_config(preset: PresetArg, full: bool, seed: u64) -> ExperimentConfig {
    match (preset, full) {
        (PresetArg::Table1, false) => ExperimentConfig::desk(Preset::Table1, seed),
        (PresetArg::Table2, false) => ExperimentConfig::desk(Preset::Table2, seed),
        (PresetArg::Table1, true) => ExperimentConfig::full(Preset::Table1, seed),
        (PresetArg::Table2, true) => ExperimentConfig::full(Preset::Table2, seed),
        (PresetArg::Anchor, false) => ExperimentConfig::desk_anchor(seed),
        (PresetArg::Anchor, true) => {
            let mut cfg = ExperimentConfig::full(Preset::Table1, seed);
            cfg.regime = Regime::FixedKappa { kappa: mcharness::config::FIXED_KAPPA, rho_specs: vec![Schedule::constant(mcharness::config::RHO_ANCHOR)] };
            cfg
        }
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", display(path))))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", display(path))))
}

fn format_for(g: &GlobalOptions, out: Option<&Path>) -> Format {
    match g.format {
        Some(OutputFormat::Csv) => Format::Csv,
        Some(OutputFormat::Json) => Format::Json,
        None if out.and_then(|p| p.extension()).is_some_and(|e| e == "json") => Format::Json,
        None => Format::Csv,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment_run(
    g: &GlobalOptions,
    config: Option<&Path>,
    preset: Option<PresetArg>,
    full: bool,
    trials: Option<usize>,
    diagonal: Option<DiagonalMode>,
    out: Option<&Path>,
    records: Option<&Path>,
) -> Result<()> {
    let mut cfg = match (config, preset) {
        (Some(path), _) => {
            let cfg = load_config(path)?;
            ExperimentConfig { seed: resolve_seed(g.seed, Some(cfg.seed))?, ..cfg }
        }
        (None, Some(p)) => preset_config(p, full, resolve_seed(g.seed, None)?),
        (None, None) => return Err(CliError::validation("either --config or --preset is required")),
    };
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(d) = diagonal {
        cfg.diagonal_mode = d;
    }
    cfg.validate()?;
    let info = RunInfo { config_hash: cfg.config_hash(), seed: cfg.seed };
    announce(&info);
    verbose(g, || format!("{} settings x {} sizes x {} trials", cfg.settings().len(), cfg.n_grid.len(), cfg.trials));
    let result = mcharness::run_experiment(&cfg)?;
    for f in &result.failures {
        eprintln!("warning: trial {} of {} at n = {} failed: {}", f.trial_index, f.setting, f.n, f.message);
    }
    let prov = Provenance { config_hash: info.config_hash.clone(), seed: info.seed };
    let format = format_for(g, out);
    match out {
        Some(path) => {
            let mut w = output::create(path)?;
            emit_results(&result.rows, format, &prov, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            emit_results(&result.rows, format, &prov, &mut lock)?;
            lock.flush()?;
        }
    }
    if let Some(path) = records {
        let mut w = output::create(path)?;
        emit_trials(&result.records, &prov, &mut w)?;
        w.flush()?;
    }
    if g.verbose > 0 {
        if let Ok(rates) = rates_from_rows(&result.rows) {
            for r in rates {
                eprintln!(
                    "{}: latent {:.4} (lower {:.4}), subspace {:.4} (lower {:.4})",
                    r.setting, r.latent.slope, r.latent_lower.slope, r.subspace.slope, r.subspace_lower.slope
                );
            }
        }
    }
    Ok(())
}

fn cmd_experiment_rates(g: &GlobalOptions, input: &Path, out: Option<&Path>) -> Result<()> {
    let file = std::fs::File::open(input).map_err(|e| CliError::validation(format!("{}: {e}", display(input))))?;
    let parsed = if input.extension().is_some_and(|e| e == "json") { read_results_json(file) } else { read_results_csv(file) };
    let results = parsed.map_err(|e| CliError::validation(format!("{}: {e}", display(input))))?;
    let info = match &results.provenance {
        Some(p) => RunInfo { config_hash: p.config_hash.clone(), seed: p.seed },
        None => RunInfo::from_params(&serde_json::to_value(&results.rows)?, resolve_seed(g.seed, None)?),
    };
    announce(&info);
    let rates = rates_from_rows(&results.rows)?;
    output::emit_json(out, &json!({ "rates": rates }), &info)
}

fn cmd_experiment_config(g: &GlobalOptions, preset: PresetArg, full: bool, out: Option<&Path>) -> Result<()> {
    let cfg = preset_config(preset, full, resolve_seed(g.seed, None)?);
    let info = RunInfo { config_hash: cfg.config_hash(), seed: cfg.seed };
    announce(&info);
    // The configuration itself is the output; its hash is recomputable
    // from the content, so no extra fields are added.
    let mut text = serde_json::to_string_pretty(&cfg)?;
    text.push('\n');
    match out {
        Some(path) => {
            let mut w = output::create(path)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

// ---------------------------------------------------------------- counterexample

/// Parse `"a,b;c,d"` into a row-major 2×2 matrix.
pub fn parse_mat2(s: &str) -> Result<Mat2> {
    let rows: Vec<&str> = s.split(';').collect();
    let bad = || CliError::validation(format!("{s:?} is not a 2x2 matrix of the form \"a,b;c,d\""));
    if rows.len() != 2 {
        return Err(bad());
    }
    let mut m = [[0.0; 2]; 2];
    for (i, r) in rows.iter().enumerate() {
        let vals: Vec<f64> = r.split(',').map(|v| v.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        if vals.len() != 2 || vals.iter().any(|v| !v.is_finite()) {
            return Err(bad());
        }
        m[i] = [vals[0], vals[1]];
    }
    Ok(m)
}

fn triple(a: &TripleArgs) -> Result<CounterexampleTriple> {
    let d = CounterexampleTriple::default();
    let pick = |s: &Option<String>, dflt: Mat2| s.as_deref().map(parse_mat2).unwrap_or(Ok(dflt));
    Ok(CounterexampleTriple { x: pick(&a.x, d.x)?, y: pick(&a.y, d.y)?, z: pick(&a.z, d.z)? })
}

fn cmd_counterexample_run(g: &GlobalOptions, a: &TripleArgs, resolution: usize, out: Option<&Path>) -> Result<()> {
    let t = triple(a)?;
    let info = RunInfo::from_params(
        &json!({ "command": "counterexample run", "triple": t, "box": a.half_width, "resolution": resolution }),
        resolve_seed(g.seed, None)?,
    );
    announce(&info);
    let report = run_counterexample(&t, resolution, a.half_width)?;
    verbose(g, || format!("fXY = {}, fXZ = {}, fYZ = {}", report.f_xy, report.f_xz, report.f_yz));
    output::emit_json(out, &report, &info)
}

fn cmd_counterexample_contour(g: &GlobalOptions, a: &TripleArgs, resolution: usize, out_dir: &Path) -> Result<()> {
    let t = triple(a)?;
    let info = RunInfo::from_params(
        &json!({ "command": "counterexample contour", "triple": t, "box": a.half_width, "resolution": resolution }),
        resolve_seed(g.seed, None)?,
    );
    announce(&info);
    let mut files = Vec::new();
    for (name, x, y) in [("XY", t.x, t.y), ("XZ", t.x, t.z), ("YZ", t.y, t.z)] {
        let gammas: &[Gamma] = if reduction_applies(&x, &y) { &Gamma::REDUCED } else { &Gamma::ALL };
        for &gamma in gammas {
            let file = format!("contour_{name}_{}.csv", gamma.as_str());
            let mut w = output::create(&out_dir.join(&file))?;
            writeln!(w, "{}", info.csv_comment())?;
            let (min, a1, a2) = contour_grid(&x, &y, gamma, a.half_width, resolution, &mut w)?;
            w.flush()?;
            files.push(json!({ "file": file, "pair": name, "gamma": gamma, "grid_min": min, "alpha1": a1, "alpha2": a2 }));
        }
    }
    let manifest = json!({ "files": files, "resolution": resolution, "box": a.half_width });
    output::write_json(&out_dir.join("contour.json"), &manifest, &info)?;
    output::emit_json(None, &manifest, &info)
}
