use std::path::Path;

use rqeom::backends::{
    hardware_noise_model, load_calibration, reference_calibration, Backend, NoiseModel, NoiseScope, NoiseSpec, ReadoutError,
};
use rqeom::eom::{build_excitation_pool, count_observables, ExcitationBasis, Method, SourceSelection};
use rqeom::lattice::{high_symmetry_point, KPath, KPoint, MaterialParams};
use rqeom::parallel::Parallelism;
use rqeom::pipeline::{run, KPointResult, RunConfig};
use rqeom::solver::{aggregate_trials, group_degenerate, Grouping, N_GAPS};
use serde::Serialize;

use crate::args::{BackendArg, BackendArgs, BandsArgs, CountArgs, EtaSweepArgs, ModelArgs, TrialsArgs};
use crate::error::CliError;
use crate::manifest::{RunManifest, TOOL};
use crate::output::{fmt_f64, CsvTable};
use crate::svg::band_plot;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A rendered output file, or stdout when `path` is unset.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: Option<String>,
    pub content: String,
}

fn path_string(p: &Option<std::path::PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

fn resolve_backend(args: &BackendArgs) -> Result<(Backend, Option<String>), CliError> {
    let calibration = || -> Result<_, CliError> {
        Ok(match &args.calibration {
            Some(path) => (load_calibration(path, args.cx.as_deref())?, path.display().to_string()),
            None => (reference_calibration(), "builtin".to_string()),
        })
    };
    let qubits: [usize; 3] = args
        .qubits
        .as_slice()
        .try_into()
        .map_err(|_| CliError::Config(format!("--qubits needs exactly three indices, got {:?}", args.qubits)))?;
    let channel = |p: f64| -> Result<NoiseModel, CliError> { Ok(NoiseModel::from_spec(&NoiseSpec::new(p, args.eta, args.scope.into())?)?) };
    let backend = match args.backend {
        BackendArg::Exact => (Backend::Exact, None),
        BackendArg::Noisy => (Backend::Noisy { noise: channel(args.p.unwrap_or(0.05))? }, None),
        BackendArg::Shots => {
            let noise = args.p.map(channel).transpose()?;
            if args.readout {
                let (profile, source) = calibration()?;
                let model = hardware_noise_model(&profile, qubits)?;
                (Backend::Shots { noise, shots: args.shots, readout: Some(model.readout) }, Some(source))
            } else {
                (Backend::Shots { noise, shots: args.shots, readout: None::<[ReadoutError; 3]> }, None)
            }
        }
        BackendArg::Hardware => {
            let (profile, source) = calibration()?;
            (Backend::Hardware { model: hardware_noise_model(&profile, qubits)?, shots: args.shots }, Some(source))
        }
    };
    backend.0.validate()?;
    Ok(backend)
}

struct Base {
    material: String,
    material_params: MaterialParams,
    method: Method,
    orbitals: Vec<usize>,
    sources: Option<Vec<usize>>,
    pool: rqeom::eom::PoolKind,
    rank_tol: Option<f64>,
}

fn base(model: &ModelArgs) -> Result<Base, CliError> {
    let orbitals = match &model.sources {
        Some(s) => s.len(),
        None => model.orbitals,
    };
    Ok(Base {
        material: model.material.clone(),
        material_params: MaterialParams::resolve(&model.material)?,
        method: model.method.into(),
        orbitals: vec![orbitals],
        sources: model.sources.clone(),
        pool: model.pool.into(),
        rank_tol: model.rank_tol,
    })
}

fn manifest(command: &str, base: Base, backend: (Backend, Option<String>), seed: u64, trials: usize) -> RunManifest {
    RunManifest {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: command.into(),
        material: base.material,
        material_params: base.material_params,
        method: base.method,
        orbitals: base.orbitals,
        sources: base.sources,
        pool: base.pool,
        backend: backend.0,
        calibration: backend.1,
        rank_tol: base.rank_tol,
        trials,
        seed,
        path: None,
        points: None,
        kpoints: None,
        etas: None,
        outliers: None,
        group: false,
        out: None,
        svg: None,
        scatter: None,
    }
}

pub fn bands_manifest(args: &BandsArgs) -> Result<RunManifest, CliError> {
    let mut m = manifest("bands", base(&args.model)?, resolve_backend(&args.backend)?, args.backend.seed, args.trials);
    m.path = Some(args.path.clone());
    m.points = Some(args.points);
    m.out = path_string(&args.out);
    m.svg = path_string(&args.svg);
    Ok(m)
}

pub fn trials_manifest(args: &TrialsArgs) -> Result<RunManifest, CliError> {
    let backend = resolve_backend(&args.backend)?;
    if !backend.0.is_stochastic() {
        return Err(CliError::Config("trials needs a stochastic backend (shots or hardware)".into()));
    }
    let mut m = manifest("trials", base(&args.model)?, backend, args.backend.seed, args.trials);
    m.kpoints = Some(vec![args.kpoint.clone()]);
    m.outliers = args.outliers;
    m.group = args.group;
    m.out = path_string(&args.out);
    m.scatter = path_string(&args.scatter);
    Ok(m)
}

pub fn default_etas() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

pub fn eta_sweep_manifest(args: &EtaSweepArgs) -> Result<RunManifest, CliError> {
    let base = Base {
        material: args.material.clone(),
        material_params: MaterialParams::resolve(&args.material)?,
        method: args.method.into(),
        orbitals: args.orbitals.clone(),
        sources: None,
        pool: args.pool.into(),
        rank_tol: args.rank_tol,
    };
    let scope: NoiseScope = args.scope.into();
    // The per-η backends are derived at run time; this records p and scope.
    let noise = NoiseModel::from_spec(&NoiseSpec::new(args.p, 0.25, scope)?)?;
    let mut m = manifest("eta-sweep", base, (Backend::Noisy { noise }, None), 0, 1);
    let etas = args.etas.clone().unwrap_or_else(default_etas);
    for eta in &etas {
        NoiseSpec::new(args.p, *eta, scope)?;
    }
    m.etas = Some(etas);
    m.kpoints = Some(args.kpoints.clone());
    m.out = path_string(&args.out);
    Ok(m)
}

fn basis(m: &RunManifest, orbitals: usize) -> Result<ExcitationBasis, CliError> {
    let selection = match &m.sources {
        Some(s) => SourceSelection::Explicit(s.clone()),
        None => SourceSelection::Preset,
    };
    Ok(build_excitation_pool(orbitals, &selection, m.pool)?)
}

fn config(m: &RunManifest, orbitals: usize, backend: Backend, par: Parallelism) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::new(m.material_params.clone(), m.method, basis(m, orbitals)?, backend);
    cfg.trials = m.trials;
    cfg.seed = m.seed;
    cfg.rank_tol = m.rank_tol;
    cfg.parallelism = par;
    Ok(cfg)
}

/// `L` / `G` / `kx,ky,kz`.
pub fn parse_kpoint(text: &str) -> Result<KPoint, CliError> {
    if let Ok(k) = high_symmetry_point(text.trim()) {
        return Ok(k);
    }
    let parts: Vec<f64> = text.split(',').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| CliError::Config(format!("bad k-point {text:?}")))?;
    match parts.as_slice() {
        [x, y, z] if KPoint::new(*x, *y, *z).is_finite() => Ok(KPoint::new(*x, *y, *z)),
        _ => Err(CliError::Config(format!("bad k-point {text:?}: expected a label or kx,ky,kz"))),
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Per-gap mean and spread over the trials that produced that gap.
fn gap_columns(r: &KPointResult) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
    (0..N_GAPS)
        .map(|i| {
            let s: Vec<f64> = r.trials.iter().filter_map(|t| t.gaps.get(i).copied()).collect();
            if s.is_empty() {
                (None, None)
            } else {
                (Some(mean(&s)), Some(std_dev(&s)))
            }
        })
        .unzip()
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn execute(m: &RunManifest, par: Parallelism) -> Result<Vec<Artifact>, CliError> {
    match m.command.as_str() {
        "bands" => bands(m, par),
        "eta-sweep" => eta_sweep(m, par),
        "trials" => trials(m, par),
        other => Err(CliError::Config(format!("manifest names unknown command {other:?}"))),
    }
}

fn bands(m: &RunManifest, par: Parallelism) -> Result<Vec<Artifact>, CliError> {
    let path = KPath::parse(m.path.as_deref().unwrap_or_default(), m.points.unwrap_or(20))?;
    let ks: Vec<KPoint> = path.kpoints().collect();
    let results = run(&config(m, m.orbitals[0], m.backend.clone(), par)?, &ks)?;
    let with_std = m.trials > 1;

    let mut header: Vec<String> = ["distance", "kx", "ky", "kz", "tick", "E0"].iter().map(|s| s.to_string()).collect();
    header.extend((1..=N_GAPS).map(|n| format!("E0{n}")));
    header.extend((1..=N_GAPS).map(|n| format!("E{n}")));
    if with_std {
        header.extend((1..=N_GAPS).map(|n| format!("E0{n}_std")));
    }
    header.extend((1..=N_GAPS).map(|n| format!("ref_E0{n}")));
    header.extend((0..=N_GAPS).map(|n| format!("ref_E{n}")));
    header.push("shortfall_trials".into());
    let mut table = CsvTable::new(header);

    let mut computed = Vec::with_capacity(results.len());
    for (i, (sample, r)) in path.samples.iter().zip(&results).enumerate() {
        let first_of_segment = i % path.points_per_segment == 0;
        let last_of_segment = i % path.points_per_segment == path.points_per_segment - 1;
        let tick = if first_of_segment {
            path.ticks[sample.segment].label.clone()
        } else if last_of_segment {
            path.ticks[sample.segment + 1].label.clone()
        } else {
            String::new()
        };
        let e0 = r.exact_levels[0];
        let (means, stds) = gap_columns(r);
        let mut row = vec![fmt_f64(sample.distance), fmt_f64(r.k.kx), fmt_f64(r.k.ky), fmt_f64(r.k.kz), tick, fmt_f64(e0)];
        row.extend(means.iter().map(|g| opt(*g)));
        row.extend(means.iter().map(|g| opt(g.map(|g| e0 + g))));
        if with_std {
            row.extend(stds.iter().map(|s| opt(*s)));
        }
        row.extend(r.exact_gaps.iter().map(|g| fmt_f64(*g)));
        row.extend(r.exact_levels.iter().map(|e| fmt_f64(*e)));
        row.push(r.trials.iter().filter(|t| t.shortfall).count().to_string());
        table.push(row);
        computed.push(means.iter().map(|g| g.map(|g| e0 + g)).collect::<Vec<_>>());
    }

    let mut out = vec![Artifact { path: m.out.clone(), content: m.csv_header() + &table.render()? }];
    if let Some(svg_path) = &m.svg {
        let distances: Vec<f64> = path.samples.iter().map(|s| s.distance).collect();
        let reference: Vec<Vec<f64>> = results.iter().map(|r| r.exact_levels.clone()).collect();
        let svg = band_plot(&m.svg_header(), &distances, &reference, &computed, &path.ticks, &m.material_params.name);
        out.push(Artifact { path: Some(svg_path.clone()), content: svg });
    }
    Ok(out)
}

fn eta_sweep(m: &RunManifest, par: Parallelism) -> Result<Vec<Artifact>, CliError> {
    let (p, scope) = match &m.backend {
        Backend::Noisy { noise: NoiseModel::Global { p } } => (*p, NoiseScope::Global),
        Backend::Noisy { noise: NoiseModel::PerQubit { channels } } => (channels[0].p, NoiseScope::PerQubit),
        _ => return Err(CliError::Config("eta-sweep needs a deterministic noisy backend".into())),
    };
    let labels = m.kpoints.clone().unwrap_or_default();
    let ks: Vec<KPoint> = labels.iter().map(|l| parse_kpoint(l)).collect::<Result<_, _>>()?;
    let mut table = CsvTable::new(
        ["eta", "m", "kpoint", "gap_index", "gap_eV", "exact_eV", "deviation_meV"].iter().map(|s| s.to_string()).collect(),
    );
    for &eta in m.etas.as_deref().unwrap_or_default() {
        let noise = NoiseModel::from_spec(&NoiseSpec::new(p, eta, scope)?)?;
        for &orbitals in &m.orbitals {
            let results = run(&config(m, orbitals, Backend::Noisy { noise }, par)?, &ks)?;
            for (label, r) in labels.iter().zip(&results) {
                let gaps = &r.trials[0].gaps;
                for (i, exact) in r.exact_gaps.iter().enumerate() {
                    let g = gaps.get(i).copied();
                    table.push(vec![
                        fmt_f64(eta),
                        orbitals.to_string(),
                        label.clone(),
                        (i + 1).to_string(),
                        opt(g),
                        fmt_f64(*exact),
                        opt(g.map(|g| (g - exact) * 1e3)),
                    ]);
                }
            }
        }
    }
    Ok(vec![Artifact { path: m.out.clone(), content: m.csv_header() + &table.render()? }])
}

#[derive(Serialize)]
struct TrialsReport<'a> {
    manifest: &'a RunManifest,
    k: [f64; 3],
    e0: f64,
    exact_gaps: &'a [f64],
    statistics: rqeom::solver::TrialStatistics,
    /// Means with degenerate multiplets averaged, when requested.
    grouped_means: Option<Vec<f64>>,
}

fn trials(m: &RunManifest, par: Parallelism) -> Result<Vec<Artifact>, CliError> {
    let label = m.kpoints.as_ref().and_then(|k| k.first()).cloned().unwrap_or_else(|| "G".into());
    let k = parse_kpoint(&label)?;
    let r = run(&config(m, m.orbitals[0], m.backend.clone(), par)?, &[k])?.remove(0);
    let statistics = aggregate_trials(&r.trials, m.outliers)?;
    let grouped_means = if m.group {
        let means = statistics.means();
        let grouping = if means.len() == N_GAPS { Grouping::default() } else { Grouping::Tolerance(rqeom::solver::DEGENERACY_TOL) };
        Some(group_degenerate(&means, &grouping)?.values)
    } else {
        None
    };
    let mut scatter = CsvTable::new(["trial", "gap_index", "value_eV", "outlier"].iter().map(|s| s.to_string()).collect());
    for g in &statistics.gaps {
        for (t, (v, o)) in g.samples.iter().zip(&g.outliers).enumerate() {
            scatter.push(vec![t.to_string(), (g.index + 1).to_string(), fmt_f64(*v), o.to_string()]);
        }
    }
    let report = TrialsReport { manifest: m, k: k.as_array(), e0: r.exact_levels[0], exact_gaps: &r.exact_gaps, statistics, grouped_means };
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Config(e.to_string()))? + "\n";
    let mut out = vec![Artifact { path: m.out.clone(), content: json }];
    if let Some(path) = &m.scatter {
        out.push(Artifact { path: Some(path.clone()), content: m.csv_header() + &scatter.render()? });
    }
    Ok(out)
}

pub fn count(args: &CountArgs) -> String {
    let n = args.n.unwrap_or(args.orbitals * rqeom::eom::PoolKind::from(args.pool).targets_per_source());
    let method: Method = args.method.into();
    let ratio = count_observables(Method::Qeom, n) as f64 / count_observables(Method::Rqeom, n) as f64;
    format!("{method} n={n} observables={}\nratio qeom/rqeom={ratio:.1}\n", count_observables(method, n))
}

pub fn write_artifacts(artifacts: &[Artifact]) -> Result<(), CliError> {
    for a in artifacts {
        match &a.path {
            Some(p) => std::fs::write(Path::new(p), &a.content).map_err(|e| CliError::Config(format!("writing {p}: {e}")))?,
            None => print!("{}", a.content),
        }
    }
    Ok(())
}
