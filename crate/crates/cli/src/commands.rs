use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use pseudocone::fixtures::{random_active_pseudocone, random_coefficients, random_pseudocone};
use pseudocone::io::{
    check_schema, write_grid_csv, write_measure_csv, write_radial_csv, ConeSpec, FacetSpec,
    MeasureSpec, Meta, PseudoConeSpec, SCHEMA_VERSION,
};
use pseudocone::{
    distance_upper_bound, dual_curvature, dual_volume, jg_derivative_fd, radial_measure,
    solve_on_grid, sphere_grid, Cone, DecayPair, DiscreteMeasure, Facet, GridScheme, PseudoCone,
    QuadratureGrid, SolverOptions, SolverResult, SolverStatus,
};

use crate::args::*;
use crate::error::{CliError, CliResult};

/// Attempts at drawing a random pseudo-cone whose facets are all active.
const ACTIVE_TRIES: usize = 1000;

/// A cone file: the cone fields plus an optional schema tag.
#[derive(Debug, Serialize, Deserialize)]
struct ConeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    #[serde(flatten)]
    cone: ConeSpec,
}

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::ConeInfo(a) => cone_info(a),
        Command::Grid(a) => grid(a),
        Command::Make(a) => make(a),
        Command::Eval(a) => eval(a),
        Command::Measure(a) => measure(a),
        Command::DualVolume(a) => dual_volume_cmd(a),
        Command::CheckDerivative(a) => check_derivative(a),
        Command::Solve(a) => solve(a),
        Command::Roundtrip(a) => roundtrip(a),
    }
}

fn read_json<D: DeserializeOwned>(path: &Path) -> CliResult<D> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| {
        use serde_json::error::Category;
        match source.classify() {
            Category::Data => CliError::Schema {
                path: path.into(),
                message: source.to_string(),
            },
            Category::Io | Category::Syntax | Category::Eof => CliError::Malformed {
                path: path.into(),
                source,
            },
        }
    })
}

fn schema_ok(path: &Path, schema: Option<&str>) -> CliResult<()> {
    check_schema(schema).map_err(|e| CliError::Schema {
        path: path.into(),
        message: e.to_string(),
    })
}

fn load_cone(path: &Path) -> CliResult<Cone<f64>> {
    let doc: ConeDoc = read_json(path)?;
    schema_ok(path, doc.schema.as_deref())?;
    Ok(doc.cone.to_cone()?)
}

fn load_pseudocone(path: &Path) -> CliResult<PseudoCone<f64>> {
    let spec: PseudoConeSpec = read_json(path)?;
    schema_ok(path, spec.schema.as_deref())?;
    Ok(spec.to_pseudocone()?)
}

fn load_measure(path: &Path) -> CliResult<DiscreteMeasure<f64>> {
    let spec: MeasureSpec = read_json(path)?;
    schema_ok(path, spec.schema.as_deref())?;
    Ok(spec.to_measure()?)
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

/// Writes to `out`, or stdout when absent.
fn emit(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(p) => write_file(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn pretty<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable document");
    s.push('\n');
    s
}

fn scheme_of(arg: Option<SchemeArg>, dim: usize) -> GridScheme {
    match arg {
        Some(SchemeArg::Midpoint) => GridScheme::Midpoint,
        Some(SchemeArg::Fibonacci) => GridScheme::Fibonacci,
        Some(SchemeArg::Random) => GridScheme::Random,
        None => GridScheme::default_for(dim),
    }
}

fn build_grid(cone: &Cone<f64>, g: &GridArgs) -> CliResult<QuadratureGrid<f64>> {
    let scheme = scheme_of(g.scheme, cone.dim());
    Ok(sphere_grid(cone, g.grid_n, scheme, g.grid_seed)?)
}

fn grid_meta(grid: &QuadratureGrid<f64>) -> Meta {
    let mut m = Meta::new();
    m.insert("grid_n".into(), json!(grid.resolution()));
    m.insert("grid_nodes".into(), json!(grid.len()));
    m.insert("scheme".into(), json!(grid.scheme().name()));
    m.insert("grid_seed".into(), json!(grid.seed()));
    m
}

fn banner(meta: &Meta) -> Vec<(&str, String)> {
    meta.iter()
        .map(|(k, v)| {
            let s = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            (k.as_str(), s)
        })
        .collect()
}

fn decay_of(kind: DecayArg, q: f64) -> CliResult<DecayPair<f64>> {
    Ok(match kind {
        DecayArg::Power => DecayPair::power(q)?,
        DecayArg::Exponential => DecayPair::exponential(),
    })
}

fn decay_name(kind: DecayArg) -> &'static str {
    match kind {
        DecayArg::Power => "power",
        DecayArg::Exponential => "exponential",
    }
}

fn cone_info(a: ConeInfoArgs) -> CliResult<()> {
    let cone = load_cone(&a.cone)?;
    let mut doc = json!({
        "schema": SCHEMA_VERSION,
        "dim": cone.dim(),
        "kind": if cone.is_circular() { "circular" } else { "polyhedral" },
        "omega_area": cone.omega_area(),
        "dual": ConeSpec::from_cone(&cone.dual()),
        "q": a.q,
        "c2": distance_upper_bound(&cone, a.q)?,
    });
    let mut meta = Meta::new();
    if let (Some(samples), Some(seed)) = (a.samples, a.seed) {
        let est = cone.omega_area_monte_carlo(samples, seed);
        doc["omega_area_monte_carlo"] = json!({
            "estimate": est.value,
            "std_error": est.std_error,
            "samples": est.samples,
        });
        meta.insert("seed".into(), json!(seed));
    }
    doc["meta"] = json!(meta);
    emit(a.out.as_deref(), &pretty(&doc))
}

fn grid(a: GridCmdArgs) -> CliResult<()> {
    let cone = load_cone(&a.cone)?;
    let grid = build_grid(&cone, &a.grid)?;
    let mut buf = Vec::new();
    write_grid_csv(&mut buf, &grid, &banner(&grid_meta(&grid))).expect("write to memory");
    emit(
        a.out.as_deref(),
        &String::from_utf8(buf).expect("utf-8 csv"),
    )
}

fn make(a: MakeArgs) -> CliResult<()> {
    let cone = load_cone(&a.cone)?;
    let mut meta = Meta::new();
    let k = if let Some(path) = &a.facets {
        let list: Vec<FacetSpec> = read_json(path)?;
        PseudoCone::wulff_shape(
            cone,
            list.into_iter().map(|f| Facet::new(f.u, f.hbar)).collect(),
        )?
    } else if let Some(m) = a.random {
        let seed = a.seed.expect("clap requires --seed with --random");
        meta.insert("seed".into(), json!(seed));
        meta.insert("facets".into(), json!(m));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_pseudocone(&cone, m, &mut rng)?
    } else {
        let z = a.translate.expect("clap requires one source");
        meta.insert("translate".into(), json!(z));
        PseudoCone::translated_cone(cone, &z)?
    };
    let mut spec = PseudoConeSpec::from_pseudocone(&k);
    spec.meta = Some(meta);
    emit(a.out.as_deref(), &pretty(&spec))
}

fn eval(a: EvalArgs) -> CliResult<()> {
    let k = load_pseudocone(&a.pseudocone)?;
    let grid = build_grid(k.cone(), &a.grid)?;
    let mut buf = Vec::new();
    write_radial_csv(&mut buf, &k, &grid, &banner(&grid_meta(&grid)))?;
    emit(
        a.out.as_deref(),
        &String::from_utf8(buf).expect("utf-8 csv"),
    )
}

fn measure(a: MeasureArgs) -> CliResult<()> {
    let k = load_pseudocone(&a.pseudocone)?;
    let grid = build_grid(k.cone(), &a.grid)?;
    let mut meta = grid_meta(&grid);
    let m = match a.kind {
        MeasureKind::Radial => {
            meta.insert("kind".into(), json!("radial"));
            meta.insert("decay".into(), json!(decay_name(a.decay)));
            if a.decay == DecayArg::Power {
                meta.insert("q".into(), json!(a.q));
            }
            radial_measure(&k, &decay_of(a.decay, a.q)?, &grid)?
        }
        MeasureKind::Curvature => {
            meta.insert("kind".into(), json!("dual_curvature"));
            meta.insert("q".into(), json!(a.q));
            dual_curvature(&k, a.q, &grid)?
        }
    };
    if let Some(csv) = &a.csv {
        let mut buf = Vec::new();
        write_measure_csv(&mut buf, &m, &banner(&meta)).expect("write to memory");
        write_file(csv, &String::from_utf8(buf).expect("utf-8 csv"))?;
    }
    let mut spec = MeasureSpec::from_measure(&m);
    spec.meta = Some(meta);
    emit(a.out.as_deref(), &pretty(&spec))
}

fn dual_volume_cmd(a: DualVolumeArgs) -> CliResult<()> {
    let k = load_pseudocone(&a.pseudocone)?;
    let grid = build_grid(k.cone(), &a.grid)?;
    let value = dual_volume(&k, a.q, &grid)?;
    let mut meta = grid_meta(&grid);
    meta.insert("q".into(), json!(a.q));
    let doc = json!({
        "schema": SCHEMA_VERSION,
        "dual_volume": value,
        "meta": meta,
    });
    emit(a.out.as_deref(), &pretty(&doc))
}

fn check_derivative(a: CheckDerivativeArgs) -> CliResult<()> {
    let k = load_pseudocone(&a.pseudocone)?;
    let grid = build_grid(k.cone(), &a.grid)?;
    let mut meta = grid_meta(&grid);
    let g = match (&a.g, a.seed) {
        (Some(g), _) => g.clone(),
        (None, Some(seed)) => {
            meta.insert("seed".into(), json!(seed));
            random_coefficients(k.len(), &mut ChaCha8Rng::seed_from_u64(seed))
        }
        (None, None) => unreachable!("clap requires --g or --seed"),
    };
    meta.insert("decay".into(), json!(decay_name(a.decay)));
    if a.decay == DecayArg::Power {
        meta.insert("q".into(), json!(a.q));
    }
    let report = jg_derivative_fd(&k, &g, &decay_of(a.decay, a.q)?, &grid, &a.t)?;
    let mut doc = serde_json::to_value(&report).expect("serialisable report");
    doc["schema"] = json!(SCHEMA_VERSION);
    doc["g"] = json!(g);
    doc["meta"] = json!(meta);
    emit(a.out.as_deref(), &pretty(&doc))
}

fn solver_options(s: &SolverArgs) -> SolverOptions<f64> {
    SolverOptions {
        max_iter: s.max_iter,
        grad_tol: s.tol,
        grid_resolution: s.grid.grid_n,
        seed: s.grid.grid_seed,
        ..SolverOptions::default()
    }
}

fn status_name(s: SolverStatus) -> &'static str {
    match s {
        SolverStatus::Converged => "converged",
        SolverStatus::MaxIter => "max_iter",
        SolverStatus::LineSearchFailure => "line_search_failure",
    }
}

fn result_doc(r: &SolverResult<f64>, meta: &Meta) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "status": status_name(r.status),
        "iterations": r.iterations,
        "grad_norm": r.grad_norm,
        "residual": r.residual,
        "solution_mass": r.solution_mass,
        "lambda": r.lambda,
        "c2": r.c2,
        "min_distance": r.min_distance,
        "max_distance": r.max_distance,
        "bound_violations": r.bound_violations,
        "inactive_facets": r.inactive_facets,
        "grid_nodes": r.grid_nodes,
        "depths": r.solution.depths(),
        "phi_trace": r.phi_trace,
        "meta": meta,
    })
}

fn trace_csv(r: &SolverResult<f64>, meta: &Meta) -> String {
    let mut s = pseudocone::io::csv_banner(&banner(meta));
    s.push_str("\niteration,phi,grad_norm,residual,step,distance\n");
    for row in &r.trace {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.iteration, row.phi, row.grad_norm, row.residual, row.step, row.distance
        ));
    }
    s
}

/// `dir/stem.ext` for the solution path `dir/stem.json`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "solution".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Writes the solution, result summary and trace next to `out`.
fn write_solution(out: &Path, r: &SolverResult<f64>, meta: &Meta) -> CliResult<()> {
    let mut spec = PseudoConeSpec::from_pseudocone(&r.solution);
    spec.meta = Some(meta.clone());
    write_file(out, &pretty(&spec))?;
    write_file(&sibling(out, ".result.json"), &pretty(&result_doc(r, meta)))?;
    write_file(&sibling(out, ".trace.csv"), &trace_csv(r, meta))
}

fn solve(a: SolveArgs) -> CliResult<()> {
    let cone = load_cone(&a.cone)?;
    let target = load_measure(&a.measure)?;
    let grid = build_grid(&cone, &a.solver.grid)?;
    let opts = solver_options(&a.solver);
    let r = solve_on_grid(&cone, &target, a.solver.q, &grid, &opts)?;
    let mut meta = grid_meta(&grid);
    meta.insert("q".into(), json!(a.solver.q));
    meta.insert("tol".into(), json!(a.solver.tol));
    write_solution(&a.out, &r, &meta)?;
    println!(
        "{}",
        json!({
            "schema": SCHEMA_VERSION,
            "status": status_name(r.status),
            "iterations": r.iterations,
            "residual": r.residual,
        })
    );
    if r.status != SolverStatus::Converged {
        return Err(CliError::NotConverged {
            status: status_name(r.status).into(),
            iterations: r.iterations,
        });
    }
    Ok(())
}

fn roundtrip(a: RoundtripArgs) -> CliResult<()> {
    let cone = load_cone(&a.cone)?;
    let grid = build_grid(&cone, &a.solver.grid)?;
    let q = a.solver.q;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let original = random_active_pseudocone(&cone, a.facets, &grid, &mut rng, ACTIVE_TRIES)?;
    let target = dual_curvature(&original, q, &grid)?;
    let r = solve_on_grid(&cone, &target, q, &grid, &solver_options(&a.solver))?;

    let mut meta = grid_meta(&grid);
    meta.insert("seed".into(), json!(a.seed));
    meta.insert("facets".into(), json!(a.facets));
    meta.insert("q".into(), json!(q));
    meta.insert("tol".into(), json!(a.solver.tol));

    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        let mut k0 = PseudoConeSpec::from_pseudocone(&original);
        k0.meta = Some(meta.clone());
        write_file(&dir.join("original.json"), &pretty(&k0))?;
        let mut phi = MeasureSpec::from_measure(&target);
        phi.meta = Some(meta.clone());
        write_file(&dir.join("target.json"), &pretty(&phi))?;
        write_solution(&dir.join("solution.json"), &r, &meta)?;
    }

    let passed = r.residual <= a.threshold;
    let doc = json!({
        "schema": SCHEMA_VERSION,
        "passed": passed,
        "residual": r.residual,
        "threshold": a.threshold,
        "status": status_name(r.status),
        "iterations": r.iterations,
        "grad_norm": r.grad_norm,
        "original_depths": original.depths(),
        "solution_depths": r.solution.depths(),
        "meta": meta,
    });
    print!("{}", pretty(&doc));
    if !passed {
        return Err(CliError::Residual {
            residual: r.residual,
            threshold: a.threshold,
        });
    }
    Ok(())
}
