use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Parser;
use implaus::im::{
    plausibility_region, AssociationModel, Distorted, NestedRandomSet, OneSided, ParamGrid, Symmetric,
};
use implaus::models::{build, constrained_focal_diagnostic, ModelParams, NormalMeanModel};
use implaus::par::{self, Execution};
use implaus::pvalue::{plausibility_equals_pvalue, synthesize_pvalue_set, SupConfig, SupMethod, Tail, TestStatistic};
use implaus::sets::{Assertion, Side};
use implaus::stats::summarize;
use implaus::validity::{audit_region_coverage, audit_uniformity, audit_validity, coherence_scan};
use serde::Serialize;
use serde_json::{json, Value};

use crate::ingest::{read_values, Format};
use crate::null::parse_null;
use crate::output::{envelope, to_pretty, write_file, write_manifest, RunManifest, MANIFEST_SCHEMA, SCHEMA_DOC};
use crate::{
    svg, Cli, CoherenceArgs, Command, CurveArgs, Failure, GridArgs, IngestArgs, MethodArg, ModelArgs, NullArgs,
    ObsArgs, PrsArg, PvalArgs, RegionArgs, RunArgs, ShapeArg, StatArg, ValidateArgs,
};

/// Text for stdout and the exit code.
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

/// What a command hands back before the envelope, output file and manifest.
struct Done {
    body: Value,
    passed: bool,
    files: Vec<PathBuf>,
    record: Record,
}

struct Record {
    model: Option<String>,
    params: Value,
    data_source: String,
    seed: Option<u64>,
    tail: Tail,
    output: Option<PathBuf>,
}

impl Record {
    fn new(model: Option<&ModelArgs>, params: &impl Serialize, data_source: String, run: Option<&RunArgs>) -> Self {
        Self {
            model: model.map(|m| m.model.clone()),
            params: serde_json::to_value(params).unwrap_or(Value::Null),
            data_source,
            seed: run.map(|r| r.seed),
            tail: run.map_or(Tail::Weak, |r| r.tail.into()),
            output: run.and_then(|r| r.output.clone()),
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Pval(_) => "pval",
        Command::Curve(_) => "curve",
        Command::Region(_) => "region",
        Command::Validate(_) => "validate",
        Command::Ingest(_) => "ingest",
        Command::Coherence(_) => "coherence",
        Command::Replay(_) => "replay",
        Command::Schema => "schema",
    }
}

pub fn run(cli: Cli, argv: Vec<String>) -> Result<Outcome, Failure> {
    let name = command_name(&cli.command);
    let done = match cli.command {
        Command::Pval(a) => pval(&a),
        Command::Curve(a) => curve(&a),
        Command::Region(a) => region(&a),
        Command::Validate(a) => validate(&a),
        Command::Ingest(a) => ingest(&a),
        Command::Coherence(a) => coherence(&a),
        Command::Replay(a) => return replay(&a.manifest),
        Command::Schema => {
            return Ok(Outcome {
                text: SCHEMA_DOC.to_string(),
                code: 0,
            })
        }
    };
    let done = done.map_err(|f| match f {
        Failure::Refused { message, body } => Failure::Refused {
            body: envelope(name, "refused", body),
            message,
        },
        other => other,
    })?;
    let doc = envelope(name, if done.passed { "ok" } else { "fail" }, done.body);
    let text = to_pretty(&doc);
    let mut outputs = done.files;
    if let Some(out) = &done.record.output {
        write_file(out, &text).map_err(Failure::Io)?;
        outputs.insert(0, out.clone());
    }
    if !outputs.is_empty() {
        let mut argv = argv;
        if let Some(seed) = done.record.seed {
            if !argv.iter().any(|a| a == "--seed" || a.starts_with("--seed=")) {
                argv.extend(["--seed".to_string(), seed.to_string()]);
            }
        }
        let manifest = RunManifest {
            schema: MANIFEST_SCHEMA.into(),
            command: name.into(),
            model: done.record.model,
            params: done.record.params,
            data_source: done.record.data_source,
            seed: done.record.seed.unwrap_or(0),
            tail_convention: done.record.tail.to_string(),
            outputs,
            argv,
        };
        write_manifest(&manifest).map_err(Failure::Io)?;
    }
    Ok(Outcome {
        text,
        code: if done.passed { 0 } else { 4 },
    })
}

fn replay(path: &Path) -> Result<Outcome, Failure> {
    let m = crate::output::read_manifest(path).map_err(Failure::Usage)?;
    let cli = Cli::try_parse_from(std::iter::once("implaus".to_string()).chain(m.argv.iter().cloned()))
        .map_err(|e| Failure::Usage(format!("manifest arguments no longer parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(Failure::Usage("a manifest cannot record a replay".into()));
    }
    run(cli, m.argv)
}

/// A built model with the observation it will be evaluated at.
struct Resolved {
    model: Arc<dyn AssociationModel>,
    params: ModelParams,
    x: f64,
    data_source: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn model_params(m: &ModelArgs, n: Option<u64>) -> Result<ModelParams, Failure> {
    let n = match (n, m.n) {
        (Some(d), Some(given)) if d != given => {
            return Err(usage(format!("--n {given} disagrees with the {d} observations in --data")))
        }
        (Some(d), _) => d,
        (None, Some(given)) => given,
        (None, None) if m.model.starts_with("normal-mean") => 1,
        (None, None) => return Err(usage(format!("--n is required for {}", m.model))),
    };
    Ok(ModelParams {
        n,
        sigma: m.sigma,
        lo: m.lo,
        hi: m.hi,
    })
}

fn build_model(m: &ModelArgs, n: Option<u64>) -> Result<(Arc<dyn AssociationModel>, ModelParams), Failure> {
    let params = model_params(m, n)?;
    let model = build(&m.model, &params)?;
    Ok((model, params))
}

fn resolve(m: &ModelArgs, o: &ObsArgs) -> Result<Resolved, Failure> {
    let (x, n, data_source) = match &o.data {
        Some(path) => {
            let values = read_values(path, o.column.as_deref(), None).map_err(Failure::Usage)?;
            let n = values.len() as u64;
            let x = match m.model.as_str() {
                "binomial" => {
                    if values.iter().any(|&v| v != 0.0 && v != 1.0) {
                        return Err(usage("binomial data must be 0/1 outcomes"));
                    }
                    values.iter().sum()
                }
                "normal-variance" => (n - 1) as f64 * summarize(&values)?.s2,
                _ => values.iter().sum::<f64>() / n as f64,
            };
            (x, Some(n), path.display().to_string())
        }
        None => {
            let x = match (o.x, o.s2) {
                (Some(x), _) => Some(x),
                (None, Some(_)) if m.model != "normal-variance" => {
                    return Err(usage("--s2 applies to normal-variance only"))
                }
                _ => None,
            };
            (x.unwrap_or(f64::NAN), None, "inline".to_string())
        }
    };
    let (model, params) = build_model(m, n)?;
    let x = match (o.s2, x.is_nan()) {
        (Some(s2), true) => (params.n - 1) as f64 * s2,
        (None, true) => return Err(usage("give the observation with --x, --s2 or --data")),
        _ => x,
    };
    model.validate_observation(x)?;
    Ok(Resolved {
        model,
        params,
        x,
        data_source,
    })
}

fn resolve_null(n: &NullArgs, space: implaus::sets::Interval) -> Result<Assertion, Failure> {
    let a = match (&n.null, n.theta0.or(n.sigma0_sq)) {
        (Some(spec), _) => return parse_null(spec, space).map_err(Failure::Usage),
        (None, Some(b)) => Assertion::half_line(b, Side::Below, true, space),
        (None, None) => return Err(usage("give the null with --null, --theta0 or --sigma0-sq")),
    };
    if a.is_empty() {
        return Err(usage(format!("the null is empty within the parameter space {space}")));
    }
    Ok(a)
}

/// Exit 3 with the empty-focal u-set when some Θ_x(u) is empty.
fn refuse_if_empty_focal(r: &Resolved) -> Result<(), Failure> {
    let empty = r.model.empty_focal_uset(r.x);
    if empty.is_empty() {
        return Ok(());
    }
    let (measure, witness, notes) = match r.model.name() {
        "normal-mean-constrained" => {
            let m = NormalMeanModel::constrained(r.params.n, r.params.sigma, r.params.lo, r.params.hi)?;
            let d = constrained_focal_diagnostic(&m, r.x)?;
            (d.measure, d.witness_u, d.notes)
        }
        _ => {
            let w = empty
                .parts()
                .iter()
                .max_by(|p, q| (p.1 - p.0).total_cmp(&(q.1 - q.0)))
                .map(|&(a, b)| 0.5 * (a + b));
            (empty.measure(), w, Vec::new())
        }
    };
    let message = format!(
        "focal sets are empty at x = {} for u in {empty} (P_U-measure {measure}); no plausibility is reported",
        r.x
    );
    Err(Failure::Refused {
        body: json!({
            "error": message,
            "diagnostic": {
                "x": r.x,
                "empty_u": empty.parts(),
                "measure": measure,
                "witness_u": witness,
                "notes": notes,
            }
        }),
        message,
    })
}

fn sup_config(run: &RunArgs) -> SupConfig {
    SupConfig::default().with_seed(run.seed).with_tail(run.tail.into())
}

fn pval(a: &PvalArgs) -> Result<Done, Failure> {
    let r = resolve(&a.model, &a.obs)?;
    refuse_if_empty_focal(&r)?;
    let null = resolve_null(&a.null, r.model.param_space())?;
    let stat = match a.stat {
        StatArg::Identity => TestStatistic::identity(),
        StatArg::Distance => TestStatistic::distance_to(null.set().clone()),
    };
    let method = match a.method {
        MethodArg::Auto => SupMethod::Auto,
        MethodArg::ClosedForm => SupMethod::ClosedForm,
        MethodArg::Grid => SupMethod::Grid,
        MethodArg::MonteCarlo => SupMethod::MonteCarlo,
    };
    let cfg = SupConfig {
        mc_samples: a.mc_samples,
        ..sup_config(&a.run)
    }
    .with_method(method);
    let rep = plausibility_equals_pvalue(r.model.as_ref(), &stat, &null, r.x, &cfg)?;
    let body = json!({
        "model": r.model.label(),
        "null": (null.to_string()),
        "x": r.x,
        "statistic": stat.label(),
        "tail": a.run.tail,
        "seed": a.run.seed,
        "pvalue": rep.pvalue,
        "plausibility": rep.plausibility,
        "difference": rep.difference,
        "tolerance": rep.tolerance,
        "matches": rep.matches,
        "method": rep.pvalue_method,
        "diagnostics": rep.notes,
    });
    Ok(Done {
        body,
        passed: true,
        files: Vec::new(),
        record: Record::new(Some(&a.model), a, r.data_source, Some(&a.run)),
    })
}

fn linear_grid(g: &GridArgs, default_points: usize) -> Result<Vec<f64>, Failure> {
    let points = g.points.unwrap_or(default_points);
    if points == 0 {
        return Err(usage("the grid is empty (--points 0)"));
    }
    let from = g.from.ok_or_else(|| usage("--from is required"))?;
    if points == 1 {
        return Ok(vec![from]);
    }
    let to = g.to.ok_or_else(|| usage("--to is required"))?;
    if !(from.is_finite() && to.is_finite()) || to < from {
        return Err(usage("the grid needs finite --from <= --to"));
    }
    Ok(ParamGrid::linspace(from, to, points).points)
}

/// Where the curve crosses `level`, by linear interpolation between rows.
fn crossings(rows: &[(f64, f64)], level: f64) -> Vec<f64> {
    rows.windows(2)
        .filter_map(|w| {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            let (d0, d1) = (y0 - level, y1 - level);
            if d0 == 0.0 {
                Some(x0)
            } else if d0 * d1 < 0.0 {
                Some(x0 + (x1 - x0) * d0 / (d0 - d1))
            } else {
                None
            }
        })
        .collect()
}

fn curve(a: &CurveArgs) -> Result<Done, Failure> {
    let r = resolve(&a.model, &a.obs)?;
    refuse_if_empty_focal(&r)?;
    let grid = linear_grid(&a.grid, 100)?;
    let space = r.model.param_space();
    let side = match a.shape {
        ShapeArg::Below => Side::Below,
        ShapeArg::Above => Side::Above,
    };
    let cfg = SupConfig {
        execution: Execution::Sequential,
        ..sup_config(&a.run)
    };
    let stat = TestStatistic::identity();
    let values = par::map_slice(Execution::default(), &grid, |&b| {
        let null = Assertion::half_line(b, side, true, space);
        if null.is_empty() {
            return Err(usage(format!("grid value {b} leaves an empty null")));
        }
        Ok(plausibility_equals_pvalue(r.model.as_ref(), &stat, &null, r.x, &cfg)?.plausibility)
    });
    let rows: Vec<(f64, f64)> = grid
        .iter()
        .zip(values)
        .map(|(&b, v)| v.map(|pl| (b, pl)))
        .collect::<Result<_, Failure>>()?;

    let mut w = csv::Writer::from_path(&a.csv).map_err(|e| Failure::Io(format!("{}: {e}", a.csv.display())))?;
    let io = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(["theta0", "plausibility"]).map_err(io)?;
    for (b, pl) in &rows {
        w.write_record([b.to_string(), pl.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::Io(e.to_string()))?;
    let mut files = vec![a.csv.clone()];
    if let Some(path) = &a.svg {
        let rel = match a.shape {
            ShapeArg::Below => "≤",
            ShapeArg::Above => "≥",
        };
        let doc = svg::render(
            &rows,
            a.alpha,
            &format!("θ₀ (null θ {rel} θ₀)"),
            &format!("{} at x = {}", r.model.label(), r.x),
        );
        write_file(path, &doc).map_err(Failure::Io)?;
        files.push(path.clone());
    }
    let body = json!({
        "model": r.model.label(),
        "x": r.x,
        "null_shape": a.shape,
        "alpha": a.alpha,
        "rows": rows.len(),
        "csv": a.csv,
        "svg": a.svg,
        "crossings": crossings(&rows, a.alpha),
    });
    Ok(Done {
        body,
        passed: true,
        files,
        record: Record::new(Some(&a.model), a, r.data_source, Some(&a.run)),
    })
}

fn random_set(p: PrsArg) -> Arc<dyn NestedRandomSet> {
    match p {
        PrsArg::OneSided => Arc::new(OneSided),
        PrsArg::Symmetric => Arc::new(Symmetric),
    }
}

const REGION_POINTS: usize = 2001;

fn region_grid(a: &RegionArgs, r: &Resolved) -> Result<ParamGrid, Failure> {
    if a.grid.from.is_some() || a.grid.to.is_some() || a.grid.points.is_some() {
        return Ok(ParamGrid::new(linear_grid(&a.grid, REGION_POINTS)?));
    }
    let space = r.model.param_space();
    Ok(match r.model.name() {
        "binomial" => ParamGrid::linspace(1e-4, 1.0 - 1e-4, REGION_POINTS),
        "normal-variance" => {
            let s2 = (r.x / (r.params.n - 1) as f64).max(1e-12);
            ParamGrid::logspace(s2 / 50.0, s2 * 50.0, REGION_POINTS)
        }
        _ if space.lo.is_finite() && space.hi.is_finite() => ParamGrid::linspace(space.lo, space.hi, REGION_POINTS),
        _ => {
            let c = r.params.sigma / (r.params.n as f64).sqrt();
            ParamGrid::linspace(r.x - 8.0 * c, r.x + 8.0 * c, REGION_POINTS)
        }
    })
}

fn region(a: &RegionArgs) -> Result<Done, Failure> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(usage(format!("alpha = {} must lie in (0, 1)", a.alpha)));
    }
    let r = resolve(&a.model, &a.obs)?;
    refuse_if_empty_focal(&r)?;
    let grid = region_grid(a, &r)?;
    let s = random_set(a.prs);
    let rep = plausibility_region(r.model.as_ref(), r.x, s.as_ref(), a.alpha, &grid, Execution::default())?;
    let body = json!({
        "model": r.model.label(),
        "x": r.x,
        "alpha": a.alpha,
        "random_set": s.label(),
        "region": rep.region.parts(),
        "grid_points": grid.points.len(),
        "diagnostics": rep.diagnostics,
    });
    Ok(Done {
        body,
        passed: true,
        files: Vec::new(),
        record: Record::new(Some(&a.model), a, "inline".into(), Some(&a.run)),
    })
}

fn validate(a: &ValidateArgs) -> Result<Done, Failure> {
    let (model, _) = build_model(&a.model, None)?;
    let m = model.as_ref();
    let null = resolve_null(&a.null, m.param_space())?;
    if !null.contains(a.theta) {
        return Err(usage(format!("theta = {} is not in the null {null}", a.theta)));
    }
    if a.reps == 0 {
        return Err(usage("--reps must be positive"));
    }
    let exec = if a.sequential { Execution::Sequential } else { Execution::default() };
    let cfg = sup_config(&a.run);
    let stat = TestStatistic::identity();
    let base: Arc<dyn NestedRandomSet> = Arc::new(synthesize_pvalue_set(m, &stat, &null, &cfg)?);
    let s: Arc<dyn NestedRandomSet> = if a.negative_control {
        Arc::new(Distorted::new(base, 0.5))
    } else {
        base
    };
    let audit = audit_validity(m, s.as_ref(), &null, a.theta, a.reps, a.run.seed, &a.alphas, exec)?;
    let mut passed = audit.passed;
    let uniformity = if a.uniformity {
        let point = Assertion::point(a.theta, m.param_space());
        let t2 = synthesize_pvalue_set(m, &stat, &point, &cfg)?;
        let u = audit_uniformity(m, &t2, a.theta, a.reps, a.run.seed, exec)?;
        passed &= u.passed;
        Some(u)
    } else {
        None
    };
    let coverage = match a.coverage {
        Some(alpha) => {
            let c = audit_region_coverage(m, random_set(a.prs).as_ref(), alpha, a.theta, a.reps, a.run.seed, exec)?;
            passed &= c.passed;
            Some(c)
        }
        None => None,
    };
    let body = json!({
        "model": m.label(),
        "null": (null.to_string()),
        "theta": a.theta,
        "random_set": s.label(),
        "negative_control": a.negative_control,
        "passed": passed,
        "validity": audit,
        "uniformity": uniformity,
        "coverage": coverage,
    });
    Ok(Done {
        body,
        passed,
        files: Vec::new(),
        record: Record::new(Some(&a.model), a, "simulated".into(), Some(&a.run)),
    })
}

fn ingest(a: &IngestArgs) -> Result<Done, Failure> {
    let format = a.format.as_deref().map(Format::parse).transpose().map_err(Failure::Usage)?;
    let values = read_values(&a.file, a.column.as_deref(), format).map_err(Failure::Usage)?;
    let s = summarize(&values)?;
    let mut warnings = Vec::new();
    if s.s2 == 0.0 {
        warnings.push("all observations are equal: S² = 0".to_string());
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let body = json!({
        "source": a.file,
        "n": s.n,
        "mean": s.mean,
        "s2": s.s2,
        "warnings": warnings,
    });
    Ok(Done {
        body,
        passed: true,
        files: Vec::new(),
        record: Record {
            model: None,
            params: serde_json::to_value(a).unwrap_or(Value::Null),
            data_source: a.file.display().to_string(),
            seed: None,
            tail: Tail::Weak,
            output: a.output.clone(),
        },
    })
}

fn coherence(a: &CoherenceArgs) -> Result<Done, Failure> {
    let m = NormalMeanModel::new(a.n, a.sigma)?;
    let space = m.param_space();
    let nulls = a
        .nulls
        .iter()
        .map(|s| parse_null(s, space))
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::Usage)?;
    if !(a.step > 0.0) || a.to < a.from {
        return Err(usage("the x grid needs --step > 0 and --from <= --to"));
    }
    let count = ((a.to - a.from) / a.step + 1e-9).floor() as usize + 1;
    let xs: Vec<f64> = (0..count).map(|i| a.from + i as f64 * a.step).collect();
    let s = random_set(a.prs);
    let rep = coherence_scan(&m, &xs, &nulls, s.as_ref(), &sup_config(&a.run))?;
    let reversal_xs: Vec<f64> = rep.rows.iter().filter(|r| !r.reversals.is_empty()).map(|r| r.x).collect();
    let first = rep.rows.iter().find(|r| !r.reversals.is_empty());
    let body = json!({
        "model": m.label(),
        "nulls": rep.nulls,
        "random_set": rep.random_set,
        "points": xs.len(),
        "reversal_count": rep.reversal_count,
        "plausibility_violations": rep.plausibility_violations,
        "reversal_xs": reversal_xs,
        "first_reversal": first,
        "rows": if a.rows { serde_json::to_value(&rep.rows).unwrap_or(Value::Null) } else { Value::Null },
    });
    Ok(Done {
        body,
        passed: true,
        files: Vec::new(),
        record: Record::new(None, a, "inline".into(), Some(&a.run)),
    })
}
