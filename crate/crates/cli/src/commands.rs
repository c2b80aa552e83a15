use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use cotypelab::cotype::{mn_scaling_function, scaling_lower_bound, CotypeEvaluation};
use cotypelab::separation::{SeparationError, TreeJson};
use cotypelab::torus::{brute_force_min_boundary, isoperimetric_bounds, sampled_min_boundary};
use cotypelab::transfer::{MapReport, TransferReport};
use cotypelab::{
    build_tree_structure, check_map, empirical_transfer_verify, evaluate_cotype, gamma_search, io,
    perturbed_map, separation_constant, snowflake_map, sts_certificate, subdominant_map,
    validate_tree_structure, Certificate, CotypeParams, FiniteMetricSpace, GraphKind, MapKind,
    MapParams, PointMap, SearchStrategy, SeparationMode, TorusFunction,
};
use serde::Serialize;

use crate::cli::*;

/// Whether every verdict in a report passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

fn load_space(
    generator: &Option<cotypelab::GeneratorSpec>,
    input: &Option<std::path::PathBuf>,
) -> Result<FiniteMetricSpace> {
    match (generator, input) {
        (Some(g), None) => Ok(g.generate()?),
        (None, Some(path)) => Ok(io::read_space(path)?),
        _ => bail!("give exactly one of --gen and --input"),
    }
}

fn emit(json: bool, value: &impl Serialize, table: impl FnOnce() -> String) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(value).expect("report serializes")
        );
    } else {
        print!("{}", table());
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt_exponent(s: f64) -> String {
    if s.is_infinite() {
        "inf".into()
    } else {
        format!("{s}")
    }
}

fn resolve_mode(mode: ModeArg, points: usize) -> SeparationMode {
    match mode {
        ModeArg::Exact => SeparationMode::Exact,
        ModeArg::Dendrogram => SeparationMode::Dendrogram,
        ModeArg::Auto if points <= cotypelab::separation::DEFAULT_EXACT_LIMIT => {
            SeparationMode::Exact
        }
        ModeArg::Auto => SeparationMode::Dendrogram,
    }
}

#[derive(Serialize)]
struct Sandwich {
    lower: f64,
    value: f64,
    upper: f64,
    holds: bool,
}

#[derive(Serialize)]
struct AnalyzeReport {
    points: usize,
    metric_valid: bool,
    ultrametric: bool,
    ultrametric_witness: Option<[usize; 3]>,
    /// `null` when infinite (exactly the ultrametric case).
    ls_exponent: Option<f64>,
    c_sep: Option<f64>,
    c_sep_mode: SeparationMode,
    c_sep_witness: Vec<usize>,
    distortion: f64,
    sandwich: Option<Sandwich>,
    note: String,
}

pub fn analyze(args: &AnalyzeArgs, json: bool) -> Result<Outcome> {
    let x = load_space(&args.space.generator, &args.space.input)?;
    let witness = x.check_ultrametric().err();
    let s = x.ls_metric_exponent();
    let (_, l) = x.subdominant_ultrametric();
    let mode = resolve_mode(args.mode, x.len());
    let (c_sep, c_witness) = match separation_constant(&x, mode) {
        Ok(r) => (Some(r.c_sep), r.witness_subset),
        Err(SeparationError::TooSmall(_)) => (None, vec![]),
        Err(e) => return Err(e.into()),
    };
    let sandwich = c_sep.map(|c| Sandwich {
        lower: l,
        value: c,
        upper: 2.0 * l * l,
        holds: mode == SeparationMode::Dendrogram
            || (l <= c * (1.0 + 1e-12) && c <= 2.0 * l * l * (1.0 + 1e-12)),
    });
    let note = match c_sep {
        Some(c) => format!(
            "finite space: (q,q)-metric cotype holds for every q > 1 with constant {c} once m >= (n 3^n)^(1/(q-1)), so q_X = 1"
        ),
        None => "single point: every cotype inequality is trivial".into(),
    };
    let report = AnalyzeReport {
        points: x.len(),
        metric_valid: true,
        ultrametric: witness.is_none(),
        ultrametric_witness: witness.map(|(a, b, c)| [a, b, c]),
        ls_exponent: s.is_finite().then_some(s),
        c_sep,
        c_sep_mode: mode,
        c_sep_witness: c_witness.clone(),
        distortion: l,
        sandwich,
        note,
    };
    let pass = report.sandwich.as_ref().is_none_or(|s| s.holds);
    emit(json, &report, || {
        let mut t = String::new();
        let _ = writeln!(t, "points          {}", report.points);
        let _ = writeln!(t, "metric          valid");
        match witness {
            None => {
                let _ = writeln!(t, "ultrametric     yes");
            }
            Some((a, b, c)) => {
                let _ = writeln!(
                    t,
                    "ultrametric     no  (d({a},{b}) > max(d({a},{c}), d({c},{b})))"
                );
            }
        }
        let _ = writeln!(t, "L^s exponent    {}", fmt_exponent(s));
        if let Some(c) = c_sep {
            let mode = match mode {
                SeparationMode::Exact => "exact",
                SeparationMode::Dendrogram => "dendrogram, lower bound",
            };
            let _ = writeln!(t, "C_sep           {c}  ({mode}; witness {:?})", c_witness);
        }
        let _ = writeln!(t, "distortion L    {l}");
        if let Some(s) = &report.sandwich {
            let _ = writeln!(
                t,
                "sandwich        {} <= {} <= {}  {}",
                s.lower,
                s.value,
                s.upper,
                if s.holds { "holds" } else { "FAILS" }
            );
        }
        let _ = writeln!(t, "note            {}", report.note);
        t
    });
    Ok(Outcome::from_pass(pass))
}

#[derive(Serialize)]
struct TreeReportJson {
    c: f64,
    realized_constant: f64,
    valid: bool,
    root: TreeJson,
}

pub fn tree(args: &TreeArgs, _json: bool) -> Result<Outcome> {
    let x = load_space(&args.space.generator, &args.space.input)?;
    let c = match args.c {
        Some(c) => c,
        None if x.len() < 2 => 1.0,
        None => separation_constant(&x, resolve_mode(ModeArg::Auto, x.len()))?.c_sep,
    };
    let tree = match build_tree_structure(&x, c) {
        Ok(t) => t,
        Err(e @ SeparationError::NoValidSplit { .. }) => {
            eprintln!("no {c}-separated tree: {e}");
            return Ok(Outcome::Fail);
        }
        Err(e) => return Err(e.into()),
    };
    let valid = validate_tree_structure(&x, &tree).is_valid();
    let text = match args.format {
        TreeFormat::Dot => tree.to_dot(&x),
        TreeFormat::Json => {
            let report = TreeReportJson {
                c,
                realized_constant: tree.realized_constant(&x),
                valid,
                root: tree.to_json(),
            };
            serde_json::to_string_pretty(&report)? + "\n"
        }
    };
    write_or_print(args.output.as_deref(), &text)?;
    Ok(Outcome::from_pass(valid))
}

#[derive(Serialize)]
struct IsoRow {
    n: usize,
    m: usize,
    size: usize,
    min_boundary: usize,
    linfty_bound: f64,
    min_boundary_t: usize,
    bl_bound: f64,
    verdict: &'static str,
}

pub fn isoperimetry(args: &IsoperimetryArgs, json: bool) -> Result<Outcome> {
    let (n, m) = (args.n, args.m);
    let torus = cotypelab::Torus::new(n, m)?;
    let sampled = match (args.exhaustive, args.samples) {
        (true, _) => None,
        (false, Some(samples)) => {
            let seed = args
                .seed
                .ok_or_else(|| anyhow!("sampled mode needs --seed"))?;
            Some((samples, seed))
        }
        (false, None) => bail!("choose --exhaustive or --samples N --seed S"),
    };
    let mut rows = Vec::new();
    for size in 0..=torus.size() / 2 {
        let min = |kind| match sampled {
            None => brute_force_min_boundary(n, m, size, kind),
            Some((samples, seed)) => sampled_min_boundary(n, m, size, kind, samples, seed),
        };
        let r = min(GraphKind::R)?.min;
        let t = min(GraphKind::T)?.min;
        let b = isoperimetric_bounds(size, n, m);
        let pass = r as f64 >= b.linfty * (1.0 - 1e-12) && t as f64 >= b.bl * (1.0 - 1e-12);
        rows.push(IsoRow {
            n,
            m,
            size,
            min_boundary: r,
            linfty_bound: b.linfty,
            min_boundary_t: t,
            bl_bound: b.bl,
            verdict: if pass { "pass" } else { "fail" },
        });
    }
    let pass = rows.iter().all(|r| r.verdict == "pass");
    let text = if json {
        serde_json::to_string_pretty(&rows)? + "\n"
    } else {
        let mut t =
            String::from("n,m,size,min_boundary,linfty_bound,min_boundary_t,bl_bound,verdict\n");
        for r in &rows {
            let _ = writeln!(
                t,
                "{},{},{},{},{},{},{},{}",
                r.n,
                r.m,
                r.size,
                r.min_boundary,
                r.linfty_bound,
                r.min_boundary_t,
                r.bl_bound,
                r.verdict
            );
        }
        t
    };
    write_or_print(args.output.as_deref(), &text)?;
    Ok(Outcome::from_pass(pass))
}

#[derive(Serialize)]
struct CotypeReport {
    params: CotypeParams,
    m_source: &'static str,
    required_m: Option<usize>,
    lower_bound: f64,
    warning: Option<String>,
    strategy: Option<SearchStrategy>,
    budget: Option<u64>,
    seed: Option<u64>,
    visited: Option<u64>,
    restarts: Option<u64>,
    best_gamma: f64,
    best_function: TorusFunction,
    saved_function: Option<String>,
    evaluation: CotypeEvaluation,
    certificate: Option<Certificate>,
    pass: bool,
}

pub fn cotype(args: &CotypeArgs, json: bool) -> Result<Outcome> {
    let x = load_space(&args.space.generator, &args.space.input)?;
    let q = args.q;
    let p = args.p.unwrap_or(q);
    let required_m = if q > 1.0 {
        mn_scaling_function(q, args.n).ok()
    } else {
        None
    };
    let (m, m_source) = match args.m {
        Some(m) => (m, "given"),
        None if p == q => (mn_scaling_function(q, args.n)?, "scaling-function"),
        None => bail!("-m is required when p < q (no scaling function is known)"),
    };
    let mut params = CotypeParams::new(p, q, args.n, m)?;
    if let Some(g) = args.gamma {
        params = params.with_gamma(g)?;
    }
    let lower_bound = scaling_lower_bound(args.gamma.unwrap_or(1.0), q, args.n);
    let warning = ((m as f64) < lower_bound).then(|| {
        format!("m = {m} is below the admissible lower bound {lower_bound} for any constant")
    });
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }

    let strategy = match args.strategy {
        StrategyArg::Exhaustive => SearchStrategy::Exhaustive,
        StrategyArg::Random => SearchStrategy::Random,
        StrategyArg::Local => SearchStrategy::Local,
    };
    let (best, search) = match &args.function {
        Some(path) => {
            let f = io::read_function(path)?;
            if (f.n, f.m) != (args.n, m) {
                bail!(
                    "function is on Z_{}^{}, expected Z_{m}^{}",
                    f.m,
                    f.n,
                    args.n
                );
            }
            (f, None)
        }
        None => {
            let seed = match (strategy, args.seed) {
                (SearchStrategy::Exhaustive, s) => s.unwrap_or(0),
                (_, Some(s)) => s,
                (_, None) => bail!("--seed is required for the {:?} strategy", args.strategy),
            };
            let r = gamma_search(&x, &params, strategy, args.budget, seed)?;
            (r.best.clone(), Some(r))
        }
    };
    let evaluation = evaluate_cotype(&x, &best, p, q)?;
    if let Some(path) = &args.save_function {
        io::write_function(path, &best)?;
    }
    let certificate = if args.certify {
        let cert = sts_certificate(&x, &best, q)?;
        if let Some(path) = &args.certificate_csv {
            fs::write(path, cert.to_csv())
                .with_context(|| format!("writing {}", path.display()))?;
        }
        Some(cert)
    } else {
        None
    };

    let gamma_ok = args
        .gamma
        .is_none_or(|g| evaluation.implied_gamma <= g * (1.0 + 1e-9));
    let cert_ok = certificate
        .as_ref()
        .is_none_or(|c| c.pass && (c.scaling_too_small || c.rows_pass));
    let report = CotypeReport {
        params,
        m_source,
        required_m,
        lower_bound,
        warning,
        strategy: search.as_ref().map(|r| r.strategy),
        budget: search
            .as_ref()
            .filter(|r| r.strategy != SearchStrategy::Exhaustive)
            .map(|_| args.budget),
        seed: search
            .as_ref()
            .filter(|r| r.strategy != SearchStrategy::Exhaustive)
            .and(args.seed),
        visited: search.as_ref().map(|r| r.visited),
        restarts: search.as_ref().map(|r| r.restarts),
        best_gamma: evaluation.implied_gamma,
        best_function: best,
        saved_function: args.save_function.as_ref().map(|p| p.display().to_string()),
        evaluation,
        certificate,
        pass: gamma_ok && cert_ok,
    };
    emit(json, &report, || cotype_table(&report));
    Ok(Outcome::from_pass(report.pass))
}

fn cotype_table(r: &CotypeReport) -> String {
    let mut t = String::new();
    let p = &r.params;
    let _ = writeln!(t, "p, q            {}, {}", p.p, p.q);
    let _ = writeln!(
        t,
        "torus           Z_{}^{}  (m from {})",
        p.m, p.n, r.m_source
    );
    if let Some(req) = r.required_m {
        let _ = writeln!(t, "scaling m_qq(n) {req}");
    }
    if let Some(s) = r.strategy {
        let _ = writeln!(
            t,
            "search          {s:?}, {} functions",
            r.visited.unwrap_or(0)
        );
    }
    let e = &r.evaluation;
    let _ = writeln!(t, "lhs, rhs        {}, {}", e.lhs, e.rhs);
    let _ = writeln!(t, "best gamma      {}", r.best_gamma);
    let values = &r.best_function.values;
    if values.len() <= 32 {
        let _ = writeln!(t, "best f          {values:?}");
    } else {
        let _ = writeln!(
            t,
            "best f          {:?} ... ({} values; --json for all)",
            &values[..16],
            values.len()
        );
    }
    if let Some(path) = &r.saved_function {
        let _ = writeln!(t, "saved to        {path}");
    }
    if let Some(c) = &r.certificate {
        let _ = writeln!(
            t,
            "certificate     C = {} ({:?}), lhs {} <= C^q m^q rhs = {}: {}",
            c.c,
            c.c_mode,
            c.lhs,
            c.bound,
            if c.pass { "pass" } else { "FAIL" }
        );
        if c.scaling_too_small {
            let _ = writeln!(
                t,
                "                m = {} is below m_qq(n) = {}; levels need not close",
                c.m, c.required_m
            );
        }
        let _ = writeln!(
            t,
            "  level  |F|  diam  |dF|  lhs_level  rhs_level  counting"
        );
        for row in &c.rows {
            let _ = writeln!(
                t,
                "  {:>5}  {:>3}  {}  {}  {}  {}  {}",
                row.level,
                row.subset_size,
                row.diam,
                row.boundary,
                row.lhs_level,
                row.rhs_level,
                if row.counting_holds { "ok" } else { "fails" }
            );
        }
    }
    let _ = writeln!(
        t,
        "verdict         {}",
        if r.pass { "pass" } else { "FAIL" }
    );
    t
}

#[derive(Serialize)]
struct TransferOutput {
    map_check: MapReport,
    transfer: Option<TransferReport>,
    pass: bool,
}

pub fn transfer(args: &TransferArgs, json: bool) -> Result<Outcome> {
    let (map, default_kind): (PointMap, Option<MapKind>) = match (&args.map, args.harness) {
        (Some(path), _) => (io::read_map(path)?, None),
        (None, Some(h)) => {
            let x = load_space(&args.generator, &args.input)?;
            match h {
                HarnessArg::Snowflake => (
                    snowflake_map(&x, args.alpha.unwrap_or(0.5))?,
                    Some(MapKind::Snowflake),
                ),
                HarnessArg::Rough => {
                    let c = args
                        .additive
                        .ok_or_else(|| anyhow!("--harness rough needs --additive"))?;
                    let seed = args
                        .seed
                        .ok_or_else(|| anyhow!("--harness rough needs --seed"))?;
                    (perturbed_map(&x, c, seed)?, Some(MapKind::RoughIsometry))
                }
                HarnessArg::Bilip => (subdominant_map(&x), Some(MapKind::Bilip)),
            }
        }
        (None, None) => bail!("give --map or --harness"),
    };
    let kind = match args.kind {
        Some(KindArg::Bilip) => MapKind::Bilip,
        Some(KindArg::Snowflake) => MapKind::Snowflake,
        Some(KindArg::LinearQs) => MapKind::LinearQs,
        Some(KindArg::RoughIsometry) => MapKind::RoughIsometry,
        None => default_kind.ok_or_else(|| anyhow!("--kind is required with --map"))?,
    };
    let alpha = match (kind, args.alpha) {
        (MapKind::Snowflake, None) => Some(0.5),
        (_, a) => a,
    };
    let declared = MapParams {
        scale: args.scale,
        distortion: args.distortion,
        alpha,
        k: args.k,
        additive: args.additive,
    };
    if let Some(path) = &args.save_map {
        io::write_map(path, &map)?;
    }
    let map_check = check_map(&map, kind, &declared)?;
    let transfer = if args.verify && map_check.pass {
        let seed = args.seed.ok_or_else(|| anyhow!("--verify needs --seed"))?;
        let mut params = CotypeParams::new(args.p, args.q, args.n, args.m)?;
        if let Some(g) = args.gamma {
            params = params.with_gamma(g)?;
        }
        Some(empirical_transfer_verify(
            &map,
            kind,
            &declared,
            &params,
            args.samples,
            seed,
        )?)
    } else {
        None
    };
    let pass = map_check.pass && transfer.as_ref().is_none_or(|t| t.pass);
    let out = TransferOutput {
        map_check,
        transfer,
        pass,
    };
    emit(json, &out, || {
        let mut t = String::new();
        let c = &out.map_check;
        let _ = writeln!(t, "kind            {:?}", c.kind);
        if c.kind == MapKind::Snowflake {
            let _ = writeln!(t, "alpha           {}", c.alpha);
        }
        let _ = writeln!(t, "fitted          {}", c.fitted);
        if let Some(s) = c.fitted_scale {
            let _ = writeln!(t, "fitted scale    {s}");
        }
        if let Some(d) = c.declared {
            let _ = writeln!(t, "declared        {d}");
        }
        let _ = writeln!(t, "witness         {:?}", c.witness);
        let _ = writeln!(
            t,
            "map check       {}",
            if c.pass { "pass" } else { "FAIL" }
        );
        if let Some(r) = &out.transfer {
            let _ = writeln!(
                t,
                "gamma (known)   {}{}",
                r.gamma,
                if r.gamma_declared { "" } else { " (observed)" }
            );
            let _ = writeln!(t, "exponents       p' = {}, q = {}", r.transferred_p, r.q);
            let _ = writeln!(t, "constant        {}", r.constant);
            let _ = writeln!(t, "slack           {}", r.slack);
            let _ = writeln!(
                t,
                "samples         {}  violations {}  precondition failures {}",
                r.samples, r.violations, r.precondition_failures
            );
            let _ = writeln!(t, "max rel. excess {}", r.max_relative_violation);
        }
        let _ = writeln!(
            t,
            "verdict         {}",
            if out.pass { "pass" } else { "FAIL" }
        );
        t
    });
    Ok(Outcome::from_pass(pass))
}

fn resolve_point(x: &FiniteMetricSpace, name: &str) -> Result<usize> {
    if let Some(i) = x.index_of(name) {
        return Ok(i);
    }
    let i: usize = name
        .parse()
        .map_err(|_| anyhow!("no point labelled '{name}'"))?;
    x.check_index(i)?;
    Ok(i)
}

#[derive(Serialize)]
struct ChainReport {
    from: String,
    to: String,
    epsilon: f64,
    found: bool,
    indices: Vec<usize>,
    labels: Vec<String>,
}

pub fn chain(args: &ChainArgs, json: bool) -> Result<Outcome> {
    let x = load_space(&args.space.generator, &args.space.input)?;
    let (a, b) = (resolve_point(&x, &args.from)?, resolve_point(&x, &args.to)?);
    let found = x.find_chain(a, b, args.epsilon)?;
    let indices = found.map(|c| c.points).unwrap_or_default();
    let report = ChainReport {
        from: x.labels()[a].clone(),
        to: x.labels()[b].clone(),
        epsilon: args.epsilon,
        found: !indices.is_empty(),
        labels: indices.iter().map(|&i| x.labels()[i].clone()).collect(),
        indices,
    };
    emit(json, &report, || {
        if report.found {
            format!("{}\n", report.labels.join(" -> "))
        } else {
            format!(
                "no {}-chain from {} to {}\n",
                report.epsilon, report.from, report.to
            )
        }
    });
    Ok(Outcome::Pass)
}

pub fn gen(args: &GenArgs) -> Result<Outcome> {
    let x = args.generator.generate()?;
    match &args.output {
        Some(path) => io::write_space(path, &x)?,
        None => println!("{}", io::space_to_json(&x)),
    }
    Ok(Outcome::Pass)
}
