//! Command dispatch, JSON payloads and the regression runner.

use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use segre_core::algebra::{parse_series, GaussianRational, Order, VarSpace};
use segre_core::chains::{check_reparam, gamma, gammas, in_manifold, sigma_image, Parity, REPARAM_MAX};
use segre_core::invariants::{
    hypersurface_minimality, psi_rank_checks, segre_invariants, witness_point, ProfileOptions, SegreInvariants,
};
use segre_core::lie::{
    crosscheck_totals, default_levi_kmax, default_max_length, e1_determinant, hormander_numbers_with,
    holomorphic_nondegeneracy, levi_type_with, HormanderData, SpanOptions,
};
use segre_core::manifold::{Basepoint, CRManifold};
use segre_core::orbit::{greedy_multitype, lie_span_dimension, OrbitOptions, OrbitResult, VFSystem};

use crate::corpus::{corpus, parse_expect};
use crate::manifest::{BuildError, Manifest, ManifestError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Chains,
    Ranks,
    Minimality,
    Multitype,
    Witness,
    Hormander,
    Levi,
    E1det,
    Orbit,
    Checkall,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Chains => "chains",
            Command::Ranks => "ranks",
            Command::Minimality => "minimality",
            Command::Multitype => "multitype",
            Command::Witness => "witness",
            Command::Hormander => "hormander",
            Command::Levi => "levi",
            Command::E1det => "e1det",
            Command::Orbit => "orbit",
            Command::Checkall => "checkall",
        }
    }
}

/// Where chains start.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseSpec {
    Origin,
    Generic,
    /// Chart coordinates `(w, zeta, xi)`.
    Chart(Vec<GaussianRational>),
}

impl BaseSpec {
    pub fn parse(s: &str) -> Result<BaseSpec, String> {
        match s.trim() {
            "origin" => Ok(BaseSpec::Origin),
            "generic" => Ok(BaseSpec::Generic),
            list => {
                let empty = VarSpace::coords(Vec::<String>::new()).map_err(|e| e.to_string())?;
                list.split(',')
                    .map(|c| {
                        parse_series(c.trim(), &empty, Order::Exact)
                            .map(|s| s.constant_term())
                            .map_err(|e| format!("bad basepoint coordinate `{}`: {e}", c.trim()))
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map(BaseSpec::Chart)
            }
        }
    }

    fn label(&self) -> String {
        match self {
            BaseSpec::Origin => "origin".into(),
            BaseSpec::Generic => "generic".into(),
            BaseSpec::Chart(v) => v.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub order: Option<Order>,
    pub seed: u64,
    pub trials: usize,
    pub kmax: Option<usize>,
    pub base: BaseSpec,
    pub format: Format,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            order: None,
            seed: 0,
            trials: 5,
            kmax: None,
            base: BaseSpec::Origin,
            format: Format::Machine,
        }
    }
}

impl RunOptions {
    fn profile(&self) -> ProfileOptions {
        ProfileOptions {
            trials: self.trials,
            seed: self.seed,
            kmax: self.kmax,
            paranoid: false,
        }
    }

    fn span(&self) -> SpanOptions {
        SpanOptions {
            trials: self.trials,
            seed: self.seed,
        }
    }

    fn orbit(&self) -> OrbitOptions {
        OrbitOptions {
            trials: self.trials,
            seed: self.seed,
            kmax: self.kmax,
            order: match self.order {
                Some(Order::Truncated(n)) => Some(n),
                _ => None,
            },
        }
    }
}

/// Exit status: 1 for a module or verdict failure, 2 for usage problems.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Manifest { path: String, err: ManifestError },
    Module { path: String, err: segre_core::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Module { .. } => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Manifest { path, err } if err.line > 0 => write!(f, "{path}:{}: {}", err.line, err.msg),
            CliError::Manifest { path, err } => write!(f, "{path}: {}", err.msg),
            CliError::Module { path, err } => write!(f, "{path}: {err}"),
        }
    }
}

/// A finished run: the report and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub exit: i32,
}

fn gr(c: &GaussianRational) -> Value {
    Value::String(c.to_string())
}

fn order_label(o: Order) -> String {
    o.to_string()
}

struct Ctx<'a> {
    path: &'a str,
    opts: &'a RunOptions,
}

impl Ctx<'_> {
    fn module(&self, err: segre_core::Error) -> CliError {
        CliError::Module {
            path: self.path.to_string(),
            err,
        }
    }

    fn build(&self, err: BuildError) -> CliError {
        match err {
            BuildError::Manifest(e) => CliError::Manifest {
                path: self.path.to_string(),
                err: e,
            },
            BuildError::Module(e) => self.module(e),
        }
    }

    fn base(&self, mf: &CRManifold) -> Result<Basepoint, CliError> {
        let b = match &self.opts.base {
            BaseSpec::Origin => Basepoint::Origin,
            BaseSpec::Generic => Basepoint::Symbolic,
            BaseSpec::Chart(c) => mf.basepoint_from_chart(c).map_err(|e| self.module(e))?,
        };
        mf.check_basepoint(&b).map_err(|e| self.module(e))?;
        Ok(b)
    }
}

pub fn load(path: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Manifest::parse(&text).map_err(|err| CliError::Manifest {
        path: path.display().to_string(),
        err,
    })
}

/// Runs one command on a manifest file (or, for `checkall`, a corpus
/// directory or the bundled corpus).
pub fn run(cmd: Command, path: Option<&Path>, opts: &RunOptions) -> Result<Outcome, CliError> {
    if cmd == Command::Checkall {
        return checkall(path, opts);
    }
    let path = path.ok_or_else(|| CliError::Usage(format!("`{}` needs a manifest path", cmd.name())))?;
    let manifest = load(path)?;
    run_manifest(cmd, &manifest, &path.display().to_string(), opts)
}

pub fn run_manifest(cmd: Command, manifest: &Manifest, path: &str, opts: &RunOptions) -> Result<Outcome, CliError> {
    let ctx = Ctx { path, opts };
    let (results, order) = match manifest {
        Manifest::System(sm) => {
            if cmd != Command::Orbit && cmd != Command::Validate {
                return Err(CliError::Usage(format!("`{}` needs a manifold manifest", cmd.name())));
            }
            let sys = sm.build().map_err(|e| ctx.build(e))?;
            let r = if cmd == Command::Orbit {
                orbit_payload(&sys, opts).map_err(|e| ctx.module(e))?
            } else {
                json!({"n": sys.n(), "m": sys.m(), "a": sys.a(), "generic_rank_ok": sys.generic_rank_ok})
            };
            (r, "EXACT".to_string())
        }
        Manifest::Manifold(mm) => {
            let mf = mm.build(opts.order).map_err(|e| ctx.build(e))?;
            let r = manifold_command(cmd, &mf, &ctx)?;
            (r, order_label(mf.order()))
        }
    };
    let report = json!({
        "command": cmd.name(),
        "inputs": {
            "manifest": path,
            "canonical": manifest.serialize(),
            "base": opts.base.label(),
            "kmax": opts.kmax,
        },
        "results": results,
        "provenance": {
            "seed": opts.seed,
            "trials": opts.trials,
            "order": order,
            "version": VERSION,
        },
    });
    Ok(Outcome { report, exit: 0 })
}

fn manifold_command(cmd: Command, mf: &CRManifold, ctx: &Ctx) -> Result<Value, CliError> {
    let opts = ctx.opts;
    let me = |e| ctx.module(e);
    Ok(match cmd {
        Command::Validate => {
            let (l, lb) = mf.vector_fields().map_err(me)?;
            json!({
                "m": mf.m(),
                "d": mf.d(),
                "theta_bar": mf.theta_bar().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "theta": mf.theta().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "reality": true,
                "fields_tangent": l.tangent && lb.tangent,
                "fields_commuting": l.commuting && lb.commuting,
            })
        }
        Command::Chains => {
            let base = ctx.base(mf)?;
            let kmax = opts.kmax.unwrap_or(3);
            let cs = gammas(mf, kmax, &base, Parity::L).map_err(me)?;
            let mut list = Vec::new();
            for c in &cs {
                list.push(json!({
                    "k": c.k,
                    "components": c.map.components().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                    "in_manifold": in_manifold(mf, c).map_err(me)?,
                }));
            }
            json!({ "gammas": list })
        }
        Command::Ranks => {
            let inv = segre_invariants(mf, &ctx.base(mf)?, &opts.profile()).map_err(me)?;
            let p = &inv.profile;
            json!({
                "r": p.r,
                "e": p.e,
                "certified": p.certified,
                "jet": p.jet,
                "sigma_consistent": p.sigma_consistent,
            })
        }
        Command::Minimality => {
            let inv = segre_invariants(mf, &ctx.base(mf)?, &opts.profile()).map_err(me)?;
            let mut r = invariants_payload(&inv);
            if mf.d() == 1 {
                r["hypersurface_test"] = json!(hypersurface_minimality(mf).map_err(me)?);
            }
            r
        }
        Command::Multitype => {
            let inv = segre_invariants(mf, &ctx.base(mf)?, &opts.profile()).map_err(me)?;
            json!({
                "multitype": inv.multitype,
                "e": inv.profile.e,
                "kappa": inv.kappa,
                "mu": inv.mu,
                "certified": inv.profile.certified,
            })
        }
        Command::Witness => {
            let base = ctx.base(mf)?;
            let inv = segre_invariants(mf, &base, &opts.profile()).map_err(me)?;
            let w = witness_point(mf, &base, &inv, &opts.profile()).map_err(me)?;
            json!({
                "mu": w.mu,
                "w_star": w.w_star.iter().map(gr).collect::<Vec<_>>(),
                "omega_star": w.omega_star.iter().map(gr).collect::<Vec<_>>(),
                "returns": w.returns,
                "rank": w.rank,
                "expected_rank": w.expected_rank,
                "verified": w.verified(),
                "attempts": w.attempts,
            })
        }
        Command::Hormander => {
            let base = ctx.base(mf)?;
            let max = opts.kmax.unwrap_or_else(|| default_max_length(mf));
            hormander_payload(&hormander_numbers_with(mf, &base, max, &opts.span()).map_err(me)?)
        }
        Command::Levi => {
            let base = ctx.base(mf)?;
            let kmax = opts.kmax.unwrap_or_else(|| default_levi_kmax(mf));
            let rep = levi_type_with(mf, &base, kmax, &opts.span()).map_err(me)?;
            let h = holomorphic_nondegeneracy(mf, kmax).map_err(me)?;
            json!({
                "levi_type": rep.levi_type,
                "dims": rep.dims,
                "kmax": kmax,
                "holo_nondeg": h.nondegenerate,
                "levi_gen": h.levi_gen,
            })
        }
        Command::E1det => {
            let e = e1_determinant(mf).map_err(me)?;
            json!({ "det": e.det.to_string(), "nonzero": e.nonzero })
        }
        Command::Orbit => {
            let sys = VFSystem::cr_pair(mf).map_err(me)?;
            orbit_payload(&sys, opts).map_err(me)?
        }
        Command::Checkall => unreachable!("handled by checkall"),
    })
}

fn invariants_payload(inv: &SegreInvariants) -> Value {
    json!({
        "minimal": inv.minimal,
        "mu": inv.mu,
        "kappa": inv.kappa,
        "nu": inv.nu,
        "multitype": inv.multitype,
        "orbit_dim": inv.orbit_dim_complexified,
        "orbit_dim_intrinsic": inv.orbit_dim_intrinsic,
        "certified": inv.profile.certified,
    })
}

fn hormander_payload(h: &HormanderData) -> Value {
    json!({
        "ladder": h.ladder.iter().map(|s| json!([s.mu, s.l, s.dim])).collect::<Vec<_>>(),
        "h": h.h,
        "minimal": h.minimal,
        "sum_l": h.sum_l(),
        "precision_limited": h.precision_limited,
    })
}

/// Longest bracket length tried by the span oracle.
pub fn oracle_length(sys: &VFSystem) -> usize {
    sys.n() + 2
}

fn orbit_payload(sys: &VFSystem, opts: &RunOptions) -> segre_core::Result<Value> {
    let r: OrbitResult = greedy_multitype(sys, &opts.orbit())?;
    Ok(json!({
        "multitype": r.multitype,
        "e": r.e,
        "orbit_dim": r.orbit_dim,
        "word": r.selected.iter().map(|a| a + 1).collect::<Vec<_>>(),
        "certified": r.certified,
        "exact_flows": r.exact_flows,
        "lie_span_dim": lie_span_dimension(sys, oracle_length(sys))?,
        "witness": r.witness.as_ref().map(|w| w.verified()),
        "alternate_e": r.alternate_e,
    }))
}

fn join<T: ToString>(v: &[T]) -> String {
    if v.is_empty() {
        "-".into()
    } else {
        v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }
}

/// Computes the value of one expectation key as a string.
pub fn expectation_value(key: &str, manifest: &Manifest, opts: &RunOptions) -> Result<String, String> {
    let show = |e: BuildError| match e {
        BuildError::Manifest(m) => m.to_string(),
        BuildError::Module(m) => m.to_string(),
    };
    let s = |e: segre_core::Error| e.to_string();
    let prof = opts.profile();
    match manifest {
        Manifest::System(sm) => {
            let sys = sm.build().map_err(show)?;
            let r = greedy_multitype(&sys, &opts.orbit()).map_err(s)?;
            match key {
                "orbit_dim" => Ok(r.orbit_dim.to_string()),
                "multitype" => Ok(join(&r.multitype)),
                "lie_span" => Ok(lie_span_dimension(&sys, oracle_length(&sys)).map_err(s)?.to_string()),
                "witness" => Ok(match r.witness {
                    Some(w) if w.verified() => "verified".into(),
                    Some(_) => "failed".into(),
                    None => "none".into(),
                }),
                _ => Err(format!("unknown key `{key}`")),
            }
        }
        Manifest::Manifold(mm) => {
            let mf = mm.build(opts.order).map_err(show)?;
            let origin = Basepoint::Origin;
            match key {
                "validate" => Ok("ok".into()),
                "minimal" => Ok(segre_invariants(&mf, &origin, &prof).map_err(s)?.minimal.to_string()),
                "mu" => Ok(segre_invariants(&mf, &origin, &prof).map_err(s)?.mu.to_string()),
                "multitype" => Ok(join(&segre_invariants(&mf, &origin, &prof).map_err(s)?.multitype)),
                "e_generic" => Ok(join(&segre_invariants(&mf, &Basepoint::Symbolic, &prof).map_err(s)?.profile.e)),
                "hypersurface_minimal" => Ok(hypersurface_minimality(&mf).map_err(s)?.to_string()),
                "ladder" => {
                    let h = hormander_numbers_with(&mf, &origin, default_max_length(&mf), &opts.span()).map_err(s)?;
                    let steps: Vec<String> = h.ladder.iter().skip(1).map(|x| format!("{}:{}", x.mu, x.l)).collect();
                    Ok(join(&steps))
                }
                "levi" => Ok(levi_type_with(&mf, &origin, default_levi_kmax(&mf), &opts.span())
                    .map_err(s)?
                    .levi_type
                    .map_or("none".into(), |k| k.to_string())),
                "holo_nondeg" => Ok(holomorphic_nondegeneracy(&mf, default_levi_kmax(&mf))
                    .map_err(s)?
                    .nondegenerate
                    .to_string()),
                "e1det_nonzero" => Ok(e1_determinant(&mf).map_err(s)?.nonzero.to_string()),
                "witness" => {
                    let inv = segre_invariants(&mf, &origin, &prof).map_err(s)?;
                    let w = witness_point(&mf, &origin, &inv, &prof).map_err(s)?;
                    Ok(if w.verified() { "verified" } else { "failed" }.into())
                }
                "crosscheck" => Ok(crosscheck_totals(&mf, &origin, &prof).map_err(s)?.agrees().to_string()),
                "psi" => Ok(psi_rank_checks(&mf, &origin, &prof).map_err(s)?.all_hold().to_string()),
                "reparam" => {
                    let ok = (1..=REPARAM_MAX)
                        .map(|k| check_reparam(&mf, k).map(|v| v.holds))
                        .collect::<segre_core::Result<Vec<_>>>()
                        .map_err(s)?;
                    Ok(ok.iter().all(|&b| b).to_string())
                }
                "sigma" => {
                    let kmax = 2 * mf.d() + 3;
                    let gs = gammas(&mf, kmax, &origin, Parity::L).map_err(s)?;
                    let mut ok = true;
                    for c in &gs {
                        let under = gamma(&mf, c.k, &origin, Parity::Lbar).map_err(s)?;
                        ok &= sigma_image(c).map_err(s)?.map == under.map;
                    }
                    Ok(ok.to_string())
                }
                "orbit_dim" => {
                    let sys = VFSystem::cr_pair(&mf).map_err(s)?;
                    Ok(greedy_multitype(&sys, &opts.orbit()).map_err(s)?.orbit_dim.to_string())
                }
                _ => Err(format!("unknown key `{key}`")),
            }
        }
    }
}

struct Item {
    name: String,
    key: String,
    expected: String,
    actual: String,
}

fn check_one(name: &str, manifest_src: &str, expect_src: &str, opts: &RunOptions, items: &mut Vec<Item>) {
    let mut push = |key: &str, expected: &str, actual: String| {
        items.push(Item {
            name: name.to_string(),
            key: key.to_string(),
            expected: expected.to_string(),
            actual,
        })
    };
    let manifest = match Manifest::parse(manifest_src) {
        Ok(m) => m,
        Err(e) => {
            push("parse", "ok", format!("error: {e}"));
            return;
        }
    };
    for (key, expected) in parse_expect(expect_src) {
        let actual = expectation_value(&key, &manifest, opts).unwrap_or_else(|e| format!("error: {e}"));
        push(&key, &expected, actual);
    }
}

fn checkall(dir: Option<&Path>, opts: &RunOptions) -> Result<Outcome, CliError> {
    let mut items = Vec::new();
    let source = match dir {
        None => {
            for e in corpus() {
                check_one(e.name, e.manifest, e.expect, opts, &mut items);
            }
            "bundled".to_string()
        }
        Some(d) => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(d)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", d.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "tomlish"))
                .collect();
            paths.sort();
            for p in paths {
                let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let src = std::fs::read_to_string(&p)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
                let expect = std::fs::read_to_string(p.with_extension("expect")).unwrap_or_else(|_| "validate = ok\n".into());
                check_one(&name, &src, &expect, opts, &mut items);
            }
            d.display().to_string()
        }
    };
    let failed = items.iter().filter(|i| i.expected != i.actual).count();
    let list: Vec<Value> = items
        .iter()
        .map(|i| {
            json!({
                "name": i.name,
                "key": i.key,
                "expected": i.expected,
                "actual": i.actual,
                "pass": i.expected == i.actual,
            })
        })
        .collect();
    let report = json!({
        "command": "checkall",
        "inputs": { "corpus": source },
        "results": { "items": list, "total": items.len(), "failed": failed },
        "provenance": { "seed": opts.seed, "trials": opts.trials, "order": opts.order.map(order_label), "version": VERSION },
    });
    Ok(Outcome {
        report,
        exit: if failed == 0 { 0 } else { 1 },
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Aligned `key  value` rows, or a pass/fail table for `checkall`.
pub fn render_human(report: &Value) -> String {
    let results = &report["results"];
    let mut rows: Vec<Vec<String>> = Vec::new();
    if report["command"] == "checkall" {
        rows.push(["name", "key", "expected", "actual", "status"].map(String::from).to_vec());
        for it in results["items"].as_array().into_iter().flatten() {
            rows.push(vec![
                scalar(&it["name"]),
                scalar(&it["key"]),
                scalar(&it["expected"]),
                scalar(&it["actual"]),
                if it["pass"] == true { "PASS" } else { "FAIL" }.into(),
            ]);
        }
        rows.push(vec![
            "total".into(),
            scalar(&results["total"]),
            "failed".into(),
            scalar(&results["failed"]),
            String::new(),
        ]);
    } else {
        let empty = Map::new();
        for (k, v) in results.as_object().unwrap_or(&empty) {
            match v {
                Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                    for (i, it) in items.iter().enumerate() {
                        rows.push(vec![format!("{k}[{i}]"), it.to_string()]);
                    }
                }
                _ => rows.push(vec![k.clone(), scalar(v)]),
            }
        }
    }
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        out += line.join("  ").trim_end();
        out.push('\n');
    }
    out
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Machine => {
            let mut s = serde_json::to_string_pretty(report).expect("serializable");
            s.push('\n');
            s
        }
        Format::Human => render_human(report),
    }
}
