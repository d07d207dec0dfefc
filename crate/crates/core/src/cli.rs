//! JSON run specifications, the demo catalog and machine-readable reports.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::measure::{backward_extension, DiscreteMeasure};
use crate::moments::{d_sequence, hausdorff_test, stieltjes_test, MomentSequence, Table1Row};
use crate::oracle::{build_brownian_shift, defect_entry, truncate, verify_table1, OperatorSource};
use crate::shift::{
    are_unitarily_equivalent, build_shift, classify_adjacency, shift_invariants, WeightSpec, WeightedShift, DEFAULT_TOL,
};
use crate::subnormality::{dual_subnormality, DecisionPath, Subnormality, SubnormalityOptions};
use crate::tree::{classify_tree, DirectedTree, TreeSpec, Vertex};

pub const TOOL_VERSION: &str = concat!("cauchy-dual ", env!("CARGO_PKG_VERSION"));

/// Default number of moments for moment commands and the generic test.
pub const DEFAULT_NMAX: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default)]
    pub tree: Option<TreeSpec>,
    #[serde(default)]
    pub weights: Option<WeightSpec>,
    #[serde(default)]
    pub commands: Vec<Command>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance for property checks and Hankel tests.
    #[serde(default = "default_tol")]
    pub check: f64,
    /// Absolute tolerance for matrix-oracle deviations.
    #[serde(default = "default_tol")]
    pub oracle: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            check: DEFAULT_TOL,
            oracle: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub json: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub verbosity: Verbosity,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verbosity {
    Quiet,
    #[default]
    Normal,
    Verbose,
}

/// A vertex given by id (`"g2:1"`) or by child positions from the root
/// (`[1, 0]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexRef {
    Id(String),
    Path(Vec<usize>),
}

impl VertexRef {
    pub fn resolve(&self, tree: &DirectedTree) -> Result<Vertex> {
        match self {
            VertexRef::Id(id) => tree
                .find(id)
                .ok_or_else(|| Error::Range(format!("no vertex `{id}` within the materialized depth"))),
            VertexRef::Path(p) => tree.by_path(p),
        }
    }
}

/// Tree and weights of the second operator in an `equivalent` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSpec {
    pub tree: TreeSpec,
    pub weights: WeightSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    Materialize {},
    ClassifyTree {},
    #[serde(rename = "check-2iso")]
    CheckTwoIsometry {},
    CheckKernel {
        #[serde(default)]
        k: usize,
    },
    CauchyDual {},
    Moments {
        #[serde(default)]
        vertex: Option<VertexRef>,
        #[serde(default)]
        nmax: Option<usize>,
        #[serde(default)]
        dual: bool,
    },
    ClassifyAdjacency {},
    Invariants {},
    Equivalent {
        other: ShiftSpec,
    },
    DualSubnormality {
        #[serde(default)]
        nmax: Option<usize>,
        #[serde(default)]
        witnesses: Option<Vec<VertexRef>>,
        #[serde(default = "yes")]
        require_two_isometry: bool,
    },
    #[serde(rename = "verify-table1")]
    VerifyTable1 {
        row: Table1Row,
        #[serde(default)]
        nmax: Option<usize>,
        #[serde(default)]
        depth: Option<usize>,
    },
    Demo {
        demo: String,
    },
}

fn yes() -> bool {
    true
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Materialize {} => "materialize",
            Command::ClassifyTree {} => "classify-tree",
            Command::CheckTwoIsometry {} => "check-2iso",
            Command::CheckKernel { .. } => "check-kernel",
            Command::CauchyDual {} => "cauchy-dual",
            Command::Moments { .. } => "moments",
            Command::ClassifyAdjacency {} => "classify-adjacency",
            Command::Invariants {} => "invariants",
            Command::Equivalent { .. } => "equivalent",
            Command::DualSubnormality { .. } => "dual-subnormality",
            Command::VerifyTable1 { .. } => "verify-table1",
            Command::Demo { .. } => "demo",
        }
    }
}

/// Parses and validates a run specification.
pub fn parse_spec(text: &str) -> Result<RunSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: RunSpec = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    if let Some(w) = &spec.weights {
        w.validate().map_err(|(field, e)| Error::Parse {
            path: format!("weights.{field}"),
            message: e.to_string(),
        })?;
    }
    for (i, c) in spec.commands.iter().enumerate() {
        if let Command::Equivalent { other } = c {
            other.weights.validate().map_err(|(field, e)| Error::Parse {
                path: format!("commands[{i}].other.weights.{field}"),
                message: e.to_string(),
            })?;
        }
    }
    for (name, t) in [("check", spec.tolerances.check), ("oracle", spec.tolerances.oracle)] {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Parse {
                path: format!("tolerances.{name}"),
                message: format!("tolerance must be positive, got {t}"),
            });
        }
    }
    Ok(spec)
}

/// Command-line overrides applied on top of a spec or demo.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub nmax: Option<usize>,
    pub depth: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
    Skipped,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommandResult {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub result: Value,
    pub elapsed_ms: f64,
}

/// Outcome of a catalog demo against the published conclusion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoOutcome {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub input_digest: String,
    pub commands: Vec<CommandResult>,
    pub demos: Vec<DemoOutcome>,
    #[serde(skip)]
    pub csv: Option<String>,
}

impl Report {
    fn new(digest_input: &str) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            input_digest: hex::encode(Sha256::digest(digest_input.as_bytes())),
            commands: Vec::new(),
            demos: Vec::new(),
            csv: None,
        }
    }

    /// 0 when everything completed as expected, 1 when a demo contradicted
    /// its published conclusion or a command ended in an error.
    pub fn exit_code(&self) -> i32 {
        let demo_bad = self.demos.iter().any(|d| !d.matches);
        let errored = self.commands.iter().any(|c| c.status == Status::Error);
        if demo_bad || errored {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per command.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.commands {
            let status = serde_json::to_value(c.status).expect("status serializes");
            out.push_str(&format!(
                "{:<20} {:<8} {}\n",
                c.name,
                status.as_str().unwrap_or_default(),
                c.message.as_deref().unwrap_or("")
            ));
        }
        for d in &self.demos {
            out.push_str(&format!(
                "demo {:<15} {} {}\n",
                d.name,
                if d.matches { "MATCH" } else { "MISMATCH" },
                d.observed
            ));
        }
        out
    }
}

struct Context {
    shift: Option<WeightedShift>,
    tree: Option<Arc<DirectedTree>>,
    tree_spec: Option<TreeSpec>,
    weight_spec: Option<WeightSpec>,
    tol: f64,
    oracle_tol: f64,
    nmax: Option<usize>,
    two_isometry: Option<std::result::Result<(), String>>,
    csv: Option<String>,
}

impl Context {
    fn tree(&self) -> Result<&Arc<DirectedTree>> {
        self.tree
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs a `tree`".into()))
    }

    fn shift(&self) -> Result<&WeightedShift> {
        self.shift
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs `tree` and `weights`".into()))
    }

    /// Memoized 2-isometry precondition.
    fn two_isometry(&mut self) -> Result<std::result::Result<(), String>> {
        if self.two_isometry.is_none() {
            let v = self.shift()?.is_two_isometry(self.tol)?;
            self.two_isometry = Some(if v.holds() {
                Ok(())
            } else {
                Err(v.verdict.witness.map(|w| w.vertex).unwrap_or_default())
            });
        }
        Ok(self.two_isometry.clone().expect("set above"))
    }
}

enum Outcome {
    Done(Status, Value, Option<String>),
    Skipped(String),
}

fn ok<T: Serialize>(v: &T, holds: bool, message: Option<String>) -> Result<Outcome> {
    let status = if holds { Status::Ok } else { Status::Failed };
    Ok(Outcome::Done(
        status,
        serde_json::to_value(v).expect("serializable"),
        message,
    ))
}

/// Runs the commands of `spec` in order. Per-command failures are recorded;
/// only an unbuildable tree or weight specification aborts.
pub fn run_suite(spec: &RunSpec, overrides: &Overrides) -> Result<Report> {
    let mut tree_spec = spec.tree.clone();
    if let (Some(t), Some(d)) = (tree_spec.as_mut(), overrides.depth) {
        t.depth = d;
    }
    let tree = tree_spec.as_ref().map(|t| t.materialize().map(Arc::new)).transpose()?;
    let shift = match (&tree, &spec.weights) {
        (Some(t), Some(w)) => Some(build_shift(w, Arc::clone(t))?),
        (None, Some(_)) => return Err(Error::Config("`weights` given without a `tree`".into())),
        _ => None,
    };
    let digest_input = format!(
        "{}\n{}",
        serde_json::to_string(spec).expect("spec serializes"),
        serde_json::to_string(overrides).expect("overrides serialize")
    );
    let mut report = Report::new(&digest_input);
    let mut ctx = Context {
        shift,
        tree,
        tree_spec,
        weight_spec: spec.weights.clone(),
        tol: overrides.tol.unwrap_or(spec.tolerances.check),
        oracle_tol: overrides.tol.unwrap_or(spec.tolerances.oracle),
        nmax: overrides.nmax,
        two_isometry: None,
        csv: None,
    };
    for cmd in &spec.commands {
        let start = Instant::now();
        let outcome = run_command(cmd, &mut ctx, &mut report, overrides);
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        let (status, result, message) = match outcome {
            Ok(Outcome::Done(s, v, m)) => (s, v, m),
            Ok(Outcome::Skipped(m)) => (Status::Skipped, Value::Null, Some(m)),
            Err(e) => (Status::Error, Value::Null, Some(e.to_string())),
        };
        report.commands.push(CommandResult {
            name: cmd.name().to_string(),
            status,
            message,
            result,
            elapsed_ms,
        });
    }
    report.csv = ctx.csv.take();
    Ok(report)
}

fn run_command(cmd: &Command, ctx: &mut Context, report: &mut Report, overrides: &Overrides) -> Result<Outcome> {
    let tol = ctx.tol;
    match cmd {
        Command::Materialize {} => {
            let t = ctx.tree()?;
            let sizes: Vec<usize> = (0..=t.materialized_depth())
                .map(|g| t.generation(g).map(<[Vertex]>::len))
                .collect::<Result<_>>()?;
            ok(
                &json!({"vertices": t.len(), "materialized_depth": t.materialized_depth(), "generation_sizes": sizes}),
                true,
                Some(format!("{} vertices", t.len())),
            )
        }
        Command::ClassifyTree {} => {
            let r = classify_tree(ctx.tree()?);
            let msg = format!("quasi-Brownian: {}", r.quasi_brownian.holds);
            ok(&r, true, Some(msg))
        }
        Command::CheckTwoIsometry {} => {
            let v = ctx.shift()?.is_two_isometry(tol)?;
            ctx.two_isometry = Some(if v.holds() {
                Ok(())
            } else {
                Err(v.verdict.witness.as_ref().map(|w| w.vertex.clone()).unwrap_or_default())
            });
            let msg = v
                .verdict
                .witness
                .as_ref()
                .map(|w| format!("witness `{}`: {}", w.vertex, w.detail));
            ok(&v, v.holds(), msg)
        }
        Command::CheckKernel { k } => {
            let v = ctx.shift()?.satisfies_kernel_condition(*k, tol)?;
            let msg = v
                .witness
                .as_ref()
                .map(|w| format!("witness `{}`: {}", w.vertex, w.detail));
            ok(&v, v.holds, msg)
        }
        Command::CauchyDual {} => {
            let s = ctx.shift()?;
            let d = s.cauchy_dual()?;
            let t = s.tree();
            let weights: Vec<(String, f64)> = t
                .vertices()
                .skip(1)
                .map(|v| (t.id(v).to_string(), d.weight(v)))
                .collect();
            ok(
                &json!({"weights": weights, "operator_norm": d.operator_norm()}),
                true,
                None,
            )
        }
        Command::Moments { vertex, nmax, dual } => {
            let s = ctx.shift()?;
            let t = s.tree();
            let u = vertex.as_ref().map_or(Ok(t.root()), |v| v.resolve(t))?;
            let room = t.materialized_depth() - t.depth(u);
            let n = nmax.or(ctx.nmax).unwrap_or(DEFAULT_NMAX.min(room));
            let seq = d_sequence(s, u, n, *dual)?;
            ctx.csv = Some(seq.to_csv_string());
            let body = if seq.len() >= 3 {
                json!({"sequence": seq, "stieltjes": stieltjes_test(&seq, tol), "hausdorff": hausdorff_test(&seq, tol)})
            } else {
                json!({"sequence": seq})
            };
            ok(&body, true, Some(format!("{} values", seq.len())))
        }
        Command::ClassifyAdjacency {} => {
            let r = classify_adjacency(ctx.tree()?, tol)?;
            ok(&r, true, None)
        }
        Command::Invariants {} => {
            if let Err(w) = ctx.two_isometry()? {
                return Ok(Outcome::Skipped(format!("precondition check-2iso failed at `{w}`")));
            }
            let inv = shift_invariants(ctx.shift()?, tol)?;
            ok(&inv, true, None)
        }
        Command::Equivalent { other } => {
            let mut other_tree = other.tree.clone();
            if let Some(d) = overrides.depth {
                other_tree.depth = d;
            }
            let b = build_shift(&other.weights, Arc::new(other_tree.materialize()?))?;
            let ia = shift_invariants(ctx.shift()?, tol)?;
            let ib = shift_invariants(&b, tol)?;
            let eq = are_unitarily_equivalent(&ia, &ib)?;
            ok(
                &json!({"equivalent": eq, "this": ia, "other": ib}),
                true,
                Some(format!("unitarily equivalent: {eq}")),
            )
        }
        Command::DualSubnormality {
            nmax,
            witnesses,
            require_two_isometry,
        } => {
            if *require_two_isometry {
                if let Err(w) = ctx.two_isometry()? {
                    return Ok(Outcome::Skipped(format!("precondition check-2iso failed at `{w}`")));
                }
            }
            let s = ctx.shift()?;
            let witnesses = witnesses
                .as_ref()
                .map(|ws| ws.iter().map(|w| w.resolve(s.tree())).collect::<Result<Vec<_>>>())
                .transpose()?;
            let opts = SubnormalityOptions {
                nmax: nmax.or(ctx.nmax).unwrap_or(DEFAULT_NMAX),
                tol,
                witnesses,
                require_two_isometry: *require_two_isometry,
            };
            let r = dual_subnormality(s, &opts)?;
            let msg = format!("[{}] {}", r.decision_path.id(), r.summary);
            ok(&r, true, Some(msg))
        }
        Command::VerifyTable1 { row, nmax, depth } => {
            let s = match depth {
                Some(d) => {
                    let mut t = ctx
                        .tree_spec
                        .clone()
                        .ok_or_else(|| Error::Config("verify-table1 needs a `tree`".into()))?;
                    t.depth = *d;
                    let w = ctx
                        .weight_spec
                        .as_ref()
                        .ok_or_else(|| Error::Config("verify-table1 needs `weights`".into()))?;
                    build_shift(w, Arc::new(t.materialize()?))?
                }
                None => ctx.shift()?.clone(),
            };
            let interior = s.tree().materialized_depth().saturating_sub(1);
            let n = nmax.or(ctx.nmax).unwrap_or(10.min(interior));
            let r = verify_table1(OperatorSource::Shift(&s), *row, n, ctx.oracle_tol)?;
            let msg = format!("max deviation {:e}", r.max_deviation);
            ok(&r, r.passed, Some(msg))
        }
        Command::Demo { demo } => {
            let sub = run_demo(demo, overrides)?;
            let outcome = sub.demos.first().cloned();
            report.demos.extend(sub.demos.iter().cloned());
            let matches = outcome.as_ref().is_some_and(|o| o.matches);
            let msg = outcome.map(|o| o.observed);
            ok(&json!({"commands": sub.commands}), matches, msg)
        }
    }
}

/// Names accepted by [`run_demo`]; `nbnkcsub-<l>` takes any valency `l >= 2`.
pub const DEMO_CATALOG: &[&str] = &[
    "dirichlet",
    "bergman-dual",
    "treiso",
    "glowny",
    "przadj",
    "nbnkcsub-<l>",
    "brownian-shift",
    "two-plus-three",
    "mewa-distinction",
];

struct Demo {
    report: Report,
    tol: f64,
    nmax: usize,
}

impl Demo {
    fn step<T: Serialize>(
        &mut self,
        name: &str,
        status: Status,
        message: impl Into<String>,
        value: &T,
        start: Instant,
    ) {
        self.report.commands.push(CommandResult {
            name: name.to_string(),
            status,
            message: Some(message.into()),
            result: serde_json::to_value(value).expect("serializable"),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }

    fn conclude(mut self, name: &str, expected: &str, observed: String, matches: bool) -> Report {
        self.report.demos.push(DemoOutcome {
            name: name.to_string(),
            expected: expected.to_string(),
            observed,
            matches,
        });
        self.report
    }
}

fn status(holds: bool) -> Status {
    if holds {
        Status::Ok
    } else {
        Status::Failed
    }
}

fn demo_shift(w: WeightSpec, t: TreeSpec) -> Result<WeightedShift> {
    build_shift(&w, Arc::new(t.materialize()?))
}

/// Runs one catalog example and compares it with its published conclusion.
pub fn run_demo(name: &str, overrides: &Overrides) -> Result<Report> {
    let digest_input = format!(
        "demo:{name}\n{}",
        serde_json::to_string(overrides).expect("overrides serialize")
    );
    let demo = Demo {
        report: Report::new(&digest_input),
        tol: overrides.tol.unwrap_or(DEFAULT_TOL),
        nmax: overrides.nmax.unwrap_or(DEFAULT_NMAX),
    };
    let depth = |default: usize| overrides.depth.unwrap_or(default);
    match name {
        "dirichlet" => demo_dirichlet(demo, depth(64)),
        "bergman-dual" => demo_bergman(demo, depth(64)),
        "treiso" => demo_treiso(demo, depth(32)),
        "glowny" => demo_glowny(demo, depth(16)),
        "przadj" => demo_przadj(demo, depth(14)),
        "brownian-shift" => demo_brownian(demo, depth(64)),
        "two-plus-three" => demo_two_plus_three(demo, depth(10)),
        "mewa-distinction" => demo_mewa(demo, depth(12)),
        _ => match name.strip_prefix("nbnkcsub-").map(str::parse::<usize>) {
            Some(Ok(l)) if l >= 2 => demo_nbnkcsub(demo, l, depth(14)),
            _ => Err(Error::Usage(format!(
                "unknown demo `{name}`; catalog: {}",
                DEMO_CATALOG.join(", ")
            ))),
        },
    }
}

fn subnormality_step(
    demo: &mut Demo,
    s: &WeightedShift,
    require_two_isometry: bool,
) -> Result<(Subnormality, DecisionPath, crate::subnormality::SubnormalityReport)> {
    let start = Instant::now();
    let opts = SubnormalityOptions {
        nmax: demo.nmax,
        tol: demo.tol,
        witnesses: None,
        require_two_isometry,
    };
    let r = dual_subnormality(s, &opts)?;
    let msg = format!("[{}] {}", r.decision_path.id(), r.summary);
    demo.step("dual-subnormality", Status::Ok, msg, &r, start);
    Ok((r.verdict, r.decision_path, r))
}

fn demo_dirichlet(mut demo: Demo, n: usize) -> Result<Report> {
    let s = demo_shift(WeightSpec::Dirichlet {}, TreeSpec::path(n))?;
    let (verdict, path, _) = subnormality_step(&mut demo, &s, true)?;
    let start = Instant::now();
    let nmax = 10.min(n.saturating_sub(1));
    let t1 = verify_table1(OperatorSource::Shift(&s), Table1Row::Kernel, nmax, 1e-9)?;
    demo.step(
        "verify-table1",
        status(t1.passed),
        format!("max deviation {:e}", t1.max_deviation),
        &t1,
        start,
    );
    let matches = verdict == Subnormality::Subnormal && path == DecisionPath::KernelCondition && t1.passed;
    let observed = format!(
        "{}; kernel-condition formula T′*ⁿT′ⁿ = (I + nΔ)⁻¹ verified for n <= {nmax}, max dev {:e}",
        if verdict == Subnormality::Subnormal {
            "subnormal contraction"
        } else {
            "NOT established subnormal"
        },
        t1.max_deviation
    );
    Ok(demo.conclude(
        "dirichlet",
        "subnormal contraction; kernel-condition formula verified, max dev < 1e-9",
        observed,
        matches,
    ))
}

fn demo_bergman(mut demo: Demo, n: usize) -> Result<Report> {
    let start = Instant::now();
    let d = demo_shift(WeightSpec::Dirichlet {}, TreeSpec::path(n))?;
    let b = build_shift(&WeightSpec::BergmanDual {}, Arc::clone(d.tree_arc()))?;
    let dual = d.cauchy_dual()?;
    let dev = dual
        .weights()
        .iter()
        .zip(b.weights())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    demo.step(
        "cauchy-dual",
        status(dev < 1e-12),
        format!("max |λ′ − √((n+1)/(n+2))| = {dev:e}"),
        &json!({"max_weight_deviation": dev}),
        start,
    );
    let start = Instant::now();
    let seq = d_sequence(&b, b.tree().root(), demo.nmax.min(n), false)?;
    let st = stieltjes_test(&seq, demo.tol);
    demo.step(
        "moments",
        status(st.holds),
        st.detail.clone(),
        &json!({"sequence": seq, "stieltjes": st}),
        start,
    );
    let matches = dev < 1e-12 && st.holds;
    let observed = format!("Cauchy dual of the Dirichlet shift has weights √((n+1)/(n+2)) (max dev {dev:e}); ‖Bⁿe_0‖² = 1/(n+1) passes the Stieltjes test");
    Ok(demo.conclude(
        "bergman-dual",
        "the Cauchy dual of the Dirichlet shift is the Bergman shift",
        observed,
        matches,
    ))
}

fn demo_treiso(mut demo: Demo, n: usize) -> Result<Report> {
    let s = demo_shift(WeightSpec::Treiso {}, TreeSpec::path(n))?;
    let op = truncate(&s);
    let start = Instant::now();
    let b3 = op.defect_interior_norm(3)?;
    let b2 = op.defect_interior_norm(2)?;
    demo.step(
        "defect",
        status(b3 < 1e-10 && b2 > 1e-3),
        format!("interior ‖B_3‖ = {b3:e}, ‖B_2‖ = {b2:e}"),
        &json!({"b3_interior_norm": b3, "b2_interior_norm": b2}),
        start,
    );
    let start = Instant::now();
    let agler = defect_entry(&op.dual_matrix()?, 4, "g0:0")?;
    let exact = -12.0 / 85.0;
    demo.step(
        "agler-probe",
        status((agler - exact).abs() < 1e-12),
        format!("⟨B_4(T′)e_0, e_0⟩ = {agler} (exact −12/85 = {exact})"),
        &json!({"value": agler, "exact": exact}),
        start,
    );
    let (verdict, path, _) = subnormality_step(&mut demo, &s, false)?;
    let matches = verdict == Subnormality::NotSubnormal && b3 < 1e-10 && (agler - exact).abs() < 1e-12;
    let observed = format!(
        "3-isometry (‖B_3‖ = {b3:e}); ⟨B_4(T′)e_0, e_0⟩ = {agler:.12}; dual {} via {}",
        if verdict == Subnormality::NotSubnormal {
            "NOT subnormal"
        } else {
            "not refuted"
        },
        path.id()
    );
    Ok(demo.conclude(
        "treiso",
        "3-isometry whose Cauchy dual is NOT subnormal",
        observed,
        matches,
    ))
}

fn demo_glowny(mut demo: Demo, n: usize) -> Result<Report> {
    let s = demo_shift(WeightSpec::glowny(1.1, 1.3), TreeSpec::t_eta_0(2, n))?;
    let t = s.tree();
    let start = Instant::now();
    let two = s.is_two_isometry(demo.tol)?;
    demo.step(
        "check-2iso",
        status(two.holds()),
        "Σ λ_v²(2 − ‖S e_v‖²) = 1 at every vertex",
        &two,
        start,
    );
    for k in [0, 1] {
        let start = Instant::now();
        let v = s.satisfies_kernel_condition(k, demo.tol)?;
        demo.step("check-kernel", status(v.holds), format!("k = {k}"), &v, start);
    }
    let start = Instant::now();
    let r2 = s.vertex_norm_sq(t.root())?;
    let mut lhs = 0.0;
    for &v in t.children(t.root()) {
        lhs += s.weight(v).powi(2) / (2.0 - s.vertex_norm_sq(v)?);
    }
    demo.step(
        "cauchy-schwarz-gap",
        status(lhs > r2 * r2),
        format!("Σ λ_v²/(2 − ‖S e_v‖²) = {lhs:.9} > ‖S e_ω‖⁴ = {:.9}", r2 * r2),
        &json!({"sum": lhs, "root_norm_fourth": r2 * r2}),
        start,
    );
    let (verdict, path, r) = subnormality_step(&mut demo, &s, true)?;
    let order = r.root_evidence().and_then(|e| e.stieltjes.failing_order);
    let matches =
        two.holds() && verdict == Subnormality::NotSubnormal && path == DecisionPath::PerturbedKernelCondition;
    let observed = format!(
        "NOT subnormal ({} fast path); root Stieltjes failure at Hankel order {}",
        path.id(),
        order.map_or("none within the prefix".to_string(), |o| o.to_string())
    );
    Ok(demo.conclude(
        "glowny",
        "NOT subnormal (main2 fast path; Stieltjes failure order <= 4)",
        observed,
        matches,
    ))
}

fn demo_przadj(mut demo: Demo, n: usize) -> Result<Report> {
    let l = 3usize;
    let lf = l as f64;
    let s = WeightedShift::adjacency(Arc::new(TreeSpec::nested_comb_fan(l, n).materialize()?));
    let t = s.tree();
    let psi = t.by_path(&[0])?;
    let start = Instant::now();
    let mu = DiscreteMeasure::new([
        (0.25, 2.0 * (lf - 1.0) / (3.0 * lf * lf)),
        (1.0, (lf + 2.0) / (3.0 * lf * lf)),
    ])?;
    let m = demo.nmax.min(n - 1);
    let psi_seq = d_sequence(&s, psi, m, true)?;
    let psi_dev = (1..=m)
        .map(|k| (psi_seq.values[k] - mu.moment(k - 1)).abs())
        .fold(0.0, f64::max);
    let ext = backward_extension(&mu);
    let nu = ext
        .nu
        .clone()
        .ok_or_else(|| Error::Classification("ψ extension unexpectedly inadmissible".into()))?;
    let rho = DiscreteMeasure::mixture(&[
        ((lf - 1.0) / (lf * lf), &DiscreteMeasure::dirac(1.0)?),
        (1.0 / (lf * lf), &nu),
    ])?;
    let root_seq = d_sequence(&s, t.root(), m, true)?;
    let root_dev = (1..=m)
        .map(|k| (root_seq.values[k] - rho.moment(k - 1)).abs())
        .fold(0.0, f64::max);
    let rho0 = rho.mass_at(0.0);
    let root_ext = backward_extension(&rho);
    demo.step(
        "backward-extension",
        status(psi_dev < 1e-12 && root_dev < 1e-12 && !root_ext.admissible),
        format!(
            "∫t⁻¹dμ = {:.12}; ρ({{0}}) = {rho0:.12} (2/81 = {:.12}); root extension admissible: {}",
            ext.integral,
            2.0 / 81.0,
            root_ext.admissible
        ),
        &json!({"mu": mu, "integral": ext.integral, "nu": nu, "rho": rho, "psi_moment_deviation": psi_dev, "root_moment_deviation": root_dev, "root_extension": root_ext}),
        start,
    );
    let (verdict, _, _) = subnormality_step(&mut demo, &s, true)?;
    let matches = verdict == Subnormality::NotSubnormal && (rho0 - 2.0 / 81.0).abs() < 1e-12 && !root_ext.admissible;
    let observed = format!(
        "{}; ρ({{0}}) = {rho0:.12}",
        if verdict == Subnormality::NotSubnormal {
            "NOT subnormal"
        } else {
            "not refuted"
        }
    );
    Ok(demo.conclude("przadj", "NOT subnormal; ρ({0}) = 2/81", observed, matches))
}

fn demo_nbnkcsub(mut demo: Demo, l: usize, n: usize) -> Result<Report> {
    let name = format!("nbnkcsub-{l}");
    let s = WeightedShift::adjacency(Arc::new(TreeSpec::comb_fan(l, n).materialize()?));
    let start = Instant::now();
    let classes = classify_adjacency(s.tree(), demo.tol)?;
    demo.step(
        "classify-adjacency",
        Status::Ok,
        format!(
            "2-isometry {}, quasi-Brownian {}, kernel condition {}",
            classes.two_isometry.holds, classes.quasi_brownian_isometry.holds, classes.kernel_condition.holds
        ),
        &classes,
        start,
    );
    let (verdict, _, r) = subnormality_step(&mut demo, &s, true)?;
    let mut matches = verdict == Subnormality::Subnormal
        && classes.two_isometry.holds
        && !classes.kernel_condition.holds
        && !classes.brownian_isometry.holds
        && classes.quasi_brownian_isometry.holds == (l == 2);
    if l == 2 {
        let depth = n.min(12);
        let small = WeightedShift::adjacency(Arc::new(TreeSpec::comb_fan(2, depth).materialize()?));
        for row in [Table1Row::AdjacencyPattern, Table1Row::QuasiBrownian] {
            let start = Instant::now();
            let rep = verify_table1(OperatorSource::Shift(&small), row, 6.min(depth - 1), 1e-9)?;
            matches &= rep.passed;
            demo.step(
                "verify-table1",
                status(rep.passed),
                format!("max deviation {:e}", rep.max_deviation),
                &rep,
                start,
            );
        }
    }
    let observed = format!(
        "{}; quasi-Brownian: {}; root closed-form deviation {:e}",
        if verdict == Subnormality::Subnormal {
            "subnormal contraction"
        } else {
            "NOT established subnormal"
        },
        classes.quasi_brownian_isometry.holds,
        r.closed_form_deviation.unwrap_or(f64::NAN)
    );
    Ok(demo.conclude(
        &name,
        "2-isometric adjacency operator with subnormal dual; quasi-Brownian iff l = 2; never Brownian",
        observed,
        matches,
    ))
}

fn demo_brownian(mut demo: Demo, n: usize) -> Result<Report> {
    let op = build_brownian_shift(1.0, n)?;
    let start = Instant::now();
    let rep = verify_table1(
        OperatorSource::Matrix(&op),
        Table1Row::QuasiBrownian,
        10.min(n - 1),
        1e-9,
    )?;
    demo.step(
        "verify-table1",
        status(rep.passed),
        format!("max deviation {:e}", rep.max_deviation),
        &rep,
        start,
    );
    let start = Instant::now();
    let dual = op.dual_matrix()?;
    let c = op.index_of("c").expect("summand c present");
    let r1 = dual.matrix.column(c).norm_squared();
    demo.step(
        "gram-diag",
        status((r1 - 0.5).abs() < 1e-12),
        format!("‖T′e_c‖² = {r1} (expected (1 + 2⁻¹)/3 = 0.5)"),
        &json!({"value": r1}),
        start,
    );
    let matches = rep.passed && (r1 - 0.5).abs() < 1e-12;
    let observed = format!(
        "quasi-Brownian formula verified, max dev {:e}; r_1(2) = {r1}",
        rep.max_deviation
    );
    Ok(demo.conclude(
        "brownian-shift",
        "quasi-Brownian isometry with subnormal dual; r_1(2) = 0.5",
        observed,
        matches,
    ))
}

fn demo_two_plus_three(mut demo: Demo, n: usize) -> Result<Report> {
    let build = |degrees: Vec<Vec<usize>>, x: f64| -> Result<WeightedShift> {
        demo_shift(WeightSpec::kernel_condition(x), TreeSpec::generation_rule(degrees, n))
    };
    let first = vec![vec![2], vec![3, 1]];
    let second = vec![vec![2], vec![2, 2]];
    let start = Instant::now();
    let a = shift_invariants(&build(first.clone(), 1.2)?, demo.tol)?;
    let b = shift_invariants(&build(second.clone(), 1.2)?, demo.tol)?;
    let c = shift_invariants(&build(second, 1.3)?, demo.tol)?;
    let same = are_unitarily_equivalent(&a, &b)?;
    let differ = are_unitarily_equivalent(&a, &c)?;
    let mut trees = BTreeMap::new();
    trees.insert("first", &a);
    trees.insert("second", &b);
    demo.step(
        "equivalent",
        status(same && !differ),
        format!("same x: {same}; x = 1.2 vs 1.3: {differ}"),
        &json!({"invariants": trees, "x_changed": c, "equivalent_same_x": same, "equivalent_changed_x": differ}),
        start,
    );
    let observed = format!(
        "non-isomorphic trees with branching {:?}: unitarily equivalent = {same}; with different x = {differ}",
        &a.branching[..3.min(a.branching.len())]
    );
    Ok(demo.conclude(
        "two-plus-three",
        "unitarily equivalent despite non-isomorphic trees",
        observed,
        same && !differ,
    ))
}

fn demo_mewa(mut demo: Demo, n: usize) -> Result<Report> {
    let tree = TreeSpec::quasi_brownian(3, n).materialize()?;
    let start = Instant::now();
    let r = classify_adjacency(&tree, demo.tol)?;
    let matches = r.two_isometry.holds && r.quasi_brownian_isometry.holds && !r.brownian_isometry.holds;
    demo.step(
        "classify-adjacency",
        status(matches),
        format!(
            "quasi-Brownian {}, Brownian {}",
            r.quasi_brownian_isometry.holds, r.brownian_isometry.holds
        ),
        &r,
        start,
    );
    let observed = format!(
        "adjacency on the quasi-Brownian tree of valency 3: quasi-Brownian = {}, Brownian = {}",
        r.quasi_brownian_isometry.holds, r.brownian_isometry.holds
    );
    Ok(demo.conclude("mewa-distinction", "quasi-Brownian but not Brownian", observed, matches))
}

/// Convenience for examples and tests: the root dual moment sequence.
pub fn root_dual_sequence(s: &WeightedShift, nmax: usize) -> Result<MomentSequence> {
    d_sequence(s, s.tree().root(), nmax, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_examples() {
        let a = parse_spec(r#"{"tree":{"kind":"path","depth":64},"weights":{"kind":"dirichlet"},"commands":[{"name":"dual-subnormality"}]}"#).unwrap();
        assert_eq!(a.commands.len(), 1);
        parse_spec(r#"{"tree":{"kind":"t_eta_kappa","eta":2,"kappa":0,"depth":16},"weights":{"kind":"glowny","y1":1.1,"y2":1.3}}"#).unwrap();
        let e = parse_spec(r#"{"weights":{"kind":"glowny","y1":1.5}}"#).unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        let e = parse_spec(r#"{"weights":{"kind":"glowny","y1":1.5,"y2":1.2}}"#).unwrap_err();
        assert!(matches!(e, Error::Parse { ref path, .. } if path == "weights.y1"));
        let e = parse_spec(r#"{"tree":{"kind":"path","depth":4},"bogus":1}"#).unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        let e = parse_spec(r#"{"commands":[{"name":"check-kernel","k":1,"extra":true}]}"#).unwrap_err();
        assert!(matches!(e, Error::Parse { ref path, .. } if path.starts_with("commands")));
    }

    #[test]
    fn suite_on_dirichlet() {
        let spec = parse_spec(
            r#"{"tree":{"kind":"path","depth":32},"weights":{"kind":"dirichlet"},
            "commands":[{"name":"check-2iso"},{"name":"check-kernel"},{"name":"dual-subnormality"}]}"#,
        )
        .unwrap();
        let r = run_suite(&spec, &Overrides::default()).unwrap();
        assert!(r.commands.iter().all(|c| c.status == Status::Ok));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn suite_skips_after_failed_precondition() {
        let spec = parse_spec(
            r#"{"tree":{"kind":"t_eta_kappa","eta":2,"kappa":0,"depth":8},"weights":{"kind":"adjacency"},
            "commands":[{"name":"check-2iso"},{"name":"check-kernel"},{"name":"dual-subnormality"}]}"#,
        )
        .unwrap();
        let r = run_suite(&spec, &Overrides::default()).unwrap();
        let st: Vec<Status> = r.commands.iter().map(|c| c.status).collect();
        assert_eq!(st, vec![Status::Failed, Status::Ok, Status::Skipped]);
        assert!(r.commands[0].message.as_deref().unwrap().contains("g0:0"));
    }

    #[test]
    fn moments_csv() {
        let spec = parse_spec(
            r#"{"tree":{"kind":"path","depth":10},"weights":{"kind":"dirichlet"},
            "commands":[{"name":"moments","nmax":6,"dual":true,"vertex":[]}]}"#,
        )
        .unwrap();
        let r = run_suite(&spec, &Overrides::default()).unwrap();
        let csv = r.csv.unwrap();
        assert!(csv.starts_with("n,value\n"));
        assert_eq!(csv.lines().count(), 8);
    }

    #[test]
    fn incompatible_weights_are_config_errors() {
        let spec =
            parse_spec(r#"{"tree":{"kind":"path","depth":10},"weights":{"kind":"glowny","y1":1.1,"y2":1.3}}"#).unwrap();
        assert!(matches!(run_suite(&spec, &Overrides::default()), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_demo() {
        let e = run_demo("nope", &Overrides::default()).unwrap_err();
        assert!(matches!(e, Error::Usage(ref m) if m.contains("glowny")));
        assert!(run_demo("nbnkcsub-1", &Overrides::default()).is_err());
    }

    #[test]
    fn report_is_deterministic() {
        let spec = parse_spec(
            r#"{"tree":{"kind":"quasi_brownian","valency":3,"depth":6},"weights":{"kind":"adjacency"},
            "commands":[{"name":"classify-tree"},{"name":"classify-adjacency"},{"name":"moments","dual":true}]}"#,
        )
        .unwrap();
        let strip = |mut r: Report| {
            for c in &mut r.commands {
                c.elapsed_ms = 0.0;
            }
            r.to_json()
        };
        let a = strip(run_suite(&spec, &Overrides::default()).unwrap());
        let b = strip(run_suite(&spec, &Overrides::default()).unwrap());
        assert_eq!(a, b);
    }
}
