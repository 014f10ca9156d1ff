//! Batch front end over instance files.
//!
//! Every command returns a [`Report`]; the process exit status is
//! [`Report::exit_code`] on success and [`EXIT_USAGE`] when a file cannot be
//! read, parsed or resolved.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use orbitkit::booldyn::{find_graph_isomorphism, shift_local_homeomorphism_failures, ultrafilters};
use orbitkit::category::{
    check_preserves_stabilisers, functor_invert, is_isomorphism, validate_coe, validate_orbit_morphism, CoeTriple,
    IsoFailure, MorphismViolation, OrbitMorphism,
};
use orbitkit::format::load_instance;
use orbitkit::groupoid::{find_groupoid_isomorphism, transformation_groupoid, FiniteGroupoid};
use orbitkit::model::{resolve, CoeData, Model};
use orbitkit::pds::FinitePds;
use orbitkit::recognition::{recognize, validate_partition};
use orbitkit::shift::{
    check_stab_preserving_dr, coe_ab_to_kl, eventual_conjugacy_dr, eventual_conjugacy_shift, validate_coe_dr,
    validate_shift_coe, DrCoeData, DrCoeReport, FiniteGraph, PointFailure, ShiftCoe, ShiftCoeReport, StabReport,
};
use orbitkit::Error;
use serde_json::{json, Value};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default for `--bound` (word length and `|k|` in truncated tables).
pub const DEFAULT_BOUND: usize = 2;
/// Default for `--depth` (prefix and cycle length of sample points).
pub const DEFAULT_DEPTH: usize = 3;

/// One named check on one subject.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub file: String,
    pub subject: String,
    pub name: String,
    pub passed: bool,
    pub witnesses: Vec<String>,
    pub details: Vec<String>,
}

impl Check {
    fn new(file: &str, subject: &str, name: &str, witnesses: Vec<String>) -> Self {
        Check {
            file: file.to_string(),
            subject: subject.to_string(),
            name: name.to_string(),
            passed: witnesses.is_empty(),
            witnesses,
            details: Vec::new(),
        }
    }

    fn info(file: &str, subject: &str, name: &str, details: Vec<String>) -> Self {
        Check { details, ..Check::new(file, subject, name, Vec::new()) }
    }

    fn failed(file: &str, subject: &str, name: &str, reason: String) -> Self {
        Check::new(file, subject, name, vec![reason])
    }

    fn with(mut self, detail: impl Into<String>) -> Self {
        self.details.push(detail.into());
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "file": self.file,
            "subject": self.subject,
            "check": self.name,
            "status": if self.passed { "pass" } else { "fail" },
            "witnesses": self.witnesses,
            "details": self.details,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(command: &str) -> Self {
        Report { command: command.to_string(), checks: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "passed": self.passed(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status} {} {}: {}", c.file, c.subject, c.name);
            for d in &c.details {
                let _ = writeln!(out, "    {d}");
            }
            for w in &c.witnesses {
                let _ = writeln!(out, "    witness: {w}");
            }
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "{}: {} checks, {failed} failed", self.command, self.checks.len());
        out
    }
}

/// Reasons a command cannot run at all.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{file}: {source}")]
    Load { file: String, source: Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub bound: usize,
    pub depth: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { bound: DEFAULT_BOUND, depth: DEFAULT_DEPTH }
    }
}

pub fn load_model(path: &Path) -> Result<Model, CliError> {
    let file = path.display().to_string();
    let load = || resolve(&load_instance(path)?);
    let model = load().map_err(|source| CliError::Load { file: file.clone(), source })?;
    if model.is_empty() {
        return Err(CliError::Load {
            file,
            source: Error::Parse { line: 0, message: "no sections declared".into() },
        });
    }
    Ok(model)
}

fn morphism_violation(src: &FinitePds, v: &MorphismViolation) -> String {
    let g = |e| src.group().format_element(e);
    let x = |i: &usize| src.space().names().get(*i).cloned().unwrap_or_else(|| format!("#{i}"));
    match v {
        MorphismViolation::Shape => "phi does not map into the target space".into(),
        MorphismViolation::Missing { g: h, x: p } => format!("a({}, {}) is undefined", g(h), x(p)),
        MorphismViolation::Intertwining { g: h, x: p } => format!("phi({0}.{1}) != a({0}, {1}).phi({1})", g(h), x(p)),
        MorphismViolation::Unit { x: p } => format!("a(e, {}) is not the identity", x(p)),
        MorphismViolation::Cocycle { g1, g2, x: p } => {
            format!("a({0}{1}, {2}) != a({0}, {1}.{2}) a({1}, {2})", g(g1), g(g2), x(p))
        }
    }
}

fn iso_failure(src: &FinitePds, tgt: &FinitePds, f: &IsoFailure) -> String {
    let x = |i: &usize| src.space().name(*i).to_string();
    match f {
        IsoFailure::PhiNotInjective { x1, x2 } => format!("phi({}) = phi({})", x(x1), x(x2)),
        IsoFailure::PhiNotSurjective { y } => format!("`{}` is not in the image of phi", tgt.space().name(*y)),
        IsoFailure::CocycleNotInjective { x: p, g1, g2 } => format!(
            "a({}, {2}) = a({}, {2})",
            src.group().format_element(g1),
            src.group().format_element(g2),
            x(p)
        ),
        IsoFailure::CocycleNotSurjective { x: p, h } => {
            format!("`{}` is not a value of a(., {})", tgt.group().format_element(h), x(p))
        }
    }
}

fn point_failures<'a>(lists: impl IntoIterator<Item = (&'a str, &'a [PointFailure])>) -> Vec<String> {
    lists
        .into_iter()
        .flat_map(|(tag, l)| l.iter().map(move |f| format!("{tag} {}", f.describe())))
        .collect()
}

fn shift_coe_witnesses(r: &ShiftCoeReport) -> Vec<String> {
    let mut out: Vec<String> = r.structure.iter().map(|s| format!("structure {s}")).collect();
    out.extend(point_failures([
        ("bijection", r.bijection.as_slice()),
        ("forward", r.forward.as_slice()),
        ("backward", r.backward.as_slice()),
        ("a-cocycle", r.a_cocycle.as_slice()),
        ("b-cocycle", r.b_cocycle.as_slice()),
    ]));
    out
}

fn dr_coe_witnesses(r: &DrCoeReport) -> Vec<String> {
    let mut out: Vec<String> = r.structure.iter().map(|s| format!("structure {s}")).collect();
    out.extend(point_failures([
        ("bijection", r.bijection.as_slice()),
        ("forward", r.forward.as_slice()),
        ("backward", r.backward.as_slice()),
    ]));
    out
}

fn stab_witnesses(r: &StabReport) -> Vec<String> {
    point_failures([("sum", r.sums.as_slice()), ("finiteness", r.finiteness.as_slice())])
}

fn format_morphism(src: &FinitePds, tgt: &FinitePds, m: &OrbitMorphism) -> Vec<String> {
    let mut out: Vec<String> = m
        .phi
        .iter()
        .enumerate()
        .map(|(x, &y)| format!("phi: {} -> {}", src.space().name(x), tgt.space().name(y)))
        .collect();
    for ((g, x), h) in &m.cocycle {
        out.push(format!(
            "a({}, {}) = {}",
            src.group().format_element(g),
            src.space().name(*x),
            tgt.group().format_element(h)
        ));
    }
    out
}

fn graph_checks(file: &str, name: &str, graph: &FiniteGraph, opts: Options, report: &mut Report) {
    let points = graph.boundary_paths(opts.depth, opts.depth);
    let action = match graph.induced_action() {
        Ok(a) => a,
        Err(e) => {
            report.checks.push(Check::failed(file, name, "induced action", e.to_string()));
            return;
        }
    };
    match action.restrict(&points, opts.bound) {
        Ok(pds) => {
            let w = pds.validate().iter().map(|v| v.describe(&pds)).collect();
            report.checks.push(Check::new(file, name, "partial action axioms", w).with(format!(
                "{} sample points, words of length <= {}",
                points.len(),
                opts.bound
            )));
        }
        Err(e) => report.checks.push(Check::failed(file, name, "partial action axioms", e.to_string())),
    }
    let orth = action
        .orthogonality_violations(&points)
        .into_iter()
        .map(|(a, b, x)| {
            format!("`{}` lies in U_{} and U_{}", graph.format_path(&x), graph.edge(a).name, graph.edge(b).name)
        })
        .collect();
    report.checks.push(Check::new(file, name, "orthogonality", orth));
    let semi = action
        .semi_saturation_violations(&points, opts.bound)
        .into_iter()
        .map(|(g, h, x)| {
            format!("phi_gh != phi_g phi_h at `{}` for g = {}, h = {}", graph.format_path(&x), graph.format_word(&g), graph.format_word(&h))
        })
        .collect();
    report.checks.push(Check::new(file, name, "semi-saturation", semi));
}

fn groupoid_summary(gpd: &FiniteGroupoid) -> Vec<String> {
    let mut out = vec![format!("{} arrows, {} units", gpd.arrow_count(), gpd.unit_count())];
    if gpd.is_truncated() {
        out.push("truncated: some composable pairs are not tabulated".into());
    }
    let sizes: Vec<String> = (0..gpd.unit_count())
        .map(|u| format!("{}:{}", gpd.units()[u], gpd.isotropy(u).map(|i| i.len()).unwrap_or(0)))
        .collect();
    if !sizes.is_empty() {
        out.push(format!("isotropy sizes {}", sizes.join(" ")));
    }
    out
}

/// Validates every declaration of every file.
pub fn cmd_validate(paths: &[PathBuf], opts: Options) -> Result<Report, CliError> {
    let mut report = Report::new("validate");
    for path in paths {
        let model = load_model(path)?;
        let file = path.display().to_string();
        let f = file.as_str();
        for s in &model.systems {
            let pds = &s.value;
            let w = pds.validate().iter().map(|v| v.describe(pds)).collect();
            let mut c = Check::new(f, &s.name, "partial action axioms", w)
                .with(format!("{} points, {} tabulated elements", pds.space().len(), pds.table().len()));
            if pds.is_truncated() {
                c = c.with(format!("generated, words of length <= {}", pds.truncation().unwrap_or(0)));
            }
            report.checks.push(c);
        }
        for g in &model.graphs {
            graph_checks(f, &g.name, &g.value, opts, &mut report);
        }
        for b in &model.boolean {
            let algebra = b.value.gbds.algebra();
            let count = ultrafilters(algebra.top()).len();
            let mut w = Vec::new();
            if count != algebra.atom_count() {
                w.push(format!("{count} ultrafilters for {} atoms", algebra.atom_count()));
            }
            w.extend(shift_local_homeomorphism_failures(&b.value.graph, opts.depth));
            let graph = &b.value.graph;
            let edges: Vec<String> = graph
                .edges()
                .iter()
                .map(|e| format!("{} = {} -> {}", e.name, graph.vertices()[e.r], graph.vertices()[e.d]))
                .collect();
            report.checks.push(
                Check::new(f, &b.name, "boolean system", w)
                    .with(format!("{} ultrafilters", count))
                    .with(format!("edges: {}", edges.join("; "))),
            );
            graph_checks(f, &b.name, graph, opts, &mut report);
        }
        for g in &model.groupoids {
            report.checks.push(Check::info(f, &g.name, "groupoid", groupoid_summary(&g.value)));
        }
        for m in &model.morphisms {
            let (src, tgt) = (model.system(&m.value.source), model.system(&m.value.target));
            let (Some(src), Some(tgt)) = (src, tgt) else { continue };
            let w = validate_orbit_morphism(src, tgt, &m.value.morphism)
                .iter()
                .map(|v| morphism_violation(src, v))
                .collect();
            report.checks.push(Check::new(f, &m.name, "orbit morphism", w));
        }
        for c in &model.coes {
            match &c.value.data {
                CoeData::Orbit(t) => {
                    let (Some(src), Some(tgt)) = (model.system(&c.value.source), model.system(&c.value.target))
                    else {
                        continue;
                    };
                    report.checks.extend(orbit_coe_checks(f, &c.name, src, tgt, t));
                }
                CoeData::Shift(t) => {
                    let (Some(src), Some(tgt)) = (model.graph(&c.value.source), model.graph(&c.value.target))
                    else {
                        continue;
                    };
                    let r = validate_shift_coe(src, tgt, t, opts.depth, opts.bound);
                    report.checks.push(Check::new(f, &c.name, "orbit equivalence", shift_coe_witnesses(&r)));
                }
            }
        }
        for d in &model.dr_coes {
            let (Some(src), Some(tgt)) = (model.graph(&d.value.source), model.graph(&d.value.target)) else {
                continue;
            };
            report.checks.extend(dr_checks(f, &d.name, src, tgt, &d.value.data, opts));
        }
        for p in &model.partitions {
            let Some(gpd) = model.groupoid(&p.value.groupoid) else { continue };
            let part = &p.value.partition;
            let c = match validate_partition(gpd, part) {
                Ok(v) => Check::new(f, &p.name, "bisection partition", v.iter().map(|v| v.describe(part)).collect()),
                Err(e) => Check::failed(f, &p.name, "bisection partition", e.to_string()),
            };
            report.checks.push(c);
        }
    }
    Ok(report)
}

fn orbit_coe_checks(f: &str, name: &str, src: &FinitePds, tgt: &FinitePds, t: &CoeTriple) -> Vec<Check> {
    let r = match validate_coe(src, tgt, t) {
        Ok(r) => r,
        Err(e) => return vec![Check::failed(f, name, "orbit equivalence", e.to_string())],
    };
    let fmt = |p: &FinitePds, (g, x): &(orbitkit::groups::GroupElement, usize)| {
        format!("({}, {})", p.group().format_element(g), p.space().name(*x))
    };
    let mut w: Vec<String> = r.forward.iter().map(|p| format!("forward equation fails at {}", fmt(src, p))).collect();
    w.extend(r.backward.iter().map(|p| format!("backward equation fails at {}", fmt(tgt, p))));
    let mut out = vec![Check::new(f, name, "orbit equivalence", w)
        .with(format!("a is a cocycle: {}", r.a_is_cocycle))
        .with(format!("b is a cocycle: {}", r.b_is_cocycle))];
    if !src.is_truncated() && !tgt.is_truncated() {
        for (essential, label) in [(false, "stabiliser preservation"), (true, "essential stabiliser preservation")] {
            let details = match check_preserves_stabilisers(src, tgt, t, essential) {
                Ok(v) if v.is_empty() => vec!["holds".to_string()],
                Ok(v) => vec![format!("fails at {} points", v.len())],
                Err(e) => vec![e.to_string()],
            };
            out.push(Check::info(f, name, label, details));
        }
    }
    out
}

fn dr_checks(f: &str, name: &str, src: &FiniteGraph, tgt: &FiniteGraph, d: &DrCoeData, opts: Options) -> Vec<Check> {
    let r = validate_coe_dr(src, tgt, d, opts.depth);
    vec![
        Check::new(f, name, "orbit equivalence", dr_coe_witnesses(&r)),
        Check::new(f, name, "stabiliser sums", stab_witnesses(&check_stab_preserving_dr(src, tgt, d, false, opts.depth))),
        Check::new(
            f,
            name,
            "essential stabiliser sums",
            stab_witnesses(&check_stab_preserving_dr(src, tgt, d, true, opts.depth)),
        ),
    ]
}

/// Unit and arrow counts of every groupoid a file determines, optionally
/// written to `dot` in DOT format.
pub fn cmd_groupoid(paths: &[PathBuf], dot: Option<&Path>, opts: Options) -> Result<Report, CliError> {
    let mut report = Report::new("groupoid");
    let mut dots = String::new();
    for path in paths {
        let model = load_model(path)?;
        let file = path.display().to_string();
        let mut add = |subject: &str, built: orbitkit::Result<FiniteGroupoid>| match built {
            Ok(g) => {
                dots.push_str(&g.to_dot());
                report.checks.push(Check::info(&file, subject, "groupoid", groupoid_summary(&g)));
            }
            Err(e) => report.checks.push(Check::failed(&file, subject, "groupoid", e.to_string())),
        };
        for s in &model.systems {
            add(&s.name, transformation_groupoid(&s.value));
        }
        for g in &model.graphs {
            add(&g.name, g.value.truncated_dr_groupoid(opts.bound, opts.bound));
        }
        for b in &model.boolean {
            add(&b.name, b.value.graph.truncated_dr_groupoid(opts.bound, opts.bound));
        }
        for g in &model.groupoids {
            add(&g.name, Ok(g.value.clone()));
        }
    }
    if let Some(out) = dot {
        std::fs::write(out, dots).map_err(|e| CliError::Usage(format!("{}: {e}", out.display())))?;
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Iso,
    Coe,
    Ec,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "iso" => Ok(Mode::Iso),
            "coe" => Ok(Mode::Coe),
            "ec" => Ok(Mode::Ec),
            _ => Err(format!("unknown mode `{s}` (expected iso, coe or ec)")),
        }
    }
}

enum Subject<'m> {
    System(&'m str, &'m FinitePds),
    Graph(&'m str, &'m FiniteGraph),
}

fn subject(model: &Model) -> Option<Subject<'_>> {
    if let Some(s) = model.systems.first() {
        return Some(Subject::System(&s.name, &s.value));
    }
    model
        .graphs
        .first()
        .map(|g| Subject::Graph(&g.name, &g.value))
        .or_else(|| model.boolean.first().map(|b| Subject::Graph(&b.name, &b.value.graph)))
}

/// Searches for an isomorphism between the first system (or graph) of each
/// file and runs the checks of `mode` on it.
pub fn cmd_equiv(a: &Path, b: &Path, mode: Mode, opts: Options) -> Result<Report, CliError> {
    let (ma, mb) = (load_model(a)?, load_model(b)?);
    let file = format!("{} {}", a.display(), b.display());
    let missing = |p: &Path| CliError::Usage(format!("{}: no system or graph to compare", p.display()));
    let mut report = Report::new("equiv");
    match (subject(&ma).ok_or_else(|| missing(a))?, subject(&mb).ok_or_else(|| missing(b))?) {
        (Subject::System(na, src), Subject::System(nb, tgt)) => {
            report.checks.extend(equiv_systems(&file, &format!("{na} ~ {nb}"), src, tgt, mode));
        }
        (Subject::Graph(na, src), Subject::Graph(nb, tgt)) => {
            report.checks.extend(equiv_graphs(&file, &format!("{na} ~ {nb}"), src, tgt, mode, opts));
        }
        _ => return Err(CliError::Usage("cannot compare a system with a graph".into())),
    }
    Ok(report)
}

fn find_orbit_isomorphism(src: &FinitePds, tgt: &FinitePds) -> Result<OrbitMorphism, String> {
    if src.space().len() != tgt.space().len() {
        return Err(format!("point counts differ ({} vs {})", src.space().len(), tgt.space().len()));
    }
    let (gs, gt) = (
        transformation_groupoid(src).map_err(|e| e.to_string())?,
        transformation_groupoid(tgt).map_err(|e| e.to_string())?,
    );
    if gs.arrow_count() != gt.arrow_count() {
        return Err(format!("arrow counts differ ({} vs {})", gs.arrow_count(), gt.arrow_count()));
    }
    let hom = find_groupoid_isomorphism(&gs, &gt)
        .map_err(|e| e.to_string())?
        .ok_or_else(|| "the transformation groupoids are not isomorphic".to_string())?;
    let m = functor_invert(&gs, &gt, &hom).map_err(|e| e.to_string())?;
    let bad = validate_orbit_morphism(src, tgt, &m);
    if let Some(v) = bad.first() {
        return Err(morphism_violation(src, v));
    }
    let fails = is_isomorphism(src, tgt, &m).map_err(|e| e.to_string())?;
    if let Some(f) = fails.first() {
        return Err(iso_failure(src, tgt, f));
    }
    Ok(m)
}

fn equiv_systems(f: &str, subject: &str, src: &FinitePds, tgt: &FinitePds, mode: Mode) -> Vec<Check> {
    let m = match find_orbit_isomorphism(src, tgt) {
        Ok(m) => m,
        Err(reason) => return vec![Check::failed(f, subject, "isomorphism", reason)],
    };
    let mut iso = Check::new(f, subject, "isomorphism", Vec::new());
    iso.details = format_morphism(src, tgt, &m);
    let mut out = vec![iso];
    match mode {
        Mode::Iso => {}
        Mode::Coe => match CoeTriple::from_isomorphism(src, tgt, &m) {
            Ok(t) => out.extend(orbit_coe_checks(f, subject, src, tgt, &t)),
            Err(e) => out.push(Check::failed(f, subject, "orbit equivalence", e.to_string())),
        },
        Mode::Ec => {
            let c = match orbitkit::shift::eventual_conjugacy_orbit(src, tgt, &m) {
                Ok(r) => Check::new(f, subject, "eventual conjugacy", r.failures),
                Err(e) => Check::failed(f, subject, "eventual conjugacy", e.to_string()),
            };
            out.push(c);
        }
    }
    out
}

fn equiv_graphs(f: &str, subject: &str, src: &FiniteGraph, tgt: &FiniteGraph, mode: Mode, opts: Options) -> Vec<Check> {
    if src.vertex_count() != tgt.vertex_count() || src.edge_count() != tgt.edge_count() {
        return vec![Check::failed(
            f,
            subject,
            "isomorphism",
            format!(
                "sizes differ ({} vertices, {} edges vs {} vertices, {} edges)",
                src.vertex_count(),
                src.edge_count(),
                tgt.vertex_count(),
                tgt.edge_count()
            ),
        )];
    }
    let Some((vmap, emap)) = find_graph_isomorphism(src, tgt) else {
        return vec![Check::failed(f, subject, "isomorphism", "no graph isomorphism".into())];
    };
    let mut iso = Check::new(f, subject, "isomorphism", Vec::new());
    iso.details = vmap
        .iter()
        .enumerate()
        .map(|(v, &w)| format!("@{} -> @{}", src.vertices()[v], tgt.vertices()[w]))
        .chain(emap.iter().enumerate().map(|(e, &g)| format!("{} -> {}", src.edge(e).name, tgt.edge(g).name)))
        .collect();
    let mut out = vec![iso];
    if mode == Mode::Iso {
        return out;
    }
    let t = match ShiftCoe::relabeling(src, tgt, &vmap, &emap) {
        Ok(t) => t,
        Err(e) => {
            out.push(Check::failed(f, subject, "orbit equivalence", e.to_string()));
            return out;
        }
    };
    let d = match coe_ab_to_kl(src, tgt, &t) {
        Ok(d) => d,
        Err(e) => {
            out.push(Check::failed(f, subject, "orbit equivalence", e.to_string()));
            return out;
        }
    };
    match mode {
        Mode::Coe => {
            let r = validate_shift_coe(src, tgt, &t, opts.depth, opts.bound);
            out.push(Check::new(f, subject, "orbit equivalence", shift_coe_witnesses(&r)));
            out.extend(dr_checks(f, subject, src, tgt, &d, opts));
        }
        Mode::Ec => {
            let shift = eventual_conjugacy_shift(src, &t);
            let dr = eventual_conjugacy_dr(src, &d, opts.depth);
            let mut w = shift.failures.clone();
            w.extend(dr.failures.iter().cloned());
            if shift.eventually_conjugate() != dr.eventually_conjugate() {
                w.push("length and grading verdicts disagree".into());
            }
            out.push(Check::new(f, subject, "eventual conjugacy", w));
        }
        Mode::Iso => unreachable!(),
    }
    out
}

/// Runs the recognition pipeline on every partition.
pub fn cmd_recognize(paths: &[PathBuf]) -> Result<Report, CliError> {
    let mut report = Report::new("recognize");
    for path in paths {
        let model = load_model(path)?;
        let file = path.display().to_string();
        if model.partitions.is_empty() {
            return Err(CliError::Usage(format!("{file}: needs a [partition] section")));
        }
        for p in &model.partitions {
            let Some(gpd) = model.groupoid(&p.value.groupoid) else { continue };
            let part = &p.value.partition;
            let violations = match validate_partition(gpd, part) {
                Ok(v) => v,
                Err(e) => {
                    report.checks.push(Check::failed(&file, &p.name, "bisection partition", e.to_string()));
                    continue;
                }
            };
            if !violations.is_empty() {
                let w = violations.iter().map(|v| v.describe(part)).collect();
                report.checks.push(Check::new(&file, &p.name, "bisection partition", w));
                continue;
            }
            match recognize(gpd, part) {
                Ok(r) => {
                    let mut c = Check::new(&file, &p.name, "recognition", Vec::new());
                    let rep = &r.cocycle.report;
                    let word = |w: &[u32]| w.iter().map(|&l| part.names[l as usize].as_str()).collect::<Vec<_>>().join(".");
                    for (w, forms) in &rep.critical_pairs {
                        let forms: Vec<String> = forms.iter().map(|f| word(f)).collect();
                        c.details.push(format!("rewriting is not confluent on {}: {}", word(w), forms.join(" | ")));
                    }
                    for &(i, j) in &rep.label_collisions {
                        c.witnesses.push(format!("blocks `{}` and `{}` get the same label", part.names[i], part.names[j]));
                    }
                    for &(g, h) in &rep.product_failures {
                        c.witnesses.push(format!("c({}{}) != c({})c({})", gpd.arrow(g).label, gpd.arrow(h).label, gpd.arrow(g).label, gpd.arrow(h).label));
                    }
                    for &g in &rep.inverse_failures {
                        c.witnesses.push(format!("c({0}^-1) != c({0})^-1", gpd.arrow(g).label));
                    }
                    c.passed = c.witnesses.is_empty();
                    let group = r.action.group();
                    c.details.push(format!("labels {}", part.names.join(", ")));
                    for (g, map) in r.action.table() {
                        let pairs: Vec<String> = map
                            .pairs()
                            .map(|(x, y)| format!("{} -> {}", r.action.space().name(x), r.action.space().name(y)))
                            .collect();
                        c.details.push(format!("{}: {}", group.format_element(g), pairs.join(", ")));
                    }
                    for (i, &j) in r.phi.phi.arrow_map.iter().enumerate() {
                        c.details.push(format!("Phi: {} -> {}", gpd.arrow(i).label, r.phi.target.arrow(j).label));
                    }
                    report.checks.push(c);
                }
                Err(e) => report.checks.push(Check::failed(&file, &p.name, "recognition", e.to_string())),
            }
        }
    }
    Ok(report)
}

/// Lists sample boundary paths of every graph with their minimal
/// stabilisers, comparing the essential one against brute force.
pub fn cmd_paths(paths: &[PathBuf], opts: Options) -> Result<Report, CliError> {
    let mut report = Report::new("paths");
    for path in paths {
        let model = load_model(path)?;
        let file = path.display().to_string();
        let graphs = model
            .graphs
            .iter()
            .map(|g| (&g.name, &g.value))
            .chain(model.boolean.iter().map(|b| (&b.name, &b.value.graph)));
        for (name, graph) in graphs {
            let fmt = |n: Option<usize>| n.map_or("inf".to_string(), |n| n.to_string());
            let mut c = Check::new(&file, name, "essential stabilisers", Vec::new());
            for x in graph.boundary_paths(opts.depth, opts.depth) {
                let (min, ess, brute) = (graph.stab_min(&x), graph.stab_min_ess(&x), graph.stab_min_ess_bruteforce(&x));
                c.details.push(format!("{} stab {} ess {}", graph.format_path(&x), fmt(min), fmt(ess)));
                if ess != brute {
                    c.witnesses.push(format!("`{}`: criterion {} vs search {}", graph.format_path(&x), fmt(ess), fmt(brute)));
                }
            }
            c.passed = c.witnesses.is_empty();
            report.checks.push(c);
        }
    }
    Ok(report)
}
