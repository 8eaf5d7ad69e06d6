//! Stage runner: derive, variety, resolve, verify, period, and the built-in
//! catalog. Every stage writes into one `Report`; a stage that cannot run
//! records a failure and later stages that depend on it are skipped.

use std::collections::BTreeMap;
use std::time::Instant;

use aat_algebra::{rat, rat_frac};
use serde_json::{json, Map, Value};

use crate::addition::{derive_negation, formula_checks, group_law_checks, resolve_addition, uniqueness_witness, AdditionError, AdditionFormula, UNRESOLVED};
use crate::alphabet::{standard_ring, z};
use crate::elimination::{derive_first_order, recipe_for, verify_general_dependence, AatSystem, FirstOrderRelation};
use crate::family::Family;
use crate::generator::generate;
use crate::numeric::backend::MappingBackend;
use crate::numeric::period::{default_grid, detect_period, quasi_periodicity, same_lattice};
use crate::numeric::recursion::{finite_difference_check, Recursion};
use crate::numeric::residual::{residual_check, Recipe};
use crate::numeric::sampling::{SampleBox, Sampler};
use crate::problem::{Options, ProblemSpec};
use crate::registry::registry_relations;
use crate::report::{complex, complex_vec, Report};
use crate::variety::{adjugate_identity_holds, build_pij, find_primitive_element, painleve_system, VarietySpec};

/// Group-law, recursion and witness sample counts and tolerances.
pub const GROUP_LAW_TRIPLES: usize = 50;
pub const GROUP_LAW_TOL: f64 = 1e-8;
pub const RECURSION_POINTS: usize = 20;
pub const RECURSION_TOL: f64 = 1e-6;
pub const WITNESS_PAIRS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Derive,
    Variety,
    Resolve,
    Verify,
    Period,
    All,
}

impl Stage {
    pub fn parse(s: &str) -> Option<Stage> {
        Some(match s {
            "derive" => Stage::Derive,
            "variety" => Stage::Variety,
            "resolve" => Stage::Resolve,
            "verify" => Stage::Verify,
            "period" => Stage::Period,
            "all" => Stage::All,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Derive => "derive",
            Stage::Variety => "variety",
            Stage::Resolve => "resolve",
            Stage::Verify => "verify",
            Stage::Period => "period",
            Stage::All => "all",
        }
    }

    fn variety(self) -> bool {
        matches!(self, Stage::Variety | Stage::Resolve | Stage::Verify | Stage::All)
    }

    fn resolve(self) -> bool {
        matches!(self, Stage::Resolve | Stage::Verify | Stage::All)
    }

    fn verify(self) -> bool {
        matches!(self, Stage::Verify | Stage::All)
    }

    fn period(self) -> bool {
        matches!(self, Stage::Period | Stage::All)
    }
}

/// One mapping to run: its family (for numerics), its addition-theorem
/// polynomials (absent for registry-only families) and options.
#[derive(Debug, Clone)]
pub struct Job {
    pub label: String,
    pub n: usize,
    pub family: Option<Family>,
    pub sys: Option<AatSystem>,
    pub options: Options,
    pub echo: Map<String, Value>,
}

fn options_echo(o: &Options) -> Value {
    json!({
        "tol": o.tol,
        "samples": o.samples,
        "seed": o.seed,
        "mode": o.mode.map_or("auto", |m| m.as_str()),
        "retries": o.retries,
        "box": o.box_half_width,
        "period-box": o.period_box,
    })
}

impl Job {
    pub fn from_spec(label: &str, spec: &ProblemSpec) -> Result<Job, String> {
        let sys = AatSystem::new(spec.aat.clone()).map_err(|e| e.to_string())?;
        let mut echo = Map::new();
        echo.insert("n".into(), json!(spec.n));
        echo.insert("family".into(), json!(spec.family.as_ref().map_or("none".to_string(), |f| f.to_string())));
        let bindings: BTreeMap<&String, String> = spec.bindings.iter().map(|(k, v)| (k, v.to_string())).collect();
        echo.insert("bindings".into(), json!(bindings));
        echo.insert("symbolic-params".into(), json!(spec.symbolic_params));
        let aat: Vec<Value> = spec
            .aat
            .iter()
            .zip(&spec.sources)
            .enumerate()
            .map(|(i, (g, s))| {
                json!({
                    "name": format!("G{}", i + 1),
                    "poly": g.to_string(),
                    "source": match s { crate::problem::PolySource::File => "file", crate::problem::PolySource::Generated => "generated" },
                })
            })
            .collect();
        echo.insert("aat".into(), Value::Array(aat));
        echo.insert("options".into(), options_echo(&spec.options));
        Ok(Job {
            label: label.to_string(),
            n: spec.n,
            family: spec.family.clone(),
            sys: Some(sys),
            options: spec.options.clone(),
            echo,
        })
    }

    /// A built-in family with generated polynomials when a generator exists.
    pub fn from_family(label: &str, family: Family, options: Options) -> Result<Job, String> {
        let n = family.n();
        let ring = standard_ring(n, &[]).map_err(|e| e.to_string())?;
        let (sys, source) = match generate(&family, &ring) {
            Ok(polys) => (Some(AatSystem::new(polys).map_err(|e| e.to_string())?), "generated"),
            Err(_) => (None, "none"),
        };
        let mut echo = Map::new();
        echo.insert("n".into(), json!(n));
        echo.insert("family".into(), json!(family.to_string()));
        let aat: Vec<Value> = sys
            .iter()
            .flat_map(|s| s.polys.iter().enumerate())
            .map(|(i, g)| json!({"name": format!("G{}", i + 1), "poly": g.to_string(), "source": source}))
            .collect();
        echo.insert("aat".into(), Value::Array(aat));
        echo.insert("options".into(), options_echo(&options));
        Ok(Job {
            label: label.to_string(),
            n,
            family: Some(family),
            sys,
            options,
            echo,
        })
    }
}

struct Clock {
    on: bool,
    start: Instant,
}

impl Clock {
    fn lap(&mut self, report: &mut Report, stage: &str) {
        if self.on {
            report.time(stage, self.start.elapsed().as_secs_f64());
            self.start = Instant::now();
        }
    }
}

fn relation_map(rels: &[FirstOrderRelation]) -> Value {
    let m: Map<String, Value> = rels.iter().map(|r| (r.name(), json!(r.poly.to_string()))).collect();
    Value::Object(m)
}

fn dependence_selection(n: usize) -> Vec<String> {
    let mut sel = vec!["x1".to_string()];
    sel.extend((1..=n).map(|k| z(k, k)));
    sel
}

/// First-order relations from the registry or by elimination.
fn derive(job: &Job, backend: Option<&MappingBackend>, report: &mut Report) -> Option<Vec<FirstOrderRelation>> {
    let opts = &job.options;
    if let (Some(sys), Some(b)) = (&job.sys, backend) {
        let recipe = recipe_for(b);
        for (i, g) in sys.polys.iter().enumerate() {
            let id = format!("G{} on backend", i + 1);
            let mut sampler = Sampler::stream(opts.seed, &id, SampleBox::default());
            match residual_check(&id, g, &recipe, b, opts.samples, opts.tol, &mut sampler) {
                Ok(rep) => report.residual(rep),
                Err(e) => report.fail("derive", format!("{id}: {e}")),
            }
        }
    }
    let from_registry = job.family.as_ref().and_then(registry_relations);
    let rels = match (from_registry, &job.sys) {
        (Some(Ok(mut rels)), _) => {
            report.trace.insert("method".into(), json!("registry"));
            if let Some(b) = backend {
                let recipe = Recipe::new(b.constants());
                for r in rels.iter_mut() {
                    let id = r.name();
                    let mut sampler = Sampler::stream(opts.seed, &id, SampleBox::default());
                    match residual_check(&id, &r.poly, &recipe, b, opts.samples, opts.tol, &mut sampler) {
                        Ok(rep) => r.residual = Some(rep),
                        Err(e) => report.fail("derive", format!("{id}: {e}")),
                    }
                }
            }
            rels
        }
        (Some(Err(e)), _) => {
            report.fail("derive", e);
            return None;
        }
        (None, Some(sys)) => {
            report.trace.insert("method".into(), json!("elimination"));
            let d = match derive_first_order(sys, backend, opts) {
                Ok(d) => d,
                Err(e) => {
                    report.fail("derive", e);
                    return None;
                }
            };
            report.trace.insert("steps".into(), serde_json::to_value(&d.trace).expect("trace serializes"));
            if !d.failures.is_empty() {
                report.trace.insert("notes".into(), json!(d.failures));
            }
            d.relations
        }
        (None, None) => {
            report.fail("derive", "no addition-theorem polynomials and no registry entry");
            return None;
        }
    };
    report.trace.insert("relations".into(), relation_map(&rels));
    let sources: Map<String, Value> = rels.iter().map(|r| (r.name(), json!(r.source))).collect();
    report.trace.insert("sources".into(), Value::Object(sources));
    for r in &rels {
        match &r.residual {
            Some(rep) => {
                let mut rep = rep.clone();
                rep.relation = r.name();
                report.residual(rep);
            }
            None if backend.is_some() => report.set_verdict(r.name(), false),
            None => {}
        }
    }
    if rels.len() != job.n * job.n {
        let have: Vec<String> = rels.iter().map(|r| r.name()).collect();
        report.fail("derive", format!("only {} of {} relations P_kp derived ({})", rels.len(), job.n * job.n, have.join(", ")));
        return None;
    }
    if let Some(b) = backend {
        let sel = dependence_selection(job.n);
        let refs: Vec<&str> = sel.iter().map(|s| s.as_str()).collect();
        match verify_general_dependence(&rels, &refs, b, opts) {
            Ok(s) => {
                report.trace.insert("general-dependence".into(), json!({"selection": sel, "relation": s.poly.to_string()}));
                let mut rep = s.residual;
                rep.relation = "general dependence".into();
                report.residual(rep);
            }
            Err(e) => report.fail("derive", format!("general dependence: {e}")),
        }
    }
    Some(rels)
}

fn variety(job: &Job, rels: &[FirstOrderRelation], b: &MappingBackend, report: &mut Report) -> Option<VarietySpec> {
    let spec = match find_primitive_element(rels, b, &job.options) {
        Ok(s) => s,
        Err(e) => {
            report.fail("variety", e);
            return None;
        }
    };
    let v = &mut report.variety;
    v.insert("V".into(), json!(spec.v.to_string()));
    v.insert("alpha".into(), json!(spec.alpha));
    v.insert("h".into(), json!(spec.h));
    v.insert("separable".into(), json!(spec.separable));
    v.insert("degree-bound".into(), json!(spec.degree_bound));
    v.insert("candidates-tried".into(), json!(spec.candidates_tried));
    let exprs: Map<String, Value> = spec
        .expressions
        .iter()
        .map(|e| (z(e.k, e.p), serde_json::to_value(e).expect("expression serializes")))
        .collect();
    v.insert("expressions".into(), Value::Object(exprs));
    let mut rep = spec.residual.clone();
    rep.relation = "V".into();
    report.residual(rep);
    report.set_verdict("separable", spec.separable);
    let complete = spec.expressions.len() == job.n * job.n && spec.expressions.iter().all(|e| e.consistent);
    report.set_verdict("expressions", complete);

    let ring = rels[0].poly.ring().clone();
    match build_pij(&ring, job.n).and_then(|pij| painleve_system(&spec, &pij)) {
        Ok(sys) => {
            report.variety.insert("painleve".into(), json!(sys.lines));
            if !sys.entry_errors.is_empty() {
                report.variety.insert("painleve-errors".into(), json!(sys.entry_errors));
            }
        }
        Err(e) => report.fail("variety", format!("Painleve system: {e}")),
    }
    match adjugate_identity_holds(job.n) {
        Ok(ok) => report.set_verdict("adjugate identity", ok),
        Err(e) => report.fail("variety", format!("adjugate identity: {e}")),
    }
    Some(spec)
}

fn resolve(job: &Job, spec: &VarietySpec, b: &MappingBackend, report: &mut Report) -> Option<AdditionFormula> {
    let Some(sys) = &job.sys else {
        report.formulas.insert("status".into(), json!("no addition-theorem polynomials; negation and addition not derived"));
        return None;
    };
    match derive_negation(sys, b, &job.options) {
        Ok(neg) => {
            let f = &mut report.formulas;
            for (k, (d, e)) in neg.d.iter().zip(&neg.e).enumerate() {
                f.insert(format!("D{}", k + 1), json!(d.to_string()));
                f.insert(format!("E{}", k + 1), json!(e.to_string()));
            }
            f.insert("negation-modes".into(), json!(neg.modes));
            for rep in neg.residuals {
                report.residual(rep);
            }
        }
        Err(e) if job.n == 1 => report.fail("resolve", format!("negation: {e}")),
        Err(e) => {
            report.formulas.insert("negation".into(), json!(format!("not derived: {e}")));
        }
    }
    if job.n != 1 {
        report
            .formulas
            .insert("status".into(), json!(format!("rational addition formula not attempted for n = {}", job.n)));
        return None;
    }
    match resolve_addition(sys, spec, b, &job.options) {
        Ok(f) => {
            let m = &mut report.formulas;
            m.insert("status".into(), json!(if f.verified() { "resolved" } else { "unverified" }));
            m.insert("R0".into(), json!(f.r[0].to_string()));
            m.insert("R1".into(), json!(f.r[1].to_string()));
            m.insert("degree".into(), json!(f.degree));
            m.insert("excluded".into(), json!(f.excluded));
            m.insert("branch".into(), json!(f.branch));
            m.insert("degree-bounds".into(), json!(f.degree_bounds));
            m.insert("alpha".into(), json!(f.alpha));
            for rep in &f.residuals {
                report.residual(rep.clone());
            }
            report.set_verdict("addition formula", f.verified());
            Some(f)
        }
        Err(AdditionError::Unresolved) => {
            report.formulas.insert("status".into(), json!(UNRESOLVED));
            report.set_verdict("addition formula", false);
            None
        }
        Err(e) => {
            report.formulas.insert("status".into(), json!(format!("failed: {e}")));
            report.fail("resolve", e);
            None
        }
    }
}

fn recursion_section(rec: &Recursion) -> Value {
    let name = |idx: &[usize]| {
        let us: Vec<String> = idx[1..].iter().map(|i| format!("u{i}")).collect();
        format!("x{}/{}", idx[0], us.join(" "))
    };
    let second: Map<String, Value> = rec.second.iter().map(|(&(k, p, q), f)| (name(&[k, p, q]), json!(f.to_string()))).collect();
    json!({"second": second, "third": "evaluated numerically by the chain rule"})
}

fn verify(
    job: &Job,
    spec: Option<&VarietySpec>,
    formula: Option<&AdditionFormula>,
    rec: Option<&Recursion>,
    b: &MappingBackend,
    report: &mut Report,
) {
    let seed = job.options.seed;
    if let Some(spec) = spec {
        match group_law_checks(b, &spec.alpha, GROUP_LAW_TRIPLES, GROUP_LAW_TOL, seed) {
            Ok(reps) => reps.into_iter().for_each(|r| report.residual(r)),
            Err(e) => report.fail("verify", format!("group laws: {e}")),
        }
        if let Some(f) = formula {
            match formula_checks(f, spec, b, job.options.samples, seed) {
                Ok(reps) => reps.into_iter().for_each(|r| report.residual(r)),
                Err(e) => report.fail("verify", format!("formula checks: {e}")),
            }
        }
        if job.n == 1 {
            let periods: Vec<_> = b.reference_periods().into_iter().map(|p| p[0]).collect();
            match uniqueness_witness(b, &spec.alpha, &periods, WITNESS_PAIRS, job.options.tol, seed) {
                Ok(w) => {
                    report.set_verdict("uniqueness witness", w.verdict.starts_with("pass"));
                    report.formulas.insert("uniqueness-witness".into(), serde_json::to_value(&w).expect("witness serializes"));
                }
                Err(e) => report.fail("verify", format!("uniqueness witness: {e}")),
            }
        }
    }
    if let Some(rec) = rec {
        let chk = finite_difference_check(rec, b, RECURSION_POINTS, RECURSION_TOL, seed);
        report.set_verdict("recursion second derivatives", chk.second.count > 0 && chk.second.max < RECURSION_TOL);
        report.set_verdict("recursion third derivatives", chk.third.count > 0 && chk.third.max < RECURSION_TOL);
        report.formulas.insert("recursion-singular-skips".into(), json!(chk.singular_skips));
        let mut s = chk.second;
        s.relation = "recursion second derivatives".into();
        let mut t = chk.third;
        t.relation = "recursion third derivatives".into();
        report.residuals.push(s);
        report.residuals.push(t);
    }
}

fn period(job: &Job, rec: Option<&Recursion>, b: &MappingBackend, report: &mut Report) {
    let o = &job.options;
    let search = detect_period(b, o.period_box, default_grid(job.n), o.tol, o.seed, rec);
    let reference = b.reference_periods();
    let p = &mut report.periods;
    p.insert("half-width".into(), json!(search.half_width));
    p.insert("grid".into(), json!(search.grid));
    p.insert("starts".into(), json!(search.starts));
    p.insert("basis".into(), Value::Array(search.basis.iter().map(|v| complex_vec(v)).collect()));
    p.insert("reference".into(), Value::Array(reference.iter().map(|v| complex_vec(v)).collect()));
    let cands: Vec<Value> = search
        .candidates
        .iter()
        .map(|c| {
            json!({
                "p": complex_vec(&c.p),
                "a": complex_vec(&c.a),
                "b": complex_vec(&c.b),
                "residual": c.residual,
                "taylor": c.taylor,
                "note": c.note,
                "passed": c.passed,
            })
        })
        .collect();
    p.insert("candidates".into(), Value::Array(cands));
    if matches!(b.family(), Family::Case5 { .. }) {
        p.insert("expected".into(), json!("not asserted: no closed-form periods for this family"));
    } else {
        let ok = same_lattice(&search.basis, &reference, 1e-6) && search.candidates.iter().all(|c| c.passed);
        report.set_verdict("periods", ok);
    }
    if matches!(b.family(), Family::Weierstrass { .. } | Family::Case4 { .. }) {
        if let Some(lat) = b.lattice() {
            report.periods.insert(
                "eta".into(),
                Value::Array(vec![complex(lat.eta1), complex(lat.eta2)]),
            );
            for rep in quasi_periodicity(lat, VERIFY_QUASI, o.tol, o.seed) {
                report.residual(rep);
            }
        }
    }
}

const VERIFY_QUASI: usize = 50;

/// Runs `stage` (and the stages it depends on) for one job.
pub fn run(job: &Job, stage: Stage, timings: bool) -> Report {
    let mut report = Report::new(job.options.seed);
    if timings {
        report.timings = Some(BTreeMap::new());
    }
    report.spec_echo = job.echo.clone();
    report.spec_echo.insert("stage".into(), json!(stage.as_str()));
    let mut clock = Clock {
        on: timings,
        start: Instant::now(),
    };
    let backend = match &job.family {
        Some(f) => match MappingBackend::new(f.clone()) {
            Ok(b) => Some(b),
            Err(e) => {
                report.fail("backend", e);
                None
            }
        },
        None => None,
    };
    let Some(rels) = derive(job, backend.as_ref(), &mut report) else {
        return report;
    };
    clock.lap(&mut report, "derive");
    if stage == Stage::Derive {
        return report;
    }
    let Some(b) = backend.as_ref() else {
        report.fail(stage.as_str(), "numeric stages need a mapping family");
        return report;
    };
    let rec = match Recursion::build(&rels, job.n) {
        Ok(r) => Some(r),
        Err(e) => {
            report.fail("recursion", e);
            None
        }
    };
    if let Some(r) = &rec {
        report.formulas.insert("recursion".into(), recursion_section(r));
    }
    let mut spec = None;
    if stage.variety() {
        spec = variety(job, &rels, b, &mut report);
        clock.lap(&mut report, "variety");
    }
    let mut formula = None;
    if stage.resolve() {
        if let Some(s) = &spec {
            formula = resolve(job, s, b, &mut report);
        }
        clock.lap(&mut report, "resolve");
    }
    if stage.verify() {
        verify(job, spec.as_ref(), formula.as_ref(), rec.as_ref(), b, &mut report);
        clock.lap(&mut report, "verify");
    }
    if stage.period() {
        period(job, rec.as_ref(), b, &mut report);
        clock.lap(&mut report, "period");
    }
    report
}

/// The built-in families run by `catalog`.
pub fn catalog_families() -> Vec<(String, Family)> {
    let (g2, g3) = (rat(4), rat(0));
    vec![
        ("exp".into(), Family::Exp { c: rat(1) }),
        ("rational".into(), Family::Rational { a: rat(1), b: rat(0) }),
        ("weierstrass".into(), Family::Weierstrass { g2: g2.clone(), g3: g3.clone() }),
        ("singular2-case1".into(), Family::Case1),
        ("singular2-case2".into(), Family::Case2),
        ("singular2-case3".into(), Family::Case3),
        ("singular2-case4-eps0".into(), Family::Case4 { eps: 0, g2: g2.clone(), g3: g3.clone() }),
        ("singular2-case4-eps1".into(), Family::Case4 { eps: 1, g2: g2.clone(), g3: g3.clone() }),
        ("singular2-case5".into(), Family::Case5 { a: rat_frac(1, 2), g2, g3 }),
    ]
}

/// Catalog families (all, or those whose label starts with `only`) through
/// every stage, folded into one report.
pub fn run_catalog(options: &Options, timings: bool, only: Option<&str>) -> Report {
    let mut parts = Vec::new();
    for (label, fam) in catalog_families() {
        if only.is_some_and(|o| !label.starts_with(o)) {
            continue;
        }
        let r = match Job::from_family(&label, fam, options.clone()) {
            Ok(job) => run(&job, Stage::All, timings),
            Err(e) => {
                let mut r = Report::new(options.seed);
                r.fail("setup", e);
                r
            }
        };
        parts.push((label, r));
    }
    Report::combine(options.seed, parts, timings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_problem;

    #[test]
    fn exp_problem_end_to_end() {
        let spec = parse_problem("[mapping]\nn = 1\nfamily = exp\n[aat]\nG1 = L1 - x1*y1\n").unwrap();
        let job = Job::from_spec("exp", &spec).unwrap();
        let r = run(&job, Stage::All, false);
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.trace["relations"]["P_11"], "z1_1 - x1");
        assert_eq!(r.variety["painleve"][0], "du = dx/x1");
        assert_eq!(r.formulas["E1"], "x1*y1 - 1");
    }

    #[test]
    fn derive_needs_a_backend_for_specialization() {
        let text = "[mapping]\nn = 1\nfamily = rational\nparam a = 1\nparam b = 0\n[aat]\nG1 = L1 - x1 - y1\n";
        let job = Job::from_spec("additive", &parse_problem(text).unwrap()).unwrap();
        let r = run(&job, Stage::Derive, false);
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.trace["relations"]["P_11"], "z1_1 - 1");
        let text = "[mapping]\nn = 1\nfamily = none\n[aat]\nG1 = L1 - x1 - y1\n";
        let job = Job::from_spec("bare", &parse_problem(text).unwrap()).unwrap();
        let r = run(&job, Stage::Derive, false);
        assert!(!r.passed());
        assert!(r.failures[0].starts_with("derive:"), "{:?}", r.failures);
    }
}
