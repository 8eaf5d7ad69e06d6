//! From the addition-theorem polynomials to first-order differential
//! relations: cross-differences, GCDs, eliminants, specialization of the `v`
//! side and elimination of the remaining derivative variables.

use std::collections::BTreeMap;
use std::sync::Arc;

use aat_algebra::{gcd, prem, reconstruct_rational, resultant_slot, AlgebraError, MPoly, Monomial, Rat, VarRing};
use num_complex::Complex64 as C;
use serde::Serialize;
use thiserror::Error;

use crate::alphabet::{as_refs, lam, swap_pairs, w, x, y, z, THETA};
use crate::numeric::backend::MappingBackend;
use crate::numeric::residual::{residual_check, Recipe, ResidualError, ResidualReport, POLE_RADIUS};
use crate::numeric::sampling::{SampleBox, Sampler};
use crate::polyutil::{normalize, primitive_wrt, split_factors};
use crate::problem::{Options, SpecializationMode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EliminationError {
    #[error("degenerate AAT: cross-difference of G{k} vanishes identically")]
    Degenerate { k: usize },
    #[error("cross-difference ({k},{p}) provides no new relation: eliminant vanishes")]
    NoNewRelation { k: usize, p: usize },
    #[error("no generic specialization found for H_{k}{p} after {attempts} attempts")]
    NoGenericSpecialization { k: usize, p: usize, attempts: usize },
    #[error("specialization of H_{k}{p} needs a numeric backend")]
    NoBackend { k: usize, p: usize },
    #[error("dependent eliminant chain for {target}; choose different elimination order (tried {orders})")]
    DependentChain { target: String, orders: String },
    #[error("invalid AAT system: {0}")]
    Invalid(String),
    #[error("symbolic pipeline supports n <= 2 (got n = {0}); numeric verification only")]
    Unsupported(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Residual(#[from] ResidualError),
}

pub type Result<T, E = EliminationError> = std::result::Result<T, E>;

/// The addition-theorem polynomials `G_1..G_n` over the standard ring.
#[derive(Debug, Clone)]
pub struct AatSystem {
    pub n: usize,
    pub ring: Arc<VarRing>,
    pub polys: Vec<MPoly>,
}

impl AatSystem {
    pub fn new(polys: Vec<MPoly>) -> Result<Self> {
        let n = polys.len();
        let ring = polys
            .first()
            .ok_or_else(|| EliminationError::Invalid("no polynomials".into()))?
            .ring()
            .clone();
        for (i, g) in polys.iter().enumerate() {
            let k = i + 1;
            if g.ring() != &ring {
                return Err(AlgebraError::RingMismatch.into());
            }
            if g.degree(&lam(k))? == 0 {
                return Err(EliminationError::Invalid(format!("G{k} has degree 0 in {}", lam(k))));
            }
            for v in g.variables() {
                if v == THETA || v.starts_with('z') || v.starts_with('w') {
                    return Err(EliminationError::Invalid(format!("G{k} mentions derivative symbol `{v}`")));
                }
            }
        }
        Ok(AatSystem { n, ring, polys })
    }

    fn slot(&self, name: &str) -> usize {
        self.ring.var(name).expect("standard alphabet")
    }

    pub fn z_slots(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for k in 1..=self.n {
            for p in 1..=self.n {
                out.push(self.slot(&z(k, p)));
            }
        }
        out
    }

    pub fn w_slots(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for k in 1..=self.n {
            for p in 1..=self.n {
                out.push(self.slot(&w(k, p)));
            }
        }
        out
    }
}

/// `sum_i dG_k/dx_i * z{i}_{p} - dG_k/dy_i * w{i}_{p}`.
pub fn cross_difference(sys: &AatSystem, k: usize, p: usize) -> Result<MPoly> {
    let g = &sys.polys[k - 1];
    let mut acc = MPoly::zero(&sys.ring);
    for i in 1..=sys.n {
        let zi = MPoly::var(&sys.ring, &z(i, p))?;
        let wi = MPoly::var(&sys.ring, &w(i, p))?;
        acc = &acc + &(&g.differentiate(&x(i))? * &zi);
        acc = &acc - &(&g.differentiate(&y(i))? * &wi);
    }
    if acc.is_zero() {
        return Err(EliminationError::Degenerate { k });
    }
    Ok(acc)
}

/// `g = gcd(G_k, Delta)` and the eliminant `H = Res_{L_k}(G_k/g, Delta/g)`,
/// or `Delta/g` itself when it no longer involves `L_k`.
pub fn gcd_and_eliminant(gk: &MPoly, delta: &MPoly, k: usize, p: usize) -> Result<(MPoly, MPoly)> {
    let ring = gk.ring();
    let l = ring.var(&lam(k))?;
    let g = gcd(gk, delta);
    let gq = gk.exact_div(&g).expect("gcd divides");
    let dq = delta.exact_div(&g).expect("gcd divides");
    let h = if !dq.contains(l) {
        dq
    } else if !gq.contains(l) {
        return Err(EliminationError::Invalid(format!(
            "G{k} splits off an {}-free factor shared with the cross-difference",
            lam(k)
        )));
    } else {
        resultant_slot(&gq, &dq, l)
    };
    if h.is_zero() {
        return Err(EliminationError::NoNewRelation { k, p });
    }
    Ok((g, h))
}

/// How `H` was specialized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecializationRecord {
    pub mode: String,
    pub point: String,
    pub retries: usize,
    pub attempts: Vec<String>,
    pub verification: String,
}

#[derive(Debug, Clone)]
pub struct Specialized {
    pub h: MPoly,
    pub record: SpecializationRecord,
}

fn is_degenerate(h: &MPoly, z_slots: &[usize]) -> bool {
    h.is_zero() || !z_slots.iter().any(|&s| h.contains(s))
}

fn fmt_c(c: C) -> String {
    format!("{:.6}{:+.6}i", c.re, c.im)
}

/// Substitutes numeric values for some slots, keeping every other symbol;
/// returns the complex coefficient attached to each remaining monomial.
fn specialize_numeric(h: &MPoly, values: &[(usize, C)]) -> Vec<(Monomial, C)> {
    let mut groups: BTreeMap<Monomial, C> = BTreeMap::new();
    for (m, c) in h.terms() {
        let mut rest = m.clone();
        let mut val = C::new(aat_algebra::to_f64(c), 0.0);
        for (slot, v) in values {
            let e = m[*slot];
            if e > 0 {
                val *= v.powi(e as i32);
                rest[*slot] = 0;
            }
        }
        *groups.entry(rest).or_insert(C::new(0.0, 0.0)) += val;
    }
    // descending lex, like MPoly terms
    groups.into_iter().rev().collect()
}

/// Normalizes by the lex-leading non-negligible coefficient and recovers
/// rationals by continued fractions (denominators up to 1e6).
fn reconstruct(coeffs: &[(Monomial, C)], ring: &Arc<VarRing>) -> Option<MPoly> {
    let max = coeffs.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return None;
    }
    let lead = coeffs.iter().find(|(_, c)| c.norm() > 1e-8 * max)?.1;
    let mut terms = Vec::new();
    for (m, c) in coeffs {
        let q = c / lead;
        if q.im.abs() > 1e-7 * q.norm().max(1.0) {
            return None;
        }
        let r = reconstruct_rational(q.re, 1_000_000, 1e-8)?;
        terms.push((m.clone(), r));
    }
    Some(MPoly::from_terms(ring, terms))
}

/// Fixes the `v` side of an eliminant. The content of `H` in the
/// derivative variables is removed first; it carries no differential
/// information.
#[allow(clippy::too_many_arguments)]
pub fn specialize_v(
    sys: &AatSystem,
    hkp: &MPoly,
    k: usize,
    p: usize,
    mode: Option<SpecializationMode>,
    backend: Option<&MappingBackend>,
    retries: usize,
    seed: u64,
) -> Result<Specialized> {
    let n = sys.n;
    let z_slots = sys.z_slots();
    let w_slots = sys.w_slots();
    let zw: Vec<usize> = z_slots.iter().chain(&w_slots).copied().collect();
    let h0 = primitive_wrt(hkp, &zw);
    if is_degenerate(&h0, &zw) {
        return Err(EliminationError::Invalid(format!("H_{k}{p} involves no derivative variable")));
    }
    let backend = backend.ok_or(EliminationError::NoBackend { k, p })?;
    let y_slots: Vec<usize> = (1..=n).map(|i| sys.slot(&y(i))).collect();
    let w_at = |kk: usize, pp: usize| sys.slot(&w(kk, pp));
    let mut attempts = Vec::new();
    let mut total = 0;

    if mode != Some(SpecializationMode::NumericReconstruct) {
        for pt in backend.exact_points().into_iter().take(retries.max(1)) {
            total += 1;
            let mut vals: Vec<(usize, Rat)> = Vec::new();
            for i in 0..n {
                vals.push((y_slots[i], pt.values[i].clone()));
                for q in 0..n {
                    vals.push((w_at(i + 1, q + 1), pt.jacobian[i][q].clone()));
                }
            }
            let h = h0.eval_partial(&vals);
            if is_degenerate(&h, &z_slots) {
                attempts.push(format!("{}: degenerate", pt.label));
                continue;
            }
            return Ok(Specialized {
                h: normalize(&h),
                record: SpecializationRecord {
                    mode: SpecializationMode::ExactPoint.as_str().into(),
                    point: pt.label.clone(),
                    retries: total - 1,
                    attempts,
                    verification: "exact substitution".into(),
                },
            });
        }
        if attempts.is_empty() {
            attempts.push("no exact point known for the family".into());
        }
        if mode == Some(SpecializationMode::ExactPoint) {
            return Err(EliminationError::NoGenericSpecialization { k, p, attempts: total });
        }
    }

    let mut sampler = Sampler::stream(seed, &format!("specialize-{k}-{p}"), SampleBox::default());
    let draw = |sampler: &mut Sampler| -> Option<Vec<(usize, C)>> {
        for _ in 0..100 {
            let v = sampler.point(n);
            if backend.near_pole(&v, POLE_RADIUS) {
                continue;
            }
            let (Ok(phi), Ok(jac)) = (backend.values(&v), backend.jacobian(&v)) else {
                continue;
            };
            let mut vals = Vec::new();
            for i in 0..n {
                vals.push((y_slots[i], phi[i]));
                for q in 0..n {
                    vals.push((w_at(i + 1, q + 1), jac[i][q]));
                }
            }
            return Some(vals);
        }
        None
    };
    let swap = swap_pairs(n);
    for attempt in 0..=retries {
        total += 1;
        let Some(vals) = draw(&mut sampler) else {
            attempts.push("numeric: no pole-free point".into());
            continue;
        };
        let point = vals
            .iter()
            .filter(|(s, _)| y_slots.contains(s))
            .map(|(_, c)| fmt_c(*c))
            .collect::<Vec<_>>()
            .join(", ");
        let Some(h) = reconstruct(&specialize_numeric(&h0, &vals), &sys.ring) else {
            attempts.push(format!("numeric #{attempt}: rational reconstruction failed"));
            continue;
        };
        if is_degenerate(&h, &z_slots) {
            attempts.push(format!("numeric #{attempt}: degenerate"));
            continue;
        }
        // independent second point must reproduce the same relation
        let Some(vals2) = draw(&mut sampler) else {
            attempts.push("numeric: no pole-free point".into());
            continue;
        };
        let h2 = reconstruct(&specialize_numeric(&h0, &vals2), &sys.ring);
        if h2.as_ref() != Some(&h) {
            attempts.push(format!("numeric #{attempt}: relation depends on the point"));
            continue;
        }
        let verification = if n == 1 {
            // h(z; x) = 0 and h(w; y) = 0 must force H = 0
            let hs = h.to_ring(&sys.ring, &as_refs(&swap))?;
            let r1 = prem(&h0, &h, z_slots[0])?;
            let r2 = prem(&r1, &hs, w_slots[0])?;
            if !r2.is_zero() {
                attempts.push(format!("numeric #{attempt}: exact re-substitution residual nonzero"));
                continue;
            }
            "exact re-substitution residual 0".to_string()
        } else {
            "reproduced at an independent point".to_string()
        };
        return Ok(Specialized {
            h: normalize(&h),
            record: SpecializationRecord {
                mode: SpecializationMode::NumericReconstruct.as_str().into(),
                point: format!("v with phi(v) = ({point})"),
                retries: total - 1,
                attempts,
                verification,
            },
        });
    }
    Err(EliminationError::NoGenericSpecialization { k, p, attempts: total })
}

/// Outcome of factor vetting.
#[derive(Debug, Clone)]
pub struct Selected {
    pub poly: MPoly,
    pub residual: ResidualReport,
}

/// Splits `poly` and keeps the factor of minimal degree (in `target`) that
/// vanishes on backend samples. When no factor passes, the best one is
/// returned with its failing report.
#[allow(clippy::too_many_arguments)]
pub fn select_factor(
    id: &str,
    poly: &MPoly,
    target: usize,
    recipe: &Recipe,
    backend: &MappingBackend,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<Selected> {
    let candidates: Vec<MPoly> = split_factors(poly).into_iter().filter(|f| f.contains(target)).collect();
    if candidates.is_empty() {
        return Err(EliminationError::Invalid(format!("{id}: no factor involves {}", poly.ring().name(target))));
    }
    let mut best: Option<Selected> = None;
    for f in candidates {
        let mut sampler = Sampler::stream(seed, id, SampleBox::default());
        let rep = residual_check(id, &f, recipe, backend, samples, tol, &mut sampler)?;
        let better = match &best {
            None => true,
            Some(b) => match (rep.passed(), b.residual.passed()) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => {
                    (f.degree_in(target), f.total_degree()) < (b.poly.degree_in(target), b.poly.total_degree())
                }
                (false, false) => rep.p95 < b.residual.p95,
            },
        };
        if better {
            best = Some(Selected {
                poly: normalize(&f),
                residual: rep,
            });
        }
    }
    Ok(best.expect("nonempty"))
}

/// Eliminates `others` from `polys` by resultants, trying every order of
/// `others`; returns the results that still involve `target`, with the
/// order used.
pub fn eliminate_to(polys: &[MPoly], target: usize, others: &[usize]) -> Result<(Vec<MPoly>, Vec<usize>), Vec<Vec<usize>>> {
    let orders = permutations(others);
    for order in &orders {
        let mut set: Vec<MPoly> = polys.to_vec();
        let mut collapsed = false;
        for &v in order {
            let with: Vec<usize> = (0..set.len()).filter(|&i| set[i].contains(v)).collect();
            if with.is_empty() {
                continue;
            }
            let pivot_idx = *with
                .iter()
                .min_by_key(|&&i| (set[i].degree_in(v), set[i].num_terms()))
                .expect("nonempty");
            let pivot = set[pivot_idx].clone();
            let mut next = Vec::new();
            for (i, q) in set.iter().enumerate() {
                if i == pivot_idx {
                    continue;
                }
                if q.contains(v) {
                    let r = resultant_slot(q, &pivot, v);
                    if r.is_zero() {
                        collapsed = true;
                    } else {
                        next.push(r);
                    }
                } else {
                    next.push(q.clone());
                }
            }
            set = next;
        }
        let done: Vec<MPoly> = set
            .into_iter()
            .filter(|q| q.contains(target) && others.iter().all(|&o| !q.contains(o)))
            .collect();
        if !done.is_empty() && !collapsed {
            return Ok((done, order.clone()));
        }
    }
    Err(orders)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Intermediate data for one index pair.
#[derive(Debug, Clone, Serialize)]
pub struct TraceEntry {
    pub k: usize,
    pub p: usize,
    pub cross_difference: String,
    pub gcd: String,
    pub eliminant: String,
    pub eliminant_symmetric: bool,
    pub specialized: Option<String>,
    pub specialization: Option<SpecializationRecord>,
    pub degree_bound: u32,
    pub error: Option<String>,
}

/// `P_kp` in `zk_p` and `x1..xn`.
#[derive(Debug, Clone)]
pub struct FirstOrderRelation {
    pub k: usize,
    pub p: usize,
    pub poly: MPoly,
    pub source: String,
    pub residual: Option<ResidualReport>,
}

impl FirstOrderRelation {
    pub fn name(&self) -> String {
        format!("P_{}{}", self.k, self.p)
    }

    pub fn verified(&self) -> bool {
        self.residual.as_ref().map_or(false, |r| r.passed())
    }
}

#[derive(Debug, Clone)]
pub struct Derivation {
    pub trace: Vec<TraceEntry>,
    /// Vetted specialized relations `h_kp`, by `(k, p)`.
    pub specialized: BTreeMap<(usize, usize), MPoly>,
    pub relations: Vec<FirstOrderRelation>,
    pub failures: Vec<String>,
}

/// True when swapping the `u` and `v` sides maps `h` to a unit multiple of itself.
pub fn is_swap_symmetric(h: &MPoly, n: usize) -> Result<bool> {
    let swap = swap_pairs(n);
    let hs = h.to_ring(h.ring(), &as_refs(&swap))?;
    Ok(normalize(&hs) == normalize(h))
}

pub fn recipe_for(backend: &MappingBackend) -> Recipe {
    Recipe::new(backend.constants())
}

/// Runs the elimination algorithm for every index pair and assembles the
/// relations `P_kp`.
pub fn derive_first_order(sys: &AatSystem, backend: Option<&MappingBackend>, opts: &Options) -> Result<Derivation> {
    let n = sys.n;
    if n > 2 {
        return Err(EliminationError::Unsupported(n));
    }
    let mut trace = Vec::new();
    let mut failures = Vec::new();
    let mut specialized: BTreeMap<(usize, usize), MPoly> = BTreeMap::new();
    let recipe = backend.map(recipe_for);
    let z_slots = sys.z_slots();
    for k in 1..=n {
        for p in 1..=n {
            let mut entry = TraceEntry {
                k,
                p,
                cross_difference: String::new(),
                gcd: String::new(),
                eliminant: String::new(),
                eliminant_symmetric: false,
                specialized: None,
                specialization: None,
                degree_bound: 0,
                error: None,
            };
            let outcome = (|| -> Result<()> {
                let delta = cross_difference(sys, k, p)?;
                entry.cross_difference = delta.to_string();
                let (g, h) = gcd_and_eliminant(&sys.polys[k - 1], &delta, k, p)?;
                entry.gcd = g.to_string();
                entry.eliminant = h.to_string();
                entry.eliminant_symmetric = is_swap_symmetric(&h, n)?;
                entry.degree_bound = sys.polys[k - 1].degree(&lam(k))? * delta.total_degree();
                let s = specialize_v(sys, &h, k, p, opts.mode, backend, opts.retries, opts.seed)?;
                entry.specialization = Some(s.record);
                // drop factors free of the derivative variables, then vet
                let hz = primitive_wrt(&s.h, &z_slots);
                let target = sys.slot(&z(k, p));
                let pick = z_slots
                    .iter()
                    .copied()
                    .filter(|&sl| hz.contains(sl))
                    .max_by_key(|&sl| sl == target)
                    .expect("nondegenerate");
                let chosen = match (backend, &recipe) {
                    (Some(b), Some(r)) => {
                        select_factor(&format!("h_{k}{p}"), &hz, pick, r, b, opts.samples, opts.tol, opts.seed)?.poly
                    }
                    _ => normalize(&hz),
                };
                entry.specialized = Some(chosen.to_string());
                specialized.insert((k, p), chosen);
                Ok(())
            })();
            if let Err(e) = outcome {
                entry.error = Some(e.to_string());
                failures.push(format!("({k},{p}): {e}"));
            }
            trace.push(entry);
        }
    }

    let mut relations = Vec::new();
    for k in 1..=n {
        for p in 1..=n {
            match assemble_relation(sys, &specialized, k, p, backend, recipe.as_ref(), opts) {
                Ok(r) => relations.push(r),
                Err(e) => failures.push(format!("P_{k}{p}: {e}")),
            }
        }
    }
    Ok(Derivation {
        trace,
        specialized,
        relations,
        failures,
    })
}

/// `P_kp` from the specialized relations sharing the index `p`.
fn assemble_relation(
    sys: &AatSystem,
    hs: &BTreeMap<(usize, usize), MPoly>,
    k: usize,
    p: usize,
    backend: Option<&MappingBackend>,
    recipe: Option<&Recipe>,
    opts: &Options,
) -> Result<FirstOrderRelation> {
    let target = sys.slot(&z(k, p));
    let others: Vec<usize> = (1..=sys.n).filter(|&i| i != k).map(|i| sys.slot(&z(i, p))).collect();
    let pool: Vec<MPoly> = (1..=sys.n).filter_map(|i| hs.get(&(i, p)).cloned()).collect();
    let direct = hs
        .get(&(k, p))
        .filter(|h| h.contains(target) && others.iter().all(|&o| !h.contains(o)))
        .cloned();
    let (candidate, source) = match direct {
        Some(h) => (h, "elimination".to_string()),
        None => {
            let (done, order) = eliminate_to(&pool, target, &others).map_err(|orders| EliminationError::DependentChain {
                target: z(k, p),
                orders: orders
                    .iter()
                    .map(|o| o.iter().map(|&s| sys.ring.name(s).to_string()).collect::<Vec<_>>().join(" > "))
                    .collect::<Vec<_>>()
                    .join("; "),
            })?;
            let mut prod = MPoly::one(&sys.ring);
            for d in &done {
                prod = &prod * d;
            }
            let order = order.iter().map(|&s| sys.ring.name(s).to_string()).collect::<Vec<_>>();
            (prod, format!("elimination (resultants in {})", order.join(", ")))
        }
    };
    let (poly, residual) = match (backend, recipe) {
        (Some(b), Some(r)) => {
            let s = select_factor(
                &format!("P_{k}{p}"),
                &primitive_wrt(&candidate, &[target]),
                target,
                r,
                b,
                opts.samples,
                opts.tol,
                opts.seed,
            )?;
            (s.poly, Some(s.residual))
        }
        _ => (normalize(&candidate), None),
    };
    Ok(FirstOrderRelation {
        k,
        p,
        poly,
        source,
        residual,
    })
}

/// A nonzero relation among `selection` (n + 1 of the `x_k`, `zk_p`)
/// obtained from the `P_kp` by resultants.
pub fn verify_general_dependence(
    relations: &[FirstOrderRelation],
    selection: &[&str],
    backend: &MappingBackend,
    opts: &Options,
) -> Result<Selected> {
    let ring = relations
        .first()
        .ok_or_else(|| EliminationError::Invalid("no relations".into()))?
        .poly
        .ring()
        .clone();
    let n = backend.n();
    if selection.len() != n + 1 {
        return Err(EliminationError::Invalid(format!("selection must have {} symbols", n + 1)));
    }
    let sel: Vec<usize> = selection.iter().map(|s| ring.var(s)).collect::<Result<_, _>>()?;
    let inside = |q: &MPoly| q.support().iter().all(|s| sel.contains(s) || ring.is_param(*s));
    let recipe = recipe_for(backend);
    let id = format!("dependence[{}]", selection.join(","));
    let chosen: Vec<MPoly> = relations
        .iter()
        .filter(|r| sel.contains(&ring.var(&z(r.k, r.p)).expect("alphabet")))
        .map(|r| r.poly.clone())
        .collect();
    if let Some(q) = chosen.iter().filter(|q| inside(q)).min_by_key(|q| q.total_degree()) {
        let t = *sel.iter().find(|&&s| q.contains(s)).expect("nonconstant");
        return select_factor(&id, q, t, &recipe, backend, opts.samples, opts.tol, opts.seed);
    }
    let unselected: Vec<usize> = (1..=n)
        .map(|i| ring.var(&x(i)).expect("alphabet"))
        .filter(|s| !sel.contains(s))
        .collect();
    let target = *sel
        .iter()
        .find(|s| ring.name(**s).starts_with('z'))
        .ok_or_else(|| EliminationError::Invalid("selection has no derivative symbol".into()))?;
    let (done, _) = eliminate_to(&chosen, target, &unselected).map_err(|_| EliminationError::DependentChain {
        target: selection.join(","),
        orders: "all".into(),
    })?;
    let q = done
        .into_iter()
        .filter(|q| inside(q))
        .min_by_key(|q| q.total_degree())
        .ok_or_else(|| EliminationError::DependentChain {
            target: selection.join(","),
            orders: "all".into(),
        })?;
    select_factor(&id, &q, target, &recipe, backend, opts.samples, opts.tol, opts.seed)
}
