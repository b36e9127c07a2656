//! Seeded random-instance stress testing. Candidate spaces, posets and
//! relations are generated from a seed, filtered by the validators, and
//! the surviving instances are run through the targeted theorem checks;
//! any violation is shrunk greedily and reported with a replayable
//! witness. Identical configurations produce identical reports.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closure::{ClosureSpec, GCSpace, GammaRepr, TauRepr, TauSpec};
use crate::format::{doc_from_poset, doc_from_space, NamedReport, RunReport};
use crate::morphism::{check_functor_laws, AMRelation, ScottMap};
use crate::poset::{random_poset, FinPoset};
use crate::report::{Report, Violation, Witness};
use crate::set::{submasks, Subset, SubsetFamily, Universe};
use crate::space::{directed, FGCSpace, Mode, WAY_BELOW_ORACLE_CAP};
use crate::subclass::{classify_regulars, is_consistent, is_locally_consistent};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Target {
    GcsAxioms,
    FgcsAxiom,
    Dcpo,
    Basis,
    Eq37,
    LConsistency,
    Bc,
    AmLaws,
    FunctorLaws,
    Roundtrip,
}

impl Target {
    pub fn all() -> BTreeSet<Target> {
        use Target::*;
        [GcsAxioms, FgcsAxiom, Dcpo, Basis, Eq37, LConsistency, Bc, AmLaws, FunctorLaws, Roundtrip]
            .into_iter()
            .collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Target::GcsAxioms => "gcs-axioms",
            Target::FgcsAxiom => "fgcs-axiom",
            Target::Dcpo => "dcpo",
            Target::Basis => "basis",
            Target::Eq37 => "eq3.7",
            Target::LConsistency => "Lconsistency",
            Target::Bc => "BC",
            Target::AmLaws => "am-laws",
            Target::FunctorLaws => "functor-laws",
            Target::Roundtrip => "roundtrip",
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Target, Error> {
        Target::all()
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::parse(format!("unknown target {s:?}")))
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinerConfig {
    pub seed: u64,
    pub count: usize,
    pub max_n: usize,
    pub targets: BTreeSet<Target>,
}

impl MinerConfig {
    pub fn new(seed: u64, count: usize, max_n: usize) -> MinerConfig {
        MinerConfig { seed, count, max_n: max_n.clamp(1, 8), targets: Target::all() }
    }
}

/// One reported failure: the target that fired, the violating check, the
/// instance it happened on, and the greedily shrunk version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MineViolation {
    pub instance: usize,
    pub target: String,
    pub violation: Violation,
    pub document: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shrunk: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MineOutcome {
    pub seed: u64,
    pub candidates: usize,
    pub surviving_spaces: usize,
    pub oracle_skips: usize,
    pub violations: Vec<MineViolation>,
}

impl MineOutcome {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_run_report(&self, command: &str) -> RunReport {
        let mut run = RunReport::new(command);
        run.seed = Some(self.seed);
        let mut report = Report::new();
        report.note(format!(
            "candidates={} surviving-spaces={} oracle-skips={}",
            self.candidates, self.surviving_spaces, self.oracle_skips
        ));
        for v in &self.violations {
            report.push(Violation::new(
                &format!("mine-{}", v.target),
                v.violation.witnesses.clone(),
                format!("instance {}: {}", v.instance, v.violation.message),
            ));
        }
        run.push("mine", report);
        run.checks.push(NamedReport {
            name: "violations-detail".into(),
            report: Report {
                ok: self.violations.is_empty(),
                violations: self.violations.iter().map(|v| v.violation.clone()).collect(),
                notes: self
                    .violations
                    .iter()
                    .map(|v| serde_json::to_string(&v.document).unwrap_or_default())
                    .collect(),
            },
        });
        run.ok = self.ok();
        run
    }
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

fn random_subset<R: Rng>(rng: &mut R, full: u64) -> u64 {
    rng.gen::<u64>() & full
}

/// A random meet-closed system containing the carrier.
fn random_closed_system<R: Rng>(rng: &mut R, universe: &Arc<Universe>) -> SubsetFamily {
    let full = universe.full_mask();
    let mut masks: BTreeSet<u64> = [full].into();
    for _ in 0..rng.gen_range(1..=universe.size() + 2) {
        masks.insert(random_subset(rng, full));
    }
    // Close under pairwise intersection.
    loop {
        let snapshot: Vec<u64> = masks.iter().copied().collect();
        let before = masks.len();
        for &a in &snapshot {
            for &b in &snapshot {
                masks.insert(a & b);
            }
        }
        if masks.len() == before {
            break;
        }
    }
    SubsetFamily::from_bits(universe, masks)
}

/// A random map on the closed sets of `gamma`, idempotent by
/// construction; monotonicity is left to the validator.
fn random_partial_tau<R: Rng>(rng: &mut R, gamma: &ClosureSpec) -> TauSpec {
    let mut table: BTreeMap<u64, u64> = BTreeMap::new();
    for c in gamma.closed_sets() {
        let v = random_subset(rng, c);
        table.insert(c, v);
    }
    let values: Vec<u64> = table.values().copied().collect();
    for v in values {
        table.insert(v, v);
    }
    TauSpec::from_partial_table(gamma.universe(), table)
}

fn random_family<R: Rng>(rng: &mut R, universe: &Arc<Universe>) -> SubsetFamily {
    let full = universe.full_mask();
    let mut members = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=universe.size() + 2) {
        let m = random_subset(rng, full);
        if m != 0 {
            members.insert(m);
        }
    }
    if members.is_empty() {
        members.insert(1);
    }
    SubsetFamily::from_bits(universe, members)
}

/// One candidate: either a random triple (closed system plus interior
/// system or filtered partial table) or a poset-derived space.
pub fn random_space_candidate<R: Rng>(rng: &mut R, max_n: usize, cap: usize) -> Option<FGCSpace> {
    let n = rng.gen_range(1..=max_n);
    match rng.gen_range(0..3u8) {
        0 => {
            let p = random_poset(n, rng);
            Some(p.to_fgcs(cap).expect("derived spaces validate"))
        }
        style => {
            let universe = Universe::new(labels(n)).expect("valid labels");
            let gamma = ClosureSpec::from_closed_system(random_closed_system(rng, &universe))
                .expect("intersection-closed by construction");
            let tau = if style == 1 {
                let mut opens = BTreeSet::new();
                for _ in 0..rng.gen_range(1..=n + 2) {
                    opens.insert(random_subset(rng, universe.full_mask()));
                }
                TauSpec::from_interior_system(SubsetFamily::from_bits(&universe, opens))
            } else {
                random_partial_tau(rng, &gamma)
            };
            let mut space = GCSpace::new(gamma, tau).ok()?;
            if !space.validate(cap).ok()?.ok {
                return None;
            }
            let family = random_family(rng, &universe);
            let mut x = FGCSpace::new(space, family).ok()?;
            if !x.validate(cap).ok()?.ok {
                return None;
            }
            Some(x)
        }
    }
}

/// Draws candidates until one survives the validators.
pub fn random_valid_space<R: Rng>(rng: &mut R, max_n: usize, cap: usize) -> FGCSpace {
    for _ in 0..100_000 {
        if let Some(x) = random_space_candidate(rng, max_n, cap) {
            return x;
        }
    }
    unreachable!("poset-derived candidates always survive");
}

/// A random monotone self-assignment of the regular opens, with a
/// constant map as fallback.
fn random_scott_table<R: Rng>(rng: &mut R, from: usize, to: usize, check: impl Fn(&[usize]) -> bool) -> Vec<usize> {
    for _ in 0..40 {
        let table: Vec<usize> = (0..from).map(|_| rng.gen_range(0..to)).collect();
        if check(&table) {
            return table;
        }
    }
    vec![rng.gen_range(0..to); from]
}

struct Instance {
    space: FGCSpace,
    second: FGCSpace,
    poset: FinPoset,
}

fn violation(rule: &str, message: impl Into<String>) -> Violation {
    Violation::new(rule, vec![], message)
}

/// Runs one target check; `None` means it passed.
fn check_target(target: Target, inst: &Instance, cap: usize, oracle_skips: &mut usize, rng: &mut ChaCha8Rng) -> Option<Violation> {
    let x = &inst.space;
    let u = x.universe();
    match target {
        Target::GcsAxioms => {
            let count = u.subset_count();
            for a in 0..count {
                let h = x.hull_bits(a);
                if x.hull_bits(h) != h {
                    return Some(Violation::new(
                        "hull-not-idempotent",
                        vec![Witness::set("A", &Subset::from_bits(u, a))],
                        "hull of a hull moved",
                    ));
                }
            }
            // Fixed points absorb hulls of their subsets.
            for fp in 0..count {
                if x.hull_bits(fp) != fp {
                    continue;
                }
                for a in submasks(fp) {
                    if x.hull_bits(a) & !fp != 0 {
                        return Some(Violation::new(
                            "hull-escapes-fixed-point",
                            vec![
                                Witness::set("A", &Subset::from_bits(u, a)),
                                Witness::set("U", &Subset::from_bits(u, fp)),
                            ],
                            "hull(A) leaves a fixed point containing A",
                        ));
                    }
                }
            }
            None
        }
        Target::FgcsAxiom => {
            let regulars = x.regular_opens(cap).ok()?;
            for b in x.basis().ok()?.members() {
                if !b.is_empty() && !x.is_regular_open(b, Mode::Oracle).ok()? {
                    return Some(violation(
                        "basis-member-not-regular",
                        format!("hull {b} fails the regularity definition"),
                    ));
                }
            }
            for reg in regulars.members().members() {
                for m in submasks(reg.bits()) {
                    let ok = x.family().member_bits().any(|f| {
                        let h = x.hull_bits(f);
                        f & !reg.bits() == 0 && m & !h == 0 && h & !reg.bits() == 0
                    });
                    if !ok {
                        return Some(Violation::new(
                            "regular-without-inner-hull",
                            vec![
                                Witness::set("U", reg),
                                Witness::set("M", &Subset::from_bits(u, m)),
                            ],
                            "no member inside U traps M under its hull inside U",
                        ));
                    }
                }
            }
            None
        }
        Target::Dcpo => {
            let regulars = x.regular_opens(cap).ok()?;
            let sets: Vec<u64> = regulars.members().member_bits().collect();
            if sets.len() > WAY_BELOW_ORACLE_CAP {
                *oracle_skips += 1;
                return None;
            }
            for pick in 1u64..(1 << sets.len()) {
                let chosen: Vec<u64> = (0..sets.len())
                    .filter(|i| pick & (1 << i) != 0)
                    .map(|i| sets[i])
                    .collect();
                if directed(&chosen) {
                    let union = chosen.iter().fold(0, |a, &b| a | b);
                    let s = Subset::from_bits(u, union);
                    if !x.is_regular_open(&s, Mode::Fast).ok()? {
                        return Some(violation(
                            "directed-union-not-regular",
                            format!("union {s} of a directed subfamily is not regular"),
                        ));
                    }
                }
            }
            None
        }
        Target::Basis => {
            let regulars = x.regular_opens(cap).ok()?;
            let basis = x.basis().ok()?;
            for reg in regulars.members().members() {
                let approx: Vec<u64> = basis
                    .members()
                    .iter()
                    .filter(|b| {
                        b.is_subset_of(reg).unwrap_or(false)
                            && x.way_below(b, reg, Mode::Fast, cap).unwrap_or(false)
                    })
                    .map(|b| b.bits())
                    .collect();
                if !directed(&approx) || approx.iter().fold(0, |a, &b| a | b) != reg.bits() {
                    return Some(violation(
                        "basis-approximants-do-not-converge",
                        format!("basis members way below {reg} fail to join back to it"),
                    ));
                }
            }
            None
        }
        Target::Eq37 => {
            for bits in 0..u.subset_count() {
                let s = Subset::from_bits(u, bits);
                let fast = x.is_regular_open(&s, Mode::Fast).ok()?;
                let oracle = x.is_regular_open(&s, Mode::Oracle).ok()?;
                if fast != oracle {
                    return Some(Violation::new(
                        "regular-mode-disagreement",
                        vec![Witness::set("U", &s)],
                        format!("fast={fast} oracle={oracle}"),
                    ));
                }
            }
            let regulars = x.regular_opens(cap).ok()?;
            if regulars.len() > WAY_BELOW_ORACLE_CAP {
                *oracle_skips += 1;
                return None;
            }
            let fast = x.way_below_matrix(Mode::Fast, cap).ok()?;
            let oracle = x.way_below_matrix(Mode::Oracle, cap).ok()?;
            for (i, u1) in regulars.members().members().iter().enumerate() {
                for (j, u2) in regulars.members().members().iter().enumerate() {
                    if fast[i][j] != oracle[i][j] {
                        return Some(Violation::new(
                            "way-below-mode-disagreement",
                            vec![Witness::set("U1", u1), Witness::set("U2", u2)],
                            format!("fast={} oracle={}", fast[i][j], oracle[i][j]),
                        ));
                    }
                }
            }
            None
        }
        Target::LConsistency => {
            let locally = is_locally_consistent(x, cap).ok()?.ok;
            if locally {
                let flags = classify_regulars(&x.regular_opens(cap).ok()?);
                if !flags.l_domain {
                    return Some(violation(
                        "locally-consistent-without-l-domain",
                        "regular opens of a locally consistent space are not an L-domain",
                    ));
                }
            }
            None
        }
        Target::Bc => {
            let consistent = is_consistent(x, cap).ok()?.ok;
            if consistent {
                if !is_locally_consistent(x, cap).ok()?.ok {
                    return Some(violation(
                        "consistent-without-local-consistency",
                        "subset-closed space is not locally consistent",
                    ));
                }
                let flags = classify_regulars(&x.regular_opens(cap).ok()?);
                if !flags.bounded_complete {
                    return Some(violation(
                        "consistent-without-bounded-completeness",
                        "regular opens of a subset-closed space are not bounded complete",
                    ));
                }
            }
            None
        }
        Target::AmLaws | Target::FunctorLaws => {
            let a = Arc::new(x.clone());
            let b = Arc::new(inst.second.clone());
            let ra = a.regular_opens(cap).ok()?.len().max(1);
            let rb = b.regular_opens(cap).ok()?.len().max(1);
            let make = |rng: &mut ChaCha8Rng, src: &Arc<FGCSpace>, tgt: &Arc<FGCSpace>, from: usize, to: usize| {
                let table = random_scott_table(rng, from, to, |t| {
                    ScottMap::from_table(src, tgt, t.to_vec(), cap).is_ok()
                });
                let phi = ScottMap::from_table(src, tgt, table, cap).ok()?;
                let mut theta = AMRelation::from_scott(&phi).ok()?;
                let report = theta.validate(cap).ok()?;
                if report.ok {
                    Some(theta)
                } else {
                    None
                }
            };
            let Some(t1) = make(rng, &a, &b, ra, rb) else {
                return Some(violation(
                    "scott-function-not-approximable",
                    "a monotone function on regular opens induced an invalid relation",
                ));
            };
            let Some(t2) = make(rng, &b, &a, rb, ra) else {
                return Some(violation(
                    "scott-function-not-approximable",
                    "a monotone function on regular opens induced an invalid relation",
                ));
            };
            if target == Target::AmLaws {
                let Some(t3) = make(rng, &a, &b, ra, rb) else {
                    return Some(violation(
                        "scott-function-not-approximable",
                        "a monotone function on regular opens induced an invalid relation",
                    ));
                };
                let mut inner = AMRelation::compose(&t1, &t2).ok()?;
                if !inner.validate(cap).ok()?.ok {
                    return Some(violation(
                        "composition-not-approximable",
                        "a composite of validated relations failed validation",
                    ));
                }
                let left = AMRelation::compose(&inner, &t3).ok()?;
                let mut inner2 = AMRelation::compose(&t2, &t3).ok()?;
                if !inner2.validate(cap).ok()?.ok {
                    return Some(violation(
                        "composition-not-approximable",
                        "a composite of validated relations failed validation",
                    ));
                }
                let right = AMRelation::compose(&t1, &inner2).ok()?;
                if left.pairs() != right.pairs() {
                    return Some(violation(
                        "composition-not-associative",
                        "relation composition changed under re-association",
                    ));
                }
                let ida = AMRelation::identity(&a).ok().and_then(|mut i| {
                    i.validate(cap).ok().filter(|r| r.ok).map(|_| i)
                })?;
                let left_id = AMRelation::compose(&ida, &t1).ok()?;
                let right_id = AMRelation::compose(&t1, &AMRelation::identity(&b).ok().and_then(|mut i| i.validate(cap).ok().filter(|r| r.ok).map(|_| i))?).ok()?;
                if left_id.pairs() != t1.pairs() || right_id.pairs() != t1.pairs() {
                    return Some(violation(
                        "identity-not-neutral",
                        "composition with the identity relation changed the pairs",
                    ));
                }
                None
            } else {
                let report = check_functor_laws(&[(t1, t2)], cap).ok()?;
                report.violations.into_iter().next()
            }
        }
        Target::Roundtrip => {
            let out = inst.poset.roundtrip(cap).ok()?;
            if !out.report.ok {
                return Some(out.report.violations[0].clone());
            }
            // Mode agreement of the order-side characterization.
            for bits in 0..inst.poset.elements().subset_count() {
                let s = Subset::from_bits(inst.poset.elements(), bits);
                let fast = inst.poset.regular_characterization(&s, Mode::Fast, cap).ok()?;
                let direct = inst.poset.regular_characterization(&s, Mode::Oracle, cap).ok()?;
                if fast != direct {
                    return Some(Violation::new(
                        "regular-characterization-disagreement",
                        vec![Witness::set("U", &s)],
                        format!("order-side={fast} space-side={direct}"),
                    ));
                }
            }
            None
        }
    }
}

fn shrink_family(x: &FGCSpace, cap: usize, still_fails: impl Fn(&FGCSpace) -> bool) -> FGCSpace {
    let mut current = x.clone();
    loop {
        let members: Vec<u64> = current.family().member_bits().collect();
        if members.len() <= 1 {
            return current;
        }
        let mut improved = false;
        for drop in &members {
            let reduced = SubsetFamily::from_bits(
                current.universe(),
                members.iter().copied().filter(|m| m != drop),
            );
            if reduced.is_empty() {
                continue;
            }
            if let Ok(candidate) = FGCSpace::validated(current.space().clone(), reduced, cap) {
                if still_fails(&candidate) {
                    current = candidate;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            return current;
        }
    }
}

/// Removing carrier elements is possible when both operators are given
/// as systems of sets, which project to subuniverses.
fn shrink_elements(x: &FGCSpace, cap: usize, still_fails: impl Fn(&FGCSpace) -> bool) -> FGCSpace {
    let mut current = x.clone();
    'outer: loop {
        let u = current.universe().clone();
        if u.size() <= 1 {
            return current;
        }
        let (GammaRepr::ClosedSystem(closed), TauRepr::InteriorSystem(opens)) =
            (current.space().gamma().repr(), current.space().tau().repr())
        else {
            return current;
        };
        for drop in 0..u.size() {
            let keep: Vec<String> =
                u.labels().iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, l)| l.clone()).collect();
            let Ok(small) = Universe::new(keep) else { continue };
            let project = |bits: u64| -> u64 {
                let mut out = 0u64;
                let mut pos = 0;
                for i in 0..u.size() {
                    if i == drop {
                        continue;
                    }
                    if bits & (1 << i) != 0 {
                        out |= 1 << pos;
                    }
                    pos += 1;
                }
                out
            };
            let closed2 = SubsetFamily::from_bits(&small, closed.member_bits().map(project));
            let opens2 = SubsetFamily::from_bits(&small, opens.member_bits().map(project));
            let family2 = SubsetFamily::from_bits(
                &small,
                current.family().member_bits().map(project).filter(|&m| m != 0),
            );
            if family2.is_empty() {
                continue;
            }
            let Ok(gamma) = ClosureSpec::from_closed_system(closed2) else { continue };
            let tau = TauSpec::from_interior_system(opens2);
            let Ok(mut space) = GCSpace::new(gamma, tau) else { continue };
            let Ok(report) = space.validate(cap) else { continue };
            if !report.ok {
                continue;
            }
            if let Ok(candidate) = FGCSpace::validated(space, family2, cap) {
                if still_fails(&candidate) {
                    current = candidate;
                    continue 'outer;
                }
            }
        }
        return current;
    }
}

/// Runs the configured number of candidates through the targeted checks.
pub fn mine(cfg: &MinerConfig, cap: usize) -> MineOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut outcome = MineOutcome {
        seed: cfg.seed,
        candidates: 0,
        surviving_spaces: 0,
        oracle_skips: 0,
        violations: Vec::new(),
    };
    for index in 0..cfg.count {
        outcome.candidates += 1;
        let candidate = random_space_candidate(&mut rng, cfg.max_n, cap);
        let second = random_valid_space(&mut rng, cfg.max_n, cap);
        let poset = random_poset(rng.gen_range(1..=cfg.max_n), &mut rng);
        let Some(space) = candidate else { continue };
        outcome.surviving_spaces += 1;
        let inst = Instance { space, second, poset };
        for &target in &cfg.targets {
            if let Some(v) =
                check_target(target, &inst, cap, &mut outcome.oracle_skips, &mut rng)
            {
                // Greedy shrink: the reduced instance must stay valid and
                // keep failing the same target.
                let shrunk = if matches!(
                    target,
                    Target::AmLaws | Target::FunctorLaws | Target::Roundtrip
                ) {
                    None
                } else {
                    let fails = |y: &FGCSpace| {
                        let probe = Instance {
                            space: y.clone(),
                            second: inst.second.clone(),
                            poset: inst.poset.clone(),
                        };
                        let mut skips = 0;
                        let mut probe_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                        check_target(target, &probe, cap, &mut skips, &mut probe_rng)
                            .map(|v2| v2.rule == v.rule)
                            .unwrap_or(false)
                    };
                    let reduced = shrink_family(&inst.space, cap, fails);
                    let reduced = shrink_elements(&reduced, cap, fails);
                    Some(serde_json::to_value(doc_from_space(reduced.space(), Some(reduced.family()))).unwrap())
                };
                let document = if target == Target::Roundtrip {
                    serde_json::to_value(doc_from_poset(&inst.poset)).unwrap()
                } else {
                    serde_json::to_value(doc_from_space(inst.space.space(), Some(inst.space.family()))).unwrap()
                };
                outcome.violations.push(MineViolation {
                    instance: index,
                    target: target.name().to_string(),
                    violation: v,
                    document,
                    shrunk,
                });
            }
        }
    }
    outcome
}
