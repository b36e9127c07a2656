//! Closure operators, the post-composed map `tau`, and validated
//! generalized closure spaces.
//!
//! A space pairs a closure operator `gamma` with a map `tau` constrained
//! only on closed sets: the composite hull `tau(gamma(A))` must stay
//! inside `gamma(A)`, be stable under a second application of `tau`, and
//! be monotone in `A`. Validation checks those three conditions over the
//! whole powerset and caches the hull table on success.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::report::{Report, Violation, Witness};
use crate::set::{render_bits, submasks, Subset, SubsetFamily, Universe, WARN_THRESHOLD};
use crate::Error;

/// Upper bound on violations collected by one validation pass; scanning
/// continues but further findings are dropped with a note.
const MAX_VIOLATIONS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GammaRepr {
    /// A family of closed sets containing the full carrier and closed
    /// under binary intersection; `gamma(A)` is the least member above `A`.
    ClosedSystem(SubsetFamily),
    /// The graph of `gamma`, indexed by canonical subset index.
    FullTable(Vec<u64>),
}

/// A validated closure operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureSpec {
    universe: Arc<Universe>,
    repr: GammaRepr,
}

impl ClosureSpec {
    pub fn from_closed_system(system: SubsetFamily) -> Result<ClosureSpec, Error> {
        let universe = Arc::clone(system.universe());
        let full = universe.full_mask();
        if !system.contains_bits(full) {
            return Err(Error::NotAClosureSystem {
                reason: "the full carrier is not a member".into(),
            });
        }
        let masks: Vec<u64> = system.member_bits().collect();
        for (i, &a) in masks.iter().enumerate() {
            for &b in &masks[i + 1..] {
                if !system.contains_bits(a & b) {
                    return Err(Error::NotAClosureSystem {
                        reason: format!(
                            "not closed under intersection: {} and {} meet in {}",
                            render_bits(&universe, a),
                            render_bits(&universe, b),
                            render_bits(&universe, a & b)
                        ),
                    });
                }
            }
        }
        Ok(ClosureSpec { universe, repr: GammaRepr::ClosedSystem(system) })
    }

    /// Builds the operator from its full table, checking extensivity,
    /// idempotence and monotonicity.
    pub fn from_table(universe: &Arc<Universe>, table: Vec<u64>) -> Result<ClosureSpec, Error> {
        let n = universe.subset_count() as usize;
        if table.len() != n {
            return Err(Error::NotAClosureOperator {
                reason: format!("table has {} entries, expected {}", table.len(), n),
            });
        }
        let full = universe.full_mask();
        for (a, &ga) in table.iter().enumerate() {
            let a = a as u64;
            if ga & !full != 0 {
                return Err(Error::NotAClosureOperator {
                    reason: format!("value at {} leaves the carrier", render_bits(universe, a)),
                });
            }
            if a & !ga != 0 {
                return Err(Error::NotAClosureOperator {
                    reason: format!("not extensive at {}", render_bits(universe, a)),
                });
            }
            if table[ga as usize] != ga {
                return Err(Error::NotAClosureOperator {
                    reason: format!("not idempotent at {}", render_bits(universe, a)),
                });
            }
        }
        for b in 0..n as u64 {
            for a in submasks(b) {
                if table[a as usize] & !table[b as usize] != 0 {
                    return Err(Error::NotAClosureOperator {
                        reason: format!(
                            "not monotone: gamma({}) exceeds gamma({})",
                            render_bits(universe, a),
                            render_bits(universe, b)
                        ),
                    });
                }
            }
        }
        Ok(ClosureSpec { universe: Arc::clone(universe), repr: GammaRepr::FullTable(table) })
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn repr(&self) -> &GammaRepr {
        &self.repr
    }

    pub fn apply_bits(&self, a: u64) -> u64 {
        match &self.repr {
            GammaRepr::ClosedSystem(system) => {
                let mut out = self.universe.full_mask();
                for m in system.member_bits() {
                    if a & !m == 0 {
                        out &= m;
                    }
                }
                out
            }
            GammaRepr::FullTable(table) => table[a as usize],
        }
    }

    pub fn apply(&self, a: &Subset) -> Result<Subset, Error> {
        if a.universe() != &self.universe {
            return Err(Error::UniverseMismatch);
        }
        Ok(Subset::from_bits(&self.universe, self.apply_bits(a.bits())))
    }

    /// Distinct images of the operator, ascending.
    pub fn closed_sets(&self) -> Vec<u64> {
        let mut out: Vec<u64> =
            (0..self.universe.subset_count()).map(|a| self.apply_bits(a)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TauRepr {
    /// `tau(A)` is the union of the open sets contained in `A`; total and
    /// automatically monotone, idempotent and contractive.
    InteriorSystem(SubsetFamily),
    /// An explicit partial graph. Must cover every closed set and every
    /// value `tau` takes on one.
    PartialTable(BTreeMap<u64, u64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauSpec {
    universe: Arc<Universe>,
    repr: TauRepr,
}

impl TauSpec {
    pub fn from_interior_system(opens: SubsetFamily) -> TauSpec {
        TauSpec { universe: Arc::clone(opens.universe()), repr: TauRepr::InteriorSystem(opens) }
    }

    pub fn from_partial_table(universe: &Arc<Universe>, table: BTreeMap<u64, u64>) -> TauSpec {
        TauSpec { universe: Arc::clone(universe), repr: TauRepr::PartialTable(table) }
    }

    pub fn identity(universe: &Arc<Universe>) -> TauSpec {
        // The full powerset as an interior system makes tau the identity.
        let all = SubsetFamily::from_bits(universe, 0..universe.subset_count());
        TauSpec::from_interior_system(all)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn repr(&self) -> &TauRepr {
        &self.repr
    }

    pub fn apply_bits(&self, a: u64) -> Result<u64, Error> {
        match &self.repr {
            TauRepr::InteriorSystem(opens) => {
                let mut out = 0u64;
                for m in opens.member_bits() {
                    if m & !a == 0 {
                        out |= m;
                    }
                }
                Ok(out)
            }
            TauRepr::PartialTable(table) => table
                .get(&a)
                .copied()
                .ok_or_else(|| Error::TauUndefined { set: render_bits(&self.universe, a) }),
        }
    }

    pub fn apply(&self, a: &Subset) -> Result<Subset, Error> {
        if a.universe() != &self.universe {
            return Err(Error::UniverseMismatch);
        }
        Ok(Subset::from_bits(&self.universe, self.apply_bits(a.bits())?))
    }
}

/// A closure operator with a post-composed map, validated against the
/// three hull conditions. Immutable once validated.
#[derive(Debug, Clone)]
pub struct GCSpace {
    universe: Arc<Universe>,
    gamma: ClosureSpec,
    tau: TauSpec,
    validated: bool,
    gamma_table: Option<Vec<u64>>,
    hull_table: Option<Vec<u64>>,
}

/// Equality is extensional: same universe, same closure graph, same hull
/// graph. The representations behind the operators do not matter.
impl PartialEq for GCSpace {
    fn eq(&self, other: &Self) -> bool {
        if self.universe != other.universe {
            return false;
        }
        (0..self.universe.subset_count()).all(|a| {
            self.gamma_bits(a) == other.gamma_bits(a)
                && self.try_hull_bits(a) == other.try_hull_bits(a)
        })
    }
}

impl Eq for GCSpace {}

impl GCSpace {
    pub fn new(gamma: ClosureSpec, tau: TauSpec) -> Result<GCSpace, Error> {
        if gamma.universe() != tau.universe() {
            return Err(Error::UniverseMismatch);
        }
        Ok(GCSpace {
            universe: Arc::clone(gamma.universe()),
            gamma,
            tau,
            validated: false,
            gamma_table: None,
            hull_table: None,
        })
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn gamma(&self) -> &ClosureSpec {
        &self.gamma
    }

    pub fn tau(&self) -> &TauSpec {
        &self.tau
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn gamma_bits(&self, a: u64) -> u64 {
        match &self.gamma_table {
            Some(t) => t[a as usize],
            None => self.gamma.apply_bits(a),
        }
    }

    /// Applies the closure operator; works on unvalidated spaces too.
    pub fn gamma_apply(&self, a: &Subset) -> Result<Subset, Error> {
        if a.universe() != &self.universe {
            return Err(Error::UniverseMismatch);
        }
        Ok(Subset::from_bits(&self.universe, self.gamma_bits(a.bits())))
    }

    pub fn hull_bits(&self, a: u64) -> u64 {
        match &self.hull_table {
            Some(t) => t[a as usize],
            None => {
                let c = self.gamma_bits(a);
                self.tau.apply_bits(c).expect("hull on unvalidated space")
            }
        }
    }

    /// Hull without the validation guarantee; `None` where tau has a gap.
    fn try_hull_bits(&self, a: u64) -> Option<u64> {
        match &self.hull_table {
            Some(t) => Some(t[a as usize]),
            None => self.tau.apply_bits(self.gamma_bits(a)).ok(),
        }
    }

    /// The composite image `tau(gamma(a))`.
    pub fn hull(&self, a: &Subset) -> Result<Subset, Error> {
        if a.universe() != &self.universe {
            return Err(Error::UniverseMismatch);
        }
        if !self.validated {
            return Err(Error::Unvalidated);
        }
        let c = self.gamma_bits(a.bits());
        let h = self.tau.apply_bits(c)?;
        Ok(Subset::from_bits(&self.universe, h))
    }

    /// Checks the hull conditions over every subset: the hull stays
    /// inside the closure, is stable under another application of `tau`,
    /// is monotone over every nested pair, and is idempotent as a whole.
    /// The last does not follow from the first three (a partial `tau`
    /// can send a closed set below its own re-closure), and every
    /// downstream notion assumes it, so validation establishes it
    /// directly. On success the space is marked validated and the
    /// closure and hull tables are cached.
    pub fn validate(&mut self, cap: usize) -> Result<Report, Error> {
        let n = self.universe.size();
        if n > cap {
            return Err(Error::CapExceeded { n, cap });
        }
        let mut report = Report::new();
        if n > WARN_THRESHOLD {
            report.note(format!("universe size {n} above {WARN_THRESHOLD}: exhaustive checks may be slow"));
        }
        let count = self.universe.subset_count();
        let mut gamma_table = Vec::with_capacity(count as usize);
        for a in 0..count {
            gamma_table.push(self.gamma.apply_bits(a));
        }

        let mut hull_table = vec![0u64; count as usize];
        let mut dropped = 0usize;
        let mut push = |report: &mut Report, v: Violation| {
            if report.violations.len() < MAX_VIOLATIONS {
                report.push(v);
            } else {
                report.ok = false;
                dropped += 1;
            }
        };

        for a in 0..count {
            let closed = gamma_table[a as usize];
            let sa = Subset::from_bits(&self.universe, a);
            let hull = match self.tau.apply_bits(closed) {
                Ok(h) => h,
                Err(_) => {
                    push(
                        &mut report,
                        Violation::new(
                            "tau-domain-gap",
                            vec![
                                Witness::set("A", &sa),
                                Witness::set("closure", &Subset::from_bits(&self.universe, closed)),
                            ],
                            "tau is undefined on a closed set",
                        ),
                    );
                    continue;
                }
            };
            hull_table[a as usize] = hull;
            if hull & !closed != 0 {
                push(
                    &mut report,
                    Violation::new(
                        "hull-escapes-closure",
                        vec![Witness::set("A", &sa)],
                        format!(
                            "tau(gamma(A)) = {} is not contained in gamma(A) = {}",
                            render_bits(&self.universe, hull),
                            render_bits(&self.universe, closed)
                        ),
                    ),
                );
            }
            match self.tau.apply_bits(hull) {
                Ok(again) => {
                    if again != hull {
                        push(
                            &mut report,
                            Violation::new(
                                "hull-not-stable",
                                vec![Witness::set("A", &sa)],
                                format!(
                                    "tau(tau(gamma(A))) = {} differs from tau(gamma(A)) = {}",
                                    render_bits(&self.universe, again),
                                    render_bits(&self.universe, hull)
                                ),
                            ),
                        );
                    }
                }
                Err(_) => {
                    push(
                        &mut report,
                        Violation::new(
                            "tau-domain-gap",
                            vec![
                                Witness::set("A", &sa),
                                Witness::set("hull", &Subset::from_bits(&self.universe, hull)),
                            ],
                            "tau is undefined on one of its own images",
                        ),
                    );
                }
            }
        }

        if report.ok {
            for a in 0..count {
                let h = hull_table[a as usize];
                match self.tau.apply_bits(gamma_table[h as usize]) {
                    Ok(again) if again == h => {}
                    Ok(again) => {
                        push(
                            &mut report,
                            Violation::new(
                                "hull-not-idempotent",
                                vec![Witness::set("A", &Subset::from_bits(&self.universe, a))],
                                format!(
                                    "the hull {} of A re-hulls to {}",
                                    render_bits(&self.universe, h),
                                    render_bits(&self.universe, again)
                                ),
                            ),
                        );
                    }
                    Err(_) => {
                        push(
                            &mut report,
                            Violation::new(
                                "tau-domain-gap",
                                vec![
                                    Witness::set("A", &Subset::from_bits(&self.universe, a)),
                                    Witness::set(
                                        "closure",
                                        &Subset::from_bits(&self.universe, gamma_table[h as usize]),
                                    ),
                                ],
                                "tau is undefined on the closure of a hull",
                            ),
                        );
                    }
                }
            }
        }

        if report.ok {
            for b in 0..count {
                for a in submasks(b) {
                    if a == b {
                        continue;
                    }
                    if hull_table[a as usize] & !hull_table[b as usize] != 0 {
                        push(
                            &mut report,
                            Violation::new(
                                "hull-not-monotone",
                                vec![
                                    Witness::set("A", &Subset::from_bits(&self.universe, a)),
                                    Witness::set("B", &Subset::from_bits(&self.universe, b)),
                                ],
                                format!(
                                    "A is contained in B but tau(gamma(A)) = {} is not contained in tau(gamma(B)) = {}",
                                    render_bits(&self.universe, hull_table[a as usize]),
                                    render_bits(&self.universe, hull_table[b as usize])
                                ),
                            ),
                        );
                    }
                }
            }
        }

        if dropped > 0 {
            report.note(format!("{dropped} further violations dropped"));
        }
        if report.ok {
            self.validated = true;
            self.gamma_table = Some(gamma_table);
            self.hull_table = Some(hull_table);
        }
        Ok(report)
    }

    /// Re-runs a single named rule against explicit witnesses; used to
    /// replay reported violations.
    pub fn replay(&self, v: &Violation) -> Option<bool> {
        let set = |role: &str| -> Option<u64> {
            match v.witness(role)? {
                crate::report::WitnessValue::Set(labels) => {
                    let mut bits = 0u64;
                    for l in labels {
                        bits |= 1 << self.universe.index_of(l)?;
                    }
                    Some(bits)
                }
                _ => None,
            }
        };
        let fails = match v.rule.as_str() {
            "hull-escapes-closure" => {
                let a = set("A")?;
                let closed = self.gamma.apply_bits(a);
                let hull = self.tau.apply_bits(closed).ok()?;
                hull & !closed != 0
            }
            "hull-not-stable" => {
                let a = set("A")?;
                let hull = self.tau.apply_bits(self.gamma.apply_bits(a)).ok()?;
                self.tau.apply_bits(hull).ok()? != hull
            }
            "hull-not-idempotent" => {
                let a = set("A")?;
                let hull = self.tau.apply_bits(self.gamma.apply_bits(a)).ok()?;
                self.tau.apply_bits(self.gamma.apply_bits(hull)).ok()? != hull
            }
            "hull-not-monotone" => {
                let (a, b) = (set("A")?, set("B")?);
                let ha = self.tau.apply_bits(self.gamma.apply_bits(a)).ok()?;
                let hb = self.tau.apply_bits(self.gamma.apply_bits(b)).ok()?;
                a & !b == 0 && ha & !hb != 0
            }
            "tau-domain-gap" => {
                let a = set("A")?;
                let closed = self.gamma.apply_bits(a);
                match self.tau.apply_bits(closed) {
                    Err(_) => true,
                    Ok(h) => self.tau.apply_bits(h).is_err(),
                }
            }
            _ => return None,
        };
        Some(fails)
    }
}

/// Builds the space of a finite topology: `gamma` is topological closure,
/// `tau` topological interior.
pub fn from_topology(opens: &SubsetFamily, cap: usize) -> Result<GCSpace, Error> {
    let universe = opens.universe();
    let full = universe.full_mask();
    if !opens.contains_bits(0) {
        return Err(Error::NotATopology { reason: "the empty set is not open".into() });
    }
    if !opens.contains_bits(full) {
        return Err(Error::NotATopology { reason: "the full carrier is not open".into() });
    }
    let masks: Vec<u64> = opens.member_bits().collect();
    for (i, &a) in masks.iter().enumerate() {
        for &b in &masks[i..] {
            if !opens.contains_bits(a | b) {
                return Err(Error::NotATopology {
                    reason: format!(
                        "union of {} and {} is not open",
                        render_bits(universe, a),
                        render_bits(universe, b)
                    ),
                });
            }
            if !opens.contains_bits(a & b) {
                return Err(Error::NotATopology {
                    reason: format!(
                        "intersection of {} and {} is not open",
                        render_bits(universe, a),
                        render_bits(universe, b)
                    ),
                });
            }
        }
    }
    let closed = SubsetFamily::from_bits(universe, masks.iter().map(|m| !m & full));
    let gamma = ClosureSpec::from_closed_system(closed)?;
    let tau = TauSpec::from_interior_system(opens.clone());
    let mut space = GCSpace::new(gamma, tau)?;
    let report = space.validate(cap)?;
    if !report.ok {
        // Interior over closure always satisfies the hull conditions; a
        // failure here means the family was not actually a topology.
        return Err(Error::NotATopology { reason: "hull conditions failed".into() });
    }
    Ok(space)
}

/// Checks that `gamma(A)` equals the union of `gamma(F)` over all finite
/// `F` contained in `A`. On a finite carrier this always holds; the check
/// quantifies it anyway.
pub fn is_algebraic_closure(op: &ClosureSpec, cap: usize) -> Result<Report, Error> {
    let universe = op.universe();
    let n = universe.size();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut report = Report::new();
    for a in 0..universe.subset_count() {
        let mut union = 0u64;
        for f in submasks(a) {
            union |= op.apply_bits(f);
        }
        if union != op.apply_bits(a) {
            report.push(Violation::new(
                "closure-not-algebraic",
                vec![Witness::set("A", &Subset::from_bits(universe, a))],
                "gamma(A) is not the union of gamma over the finite subsets of A",
            ));
        }
    }
    Ok(report)
}

/// Interior and closure of a finite topology, as raw masks.
fn topo_interior(masks: &[u64], a: u64) -> u64 {
    masks.iter().filter(|&&m| m & !a == 0).fold(0, |acc, &m| acc | m)
}

fn topo_closure(masks: &[u64], full: u64, a: u64) -> u64 {
    !topo_interior(masks, !a & full) & full
}

/// Looks for a subset witnessing that closure-after-interior cannot play
/// the hull role: the first map of a hull must be extensive, and the
/// composite must stay inside its first factor. Returns the first failing
/// subset, if any.
pub fn closure_after_interior_witness(opens: &SubsetFamily) -> Option<Violation> {
    let universe = opens.universe();
    let full = universe.full_mask();
    let masks: Vec<u64> = opens.member_bits().collect();
    for a in 0..universe.subset_count() {
        let i = topo_interior(&masks, a);
        if a & !i != 0 {
            return Some(Violation::new(
                "interior-not-extensive",
                vec![Witness::set("A", &Subset::from_bits(universe, a))],
                format!(
                    "interior({}) = {} does not contain its argument",
                    render_bits(universe, a),
                    render_bits(universe, i)
                ),
            ));
        }
        let ci = topo_closure(&masks, full, i);
        if ci & !i != 0 {
            return Some(Violation::new(
                "closure-escapes-interior",
                vec![Witness::set("A", &Subset::from_bits(universe, a))],
                "closure(interior(A)) leaves interior(A)",
            ));
        }
    }
    None
}

/// Enumerates every topology on a carrier of the given size (labels
/// `0..n`), ascending by the family's membership mask.
pub fn all_topologies(n: usize) -> Result<Vec<SubsetFamily>, Error> {
    let universe = Universe::new((0..n).map(|i| i.to_string()))?;
    let full = universe.full_mask();
    let inner: Vec<u64> = (1..full).collect();
    let mut out = Vec::new();
    for pick in 0..(1u64 << inner.len()) {
        let mut masks = vec![0, full];
        for (i, &m) in inner.iter().enumerate() {
            if pick & (1 << i) != 0 {
                masks.push(m);
            }
        }
        let fam = SubsetFamily::from_bits(&universe, masks.iter().copied());
        let closed = masks.iter().all(|&a| {
            masks.iter().all(|&b| fam.contains_bits(a | b) && fam.contains_bits(a & b))
        });
        if closed {
            out.push(fam);
        }
    }
    Ok(out)
}

/// Searches small finite topologies for a witness that the reversed
/// composite (closure after interior) fails the hull conditions.
pub fn search_closure_after_interior(max_n: usize) -> Option<(SubsetFamily, Violation)> {
    for n in 1..=max_n {
        for topo in all_topologies(n).ok()? {
            if let Some(v) = closure_after_interior_witness(&topo) {
                return Some((topo, v));
            }
        }
    }
    None
}
