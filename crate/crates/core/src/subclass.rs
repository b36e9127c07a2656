//! Family sups, local consistency, family subset-closure, and the
//! verification pipeline tying those space-side conditions to the order
//! classification of the regular opens.

use serde::{Deserialize, Serialize};

use crate::poset::{inclusion_poset, PosetFlags};
use crate::report::{Report, Violation, Witness};
use crate::set::{submasks, Subset, SubsetFamily, WARN_THRESHOLD};
use crate::space::{FGCSpace, RegularFamily};
use crate::Error;

const MAX_VIOLATIONS: usize = 64;

/// All family sups of `M` relative to `F`: the family members `G` inside
/// `hull(F)` whose hull covers `hull(M)` minimally among such hulls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaSet {
    pub f: Subset,
    pub m: Subset,
    pub members: SubsetFamily,
}

impl SigmaSet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Canonical representative for deterministic reporting: the least
    /// member in the canonical subset order.
    pub fn canonical(&self) -> Option<&Subset> {
        self.members.members().first()
    }

    /// The hull every member shares.
    pub fn shared_hull(&self, x: &FGCSpace) -> Option<Subset> {
        self.canonical().map(|g| Subset::from_bits(x.universe(), x.hull_bits(g.bits())))
    }
}

fn sigma_bits(x: &FGCSpace, f: u64, m: u64) -> Vec<u64> {
    let hull_f = x.hull_bits(f);
    let hull_m = x.hull_bits(m);
    let candidates: Vec<u64> = x
        .family()
        .member_bits()
        .filter(|&g| hull_m & !x.hull_bits(g) == 0 && g & !hull_f == 0)
        .collect();
    candidates
        .iter()
        .copied()
        .filter(|&g| {
            let hg = x.hull_bits(g);
            x.family().member_bits().all(|g1| {
                let hg1 = x.hull_bits(g1);
                // Minimality is quantified over members whose hull is
                // squeezed between hull(M) and hull(F).
                !(hull_m & !hg1 == 0 && hg1 & !hull_f == 0) || hg & !hg1 == 0
            })
        })
        .collect()
}

/// Computes the sigma set of `(f, m)`; `f` must be a family member and
/// `m` must lie inside `hull(f)`.
pub fn f_sups(x: &FGCSpace, f: &Subset, m: &Subset) -> Result<SigmaSet, Error> {
    if f.universe() != x.universe() || m.universe() != x.universe() {
        return Err(Error::UniverseMismatch);
    }
    if !x.is_validated() {
        return Err(Error::Unvalidated);
    }
    if !x.family().contains(f) {
        return Err(Error::NotInFamily { set: f.to_string() });
    }
    let hull_f = x.hull_bits(f.bits());
    if m.bits() & !hull_f != 0 {
        return Err(Error::MNotInHull {
            set: m.to_string(),
            hull: Subset::from_bits(x.universe(), hull_f).to_string(),
        });
    }
    let members = SubsetFamily::from_bits(x.universe(), sigma_bits(x, f.bits(), m.bits()));
    Ok(SigmaSet { f: f.clone(), m: m.clone(), members })
}

/// A space is locally consistent when every `(F, M)` with `M` a finite
/// subset of `hull(F)` (the empty set included) has a nonempty sigma set.
pub fn is_locally_consistent(x: &FGCSpace, cap: usize) -> Result<Report, Error> {
    require_ready(x, cap)?;
    let mut report = Report::new();
    warn_large_hulls(x, &mut report);
    'outer: for f in x.family().member_bits() {
        for m in submasks(x.hull_bits(f)) {
            if sigma_bits(x, f, m).is_empty() {
                report.push(Violation::new(
                    "f-sup-missing",
                    vec![
                        Witness::set("F", &Subset::from_bits(x.universe(), f)),
                        Witness::set("M", &Subset::from_bits(x.universe(), m)),
                    ],
                    "no family member realizes a least hull above M inside hull(F)",
                ));
                if report.violations.len() >= MAX_VIOLATIONS {
                    report.note("violation list truncated");
                    break 'outer;
                }
            }
        }
    }
    Ok(report)
}

/// The subset-closure condition: every finite subset of every hull
/// (the empty set included) must itself be a family member.
pub fn is_consistent(x: &FGCSpace, cap: usize) -> Result<Report, Error> {
    require_ready(x, cap)?;
    let mut report = Report::new();
    warn_large_hulls(x, &mut report);
    'outer: for f in x.family().member_bits() {
        for m in submasks(x.hull_bits(f)) {
            if !x.family().contains_bits(m) {
                report.push(Violation::new(
                    "subset-not-in-family",
                    vec![
                        Witness::set("F", &Subset::from_bits(x.universe(), f)),
                        Witness::set("M", &Subset::from_bits(x.universe(), m)),
                    ],
                    "a finite subset of hull(F) is missing from the family",
                ));
                if report.violations.len() >= MAX_VIOLATIONS {
                    report.note("violation list truncated");
                    break 'outer;
                }
            }
        }
    }
    Ok(report)
}

/// Replays a violation from either subclass validator.
pub fn replay(x: &FGCSpace, v: &Violation) -> Option<bool> {
    let bits = |role: &str| -> Option<u64> {
        match v.witness(role)? {
            crate::report::WitnessValue::Set(labels) => {
                let mut out = 0u64;
                for l in labels {
                    out |= 1 << x.universe().index_of(l)?;
                }
                Some(out)
            }
            _ => None,
        }
    };
    match v.rule.as_str() {
        "f-sup-missing" => {
            let (f, m) = (bits("F")?, bits("M")?);
            Some(sigma_bits(x, f, m).is_empty())
        }
        "subset-not-in-family" => {
            let (_, m) = (bits("F")?, bits("M")?);
            Some(!x.family().contains_bits(m))
        }
        _ => x.replay(v),
    }
}

fn require_ready(x: &FGCSpace, cap: usize) -> Result<(), Error> {
    if !x.is_validated() {
        return Err(Error::Unvalidated);
    }
    let n = x.universe().size();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

fn warn_large_hulls(x: &FGCSpace, report: &mut Report) {
    if x.family()
        .member_bits()
        .any(|f| x.hull_bits(f).count_ones() as usize > WARN_THRESHOLD)
    {
        report.note(format!(
            "a hull exceeds {WARN_THRESHOLD} elements: the subset sweep is exponential in hull size"
        ));
    }
}

/// Order flags of the regular opens under inclusion. An empty family of
/// regular opens classifies vacuously (no directed subsets, no bounded
/// subsets, but also no least element for a complete lattice).
pub fn classify_regulars(regulars: &RegularFamily) -> PosetFlags {
    if regulars.is_empty() {
        return PosetFlags {
            dcpo: true,
            continuous: true,
            algebraic: true,
            complete_lattice: false,
            l_domain: true,
            bounded_complete: true,
        };
    }
    inclusion_poset(regulars.members())
        .expect("regular opens render to distinct labels")
        .classify()
        .flags
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceClass {
    General,
    LocallyConsistent,
    Consistent,
}

impl std::fmt::Display for SpaceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpaceClass::General => write!(f, "general"),
            SpaceClass::LocallyConsistent => write!(f, "locally-consistent"),
            SpaceClass::Consistent => write!(f, "consistent"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpaceClassification {
    pub class: SpaceClass,
    pub regular_count: usize,
    pub flags: PosetFlags,
}

/// Classifies a space as general, locally consistent, or consistent, and
/// classifies its regular opens.
pub fn classify_space(x: &FGCSpace, cap: usize) -> Result<SpaceClassification, Error> {
    let consistent = is_consistent(x, cap)?.ok;
    let locally = consistent || is_locally_consistent(x, cap)?.ok;
    let class = if consistent {
        SpaceClass::Consistent
    } else if locally {
        SpaceClass::LocallyConsistent
    } else {
        SpaceClass::General
    };
    let regulars = x.regular_opens(cap)?;
    Ok(SpaceClassification {
        class,
        regular_count: regulars.len(),
        flags: classify_regulars(&regulars),
    })
}

/// Asserts the implications between the space-side conditions and the
/// order classification of the regular opens: local consistency must
/// yield the L-domain property, and subset-closure must yield both local
/// consistency and bounded completeness.
pub fn verify_subclass_theorems(x: &FGCSpace, cap: usize) -> Result<Report, Error> {
    require_ready(x, cap)?;
    let locally = is_locally_consistent(x, cap)?.ok;
    let consistent = is_consistent(x, cap)?.ok;
    let regulars = x.regular_opens(cap)?;
    let flags = classify_regulars(&regulars);
    let mut report = Report::new();
    report.note(format!(
        "locally-consistent={locally} consistent={consistent} regular-opens={} l-domain={} bounded-complete={}",
        regulars.len(),
        flags.l_domain,
        flags.bounded_complete
    ));
    if locally && !flags.l_domain {
        report.push(Violation::new(
            "locally-consistent-without-l-domain",
            vec![],
            "the space is locally consistent but its regular opens are not an L-domain",
        ));
    }
    if consistent && !locally {
        report.push(Violation::new(
            "consistent-without-local-consistency",
            vec![],
            "the space satisfies subset-closure but is not locally consistent",
        ));
    }
    if consistent && !flags.bounded_complete {
        report.push(Violation::new(
            "consistent-without-bounded-completeness",
            vec![],
            "the space satisfies subset-closure but its regular opens are not bounded complete",
        ));
    }
    Ok(report)
}
