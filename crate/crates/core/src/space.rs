//! Family-augmented spaces and their regular open sets.
//!
//! Augmenting a validated space with a family of finite subsets singles
//! out the regular opens: nonempty sets in which every finite subset is
//! trapped under some family hull. Ordered by inclusion they form a
//! continuous domain with basis the family hulls; the way-below relation
//! has both a one-existential characterization and a definitional oracle
//! over directed subfamilies, and the two must always agree.

use std::sync::Arc;

use crate::closure::GCSpace;
use crate::report::{Report, Violation, Witness};
use crate::set::{submasks, Subset, SubsetFamily, Universe, WARN_THRESHOLD};
use crate::Error;

/// Checking mode: `Fast` runs the finite characterization, `Oracle` the
/// quantifier-heavy definition it must agree with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fast,
    Oracle,
}

/// The way-below oracle enumerates directed subfamilies of the regular
/// opens; above this many regular opens only the fast mode runs.
pub const WAY_BELOW_ORACLE_CAP: usize = 12;

/// A validated space together with a family of finite subsets satisfying
/// the refinement axiom: for every family member `F` and every finite
/// `M` inside `hull(F)` some member `F1` has `M` inside `hull(F1)` and
/// `F1` inside `hull(F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FGCSpace {
    space: GCSpace,
    family: SubsetFamily,
    validated: bool,
}

impl FGCSpace {
    pub fn new(space: GCSpace, family: SubsetFamily) -> Result<FGCSpace, Error> {
        if !space.is_validated() {
            return Err(Error::Unvalidated);
        }
        if family.universe() != space.universe() {
            return Err(Error::UniverseMismatch);
        }
        if family.is_empty() {
            return Err(Error::EmptyFamily);
        }
        Ok(FGCSpace { space, family, validated: false })
    }

    /// Builds and validates in one step, failing on a violating family.
    pub fn validated(space: GCSpace, family: SubsetFamily, cap: usize) -> Result<FGCSpace, Error> {
        let mut x = FGCSpace::new(space, family)?;
        let report = x.validate(cap)?;
        if !report.ok {
            return Err(Error::Unvalidated);
        }
        Ok(x)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        self.space.universe()
    }

    pub fn space(&self) -> &GCSpace {
        &self.space
    }

    pub fn family(&self) -> &SubsetFamily {
        &self.family
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn hull_bits(&self, a: u64) -> u64 {
        self.space.hull_bits(a)
    }

    pub fn hull(&self, a: &Subset) -> Result<Subset, Error> {
        self.space.hull(a)
    }

    /// Checks the refinement axiom, quantifying `M` over every subset of
    /// each member's hull (the empty set included).
    pub fn validate(&mut self, cap: usize) -> Result<Report, Error> {
        let n = self.universe().size();
        if n > cap {
            return Err(Error::CapExceeded { n, cap });
        }
        let mut report = Report::new();
        let hulls: Vec<(u64, u64)> =
            self.family.member_bits().map(|f| (f, self.hull_bits(f))).collect();
        if hulls.iter().any(|&(_, h)| h.count_ones() as usize > WARN_THRESHOLD) {
            report.note(format!(
                "a hull exceeds {WARN_THRESHOLD} elements: the refinement sweep is exponential in hull size"
            ));
        }
        for &(f, hull_f) in &hulls {
            for m in submasks(hull_f) {
                let ok = hulls.iter().any(|&(f1, hull_f1)| m & !hull_f1 == 0 && f1 & !hull_f == 0);
                if !ok {
                    report.push(Violation::new(
                        "family-refinement",
                        vec![
                            Witness::set("F", &Subset::from_bits(self.universe(), f)),
                            Witness::set("M", &Subset::from_bits(self.universe(), m)),
                        ],
                        "no family member F1 has M inside hull(F1) and F1 inside hull(F)",
                    ));
                }
            }
        }
        if report.ok {
            self.validated = true;
        }
        Ok(report)
    }

    /// Replays a violation reported by [`FGCSpace::validate`] or the
    /// classical check; true means it fails again.
    pub fn replay(&self, v: &Violation) -> Option<bool> {
        let bits = |role: &str| -> Option<u64> {
            match v.witness(role)? {
                crate::report::WitnessValue::Set(labels) => {
                    let mut out = 0u64;
                    for l in labels {
                        out |= 1 << self.universe().index_of(l)?;
                    }
                    Some(out)
                }
                _ => None,
            }
        };
        match v.rule.as_str() {
            "family-refinement" => {
                let (f, m) = (bits("F")?, bits("M")?);
                let hull_f = self.hull_bits(f);
                let fails = !self
                    .family
                    .member_bits()
                    .any(|f1| m & !self.hull_bits(f1) == 0 && f1 & !hull_f == 0);
                Some(fails)
            }
            "tau-not-identity-on-closed" => {
                let c = bits("closed")?;
                Some(self.space.tau().apply_bits(c).ok()? != c)
            }
            "classical-refinement" => {
                let (f, m) = (bits("F")?, bits("M")?);
                let gf = self.space.gamma_bits(f);
                let fails =
                    !self.family.member_bits().any(|f1| m & !f1 == 0 && f1 & !gf == 0);
                Some(fails)
            }
            _ => self.space.replay(v),
        }
    }

    /// Checks whether the space is classical: `tau` is the identity on
    /// closed sets and the family refines with plain members instead of
    /// hulls.
    pub fn is_classical(&self, cap: usize) -> Result<Report, Error> {
        let n = self.universe().size();
        if n > cap {
            return Err(Error::CapExceeded { n, cap });
        }
        let mut report = Report::new();
        for c in self.space.gamma().closed_sets() {
            match self.space.tau().apply_bits(c) {
                Ok(t) if t == c => {}
                _ => {
                    report.push(Violation::new(
                        "tau-not-identity-on-closed",
                        vec![Witness::set("closed", &Subset::from_bits(self.universe(), c))],
                        "tau does not act as the identity on a closed set",
                    ));
                }
            }
        }
        for f in self.family.member_bits() {
            let gf = self.space.gamma_bits(f);
            for m in submasks(gf) {
                if !self.family.member_bits().any(|f1| m & !f1 == 0 && f1 & !gf == 0) {
                    report.push(Violation::new(
                        "classical-refinement",
                        vec![
                            Witness::set("F", &Subset::from_bits(self.universe(), f)),
                            Witness::set("M", &Subset::from_bits(self.universe(), m)),
                        ],
                        "no family member F1 satisfies M inside F1 inside gamma(F)",
                    ));
                }
            }
        }
        Ok(report)
    }

    fn require_validated(&self) -> Result<(), Error> {
        if self.validated {
            Ok(())
        } else {
            Err(Error::Unvalidated)
        }
    }

    /// Hulls of the family members contained in `u`, deduplicated.
    fn inner_hulls(&self, u: u64) -> Vec<u64> {
        let mut hs: Vec<u64> = self
            .family
            .member_bits()
            .filter(|&f| f & !u == 0)
            .map(|f| self.hull_bits(f))
            .collect();
        hs.sort_unstable();
        hs.dedup();
        hs
    }

    fn is_regular_fast(&self, u: u64) -> bool {
        if u == 0 {
            return false;
        }
        let hulls = self.inner_hulls(u);
        if hulls.is_empty() {
            return false;
        }
        let union = hulls.iter().fold(0u64, |acc, &h| acc | h);
        if union != u {
            return false;
        }
        directed(&hulls)
    }

    fn is_regular_oracle(&self, u: u64) -> bool {
        if u == 0 {
            return false;
        }
        let hulls: Vec<(u64, u64)> =
            self.family.member_bits().map(|f| (f, self.hull_bits(f))).collect();
        submasks(u).all(|m| hulls.iter().any(|&(_, h)| m & !h == 0 && h & !u == 0))
    }

    /// Tests whether `u` is a regular open set. `Fast` checks that the
    /// hulls of the members inside `u` form a directed family with union
    /// `u`; `Oracle` checks the definition, trapping every finite subset
    /// of `u` under some hull inside `u`.
    pub fn is_regular_open(&self, u: &Subset, mode: Mode) -> Result<bool, Error> {
        self.require_validated()?;
        if u.universe() != self.universe() {
            return Err(Error::UniverseMismatch);
        }
        Ok(match mode {
            Mode::Fast => self.is_regular_fast(u.bits()),
            Mode::Oracle => self.is_regular_oracle(u.bits()),
        })
    }

    /// Enumerates all regular open sets, canonically sorted.
    pub fn regular_opens(&self, cap: usize) -> Result<RegularFamily, Error> {
        self.require_validated()?;
        let n = self.universe().size();
        if n > cap {
            return Err(Error::CapExceeded { n, cap });
        }
        let members = SubsetFamily::from_bits(
            self.universe(),
            (1..self.universe().subset_count()).filter(|&u| self.is_regular_fast(u)),
        );
        Ok(RegularFamily { members })
    }

    /// The basis: hulls of all family members, deduplicated.
    pub fn basis(&self) -> Result<SubsetFamily, Error> {
        self.require_validated()?;
        Ok(SubsetFamily::from_bits(
            self.universe(),
            self.family.member_bits().map(|f| self.hull_bits(f)),
        ))
    }

    fn way_below_fast(&self, u1: u64, u2: u64) -> bool {
        self.family
            .member_bits()
            .any(|f| f & !u2 == 0 && u1 & !self.hull_bits(f) == 0)
    }

    /// Way-below on regular opens. `Fast` looks for one family member `F`
    /// inside `u2` whose hull covers `u1`; `Oracle` quantifies every
    /// directed subfamily of the regular opens whose union covers `u2`.
    pub fn way_below(&self, u1: &Subset, u2: &Subset, mode: Mode, cap: usize) -> Result<bool, Error> {
        self.require_validated()?;
        for u in [u1, u2] {
            if !self.is_regular_open(u, Mode::Fast)? {
                return Err(Error::NotRegular { set: u.to_string() });
            }
        }
        match mode {
            Mode::Fast => Ok(self.way_below_fast(u1.bits(), u2.bits())),
            Mode::Oracle => {
                let regulars = self.regular_opens(cap)?;
                let sets: Vec<u64> = regulars.members.member_bits().collect();
                if sets.len() > WAY_BELOW_ORACLE_CAP {
                    return Err(Error::CapExceeded { n: sets.len(), cap: WAY_BELOW_ORACLE_CAP });
                }
                Ok(way_below_oracle(&sets, u1.bits(), u2.bits()))
            }
        }
    }

    /// The whole way-below relation over the regular opens (canonical
    /// order), sharing the directed-subfamily enumeration across pairs in
    /// oracle mode.
    pub fn way_below_matrix(&self, mode: Mode, cap: usize) -> Result<Vec<Vec<bool>>, Error> {
        self.require_validated()?;
        let regulars = self.regular_opens(cap)?;
        let sets: Vec<u64> = regulars.members.member_bits().collect();
        let k = sets.len();
        match mode {
            Mode::Fast => Ok(sets
                .iter()
                .map(|&u1| sets.iter().map(|&u2| self.way_below_fast(u1, u2)).collect())
                .collect()),
            Mode::Oracle => {
                if k > WAY_BELOW_ORACLE_CAP {
                    return Err(Error::CapExceeded { n: k, cap: WAY_BELOW_ORACLE_CAP });
                }
                let mut matrix = vec![vec![true; k]; k];
                for pick in 1u64..(1 << k) {
                    let chosen: Vec<u64> =
                        (0..k).filter(|i| pick & (1 << i) != 0).map(|i| sets[i]).collect();
                    if !directed(&chosen) {
                        continue;
                    }
                    let union = chosen.iter().fold(0u64, |acc, &s| acc | s);
                    let covered: Vec<bool> =
                        sets.iter().map(|&u1| chosen.iter().any(|&c| u1 & !c == 0)).collect();
                    for (j, &u2) in sets.iter().enumerate() {
                        if u2 & !union == 0 {
                            for i in 0..k {
                                if !covered[i] {
                                    matrix[i][j] = false;
                                }
                            }
                        }
                    }
                }
                Ok(matrix)
            }
        }
    }
}

/// Pairwise-directedness of a finite family of masks: nonempty, and every
/// two members have an upper bound within the family.
pub(crate) fn directed(sets: &[u64]) -> bool {
    if sets.is_empty() {
        return false;
    }
    sets.iter().all(|&a| {
        sets.iter().all(|&b| {
            let need = a | b;
            sets.iter().any(|&c| need & !c == 0)
        })
    })
}

/// Definitional way-below over a finite carrier of regular opens: every
/// directed subfamily whose union covers `u2` already has one member
/// covering `u1`.
pub(crate) fn way_below_oracle(regulars: &[u64], u1: u64, u2: u64) -> bool {
    let k = regulars.len();
    for pick in 1u64..(1 << k) {
        let chosen: Vec<u64> = (0..k).filter(|i| pick & (1 << i) != 0).map(|i| regulars[i]).collect();
        if !directed(&chosen) {
            continue;
        }
        let union = chosen.iter().fold(0u64, |acc, &s| acc | s);
        if u2 & !union == 0 && !chosen.iter().any(|&s| u1 & !s == 0) {
            return false;
        }
    }
    true
}

/// All regular open sets of a space, ordered by inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularFamily {
    members: SubsetFamily,
}

impl RegularFamily {
    pub fn members(&self) -> &SubsetFamily {
        &self.members
    }

    pub fn universe(&self) -> &Arc<Universe> {
        self.members.universe()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, u: &Subset) -> bool {
        self.members.contains(u)
    }

    pub fn position(&self, u: &Subset) -> Option<usize> {
        self.members.members().iter().position(|m| m == u)
    }

    /// Labels the members by their set rendering, e.g. for building the
    /// inclusion order as a poset.
    pub fn render_labels(&self) -> Vec<String> {
        self.members.members().iter().map(|m| m.to_string()).collect()
    }
}
