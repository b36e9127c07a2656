//! Finite posets: order classifiers, Scott continuity, the derived
//! closure space of a poset, and the representation round trip between a
//! poset and the regular opens of its derived space.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::closure::{ClosureSpec, GCSpace, TauSpec};
use crate::report::{Report, Violation, Witness};
use crate::set::{submasks, Subset, SubsetFamily, Universe};
use crate::space::{FGCSpace, Mode};
use crate::Error;

/// Above this size directed-subset enumeration is skipped and the
/// classifier falls back to the finite-poset shortcuts, with a note.
pub const DIRECTED_ENUM_CAP: usize = 10;

/// A finite partial order over a universe of labeled elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinPoset {
    elements: Arc<Universe>,
    leq: Vec<bool>,
}

impl FinPoset {
    /// Builds a poset from an explicit relation matrix (row-major,
    /// `leq[i*n+j]` meaning element `i` is below element `j`). The matrix
    /// must already be reflexive, antisymmetric and transitive.
    pub fn new(elements: Arc<Universe>, leq: Vec<bool>) -> Result<FinPoset, Error> {
        let n = elements.size();
        if leq.len() != n * n {
            return Err(Error::NotAPartialOrder {
                reason: format!("matrix has {} entries, expected {}", leq.len(), n * n),
            });
        }
        let p = FinPoset { elements, leq };
        for i in 0..n {
            if !p.leq(i, i) {
                return Err(Error::NotAPartialOrder {
                    reason: format!("not reflexive at {}", p.elements.label(i)),
                });
            }
            for j in 0..n {
                if i != j && p.leq(i, j) && p.leq(j, i) {
                    return Err(Error::NotAPartialOrder {
                        reason: format!(
                            "not antisymmetric on {} and {}",
                            p.elements.label(i),
                            p.elements.label(j)
                        ),
                    });
                }
                for k in 0..n {
                    if p.leq(i, j) && p.leq(j, k) && !p.leq(i, k) {
                        return Err(Error::NotAPartialOrder {
                            reason: format!(
                                "not transitive through {}",
                                p.elements.label(j)
                            ),
                        });
                    }
                }
            }
        }
        Ok(p)
    }

    /// Builds a poset from covering pairs `(x, y)` meaning `x <= y`; the
    /// reflexive-transitive closure is applied, antisymmetry checked.
    pub fn from_pairs<'a, L, P>(labels: L, pairs: P) -> Result<FinPoset, Error>
    where
        L: IntoIterator<Item = &'a str>,
        P: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let elements = Universe::new(labels.into_iter().map(str::to_string))?;
        let n = elements.size();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (x, y) in pairs {
            let i = elements.index_of(x).ok_or_else(|| Error::UnknownLabel { label: x.into() })?;
            let j = elements.index_of(y).ok_or_else(|| Error::UnknownLabel { label: y.into() })?;
            leq[i * n + j] = true;
        }
        // Warshall transitive closure.
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        FinPoset::new(elements, leq)
    }

    pub fn elements(&self) -> &Arc<Universe> {
        &self.elements
    }

    pub fn size(&self) -> usize {
        self.elements.size()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.size() + j]
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        (0..n).flat_map(|i| (0..n).filter(move |&j| i != j).map(move |j| (i, j)))
            .filter(|&(i, j)| self.leq(i, j))
            .collect()
    }

    /// Mask of all elements below something in `set`.
    pub fn down_set(&self, set: u64) -> u64 {
        let mut out = 0u64;
        for i in 0..self.size() {
            if (0..self.size()).any(|j| set & (1 << j) != 0 && self.leq(i, j)) {
                out |= 1 << i;
            }
        }
        out
    }

    /// Mask of common upper bounds of `set` (everything, for the empty set).
    pub fn upper_bounds(&self, set: u64) -> u64 {
        let mut out = 0u64;
        for u in 0..self.size() {
            if (0..self.size()).all(|j| set & (1 << j) == 0 || self.leq(j, u)) {
                out |= 1 << u;
            }
        }
        out
    }

    /// The least member of a nonempty mask, if one exists.
    pub fn least_of(&self, set: u64) -> Option<usize> {
        (0..self.size()).find(|&l| {
            set & (1 << l) != 0
                && (0..self.size()).all(|j| set & (1 << j) == 0 || self.leq(l, j))
        })
    }

    /// The greatest member of a nonempty mask, if one exists.
    pub fn greatest_of(&self, set: u64) -> Option<usize> {
        (0..self.size()).find(|&g| {
            set & (1 << g) != 0
                && (0..self.size()).all(|j| set & (1 << j) == 0 || self.leq(j, g))
        })
    }

    /// Least upper bound of `set` in the whole poset.
    pub fn sup(&self, set: u64) -> Option<usize> {
        let ub = self.upper_bounds(set);
        if ub == 0 {
            None
        } else {
            self.least_of(ub)
        }
    }

    /// Directedness of a mask of elements: nonempty and every pair has an
    /// upper bound inside the mask.
    pub fn mask_directed(&self, set: u64) -> bool {
        if set == 0 {
            return false;
        }
        let n = self.size();
        for i in 0..n {
            if set & (1 << i) == 0 {
                continue;
            }
            for j in 0..n {
                if set & (1 << j) == 0 {
                    continue;
                }
                let has_ub = (0..n)
                    .any(|k| set & (1 << k) != 0 && self.leq(i, k) && self.leq(j, k));
                if !has_ub {
                    return false;
                }
            }
        }
        true
    }

    /// All directed subsets, as masks.
    pub fn directed_subsets(&self) -> Result<Vec<u64>, Error> {
        let n = self.size();
        if n > DIRECTED_ENUM_CAP {
            return Err(Error::CapExceeded { n, cap: DIRECTED_ENUM_CAP });
        }
        Ok((1..(1u64 << n)).filter(|&d| self.mask_directed(d)).collect())
    }

    /// Way-below. `Fast` uses the finite-poset identity (plain order);
    /// `Oracle` quantifies every directed subset whose sup dominates `y`.
    pub fn way_below(&self, x: usize, y: usize, mode: Mode) -> Result<bool, Error> {
        match mode {
            Mode::Fast => Ok(self.leq(x, y)),
            Mode::Oracle => {
                for d in self.directed_subsets()? {
                    if let Some(s) = self.sup(d) {
                        if self.leq(y, s)
                            && !(0..self.size()).any(|e| d & (1 << e) != 0 && self.leq(x, e))
                        {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
        }
    }

    /// Order classification flags, all computed from their definitions
    /// where the directed-subset enumeration fits, with a fallback note
    /// otherwise.
    pub fn classify(&self) -> Classification {
        let n = self.size();
        let full = self.elements.full_mask();
        let mut notes = Vec::new();

        let (dcpo, continuous, algebraic) = if n <= DIRECTED_ENUM_CAP {
            let directeds = self.directed_subsets().expect("within cap");
            let dcpo = directeds.iter().all(|&d| self.sup(d).is_some());
            // Way-below by its definition, then the basis property for
            // the whole carrier and for the compact elements.
            let wb: Vec<u64> = (0..n)
                .map(|y| {
                    let mut mask = 0u64;
                    for x in 0..n {
                        if self.way_below(x, y, Mode::Oracle).expect("within cap") {
                            mask |= 1 << x;
                        }
                    }
                    mask
                })
                .collect();
            let basis_from = |allowed: u64| {
                (0..n).all(|y| {
                    let approx = wb[y] & allowed;
                    self.mask_directed(approx) && self.sup(approx) == Some(y)
                })
            };
            let continuous = dcpo && basis_from(full);
            let compacts: u64 =
                (0..n).fold(0, |acc, x| if wb[x] & (1 << x) != 0 { acc | (1 << x) } else { acc });
            let algebraic = dcpo && basis_from(compacts);
            (dcpo, continuous, algebraic)
        } else {
            notes.push(format!(
                "{n} elements exceed the directed-subset enumeration cap {DIRECTED_ENUM_CAP}; \
                 finite-poset shortcuts applied"
            ));
            (true, true, true)
        };

        let complete_lattice = submasks(full).all(|s| self.sup(s).is_some());
        let l_domain = (0..n).all(|x| {
            let down = self.down_set(1 << x);
            submasks(down).all(|s| {
                let ub = self.upper_bounds(s) & down;
                ub != 0 && self.least_of(ub).is_some()
            })
        });
        let bounded_complete =
            submasks(full).all(|s| self.upper_bounds(s) == 0 || self.sup(s).is_some());

        Classification {
            flags: PosetFlags { dcpo, continuous, algebraic, complete_lattice, l_domain, bounded_complete },
            notes,
        }
    }

    /// Derives the closure space of the poset: closure is down-closure,
    /// the post-composed map takes a down-closed set to its way-below
    /// cone, and the family collects every nonempty subset possessing a
    /// greatest element.
    pub fn to_fgcs(&self, cap: usize) -> Result<FGCSpace, Error> {
        let n = self.size();
        if n == 0 {
            return Err(Error::EmptyPoset);
        }
        if n > cap {
            return Err(Error::CapExceeded { n, cap });
        }
        let universe = Arc::clone(&self.elements);
        let count = universe.subset_count();
        let gamma_table: Vec<u64> = (0..count).map(|a| self.down_set(a)).collect();
        let gamma = ClosureSpec::from_table(&universe, gamma_table.clone())?;
        // tau is defined exactly on the down-closed sets. On a finite
        // poset the way-below cone of a down-set is the set itself; the
        // table still goes through `way_below` so the construction stays
        // tied to the relation it names.
        let mut tau_table: BTreeMap<u64, u64> = BTreeMap::new();
        for &c in gamma_table.iter() {
            if tau_table.contains_key(&c) {
                continue;
            }
            let mut cone = 0u64;
            for x in 0..n {
                if (0..n).any(|y| c & (1 << y) != 0 && self.way_below(x, y, Mode::Fast).unwrap()) {
                    cone |= 1 << x;
                }
            }
            tau_table.insert(c, cone);
            tau_table.entry(cone).or_insert(cone);
        }
        let tau = TauSpec::from_partial_table(&universe, tau_table);
        let mut space = GCSpace::new(gamma, tau)?;
        let gcs_report = space.validate(cap)?;
        if !gcs_report.ok {
            return Err(Error::Unvalidated);
        }
        let family = SubsetFamily::from_bits(
            &universe,
            (1..count).filter(|&f| self.greatest_of(f).is_some()),
        );
        FGCSpace::validated(space, family, cap)
    }

    /// Same construction on a user-supplied basis, which must satisfy the
    /// basis property first: the basis elements way below any `x` form a
    /// directed set with sup `x`.
    pub fn to_fgcs_with_basis(&self, basis: &Subset, cap: usize) -> Result<FGCSpace, Error> {
        if basis.universe() != &self.elements {
            return Err(Error::UniverseMismatch);
        }
        for x in 0..self.size() {
            let mut approx = 0u64;
            for b in 0..self.size() {
                if basis.contains_index(b) && self.way_below(b, x, Mode::Fast)? {
                    approx |= 1 << b;
                }
            }
            if !self.mask_directed(approx) || self.sup(approx) != Some(x) {
                return Err(Error::InvalidBasis {
                    set: basis.to_string(),
                    reason: format!(
                        "element {} is not the sup of its approximants in the basis",
                        self.elements.label(x)
                    ),
                });
            }
        }
        // On a finite carrier the basis property forces every element in,
        // so the construction coincides with the full-carrier one.
        self.to_fgcs(cap)
    }

    /// Characterization of the regular opens of the derived space.
    /// `Fast` checks the two order-side conditions (way-below
    /// down-closure, and internal way-upper-bounds for finite subsets);
    /// `Oracle` builds the derived space and asks it directly.
    pub fn regular_characterization(&self, u: &Subset, mode: Mode, cap: usize) -> Result<bool, Error> {
        if u.universe() != &self.elements {
            return Err(Error::UniverseMismatch);
        }
        match mode {
            Mode::Fast => {
                let mask = u.bits();
                if mask == 0 {
                    return Ok(false);
                }
                let n = self.size();
                // Down-closed under way-below.
                for b in 0..n {
                    for v in 0..n {
                        if mask & (1 << v) != 0
                            && self.way_below(b, v, Mode::Fast)?
                            && mask & (1 << b) == 0
                        {
                            return Ok(false);
                        }
                    }
                }
                // Every finite subset sits way below some member.
                for m in submasks(mask) {
                    let found = (0..n).any(|cand| {
                        mask & (1 << cand) != 0
                            && (0..n).all(|x| {
                                m & (1 << x) == 0
                                    || self.way_below(x, cand, Mode::Fast).unwrap()
                            })
                    });
                    if !found {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Mode::Oracle => {
                let space = self.to_fgcs(cap)?;
                space.is_regular_open(u, Mode::Fast)
            }
        }
    }

    /// Verifies the representation round trip: mapping an element to its
    /// way-below cone lands in the regular opens of the derived space,
    /// taking sups maps back, both directions are monotone, and the two
    /// composites are identities. The outcome carries both maps.
    pub fn roundtrip(&self, cap: usize) -> Result<RoundtripOutcome, Error> {
        let space = self.to_fgcs(cap)?;
        let regulars = space.regular_opens(cap)?;
        let universe = Arc::clone(&self.elements);
        let n = self.size();
        let mut report = Report::new();

        let f: Vec<Subset> = (0..n)
            .map(|x| {
                let mut cone = 0u64;
                for b in 0..n {
                    if self.way_below(b, x, Mode::Fast).unwrap() {
                        cone |= 1 << b;
                    }
                }
                Subset::from_bits(&universe, cone)
            })
            .collect();

        for (x, fx) in f.iter().enumerate() {
            if !regulars.contains(fx) {
                report.push(Violation::new(
                    "representation-image-not-regular",
                    vec![Witness::element("x", universe.label(x)), Witness::set("f(x)", fx)],
                    "the way-below cone of an element is not a regular open",
                ));
            }
        }

        let mut g: Vec<Option<usize>> = Vec::new();
        for u in regulars.members().members() {
            let s = self.sup(u.bits());
            if s.is_none() {
                report.push(Violation::new(
                    "representation-sup-missing",
                    vec![Witness::set("U", u)],
                    "a regular open has no sup to map back to",
                ));
            }
            g.push(s);
        }

        for i in 0..n {
            for j in 0..n {
                if self.leq(i, j) && !f[i].is_subset_of(&f[j])? {
                    report.push(Violation::new(
                        "representation-f-not-monotone",
                        vec![
                            Witness::element("x", universe.label(i)),
                            Witness::element("y", universe.label(j)),
                        ],
                        "f does not preserve the order",
                    ));
                }
            }
        }
        let rs = regulars.members().members();
        for (i, u) in rs.iter().enumerate() {
            for (j, v) in rs.iter().enumerate() {
                if let (Some(gu), Some(gv)) = (g[i], g[j]) {
                    if u.is_subset_of(v)? && !self.leq(gu, gv) {
                        report.push(Violation::new(
                            "representation-g-not-monotone",
                            vec![Witness::set("U", u), Witness::set("V", v)],
                            "g does not preserve inclusion",
                        ));
                    }
                }
            }
        }

        for (x, fx) in f.iter().enumerate() {
            match regulars.position(fx).and_then(|i| g[i]) {
                Some(back) if back == x => {}
                _ => {
                    report.push(Violation::new(
                        "representation-g-after-f",
                        vec![Witness::element("x", universe.label(x))],
                        "g(f(x)) differs from x",
                    ));
                }
            }
        }
        for (i, u) in rs.iter().enumerate() {
            match g[i] {
                Some(gu) if f[gu] == *u => {}
                _ => {
                    report.push(Violation::new(
                        "representation-f-after-g",
                        vec![Witness::set("U", u)],
                        "f(g(U)) differs from U",
                    ));
                }
            }
        }

        Ok(RoundtripOutcome { report, f, g, regular_count: rs.len() })
    }
}

/// The six order-theoretic flags of the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetFlags {
    pub dcpo: bool,
    pub continuous: bool,
    pub algebraic: bool,
    pub complete_lattice: bool,
    pub l_domain: bool,
    pub bounded_complete: bool,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub flags: PosetFlags,
    pub notes: Vec<String>,
}

/// Result of the representation round trip: the verdict plus the two
/// mutually inverse maps.
#[derive(Debug, Clone)]
pub struct RoundtripOutcome {
    pub report: Report,
    /// Element index to its way-below cone.
    pub f: Vec<Subset>,
    /// Regular open (by canonical position) to the element realizing its sup.
    pub g: Vec<Option<usize>>,
    pub regular_count: usize,
}

/// An order-preserving map between finite posets; on finite carriers this
/// is exactly Scott continuity, which the oracle re-derives per instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneMap {
    source: FinPoset,
    target: FinPoset,
    table: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(source: FinPoset, target: FinPoset, table: Vec<usize>) -> Result<MonotoneMap, Error> {
        assert_eq!(table.len(), source.size());
        for i in 0..source.size() {
            for j in 0..source.size() {
                if source.leq(i, j) && !target.leq(table[i], table[j]) {
                    return Err(Error::NotMonotone {
                        x: source.elements.label(i).to_string(),
                        y: source.elements.label(j).to_string(),
                    });
                }
            }
        }
        Ok(MonotoneMap { source, target, table })
    }

    pub fn identity(p: &FinPoset) -> MonotoneMap {
        MonotoneMap { source: p.clone(), target: p.clone(), table: (0..p.size()).collect() }
    }

    pub fn source(&self) -> &FinPoset {
        &self.source
    }

    pub fn target(&self) -> &FinPoset {
        &self.target
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn compose(first: &MonotoneMap, second: &MonotoneMap) -> Result<MonotoneMap, Error> {
        if first.target != second.source {
            return Err(Error::SpaceMismatch {
                reason: "inner posets of the composition differ".into(),
            });
        }
        let table = first.table.iter().map(|&i| second.table[i]).collect();
        MonotoneMap::new(first.source.clone(), second.target.clone(), table)
    }

    /// `Fast` re-checks order preservation; `Oracle` checks preservation
    /// of sups of every directed subset.
    pub fn is_scott_continuous(&self, mode: Mode) -> Result<bool, Error> {
        match mode {
            Mode::Fast => Ok(MonotoneMap::new(
                self.source.clone(),
                self.target.clone(),
                self.table.clone(),
            )
            .is_ok()),
            Mode::Oracle => {
                for d in self.source.directed_subsets()? {
                    let Some(sup) = self.source.sup(d) else { continue };
                    let image = (0..self.source.size())
                        .filter(|x| d & (1 << x) != 0)
                        .fold(0u64, |acc, x| acc | (1 << self.table[x]));
                    match self.target.sup(image) {
                        Some(s) if s == self.table[sup] => {}
                        _ => return Ok(false),
                    }
                }
                Ok(true)
            }
        }
    }
}

/// The inclusion order on a family of subsets, as a poset labeled by the
/// set renderings.
pub fn inclusion_poset(family: &SubsetFamily) -> Result<FinPoset, Error> {
    let labels: Vec<String> = family.members().iter().map(|m| m.to_string()).collect();
    let elements = Universe::new(labels)?;
    let n = family.len();
    let mut leq = vec![false; n * n];
    for (i, a) in family.members().iter().enumerate() {
        for (j, b) in family.members().iter().enumerate() {
            leq[i * n + j] = a.is_subset_of(b)?;
        }
    }
    FinPoset::new(elements, leq)
}

fn generated_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// Every labeled poset on `n` elements, enumerated by assigning each
/// unordered pair one of three states and filtering for transitivity.
pub fn all_posets(n: usize) -> Result<Vec<FinPoset>, Error> {
    assert!(n >= 1 && n <= 5, "exhaustive enumeration is for small carriers");
    let elements = Universe::new(generated_labels(n))?;
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let total = 3usize.pow(pairs.len() as u32);
    for mut code in 0..total {
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(i, j) in &pairs {
            match code % 3 {
                1 => leq[i * n + j] = true,
                2 => leq[j * n + i] = true,
                _ => {}
            }
            code /= 3;
        }
        let transitive = (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| !(leq[i * n + j] && leq[j * n + k]) || leq[i * n + k])
            })
        });
        if transitive {
            out.push(FinPoset { elements: Arc::clone(&elements), leq: leq.clone() });
        }
    }
    Ok(out)
}

/// A reproducible random poset: transitive closure of random edges laid
/// over a random permutation.
pub fn random_poset<R: rand::Rng>(n: usize, rng: &mut R) -> FinPoset {
    assert!(n >= 1);
    let elements = Universe::new(generated_labels(n)).expect("valid labels");
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut leq = vec![false; n * n];
    for i in 0..n {
        leq[i * n + i] = true;
    }
    let density = rng.gen_range(0.2..0.8);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                leq[perm[a] * n + perm[b]] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i * n + k] {
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
    }
    FinPoset { elements, leq }
}

/// All monotone maps between two small posets, by brute enumeration.
pub fn monotone_maps(source: &FinPoset, target: &FinPoset) -> Vec<MonotoneMap> {
    let n = source.size();
    let m = target.size();
    let mut out = Vec::new();
    let total = (m as u64).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let table: Vec<usize> = (0..n)
            .map(|_| {
                let v = (c % m as u64) as usize;
                c /= m as u64;
                v
            })
            .collect();
        if let Ok(f) = MonotoneMap::new(source.clone(), target.clone(), table) {
            out.push(f);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::set::DEFAULT_CAP;

    #[test]
    fn construction_enforces_partial_order() {
        let err = FinPoset::from_pairs(["a", "b"], [("a", "b"), ("b", "a")]);
        assert!(matches!(err, Err(Error::NotAPartialOrder { .. })));
        let ok = FinPoset::from_pairs(["a", "b", "c"], [("a", "b"), ("b", "c")]).unwrap();
        assert!(ok.leq(0, 2), "transitive closure applied");
    }

    #[test]
    fn classify_diamond_all_flags() {
        let flags = fixtures::diamond().classify().flags;
        assert!(flags.dcpo && flags.continuous && flags.algebraic);
        assert!(flags.complete_lattice && flags.l_domain && flags.bounded_complete);
    }

    #[test]
    fn classify_m_poset() {
        let flags = fixtures::m_poset().classify().flags;
        assert!(flags.l_domain);
        assert!(!flags.bounded_complete);
        assert!(!flags.complete_lattice);
        assert!(flags.dcpo && flags.continuous && flags.algebraic);
    }

    #[test]
    fn classify_two_top() {
        let flags = fixtures::two_top().classify().flags;
        assert!(!flags.l_domain);
        assert!(!flags.bounded_complete);
    }

    #[test]
    fn classify_v_poset() {
        let flags = fixtures::v_poset().classify().flags;
        assert!(flags.l_domain, "principal ideals of the V are chains");
        assert!(flags.bounded_complete, "the unbounded pair is exempt");
        assert!(!flags.complete_lattice);
    }

    #[test]
    fn way_below_oracle_is_plain_order_on_finite_posets() {
        let chain = fixtures::chain2_poset();
        assert!(chain.way_below(0, 1, Mode::Oracle).unwrap());
        assert!(!chain.way_below(1, 0, Mode::Oracle).unwrap());
        for p in [fixtures::v_poset(), fixtures::m_poset(), fixtures::diamond()] {
            for x in 0..p.size() {
                for y in 0..p.size() {
                    assert_eq!(
                        p.way_below(x, y, Mode::Oracle).unwrap(),
                        p.way_below(x, y, Mode::Fast).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn way_below_implies_order() {
        let v = fixtures::v_poset();
        let a = v.elements().index_of("a").unwrap();
        let b = v.elements().index_of("b").unwrap();
        assert!(!v.way_below(a, b, Mode::Oracle).unwrap());
    }

    #[test]
    fn scott_continuity_on_the_diamond() {
        let d = fixtures::diamond();
        let id = MonotoneMap::identity(&d);
        assert!(id.is_scott_continuous(Mode::Oracle).unwrap());
        let bot = d.elements().index_of("bot").unwrap();
        let constant =
            MonotoneMap::new(d.clone(), d.clone(), vec![bot; d.size()]).unwrap();
        assert!(constant.is_scott_continuous(Mode::Oracle).unwrap());
        // Swap the two middle points, fix bottom and top.
        let (a, b) = (d.elements().index_of("a").unwrap(), d.elements().index_of("b").unwrap());
        let top = d.elements().index_of("top").unwrap();
        let mut table = vec![0; 4];
        table[bot] = bot;
        table[a] = b;
        table[b] = a;
        table[top] = top;
        let swap = MonotoneMap::new(d.clone(), d, table).unwrap();
        assert!(swap.is_scott_continuous(Mode::Fast).unwrap());
        assert!(swap.is_scott_continuous(Mode::Oracle).unwrap());
    }

    #[test]
    fn non_monotone_assignment_is_rejected() {
        let chain = fixtures::chain2_poset();
        assert!(matches!(
            MonotoneMap::new(chain.clone(), chain, vec![1, 0]),
            Err(Error::NotMonotone { .. })
        ));
    }

    #[test]
    fn derived_space_of_the_chain_is_the_chain_fixture() {
        let space = fixtures::chain2_poset().to_fgcs(DEFAULT_CAP).unwrap();
        let fixture = fixtures::chain2();
        assert_eq!(space, fixture);
        // Family: the three nonempty subsets with a greatest element.
        assert_eq!(space.family().member_bits().collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn derived_family_of_v() {
        let space = fixtures::v_poset().to_fgcs(DEFAULT_CAP).unwrap();
        let labels: Vec<String> =
            space.family().members().iter().map(|f| f.to_string()).collect();
        assert_eq!(labels, vec!["{bot}", "{a}", "{bot,a}", "{b}", "{bot,b}"]);
    }

    #[test]
    fn one_point_poset_derives_the_point_fixture() {
        let p = FinPoset::from_pairs(["a"], []).unwrap();
        assert_eq!(p.to_fgcs(DEFAULT_CAP).unwrap(), fixtures::point());
    }

    #[test]
    fn derived_hull_law() {
        // hull(F) is the way-below cone of the greatest element of F.
        for p in [fixtures::v_poset(), fixtures::diamond(), fixtures::m_poset()] {
            let space = p.to_fgcs(DEFAULT_CAP).unwrap();
            for f in space.family().member_bits() {
                let top = p.greatest_of(f).expect("family members have a greatest element");
                let mut cone = 0u64;
                for b in 0..p.size() {
                    if p.way_below(b, top, Mode::Oracle).unwrap() {
                        cone |= 1 << b;
                    }
                }
                assert_eq!(space.hull_bits(f), cone);
            }
        }
    }

    #[test]
    fn basis_hook_rejects_proper_subsets() {
        let p = fixtures::chain2_poset();
        let full = Subset::full(p.elements());
        assert!(p.to_fgcs_with_basis(&full, DEFAULT_CAP).is_ok());
        let proper = Subset::parse(p.elements(), "{1}").unwrap();
        assert!(matches!(
            p.to_fgcs_with_basis(&proper, DEFAULT_CAP),
            Err(Error::InvalidBasis { .. })
        ));
    }

    #[test]
    fn regular_characterization_modes_agree_on_fixtures() {
        for p in [
            fixtures::chain2_poset(),
            fixtures::v_poset(),
            fixtures::diamond(),
            fixtures::m_poset(),
            fixtures::two_top(),
        ] {
            let u = p.elements().clone();
            for mask in 0..u.subset_count() {
                let s = Subset::from_bits(&u, mask);
                assert_eq!(
                    p.regular_characterization(&s, Mode::Fast, DEFAULT_CAP).unwrap(),
                    p.regular_characterization(&s, Mode::Oracle, DEFAULT_CAP).unwrap(),
                    "mismatch at {s}"
                );
            }
        }
    }

    #[test]
    fn chain_regular_characterization_values() {
        let p = fixtures::chain2_poset();
        let u = p.elements().clone();
        assert!(p
            .regular_characterization(&Subset::parse(&u, "{0,1}").unwrap(), Mode::Fast, DEFAULT_CAP)
            .unwrap());
        assert!(!p
            .regular_characterization(&Subset::parse(&u, "{1}").unwrap(), Mode::Fast, DEFAULT_CAP)
            .unwrap());
        let v = fixtures::v_poset();
        let s = Subset::parse(v.elements(), "{bot,a,b}").unwrap();
        assert!(!v.regular_characterization(&s, Mode::Fast, DEFAULT_CAP).unwrap());
    }

    #[test]
    fn roundtrip_chain_and_diamond() {
        let chain = fixtures::chain2_poset();
        let out = chain.roundtrip(DEFAULT_CAP).unwrap();
        assert!(out.report.ok);
        assert_eq!(out.f[1].to_string(), "{0,1}");
        assert_eq!(out.regular_count, 2);
        // g sends the top regular open back to the top element.
        let space = chain.to_fgcs(DEFAULT_CAP).unwrap();
        let regulars = space.regular_opens(DEFAULT_CAP).unwrap();
        let top = Subset::parse(chain.elements(), "{0,1}").unwrap();
        let pos = regulars.position(&top).unwrap();
        assert_eq!(out.g[pos], Some(1));

        let diamond = fixtures::diamond();
        let out = diamond.roundtrip(DEFAULT_CAP).unwrap();
        assert!(out.report.ok);
        assert_eq!(out.regular_count, 4);

        let point = FinPoset::from_pairs(["a"], []).unwrap();
        assert!(point.roundtrip(DEFAULT_CAP).unwrap().report.ok);
    }

    #[test]
    fn exhaustive_counts_match_the_generator() {
        assert_eq!(all_posets(1).unwrap().len(), 1);
        assert_eq!(all_posets(2).unwrap().len(), 3);
        assert_eq!(all_posets(3).unwrap().len(), 19);
    }

    #[test]
    fn inclusion_poset_of_a_family() {
        let space = fixtures::flat();
        let regs = space.regular_opens(DEFAULT_CAP).unwrap();
        let p = inclusion_poset(regs.members()).unwrap();
        assert_eq!(p.size(), 3);
        let a = p.elements().index_of("{a}").unwrap();
        let ab = p.elements().index_of("{a,b}").unwrap();
        assert!(p.leq(a, ab));
        assert!(!p.leq(ab, a));
    }

    #[test]
    fn random_posets_are_partial_orders() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_poset(6, &mut rng);
            // The constructor invariants are re-checked by rebuilding.
            assert!(FinPoset::new(p.elements.clone(), p.leq.clone()).is_ok());
        }
    }

    #[test]
    fn way_below_oracle_equals_order_on_generated_posets() {
        use rand::SeedableRng;
        let mut posets: Vec<FinPoset> = (1..=3).flat_map(|n| all_posets(n).unwrap()).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            posets.push(random_poset(6, &mut rng));
        }
        for p in posets {
            for x in 0..p.size() {
                for y in 0..p.size() {
                    assert_eq!(p.way_below(x, y, Mode::Oracle).unwrap(), p.leq(x, y));
                }
            }
        }
    }

    #[test]
    fn scott_oracle_accepts_every_monotone_map() {
        for p in [fixtures::chain2_poset(), fixtures::v_poset(), fixtures::diamond()] {
            for q in [fixtures::chain2_poset(), fixtures::v_poset()] {
                for f in monotone_maps(&p, &q) {
                    assert!(f.is_scott_continuous(Mode::Oracle).unwrap());
                }
            }
        }
    }

    #[test]
    fn regular_characterization_agrees_over_the_four_element_sweep() {
        for n in 1..=4 {
            for p in all_posets(n).unwrap() {
                let u = p.elements().clone();
                for mask in 0..u.subset_count() {
                    let s = Subset::from_bits(&u, mask);
                    assert_eq!(
                        p.regular_characterization(&s, Mode::Fast, DEFAULT_CAP).unwrap(),
                        p.regular_characterization(&s, Mode::Oracle, DEFAULT_CAP).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn classifier_falls_back_above_the_enumeration_cap() {
        let labels: Vec<String> = (0..11).map(|i| format!("x{i}")).collect();
        let pairs: Vec<(String, String)> =
            (0..10).map(|i| (format!("x{i}"), format!("x{}", i + 1))).collect();
        let chain = FinPoset::from_pairs(
            labels.iter().map(String::as_str),
            pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        )
        .unwrap();
        let c = chain.classify();
        assert!(!c.notes.is_empty(), "fallback note expected");
        assert!(c.flags.dcpo && c.flags.complete_lattice && c.flags.bounded_complete);
        assert!(matches!(
            chain.way_below(0, 1, Mode::Oracle),
            Err(Error::CapExceeded { .. })
        ));
    }
}
