//! Approximable mappings: relations between a space's family and another
//! space's points, the morphisms of the category of augmented spaces.
//! They compose, have identities, and convert back and forth to
//! Scott-continuous functions between the regular-open posets; the
//! conversions are mutually inverse and the object-plus-morphism passage
//! is functorial, all checked instance by instance.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::poset::{inclusion_poset, FinPoset, MonotoneMap};
use crate::report::{Report, Violation, Witness};
use crate::set::{submasks, Subset, Universe};
use crate::space::{FGCSpace, Mode, RegularFamily};
use crate::Error;

const MAX_VIOLATIONS: usize = 64;

/// A relation between the source family and the target carrier,
/// validated against the three approximable-mapping conditions.
#[derive(Debug, Clone)]
pub struct AMRelation {
    source: Arc<FGCSpace>,
    target: Arc<FGCSpace>,
    pairs: BTreeSet<(u64, usize)>,
    /// Image mask per anchor, derived from the pairs.
    images: std::collections::BTreeMap<u64, u64>,
    validated: bool,
}

impl PartialEq for AMRelation {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.pairs == other.pairs
    }
}

impl AMRelation {
    pub fn new(
        source: Arc<FGCSpace>,
        target: Arc<FGCSpace>,
        pairs: BTreeSet<(u64, usize)>,
    ) -> Result<AMRelation, Error> {
        if !source.is_validated() || !target.is_validated() {
            return Err(Error::Unvalidated);
        }
        let mut images = std::collections::BTreeMap::new();
        for &(f, x) in &pairs {
            if !source.family().contains_bits(f) {
                return Err(Error::NotInFamily {
                    set: Subset::from_bits(source.universe(), f).to_string(),
                });
            }
            if x >= target.universe().size() {
                return Err(Error::UnknownLabel { label: format!("#{x}") });
            }
            *images.entry(f).or_insert(0u64) |= 1 << x;
        }
        Ok(AMRelation { source, target, pairs, images, validated: false })
    }

    pub fn from_labeled_pairs<'a, I>(
        source: Arc<FGCSpace>,
        target: Arc<FGCSpace>,
        pairs: I,
    ) -> Result<AMRelation, Error>
    where
        I: IntoIterator<Item = (Subset, &'a str)>,
    {
        let mut set = BTreeSet::new();
        for (f, label) in pairs {
            if f.universe() != source.universe() {
                return Err(Error::UniverseMismatch);
            }
            let x = target
                .universe()
                .index_of(label)
                .ok_or_else(|| Error::UnknownLabel { label: label.to_string() })?;
            set.insert((f.bits(), x));
        }
        AMRelation::new(source, target, set)
    }

    pub fn source(&self) -> &Arc<FGCSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FGCSpace> {
        &self.target
    }

    pub fn pairs(&self) -> &BTreeSet<(u64, usize)> {
        &self.pairs
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn relates(&self, f: u64, x: usize) -> bool {
        self.image_bits(f) & (1 << x) != 0
    }

    /// Set-valued relation: `F` relates to every element of `m` (the
    /// empty set vacuously).
    pub fn relates_set(&self, f: u64, m: u64) -> bool {
        m & !self.image_bits(f) == 0
    }

    /// The image of one family member: everything it relates to.
    pub fn image_bits(&self, f: u64) -> u64 {
        self.images.get(&f).copied().unwrap_or(0)
    }

    /// Checks the three conditions: images extend to hulls, the relation
    /// weakens along hull containment of anchors, and every related
    /// finite set factors through an interpolating pair.
    pub fn validate(&mut self, cap: usize) -> Result<Report, Error> {
        let n = self.source.universe().size().max(self.target.universe().size());
        if n > cap {
            return Err(Error::CapExceeded { n, cap });
        }
        let mut report = Report::new();
        let src: Vec<u64> = self.source.family().member_bits().collect();
        let tgt: Vec<u64> = self.target.family().member_bits().collect();

        'am1: for &f in &src {
            for &f2 in &tgt {
                if self.relates_set(f, f2) && !self.relates_set(f, self.target.hull_bits(f2)) {
                    report.push(Violation::new(
                        "am-image-not-hull-closed",
                        vec![
                            Witness::set("F", &Subset::from_bits(self.source.universe(), f)),
                            Witness::set("F'", &Subset::from_bits(self.target.universe(), f2)),
                        ],
                        "F relates to every point of F' but not to all of hull(F')",
                    ));
                    if report.violations.len() >= MAX_VIOLATIONS {
                        break 'am1;
                    }
                }
            }
        }

        'am2: for &f in &src {
            for &f1 in &src {
                if f & !self.source.hull_bits(f1) != 0 {
                    continue;
                }
                for x in 0..self.target.universe().size() {
                    if self.relates(f, x) && !self.relates(f1, x) {
                        report.push(Violation::new(
                            "am-not-weakening",
                            vec![
                                Witness::set("F", &Subset::from_bits(self.source.universe(), f)),
                                Witness::set("F1", &Subset::from_bits(self.source.universe(), f1)),
                                Witness::element("x'", self.target.universe().label(x)),
                            ],
                            "F sits inside hull(F1) and relates to x', but F1 does not",
                        ));
                        if report.violations.len() >= MAX_VIOLATIONS {
                            break 'am2;
                        }
                    }
                }
            }
        }

        'am3: for &f in &src {
            let hull_f = self.source.hull_bits(f);
            for m in submasks(self.image_bits(f)) {
                let ok = src.iter().any(|&g| {
                    g & !hull_f == 0
                        && tgt.iter().any(|&g2| {
                            m & !self.target.hull_bits(g2) == 0 && self.relates_set(g, g2)
                        })
                });
                if !ok {
                    report.push(Violation::new(
                        "am-no-interpolant",
                        vec![
                            Witness::set("F", &Subset::from_bits(self.source.universe(), f)),
                            Witness::set("M'", &Subset::from_bits(self.target.universe(), m)),
                        ],
                        "no pair (G, G') interpolates between F and the related set M'",
                    ));
                    if report.violations.len() >= MAX_VIOLATIONS {
                        break 'am3;
                    }
                }
            }
        }

        if report.ok {
            self.validated = true;
        }
        Ok(report)
    }

    /// Replays a violation reported by [`AMRelation::validate`].
    pub fn replay(&self, v: &Violation) -> Option<bool> {
        let bits = |role: &str, u: &Arc<Universe>| -> Option<u64> {
            match v.witness(role)? {
                crate::report::WitnessValue::Set(labels) => {
                    let mut out = 0u64;
                    for l in labels {
                        out |= 1 << u.index_of(l)?;
                    }
                    Some(out)
                }
                _ => None,
            }
        };
        match v.rule.as_str() {
            "am-image-not-hull-closed" => {
                let f = bits("F", self.source.universe())?;
                let f2 = bits("F'", self.target.universe())?;
                Some(self.relates_set(f, f2) && !self.relates_set(f, self.target.hull_bits(f2)))
            }
            "am-not-weakening" => {
                let f = bits("F", self.source.universe())?;
                let f1 = bits("F1", self.source.universe())?;
                let x = match v.witness("x'")? {
                    crate::report::WitnessValue::Element(l) => self.target.universe().index_of(l)?,
                    _ => return None,
                };
                Some(f & !self.source.hull_bits(f1) == 0 && self.relates(f, x) && !self.relates(f1, x))
            }
            "am-no-interpolant" => {
                let f = bits("F", self.source.universe())?;
                let m = bits("M'", self.target.universe())?;
                let hull_f = self.source.hull_bits(f);
                let fails = !self.source.family().member_bits().any(|g| {
                    g & !hull_f == 0
                        && self.target.family().member_bits().any(|g2| {
                            m & !self.target.hull_bits(g2) == 0 && self.relates_set(g, g2)
                        })
                });
                Some(fails)
            }
            _ => None,
        }
    }

    /// The identity relation of a space: each family member relates to
    /// every point of its own hull.
    pub fn identity(x: &Arc<FGCSpace>) -> Result<AMRelation, Error> {
        let mut pairs = BTreeSet::new();
        for f in x.family().member_bits() {
            let hull = x.hull_bits(f);
            for p in 0..x.universe().size() {
                if hull & (1 << p) != 0 {
                    pairs.insert((f, p));
                }
            }
        }
        AMRelation::new(Arc::clone(x), Arc::clone(x), pairs)
    }

    /// Relation composition: `F` relates to `x''` when some middle family
    /// member is fully related from `F` and relates to `x''`.
    pub fn compose(first: &AMRelation, second: &AMRelation) -> Result<AMRelation, Error> {
        if !first.validated || !second.validated {
            return Err(Error::Unvalidated);
        }
        if first.target != second.source {
            return Err(Error::SpaceMismatch {
                reason: "target of the first differs from source of the second".into(),
            });
        }
        let mut pairs = BTreeSet::new();
        for f in first.source.family().member_bits() {
            for x in 0..second.target.universe().size() {
                let linked = second
                    .source
                    .family()
                    .member_bits()
                    .any(|g| first.relates_set(f, g) && second.relates(g, x));
                if linked {
                    pairs.insert((f, x));
                }
            }
        }
        AMRelation::new(Arc::clone(&first.source), Arc::clone(&second.target), pairs)
    }

    /// Applies the relation to a regular open of the source: everything
    /// related from some family member inside `u`.
    pub fn apply(&self, u: &Subset) -> Result<Subset, Error> {
        if u.universe() != self.source.universe() {
            return Err(Error::UniverseMismatch);
        }
        if !self.source.is_regular_open(u, Mode::Fast)? {
            return Err(Error::NotRegular { set: u.to_string() });
        }
        let mut out = 0u64;
        for f in self.source.family().member_bits() {
            if f & !u.bits() == 0 {
                out |= self.image_bits(f);
            }
        }
        Ok(Subset::from_bits(self.target.universe(), out))
    }

    /// Tabulates the induced function on regular opens.
    pub fn to_scott(&self, cap: usize) -> Result<ScottMap, Error> {
        if !self.validated {
            return Err(Error::Unvalidated);
        }
        let source_regulars = self.source.regular_opens(cap)?;
        let target_regulars = self.target.regular_opens(cap)?;
        let mut table = Vec::with_capacity(source_regulars.len());
        for u in source_regulars.members().members() {
            let image = self.apply(u)?;
            let pos = target_regulars
                .position(&image)
                .ok_or_else(|| Error::NotRegular { set: image.to_string() })?;
            table.push(pos);
        }
        Ok(ScottMap {
            source: Arc::clone(&self.source),
            target: Arc::clone(&self.target),
            source_regulars,
            target_regulars,
            table,
        })
    }

    /// Rebuilds a relation from a function on regular opens: `F` relates
    /// to the points of the image of its hull. Family members whose hull
    /// is not a regular open (an empty hull) contribute no pairs.
    pub fn from_scott(phi: &ScottMap) -> Result<AMRelation, Error> {
        let mut pairs = BTreeSet::new();
        for f in phi.source.family().member_bits() {
            let hull = Subset::from_bits(phi.source.universe(), phi.source.hull_bits(f));
            let Some(pos) = phi.source_regulars.position(&hull) else { continue };
            let image = phi.target_regulars.members().members()[phi.table[pos]].bits();
            for x in 0..phi.target.universe().size() {
                if image & (1 << x) != 0 {
                    pairs.insert((f, x));
                }
            }
        }
        AMRelation::new(Arc::clone(&phi.source), Arc::clone(&phi.target), pairs)
    }
}

/// A function between the regular-open posets of two spaces, stored as a
/// table over the canonical enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ScottMap {
    source: Arc<FGCSpace>,
    target: Arc<FGCSpace>,
    source_regulars: RegularFamily,
    target_regulars: RegularFamily,
    table: Vec<usize>,
}

impl ScottMap {
    /// Builds a map from a position table, rejecting assignments that are
    /// not monotone with respect to inclusion (on finite carriers
    /// monotonicity is Scott continuity; the oracle re-checks it).
    pub fn from_table(
        source: &Arc<FGCSpace>,
        target: &Arc<FGCSpace>,
        table: Vec<usize>,
        cap: usize,
    ) -> Result<ScottMap, Error> {
        let source_regulars = source.regular_opens(cap)?;
        let target_regulars = target.regular_opens(cap)?;
        assert_eq!(table.len(), source_regulars.len());
        let map = ScottMap {
            source: Arc::clone(source),
            target: Arc::clone(target),
            source_regulars,
            target_regulars,
            table,
        };
        if !map.is_scott_continuous(Mode::Fast)? {
            return Err(Error::NotScottContinuous);
        }
        Ok(map)
    }

    pub fn source_regulars(&self) -> &RegularFamily {
        &self.source_regulars
    }

    pub fn target_regulars(&self) -> &RegularFamily {
        &self.target_regulars
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, u: &Subset) -> Option<&Subset> {
        let pos = self.source_regulars.position(u)?;
        Some(&self.target_regulars.members().members()[self.table[pos]])
    }

    pub fn as_monotone_map(&self) -> Result<MonotoneMap, Error> {
        let sp = inclusion_poset(self.source_regulars.members())?;
        let tp = inclusion_poset(self.target_regulars.members())?;
        MonotoneMap::new(sp, tp, self.table.clone())
    }

    pub fn is_scott_continuous(&self, mode: Mode) -> Result<bool, Error> {
        if self.source_regulars.is_empty() {
            return Ok(true);
        }
        match self.as_monotone_map() {
            Ok(m) => m.is_scott_continuous(mode),
            Err(Error::NotMonotone { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

/// Converts an order-preserving function between two posets into a
/// relation between their derived spaces: a family member relates to
/// everything way below the image of its greatest element.
pub fn poset_fn_to_am(f: &MonotoneMap, cap: usize) -> Result<AMRelation, Error> {
    let source_space = Arc::new(f.source().to_fgcs(cap)?);
    let target_space = Arc::new(f.target().to_fgcs(cap)?);
    let mut pairs = BTreeSet::new();
    for fam in source_space.family().member_bits() {
        let top = f
            .source()
            .greatest_of(fam)
            .ok_or_else(|| Error::NoGreatestElement {
                set: Subset::from_bits(source_space.universe(), fam).to_string(),
            })?;
        let fx = f.apply(top);
        for x in 0..f.target().size() {
            if f.target().way_below(x, fx, Mode::Fast)? {
                pairs.insert((fam, x));
            }
        }
    }
    AMRelation::new(source_space, target_space, pairs)
}

/// Recovers the function on the posets from a relation between their
/// derived spaces: each element maps to the sup of everything related
/// from family members inside its way-below cone.
pub fn am_to_poset_fn(
    t: &AMRelation,
    source: &FinPoset,
    target: &FinPoset,
    cap: usize,
) -> Result<MonotoneMap, Error> {
    let expect_source = source.to_fgcs(cap)?;
    let expect_target = target.to_fgcs(cap)?;
    if **t.source() != expect_source || **t.target() != expect_target {
        return Err(Error::SpaceMismatch {
            reason: "relation does not connect the derived spaces of the given posets".into(),
        });
    }
    let mut table = Vec::with_capacity(source.size());
    for x in 0..source.size() {
        let mut cone = 0u64;
        for b in 0..source.size() {
            if source.way_below(b, x, Mode::Fast)? {
                cone |= 1 << b;
            }
        }
        let mut image = 0u64;
        for f in t.source().family().member_bits() {
            if f & !cone == 0 {
                image |= t.image_bits(f);
            }
        }
        let sup = target.sup(image).ok_or_else(|| Error::SupMissing {
            set: Subset::from_bits(t.target().universe(), image).to_string(),
        })?;
        table.push(sup);
    }
    MonotoneMap::new(source.clone(), target.clone(), table)
}

/// Checks functoriality over a batch of composable pairs: identities map
/// to identities, composites to composites, and the relation/function
/// conversions invert each other on every relation involved.
pub fn check_functor_laws(pairs: &[(AMRelation, AMRelation)], cap: usize) -> Result<Report, Error> {
    let mut report = Report::new();
    for (index, (t1, t2)) in pairs.iter().enumerate() {
        let composed = AMRelation::compose(t1, t2)?;
        let mut composed = composed;
        let comp_report = composed.validate(cap)?;
        if !comp_report.ok {
            report.push(Violation::new(
                "composition-not-approximable",
                vec![Witness::element("pair", &index.to_string())],
                "the composite relation fails validation",
            ));
            continue;
        }
        let phi1 = t1.to_scott(cap)?;
        let phi2 = t2.to_scott(cap)?;
        let phi_comp = composed.to_scott(cap)?;
        for (pos, u) in phi1.source_regulars().members().members().iter().enumerate() {
            let via_maps = phi2.table()[phi1.table()[pos]];
            if phi_comp.table()[pos] != via_maps {
                report.push(Violation::new(
                    "functor-composition",
                    vec![Witness::element("pair", &index.to_string()), Witness::set("U", u)],
                    "the composite relation and the composed functions disagree",
                ));
            }
        }
        for t in [t1, t2] {
            let ident = identity_scott_table(t.source(), cap)?;
            let mut id_rel = AMRelation::identity(t.source())?;
            let id_report = id_rel.validate(cap)?;
            if !id_report.ok {
                report.push(Violation::new(
                    "identity-not-approximable",
                    vec![Witness::element("pair", &index.to_string())],
                    "the identity relation fails validation",
                ));
                continue;
            }
            let phi_id = id_rel.to_scott(cap)?;
            if phi_id.table() != ident.as_slice() {
                report.push(Violation::new(
                    "functor-identity",
                    vec![Witness::element("pair", &index.to_string())],
                    "the identity relation does not induce the identity function",
                ));
            }
            // Fullness and faithfulness at this instance: converting the
            // induced function back recovers the relation.
            let back = AMRelation::from_scott(&t.to_scott(cap)?)?;
            if back.pairs() != t.pairs() {
                report.push(Violation::new(
                    "conversion-roundtrip",
                    vec![Witness::element("pair", &index.to_string())],
                    "rebuilding the relation from its function changes the pairs",
                ));
            }
        }
    }
    Ok(report)
}

fn identity_scott_table(x: &Arc<FGCSpace>, cap: usize) -> Result<Vec<usize>, Error> {
    Ok((0..x.regular_opens(cap)?.len()).collect())
}
