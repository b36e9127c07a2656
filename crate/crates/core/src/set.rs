//! Finite universes, bit-vector subsets, and canonically ordered subset
//! families. Every quantifier sweep in the crate runs over these.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::Error;

/// Default bound on universe size for operations that enumerate the
/// powerset. Overridable per call (`--cap` on the command line).
pub const DEFAULT_CAP: usize = 16;

/// Above this size exponential checks still run but reports carry a
/// warning note.
pub const WARN_THRESHOLD: usize = 12;

/// An ordered list of distinct element labels. The index of a label is
/// stable for the lifetime of the universe; subsets refer to elements by
/// that index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Universe {
    labels: Vec<String>,
}

impl Universe {
    /// Builds a universe from distinct labels. At least one element is
    /// required and at most 63 are supported (subsets are `u64` masks).
    pub fn new<I, S>(labels: I) -> Result<Arc<Universe>, Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidUniverse { reason: "no elements".into() });
        }
        if labels.len() > 63 {
            return Err(Error::InvalidUniverse {
                reason: format!("{} elements exceed the 63-element representation limit", labels.len()),
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidUniverse { reason: format!("duplicate label {l:?}") });
            }
        }
        Ok(Arc::new(Universe { labels }))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Mask with one bit per element.
    pub fn full_mask(&self) -> u64 {
        if self.labels.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.labels.len()) - 1
        }
    }

    pub fn subset_count(&self) -> u64 {
        1u64 << self.labels.len()
    }

    fn check_cap(&self, cap: usize) -> Result<(), Error> {
        if self.size() > cap {
            Err(Error::CapExceeded { n: self.size(), cap })
        } else {
            Ok(())
        }
    }
}

/// Renders a raw membership mask against a universe, `{a,b}` style, with
/// labels in universe order.
pub fn render_bits(u: &Universe, bits: u64) -> String {
    let mut out = String::from("{");
    let mut first = true;
    for i in 0..u.size() {
        if bits & (1 << i) != 0 {
            if !first {
                out.push(',');
            }
            out.push_str(u.label(i));
            first = false;
        }
    }
    out.push('}');
    out
}

/// A subset of one universe, stored as a membership mask with bit `i`
/// standing for element `i`. Equality is extensional: same universe (by
/// value), same members.
#[derive(Debug, Clone)]
pub struct Subset {
    universe: Arc<Universe>,
    bits: u64,
}

impl Subset {
    pub fn empty(universe: &Arc<Universe>) -> Subset {
        Subset { universe: Arc::clone(universe), bits: 0 }
    }

    pub fn full(universe: &Arc<Universe>) -> Subset {
        Subset { universe: Arc::clone(universe), bits: universe.full_mask() }
    }

    /// Builds a subset from a raw mask; bits beyond the universe are
    /// silently dropped.
    pub fn from_bits(universe: &Arc<Universe>, bits: u64) -> Subset {
        Subset { universe: Arc::clone(universe), bits: bits & universe.full_mask() }
    }

    pub fn from_labels<'a, I>(universe: &Arc<Universe>, labels: I) -> Result<Subset, Error>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut bits = 0u64;
        for l in labels {
            let i = universe
                .index_of(l)
                .ok_or_else(|| Error::UnknownLabel { label: l.to_string() })?;
            bits |= 1 << i;
        }
        Ok(Subset { universe: Arc::clone(universe), bits })
    }

    /// Parses the textual `{a,b}` rendering (whitespace tolerated); a bare
    /// comma-separated list without braces is accepted too.
    pub fn parse(universe: &Arc<Universe>, text: &str) -> Result<Subset, Error> {
        let inner = text.trim();
        let inner = inner.strip_prefix('{').and_then(|s| s.strip_suffix('}')).unwrap_or(inner);
        let inner = inner.trim();
        if inner.is_empty() {
            return Ok(Subset::empty(universe));
        }
        Subset::from_labels(universe, inner.split(',').map(str::trim))
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.bits & (1 << index) != 0
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.universe.index_of(label).map_or(false, |i| self.contains_index(i))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe.size()).filter(move |i| self.contains_index(*i))
    }

    pub fn member_labels(&self) -> Vec<&str> {
        self.indices().map(|i| self.universe.label(i)).collect()
    }

    fn same_universe(&self, other: &Subset) -> Result<(), Error> {
        if Arc::ptr_eq(&self.universe, &other.universe) || self.universe == other.universe {
            Ok(())
        } else {
            Err(Error::UniverseMismatch)
        }
    }

    pub fn union(&self, other: &Subset) -> Result<Subset, Error> {
        self.same_universe(other)?;
        Ok(Subset { universe: Arc::clone(&self.universe), bits: self.bits | other.bits })
    }

    pub fn intersection(&self, other: &Subset) -> Result<Subset, Error> {
        self.same_universe(other)?;
        Ok(Subset { universe: Arc::clone(&self.universe), bits: self.bits & other.bits })
    }

    pub fn difference(&self, other: &Subset) -> Result<Subset, Error> {
        self.same_universe(other)?;
        Ok(Subset { universe: Arc::clone(&self.universe), bits: self.bits & !other.bits })
    }

    pub fn complement(&self) -> Subset {
        Subset {
            universe: Arc::clone(&self.universe),
            bits: !self.bits & self.universe.full_mask(),
        }
    }

    pub fn is_subset_of(&self, other: &Subset) -> Result<bool, Error> {
        self.same_universe(other)?;
        Ok(self.bits & !other.bits == 0)
    }
}

impl PartialEq for Subset {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits && self.universe == other.universe
    }
}

impl Eq for Subset {}

impl std::hash::Hash for Subset {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.universe.hash(state);
        self.bits.hash(state);
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The canonical total order: universes compared by labels, then subsets
/// of one universe by their mask read as an integer (empty set first).
impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.universe
            .labels
            .cmp(&other.universe.labels)
            .then(self.bits.cmp(&other.bits))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_bits(&self.universe, self.bits))
    }
}

/// Rank of `s` in the canonical subset order of its universe. Bijective
/// onto `0..2^n - 1`.
pub fn canonical_index(s: &Subset, cap: usize) -> Result<u64, Error> {
    s.universe().check_cap(cap)?;
    Ok(s.bits())
}

/// Yields every subset of `u` exactly once, in strictly increasing
/// canonical index.
pub fn enumerate_subsets(u: &Arc<Universe>, cap: usize) -> Result<impl Iterator<Item = Subset>, Error> {
    u.check_cap(cap)?;
    let universe = Arc::clone(u);
    Ok((0..u.subset_count()).map(move |bits| Subset::from_bits(&universe, bits)))
}

/// `enumerate_subsets` restricted to subsets satisfying `filter`.
pub fn enumerate_subsets_where<F>(
    u: &Arc<Universe>,
    cap: usize,
    filter: F,
) -> Result<impl Iterator<Item = Subset>, Error>
where
    F: FnMut(&Subset) -> bool,
{
    Ok(enumerate_subsets(u, cap)?.filter(filter))
}

/// Iterates the raw masks of all subsets of `mask` (submasks), ascending.
pub fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    // Ascending submask enumeration: complement trick over the fixed mask.
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask { None } else { Some((cur.wrapping_sub(mask)) & mask) };
        Some(cur)
    })
}

/// A duplicate-free, canonically sorted list of subsets of one universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetFamily {
    universe: Arc<Universe>,
    members: Vec<Subset>,
}

impl SubsetFamily {
    pub fn new(universe: &Arc<Universe>, members: impl IntoIterator<Item = Subset>) -> Result<SubsetFamily, Error> {
        let mut collected: Vec<Subset> = Vec::new();
        for m in members {
            if &m.universe != universe && !Arc::ptr_eq(&m.universe, universe) {
                return Err(Error::UniverseMismatch);
            }
            collected.push(m);
        }
        collected.sort();
        collected.dedup();
        Ok(SubsetFamily { universe: Arc::clone(universe), members: collected })
    }

    pub fn from_bits(universe: &Arc<Universe>, masks: impl IntoIterator<Item = u64>) -> SubsetFamily {
        let mut members: Vec<Subset> =
            masks.into_iter().map(|b| Subset::from_bits(universe, b)).collect();
        members.sort();
        members.dedup();
        SubsetFamily { universe: Arc::clone(universe), members }
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn member_bits(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().map(Subset::bits)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &Subset) -> bool {
        self.members.binary_search(s).is_ok()
    }

    pub fn contains_bits(&self, bits: u64) -> bool {
        self.members.binary_search_by(|m| m.bits.cmp(&bits)).is_ok()
    }
}

impl fmt::Display for SubsetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Arc<Universe> {
        Universe::new(["a", "b"]).unwrap()
    }

    #[test]
    fn universe_rejects_duplicates_and_empty() {
        assert!(matches!(Universe::new(["a", "a"]), Err(Error::InvalidUniverse { .. })));
        assert!(matches!(Universe::new(Vec::<String>::new()), Err(Error::InvalidUniverse { .. })));
    }

    #[test]
    fn canonical_index_on_two_elements() {
        let u = ab();
        let empty = Subset::empty(&u);
        let a = Subset::from_labels(&u, ["a"]).unwrap();
        let b = Subset::from_labels(&u, ["b"]).unwrap();
        let full = Subset::full(&u);
        assert_eq!(canonical_index(&empty, DEFAULT_CAP).unwrap(), 0);
        assert_eq!(canonical_index(&full, DEFAULT_CAP).unwrap(), 3);
        // Frozen from the enumeration oracle below.
        assert_eq!(canonical_index(&b, DEFAULT_CAP).unwrap(), 2);
        assert_eq!(canonical_index(&a, DEFAULT_CAP).unwrap(), 1);
    }

    #[test]
    fn enumeration_is_the_index_oracle() {
        // Independent oracle: position within the enumeration stream must
        // equal the claimed canonical index, and the stream must be
        // strictly increasing.
        let u = Universe::new(["a", "b", "c"]).unwrap();
        let all: Vec<Subset> = enumerate_subsets(&u, DEFAULT_CAP).unwrap().collect();
        assert_eq!(all.len(), 8);
        for (pos, s) in all.iter().enumerate() {
            assert_eq!(canonical_index(s, DEFAULT_CAP).unwrap(), pos as u64);
        }
        for w in all.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn enumeration_respects_filter_and_cap() {
        let u = ab();
        let nonempty: Vec<Subset> =
            enumerate_subsets_where(&u, DEFAULT_CAP, |s| !s.is_empty()).unwrap().collect();
        assert_eq!(nonempty.len(), 3);
        assert!(nonempty.iter().all(|s| !s.is_empty()));

        let single = Universe::new(["a"]).unwrap();
        let subsets: Vec<Subset> = enumerate_subsets(&single, DEFAULT_CAP).unwrap().collect();
        assert_eq!(subsets, vec![Subset::empty(&single), Subset::full(&single)]);

        let big = Universe::new((0..17).map(|i| format!("x{i}"))).unwrap();
        assert!(matches!(
            enumerate_subsets(&big, DEFAULT_CAP).err(),
            Some(Error::CapExceeded { n: 17, cap: 16 })
        ));
    }

    #[test]
    fn universe_mismatch_is_rejected() {
        let u = ab();
        let v = Universe::new(["a", "c"]).unwrap();
        let x = Subset::full(&u);
        let y = Subset::full(&v);
        assert!(matches!(x.union(&y), Err(Error::UniverseMismatch)));
        assert!(matches!(x.is_subset_of(&y), Err(Error::UniverseMismatch)));
    }

    #[test]
    fn rendering_follows_universe_order() {
        let u = Universe::new(["b", "a"]).unwrap();
        let s = Subset::full(&u);
        assert_eq!(s.to_string(), "{b,a}");
        assert_eq!(Subset::parse(&u, "{a, b}").unwrap(), s);
        assert_eq!(Subset::parse(&u, "{}").unwrap(), Subset::empty(&u));
        assert!(Subset::parse(&u, "{z}").is_err());
    }

    #[test]
    fn family_sorts_and_dedups() {
        let u = ab();
        let fam = SubsetFamily::from_bits(&u, [3, 1, 3, 2]);
        let bits: Vec<u64> = fam.member_bits().collect();
        assert_eq!(bits, vec![1, 2, 3]);
        assert!(fam.contains_bits(2));
        assert!(!fam.contains_bits(0));
    }

    #[test]
    fn submask_iteration_covers_the_powerset_of_the_mask() {
        let ms: Vec<u64> = submasks(0b101).collect();
        assert_eq!(ms, vec![0b000, 0b001, 0b100, 0b101]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), vec![0]);
    }

    proptest! {
        #[test]
        fn boolean_algebra_laws(xa in 0u64..16, xb in 0u64..16, xc in 0u64..16) {
            let u = Universe::new(["p", "q", "r", "s"]).unwrap();
            let a = Subset::from_bits(&u, xa);
            let b = Subset::from_bits(&u, xb);
            let c = Subset::from_bits(&u, xc);
            // Commutativity, associativity, distributivity, absorption.
            prop_assert_eq!(a.union(&b).unwrap(), b.union(&a).unwrap());
            prop_assert_eq!(a.intersection(&b).unwrap(), b.intersection(&a).unwrap());
            prop_assert_eq!(
                a.union(&b.union(&c).unwrap()).unwrap(),
                a.union(&b).unwrap().union(&c).unwrap()
            );
            prop_assert_eq!(
                a.intersection(&b.union(&c).unwrap()).unwrap(),
                a.intersection(&b).unwrap().union(&a.intersection(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(a.union(&a.intersection(&b).unwrap()).unwrap(), a.clone());
            // De Morgan.
            prop_assert_eq!(
                a.union(&b).unwrap().complement(),
                a.complement().intersection(&b.complement()).unwrap()
            );
            // Inclusion is a partial order compatible with union.
            prop_assert!(a.is_subset_of(&a.union(&b).unwrap()).unwrap());
            if a.is_subset_of(&b).unwrap() && b.is_subset_of(&a).unwrap() {
                prop_assert_eq!(a, b);
            }
        }
    }
}
