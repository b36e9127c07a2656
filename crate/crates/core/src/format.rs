//! On-disk documents: spaces (with optional family), posets, and
//! mappings, all JSON with sets rendered `{a,b}` style in universe order.
//! Serialization is deterministic so reports can be compared byte for
//! byte.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::closure::{ClosureSpec, GCSpace, GammaRepr, TauRepr, TauSpec};
use crate::morphism::AMRelation;
use crate::poset::FinPoset;
use crate::report::Report;
use crate::set::{Subset, SubsetFamily, Universe};
use crate::space::FGCSpace;
use crate::Error;

/// One operator of a space document: exactly one representation key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct OperatorDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_sets: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub open_sets: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub universe: Vec<String>,
    pub gamma: OperatorDoc,
    pub tau: OperatorDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosetDoc {
    pub elements: Vec<String>,
    pub leq: Vec<(String, String)>,
}

/// A space or a poset; input files are detected by their keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Document {
    Space(SpaceDoc),
    Poset(PosetDoc),
}

/// Inline space or path reference inside a mapping document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Path(String),
    Inline(SpaceDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingDoc {
    pub source: SpaceRef,
    pub target: SpaceRef,
    /// Pairs of a family member (list of labels) and a target element.
    pub pairs: Vec<(Vec<String>, String)>,
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {}, column {}: {}", e.line(), e.column(), e))
    })
}

pub fn parse_document(text: &str) -> Result<Document, Error> {
    parse_json(text)
}

pub fn parse_mapping(text: &str) -> Result<MappingDoc, Error> {
    parse_json(text)
}

pub fn read_document(path: &Path) -> Result<Document, Error> {
    parse_document(&std::fs::read_to_string(path)?)
}

pub fn read_mapping(path: &Path) -> Result<MappingDoc, Error> {
    parse_mapping(&std::fs::read_to_string(path)?)
}

fn labels_to_family(u: &Arc<Universe>, lists: &[Vec<String>]) -> Result<SubsetFamily, Error> {
    let mut members = Vec::new();
    for labels in lists {
        members.push(Subset::from_labels(u, labels.iter().map(String::as_str))?);
    }
    SubsetFamily::new(u, members)
}

fn family_to_labels(family: &SubsetFamily) -> Vec<Vec<String>> {
    family
        .members()
        .iter()
        .map(|m| m.member_labels().iter().map(|l| l.to_string()).collect())
        .collect()
}

impl OperatorDoc {
    fn role_count(&self) -> usize {
        self.closed_sets.is_some() as usize
            + self.open_sets.is_some() as usize
            + self.table.is_some() as usize
    }
}

/// The pieces of a space document after name resolution, before
/// validation.
pub struct LoadedSpace {
    pub space: GCSpace,
    pub family: Option<SubsetFamily>,
}

/// Builds the operators from a space document. Closure-axiom failures on
/// the gamma side surface as errors carrying the reason.
pub fn space_from_doc(doc: &SpaceDoc) -> Result<LoadedSpace, Error> {
    let universe = Universe::new(doc.universe.iter().cloned())?;

    if doc.gamma.role_count() != 1 || doc.gamma.open_sets.is_some() {
        return Err(Error::parse("gamma needs exactly one of closed_sets or table"));
    }
    let gamma = if let Some(lists) = &doc.gamma.closed_sets {
        ClosureSpec::from_closed_system(labels_to_family(&universe, lists)?)?
    } else {
        let map = doc.gamma.table.as_ref().expect("checked above");
        let mut table = vec![None; universe.subset_count() as usize];
        for (k, v) in map {
            let key = Subset::parse(&universe, k)?;
            let val = Subset::parse(&universe, v)?;
            table[key.bits() as usize] = Some(val.bits());
        }
        let table: Vec<u64> = table
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::parse(format!(
                        "gamma table is missing an entry for {}",
                        Subset::from_bits(&universe, i as u64)
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        ClosureSpec::from_table(&universe, table)?
    };

    if doc.tau.role_count() != 1 || doc.tau.closed_sets.is_some() {
        return Err(Error::parse("tau needs exactly one of open_sets or table"));
    }
    let tau = if let Some(lists) = &doc.tau.open_sets {
        TauSpec::from_interior_system(labels_to_family(&universe, lists)?)
    } else {
        let map = doc.tau.table.as_ref().expect("checked above");
        let mut table = BTreeMap::new();
        for (k, v) in map {
            let key = Subset::parse(&universe, k)?;
            let val = Subset::parse(&universe, v)?;
            table.insert(key.bits(), val.bits());
        }
        TauSpec::from_partial_table(&universe, table)
    };

    let family = match &doc.family {
        Some(lists) => Some(labels_to_family(&universe, lists)?),
        None => None,
    };
    Ok(LoadedSpace { space: GCSpace::new(gamma, tau)?, family })
}

pub fn doc_from_space(space: &GCSpace, family: Option<&SubsetFamily>) -> SpaceDoc {
    let universe = space.universe();
    let gamma = match space.gamma().repr() {
        GammaRepr::ClosedSystem(system) => OperatorDoc {
            closed_sets: Some(family_to_labels(system)),
            ..OperatorDoc::default()
        },
        GammaRepr::FullTable(table) => OperatorDoc {
            table: Some(
                table
                    .iter()
                    .enumerate()
                    .map(|(a, &c)| {
                        (
                            Subset::from_bits(universe, a as u64).to_string(),
                            Subset::from_bits(universe, c).to_string(),
                        )
                    })
                    .collect(),
            ),
            ..OperatorDoc::default()
        },
    };
    let tau = match space.tau().repr() {
        TauRepr::InteriorSystem(system) => OperatorDoc {
            open_sets: Some(family_to_labels(system)),
            ..OperatorDoc::default()
        },
        TauRepr::PartialTable(map) => OperatorDoc {
            table: Some(
                map.iter()
                    .map(|(&k, &v)| {
                        (
                            Subset::from_bits(universe, k).to_string(),
                            Subset::from_bits(universe, v).to_string(),
                        )
                    })
                    .collect(),
            ),
            ..OperatorDoc::default()
        },
    };
    SpaceDoc {
        universe: universe.labels().to_vec(),
        gamma,
        tau,
        family: family.map(family_to_labels),
    }
}

pub fn poset_from_doc(doc: &PosetDoc) -> Result<FinPoset, Error> {
    FinPoset::from_pairs(
        doc.elements.iter().map(String::as_str),
        doc.leq.iter().map(|(a, b)| (a.as_str(), b.as_str())),
    )
}

pub fn doc_from_poset(p: &FinPoset) -> PosetDoc {
    PosetDoc {
        elements: p.elements().labels().to_vec(),
        leq: p
            .pairs()
            .into_iter()
            .map(|(i, j)| {
                (p.elements().label(i).to_string(), p.elements().label(j).to_string())
            })
            .collect(),
    }
}

/// Resolves a space reference, validates the space and its family, and
/// returns the augmented space. Mapping files need both endpoints fully
/// validated before the relation can be interpreted.
pub fn resolve_space_ref(reference: &SpaceRef, base: &Path, cap: usize) -> Result<Arc<FGCSpace>, Error> {
    let doc = match reference {
        SpaceRef::Inline(doc) => doc.clone(),
        SpaceRef::Path(rel) => {
            let path = base.join(rel);
            match read_document(&path)? {
                Document::Space(doc) => doc,
                Document::Poset(_) => {
                    return Err(Error::parse(format!("{} is a poset, not a space", path.display())))
                }
            }
        }
    };
    let loaded = space_from_doc(&doc)?;
    let mut space = loaded.space;
    let report = space.validate(cap)?;
    if !report.ok {
        return Err(Error::Unvalidated);
    }
    let family = loaded.family.ok_or_else(|| Error::parse("space reference lacks a family"))?;
    let mut x = FGCSpace::new(space, family)?;
    let report = x.validate(cap)?;
    if !report.ok {
        return Err(Error::Unvalidated);
    }
    Ok(Arc::new(x))
}

pub fn mapping_from_doc(doc: &MappingDoc, base: &Path, cap: usize) -> Result<AMRelation, Error> {
    let source = resolve_space_ref(&doc.source, base, cap)?;
    let target = resolve_space_ref(&doc.target, base, cap)?;
    let mut pairs = Vec::new();
    for (labels, x) in &doc.pairs {
        let f = Subset::from_labels(source.universe(), labels.iter().map(String::as_str))?;
        pairs.push((f, x.as_str()));
    }
    AMRelation::from_labeled_pairs(source, target, pairs)
}

pub fn doc_from_mapping(t: &AMRelation) -> MappingDoc {
    MappingDoc {
        source: SpaceRef::Inline(doc_from_space(t.source().space(), Some(t.source().family()))),
        target: SpaceRef::Inline(doc_from_space(t.target().space(), Some(t.target().family()))),
        pairs: t
            .pairs()
            .iter()
            .map(|&(f, x)| {
                (
                    Subset::from_bits(t.source().universe(), f)
                        .member_labels()
                        .iter()
                        .map(|l| l.to_string())
                        .collect(),
                    t.target().universe().label(x).to_string(),
                )
            })
            .collect(),
    }
}

/// The serializable outcome of one command invocation. Timing is kept
/// out of the serialized form so identical runs emit identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub ok: bool,
    pub checks: Vec<NamedReport>,
    #[serde(skip)]
    pub timing_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedReport {
    pub name: String,
    pub report: Report,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> RunReport {
        RunReport {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: None,
            ok: true,
            checks: Vec::new(),
            timing_ms: 0,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, report: Report) {
        self.ok &= report.ok;
        self.checks.push(NamedReport { name: name.into(), report });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_human(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        for check in &self.checks {
            out.push_str(&format!("[{}] {}", if check.report.ok { "pass" } else { "FAIL" }, check.name));
            out.push('\n');
            for v in &check.report.violations {
                out.push_str("    ");
                out.push_str(&v.render());
                out.push('\n');
            }
            for n in &check.report.notes {
                out.push_str("    note: ");
                out.push_str(n);
                out.push('\n');
            }
        }
        out.push_str(&format!("result: {} ({} ms)\n", if self.ok { "ok" } else { "FAILED" }, self.timing_ms));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::set::DEFAULT_CAP;

    #[test]
    fn space_doc_roundtrip_for_the_chain() {
        let x = fixtures::chain2();
        let doc = doc_from_space(x.space(), Some(x.family()));
        let json = serde_json::to_string_pretty(&doc).unwrap();
        let parsed: Document = parse_document(&json).unwrap();
        let Document::Space(sd) = parsed else { panic!("space expected") };
        let loaded = space_from_doc(&sd).unwrap();
        let mut space = loaded.space;
        assert!(space.validate(DEFAULT_CAP).unwrap().ok);
        let rebuilt =
            FGCSpace::validated(space, loaded.family.unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!(rebuilt, x);
        // Determinism: serializing twice gives identical bytes.
        let again = serde_json::to_string_pretty(&doc_from_space(rebuilt.space(), Some(rebuilt.family()))).unwrap();
        assert_eq!(json, again);
    }

    #[test]
    fn closed_and_open_system_docs() {
        let text = r#"{
            "universe": ["a", "b"],
            "gamma": {"closed_sets": [[], ["a"], ["b"], ["a", "b"]]},
            "tau": {"open_sets": [[], ["a"], ["b"], ["a", "b"]]},
            "family": [["a"], ["b"], ["a", "b"]]
        }"#;
        let Document::Space(doc) = parse_document(text).unwrap() else { panic!() };
        let loaded = space_from_doc(&doc).unwrap();
        let mut space = loaded.space;
        assert!(space.validate(DEFAULT_CAP).unwrap().ok);
        let x = FGCSpace::validated(space, loaded.family.unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!(x.regular_opens(DEFAULT_CAP).unwrap().len(), 3);
    }

    #[test]
    fn poset_doc_roundtrip() {
        let p = fixtures::m_poset();
        let doc = doc_from_poset(&p);
        let json = serde_json::to_string(&doc).unwrap();
        let Document::Poset(pd) = parse_document(&json).unwrap() else { panic!() };
        assert_eq!(poset_from_doc(&pd).unwrap(), p);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_document("{\"universe\": [").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("line"), "{text}");
    }

    #[test]
    fn mapping_doc_roundtrip() {
        let x = std::sync::Arc::new(fixtures::chain2());
        let mut id = AMRelation::identity(&x).unwrap();
        assert!(id.validate(DEFAULT_CAP).unwrap().ok);
        let doc = doc_from_mapping(&id);
        let json = serde_json::to_string_pretty(&doc).unwrap();
        let parsed = parse_mapping(&json).unwrap();
        let rebuilt = mapping_from_doc(&parsed, Path::new("."), DEFAULT_CAP).unwrap();
        assert_eq!(rebuilt.pairs(), id.pairs());
    }

    #[test]
    fn missing_gamma_entry_is_rejected() {
        let text = r#"{
            "universe": ["a"],
            "gamma": {"table": {"{}": "{}"}},
            "tau": {"open_sets": [[]]}
        }"#;
        let Document::Space(doc) = parse_document(text).unwrap() else { panic!() };
        assert!(matches!(space_from_doc(&doc), Err(Error::Parse { .. })));
    }
}
