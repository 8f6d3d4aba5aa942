use std::collections::HashSet;
use std::io::BufRead;

use super::io::data_lines;
use super::IdMap;
use crate::error::{parse_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
}

impl Triple {
    pub fn new(head: usize, relation: usize, tail: usize) -> Self {
        Self { head, relation, tail }
    }
}

/// `(head, relation, tail)` facts over interned entity and relation ids.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeTriples {
    entities: IdMap,
    relations: IdMap,
    triples: Vec<Triple>,
    known: HashSet<Triple>,
}

impl KnowledgeTriples {
    /// Triples over sequentially named entities and relations. Duplicates are dropped.
    pub fn from_triples(n_entities: usize, n_relations: usize, triples: &[Triple]) -> Result<Self> {
        let mut kg = Self {
            entities: IdMap::sequential(n_entities),
            relations: IdMap::sequential(n_relations),
            ..Self::default()
        };
        for &t in triples {
            if t.head >= n_entities {
                return Err(Error::InvalidNode(t.head));
            }
            if t.tail >= n_entities {
                return Err(Error::InvalidNode(t.tail));
            }
            if t.relation >= n_relations {
                return Err(Error::Validation(format!("invalid relation id {}", t.relation)));
            }
            kg.push(t);
        }
        Ok(kg)
    }

    fn push(&mut self, t: Triple) {
        if self.known.insert(t) {
            self.triples.push(t);
        }
    }

    pub fn entities(&self) -> &IdMap {
        &self.entities
    }

    pub fn relations(&self) -> &IdMap {
        &self.relations
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.known.contains(t)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Same id tables, restricted to `subset`.
    pub fn with_subset(&self, subset: &[Triple]) -> Self {
        let mut kg = Self {
            entities: self.entities.clone(),
            relations: self.relations.clone(),
            ..Self::default()
        };
        for &t in subset {
            kg.push(t);
        }
        kg
    }
}

/// Read `head relation tail` lines.
pub fn load_triples<R: BufRead>(reader: R) -> Result<KnowledgeTriples> {
    let mut kg = KnowledgeTriples::default();
    for item in data_lines(reader) {
        let (line, fields) = item?;
        if fields.len() != 3 {
            return Err(parse_err(line, format!("expected 3 columns, found {}", fields.len())));
        }
        let head = kg.entities.intern(&fields[0]);
        let relation = kg.relations.intern(&fields[1]);
        let tail = kg.entities.intern(&fields[2]);
        kg.push(Triple { head, relation, tail });
    }
    Ok(kg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_and_dedupes() {
        let kg = load_triples("a likes b\nb likes c\na likes b\n".as_bytes()).unwrap();
        assert_eq!(kg.entity_count(), 3);
        assert_eq!(kg.relation_count(), 1);
        assert_eq!(kg.len(), 2);
        assert!(kg.contains(&Triple::new(0, 0, 1)));
    }

    #[test]
    fn rejects_wrong_arity() {
        assert!(matches!(
            load_triples("a b\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn validates_ids() {
        assert!(KnowledgeTriples::from_triples(2, 1, &[Triple::new(0, 0, 2)]).is_err());
        assert!(KnowledgeTriples::from_triples(2, 1, &[Triple::new(0, 1, 1)]).is_err());
    }
}
