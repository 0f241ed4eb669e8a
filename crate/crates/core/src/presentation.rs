//! Semigroup presentations and positive words over their alphabets.
//!
//! A presentation is an alphabet together with a list of relations between
//! nonempty positive words. Relations are stored directed, as written, but
//! every diagram-level check treats them symmetrically: a transistor may
//! realize a relation in either direction.

use std::fmt;
use std::sync::Arc;

use serde_json::{Map, Value};
use thiserror::Error;

/// Index into a presentation's sorted generator alphabet.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter(pub u16);

/// A finite sequence of letters. Relation sides and diagram labels are
/// required to be nonempty; the empty word only appears transiently.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of occurrences of `p` in this word.
    pub fn count_letter(&self, p: Letter) -> usize {
        self.0.iter().filter(|&&l| l == p).count()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// The multiset of letters, as sorted counts. Two words are permutations
    /// of each other exactly when their multisets agree.
    pub fn letter_multiset(&self) -> Vec<(Letter, usize)> {
        let mut sorted = self.0.clone();
        sorted.sort();
        let mut out: Vec<(Letter, usize)> = Vec::new();
        for l in sorted {
            match out.last_mut() {
                Some((p, n)) if *p == l => *n += 1,
                _ => out.push((l, 1)),
            }
        }
        out
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({:?})", self.0.iter().map(|l| l.0).collect::<Vec<_>>())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
}

/// Violations reported by presentation validation. Validation never aborts;
/// every problem is reported with a stable machine-readable code.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PresentationViolation {
    #[error("relation {index} is reflexive")]
    ReflexiveRelation { index: usize },
    #[error("relation {index} has an empty side")]
    EmptyRelationSide { index: usize },
    #[error("relation {index} uses the unknown generator {name:?}")]
    UnknownLetter { index: usize, name: String },
    #[error("duplicate generator {name:?}")]
    DuplicateGenerator { name: String },
    #[error("invalid generator name {name:?}")]
    BadGeneratorName { name: String },
    #[error("n-ary presentation requires n >= 2, got {n}")]
    ArityTooSmall { n: u32 },
}

impl PresentationViolation {
    pub fn code(&self) -> &'static str {
        match self {
            PresentationViolation::ReflexiveRelation { .. } => "reflexive_relation",
            PresentationViolation::EmptyRelationSide { .. } => "empty_relation_side",
            PresentationViolation::UnknownLetter { .. } => "unknown_letter",
            PresentationViolation::DuplicateGenerator { .. } => "duplicate_generator",
            PresentationViolation::BadGeneratorName { .. } => "bad_generator_name",
            PresentationViolation::ArityTooSmall { .. } => "arity_too_small",
        }
    }
}

/// The standard presentations used throughout the crate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StandardPresentation {
    /// `<x, a | x = xax>`, the base presentation for QF, QT, QV.
    QvBase,
    /// `<x | x = x^2>`, the base presentation for Thompson's V.
    VBase,
    /// `<x, a | x = x^n a>` for n-ary trees, n >= 2.
    NAry(u32),
}

/// An alphabet plus relations; the rewriting substrate.
///
/// Generators are stored sorted lexicographically; relations keep input
/// order. Immutable after construction.
#[derive(Clone, PartialEq, Eq)]
pub struct SemigroupPresentation {
    generators: Vec<String>,
    relations: Vec<Relation>,
}

impl fmt::Debug for SemigroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} | {} relations>", self.generators.join(", "), self.relations.len())
    }
}

fn valid_generator_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| !c.is_whitespace() && c != ',' && !c.is_control())
}

impl SemigroupPresentation {
    /// Builds a presentation from generator names and relations given as
    /// sequences of generator names. Returns every violation found.
    pub fn new(
        generators: Vec<String>,
        relations: Vec<(Vec<String>, Vec<String>)>,
    ) -> Result<Arc<Self>, Vec<PresentationViolation>> {
        let mut violations = Vec::new();
        let mut sorted = generators.clone();
        sorted.sort();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                violations.push(PresentationViolation::DuplicateGenerator { name: pair[0].clone() });
            }
        }
        sorted.dedup();
        for name in &sorted {
            if !valid_generator_name(name) {
                violations.push(PresentationViolation::BadGeneratorName { name: name.clone() });
            }
        }

        let lookup = |name: &str| sorted.iter().position(|g| g == name).map(|i| Letter(i as u16));
        let mut built = Vec::new();
        for (index, (lhs, rhs)) in relations.iter().enumerate() {
            let mut side = |names: &[String]| -> Option<Word> {
                if names.is_empty() {
                    violations.push(PresentationViolation::EmptyRelationSide { index });
                    return None;
                }
                let mut letters = Vec::with_capacity(names.len());
                for name in names {
                    match lookup(name) {
                        Some(l) => letters.push(l),
                        None => {
                            violations.push(PresentationViolation::UnknownLetter {
                                index,
                                name: name.clone(),
                            });
                            return None;
                        }
                    }
                }
                Some(Word(letters))
            };
            let (lhs, rhs) = (side(lhs), side(rhs));
            if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
                if lhs == rhs {
                    violations.push(PresentationViolation::ReflexiveRelation { index });
                } else {
                    built.push(Relation { lhs, rhs });
                }
            }
        }

        if violations.is_empty() {
            Ok(Arc::new(SemigroupPresentation { generators: sorted, relations: built }))
        } else {
            Err(violations)
        }
    }

    /// Validates raw presentation data without constructing anything.
    pub fn validate(
        generators: &[String],
        relations: &[(Vec<String>, Vec<String>)],
    ) -> Vec<PresentationViolation> {
        match Self::new(generators.to_vec(), relations.to_vec()) {
            Ok(_) => Vec::new(),
            Err(v) => v,
        }
    }

    pub fn standard(kind: StandardPresentation) -> Result<Arc<Self>, PresentationViolation> {
        let s = |x: &str| x.to_string();
        let spell = |w: &str| w.chars().map(|c| c.to_string()).collect::<Vec<_>>();
        let build = |gens: Vec<String>, rel: (Vec<String>, Vec<String>)| {
            SemigroupPresentation::new(gens, vec![rel]).expect("standard presentation is valid")
        };
        match kind {
            StandardPresentation::QvBase => {
                Ok(build(vec![s("x"), s("a")], (spell("x"), spell("xax"))))
            }
            StandardPresentation::VBase => Ok(build(vec![s("x")], (spell("x"), spell("xx")))),
            StandardPresentation::NAry(n) => {
                if n < 2 {
                    return Err(PresentationViolation::ArityTooSmall { n });
                }
                let mut rhs = vec![s("x"); n as usize];
                rhs.push(s("a"));
                Ok(build(vec![s("x"), s("a")], (spell("x"), rhs)))
            }
        }
    }

    pub fn qv_base() -> Arc<Self> {
        Self::standard(StandardPresentation::QvBase).unwrap()
    }

    pub fn v_base() -> Arc<Self> {
        Self::standard(StandardPresentation::VBase).unwrap()
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.generators.iter().position(|g| g == name).map(|i| Letter(i as u16))
    }

    pub fn letter_name(&self, l: Letter) -> &str {
        &self.generators[l.0 as usize]
    }

    fn single_char_alphabet(&self) -> bool {
        self.generators.iter().all(|g| g.chars().count() == 1)
    }

    /// Renders a word; generator names are concatenated when the whole
    /// alphabet is single-character, otherwise joined with spaces.
    pub fn word_string(&self, w: &Word) -> String {
        let names: Vec<&str> = w.letters().iter().map(|&l| self.letter_name(l)).collect();
        if self.single_char_alphabet() {
            names.concat()
        } else {
            names.join(" ")
        }
    }

    pub fn word_from_names(&self, names: &[&str]) -> Result<Word, PresentationViolation> {
        let mut letters = Vec::with_capacity(names.len());
        for name in names {
            letters.push(self.letter(name).ok_or_else(|| PresentationViolation::UnknownLetter {
                index: 0,
                name: name.to_string(),
            })?);
        }
        Ok(Word(letters))
    }

    /// Parses a word written as concatenated single characters. Only valid
    /// when every generator name is a single character.
    pub fn word_from_str(&self, s: &str) -> Result<Word, PresentationViolation> {
        let names: Vec<String> = s.chars().map(|c| c.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(|n| n.as_str()).collect();
        self.word_from_names(&refs)
    }

    /// Checks whether `(top, bottom)` reads some relation in either direction.
    pub fn is_relation_pair(&self, top: &Word, bottom: &Word) -> bool {
        self.relations
            .iter()
            .any(|r| (&r.lhs == top && &r.rhs == bottom) || (&r.lhs == bottom && &r.rhs == top))
    }

    /// The presentation induced by deleting one generator from the alphabet
    /// and from both sides of every relation. Returns the new presentation
    /// together with the letter remap (erased letter maps to `None`).
    pub fn erased(
        &self,
        erase: Letter,
    ) -> Result<(Arc<SemigroupPresentation>, Vec<Option<Letter>>), Vec<PresentationViolation>> {
        let mut generators = Vec::new();
        let mut map: Vec<Option<Letter>> = vec![None; self.generators.len()];
        for (i, g) in self.generators.iter().enumerate() {
            if Letter(i as u16) != erase {
                map[i] = Some(Letter(generators.len() as u16));
                generators.push(g.clone());
            }
        }
        let strip = |w: &Word| -> Vec<String> {
            w.letters()
                .iter()
                .filter(|&&l| l != erase)
                .map(|&l| self.letter_name(l).to_string())
                .collect()
        };
        let relations: Vec<_> =
            self.relations.iter().map(|r| (strip(&r.lhs), strip(&r.rhs))).collect();
        let pres = SemigroupPresentation::new(generators, relations)?;
        Ok((pres, map))
    }

    /// Canonical JSON form: sorted generators, relations in input order,
    /// relation sides as strings when the alphabet is single-character.
    pub fn to_json(&self) -> Value {
        let single = self.single_char_alphabet();
        let side = |w: &Word| -> Value {
            if single {
                Value::String(self.word_string(w))
            } else {
                Value::Array(
                    w.letters()
                        .iter()
                        .map(|&l| Value::String(self.letter_name(l).to_string()))
                        .collect(),
                )
            }
        };
        let mut obj = Map::new();
        obj.insert(
            "generators".into(),
            Value::Array(self.generators.iter().map(|g| Value::String(g.clone())).collect()),
        );
        obj.insert(
            "relations".into(),
            Value::Array(
                self.relations
                    .iter()
                    .map(|r| Value::Array(vec![side(&r.lhs), side(&r.rhs)]))
                    .collect(),
            ),
        );
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Arc<Self>, String> {
        let obj = v.as_object().ok_or("presentation must be a JSON object")?;
        let generators: Vec<String> = obj
            .get("generators")
            .and_then(Value::as_array)
            .ok_or("missing generators array")?
            .iter()
            .map(|g| g.as_str().map(str::to_string).ok_or("generator must be a string"))
            .collect::<Result<_, _>>()?;
        let single = generators.iter().all(|g| g.chars().count() == 1);
        let parse_side = |side: &Value| -> Result<Vec<String>, String> {
            match side {
                Value::String(s) if single => Ok(s.chars().map(|c| c.to_string()).collect()),
                Value::String(_) => Err("string relation sides need a single-character alphabet".into()),
                Value::Array(names) => names
                    .iter()
                    .map(|n| n.as_str().map(str::to_string).ok_or_else(|| "relation letter must be a string".to_string()))
                    .collect(),
                _ => Err("relation side must be a string or array".into()),
            }
        };
        let mut relations = Vec::new();
        for rel in obj.get("relations").and_then(Value::as_array).ok_or("missing relations array")? {
            let pair = rel.as_array().filter(|p| p.len() == 2).ok_or("relation must be a two-element array")?;
            relations.push((parse_side(&pair[0])?, parse_side(&pair[1])?));
        }
        SemigroupPresentation::new(generators, relations)
            .map_err(|v| v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qv() -> Arc<SemigroupPresentation> {
        SemigroupPresentation::qv_base()
    }

    #[test]
    fn count_letter_examples() {
        let p = qv();
        let x = p.letter("x").unwrap();
        let a = p.letter("a").unwrap();
        let w = p.word_from_str("xxxaa").unwrap();
        assert_eq!(w.count_letter(a), 2);
        let w = p.word_from_str("xax").unwrap();
        assert_eq!(w.count_letter(x), 2);
        let w = p.word_from_str("a").unwrap();
        assert_eq!(w.count_letter(x), 0);
    }

    #[test]
    fn standard_presentations() {
        let p = qv();
        assert_eq!(p.generators(), &["a".to_string(), "x".to_string()]);
        assert_eq!(p.relations().len(), 1);
        assert_eq!(p.word_string(&p.relations()[0].lhs), "x");
        assert_eq!(p.word_string(&p.relations()[0].rhs), "xax");

        let v = SemigroupPresentation::v_base();
        assert_eq!(v.word_string(&v.relations()[0].rhs), "xx");

        let n2 = SemigroupPresentation::standard(StandardPresentation::NAry(2)).unwrap();
        assert_eq!(n2.word_string(&n2.relations()[0].rhs), "xxa");
        assert!(matches!(
            SemigroupPresentation::standard(StandardPresentation::NAry(1)),
            Err(PresentationViolation::ArityTooSmall { n: 1 })
        ));
    }

    #[test]
    fn validation_reports_violations() {
        let s = |x: &str| x.to_string();
        assert!(SemigroupPresentation::validate(&[s("x")], &[(vec![s("x")], vec![s("x"), s("x")])])
            .is_empty());

        let v = SemigroupPresentation::validate(&[s("x")], &[(vec![s("x")], vec![s("x")])]);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code(), "reflexive_relation");

        let v = SemigroupPresentation::validate(&[s("x")], &[(vec![s("x")], vec![s("y")])]);
        assert_eq!(v[0].code(), "unknown_letter");
    }

    #[test]
    fn standard_presentations_pass_validation() {
        for kind in [
            StandardPresentation::QvBase,
            StandardPresentation::VBase,
            StandardPresentation::NAry(2),
            StandardPresentation::NAry(5),
        ] {
            let p = SemigroupPresentation::standard(kind).unwrap();
            let rels: Vec<_> = p
                .relations()
                .iter()
                .map(|r| {
                    (
                        r.lhs.letters().iter().map(|&l| p.letter_name(l).to_string()).collect(),
                        r.rhs.letters().iter().map(|&l| p.letter_name(l).to_string()).collect(),
                    )
                })
                .collect();
            assert!(SemigroupPresentation::validate(p.generators(), &rels).is_empty());
        }
    }

    #[test]
    fn erased_qv_base_gives_v_base() {
        let p = qv();
        let a = p.letter("a").unwrap();
        let (erased, map) = p.erased(a).unwrap();
        assert_eq!(*erased, *SemigroupPresentation::v_base());
        assert_eq!(map[a.0 as usize], None);
        let x = p.letter("x").unwrap();
        assert_eq!(map[x.0 as usize], erased.letter("x"));
    }

    #[test]
    fn json_round_trip() {
        let p = qv();
        let js = p.to_json();
        assert_eq!(js["generators"], serde_json::json!(["a", "x"]));
        assert_eq!(js["relations"], serde_json::json!([["x", "xax"]]));
        let back = SemigroupPresentation::from_json(&js).unwrap();
        assert_eq!(*back, *p);
    }

    #[test]
    fn letter_counts_sum_to_length() {
        let p = qv();
        let x = p.letter("x").unwrap();
        let a = p.letter("a").unwrap();
        for s in ["x", "a", "xax", "xxaxa", "aaaa", "xaxaxax"] {
            let w = p.word_from_str(s).unwrap();
            assert_eq!(w.count_letter(x) + w.count_letter(a), w.len());
        }
    }
}
