//! Questionnaire documents: the five harm dimensions and the yes/no/unknown
//! questions that define each of them.
//!
//! A questionnaire is versioned data. Organizations extend or localize the
//! built-in document by publishing a new version; question ids are stable
//! human-assigned tokens so that a reworded question keeps its identity.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Schema tag carried by every questionnaire document.
pub const SCHEMA: &str = "fable-questionnaire/1";

const CANONICAL_DOCUMENT: &str = include_str!("../assets/fable-v1.json");

/// One of the five urgency dimensions. `Ord` follows display order F, A, B, L, E.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DimensionId {
    Fragmentation,
    Actionability,
    Believability,
    LikelihoodOfSpread,
    Exploitativeness,
}

impl DimensionId {
    pub const ALL: [DimensionId; 5] = [
        DimensionId::Fragmentation,
        DimensionId::Actionability,
        DimensionId::Believability,
        DimensionId::LikelihoodOfSpread,
        DimensionId::Exploitativeness,
    ];

    /// Position in display order, usable as an array index.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn token(self) -> &'static str {
        match self {
            DimensionId::Fragmentation => "fragmentation",
            DimensionId::Actionability => "actionability",
            DimensionId::Believability => "believability",
            DimensionId::LikelihoodOfSpread => "likelihood_of_spread",
            DimensionId::Exploitativeness => "exploitativeness",
        }
    }

    /// Single-letter column label used in tables.
    pub fn letter(self) -> char {
        match self {
            DimensionId::Fragmentation => 'F',
            DimensionId::Actionability => 'A',
            DimensionId::Believability => 'B',
            DimensionId::LikelihoodOfSpread => 'L',
            DimensionId::Exploitativeness => 'E',
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DimensionId::Fragmentation => "Fragmentation",
            DimensionId::Actionability => "Actionability",
            DimensionId::Believability => "Believability",
            DimensionId::LikelihoodOfSpread => "Likelihood of spread",
            DimensionId::Exploitativeness => "Exploitativeness",
        }
    }
}

impl fmt::Display for DimensionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown dimension {0:?}")]
pub struct UnknownDimension(pub String);

impl FromStr for DimensionId {
    type Err = UnknownDimension;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DimensionId::ALL
            .into_iter()
            .find(|d| d.token() == s)
            .ok_or_else(|| UnknownDimension(s.to_string()))
    }
}

impl Serialize for DimensionId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.token())
    }
}

impl<'de> Deserialize<'de> for DimensionId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let token = String::deserialize(deserializer)?;
        token.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub id: String,
    pub dimension: DimensionId,
    pub text: String,
    pub guidance: Option<String>,
    /// True for the framework's key questions, false for organization additions.
    pub key: bool,
    pub locale: String,
}

/// A validated questionnaire. Construct through [`load_questionnaire`],
/// [`Questionnaire::new`] or [`canonical_fable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Questionnaire {
    version: u32,
    title: String,
    locale: String,
    questions: Vec<Question>,
}

impl Questionnaire {
    pub fn new(
        version: u32,
        title: impl Into<String>,
        locale: impl Into<String>,
        questions: Vec<Question>,
    ) -> Result<Self, QuestionnaireError> {
        let q = Questionnaire {
            version,
            title: title.into(),
            locale: locale.into(),
            questions,
        };
        let violations = q.violations();
        if violations.is_empty() {
            Ok(q)
        } else {
            Err(QuestionnaireError::Invalid(violations))
        }
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn locale(&self) -> &str {
        &self.locale
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn question(&self, id: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.id == id)
    }

    /// Questions of one dimension, in questionnaire order.
    pub fn questions_for(&self, dimension: DimensionId) -> impl Iterator<Item = &Question> {
        self.questions.iter().filter(move |q| q.dimension == dimension)
    }

    pub fn count_for(&self, dimension: DimensionId) -> usize {
        self.questions_for(dimension).count()
    }

    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.version == 0 {
            out.push(Violation::VersionZero);
        }
        let mut seen = HashSet::new();
        for (index, q) in self.questions.iter().enumerate() {
            if q.id.trim().is_empty() {
                out.push(Violation::EmptyId { index });
            } else if !seen.insert(q.id.as_str()) {
                out.push(Violation::DuplicateId { id: q.id.clone() });
            }
            if q.text.trim().is_empty() {
                out.push(Violation::EmptyText { id: q.id.clone() });
            }
        }
        for dimension in DimensionId::ALL {
            if self.count_for(dimension) == 0 {
                out.push(Violation::MissingDimension { dimension });
            }
        }
        out
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("questionnaire serializes")
    }
}

/// One broken rule found while validating a questionnaire document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("version must be at least 1")]
    VersionZero,
    #[error("question #{index} has an empty id")]
    EmptyId { index: usize },
    #[error("question {id:?}: duplicate id")]
    DuplicateId { id: String },
    #[error("question {id:?}: empty text")]
    EmptyText { id: String },
    #[error("question {id:?}: unknown dimension {token:?}")]
    UnknownDimension { id: String, token: String },
    #[error("dimension {dimension} has no questions")]
    MissingDimension { dimension: DimensionId },
}

#[derive(Debug, Error)]
pub enum QuestionnaireError {
    #[error("malformed questionnaire document: {0}")]
    Malformed(String),
    #[error("unsupported questionnaire schema {0:?} (expected {SCHEMA:?})")]
    UnsupportedSchema(String),
    #[error("invalid questionnaire: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("version ordering violated: old version {old} is not below new version {new}")]
    VersionOrder { old: u32, new: u32 },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuestionnaireDoc {
    schema: String,
    version: u32,
    #[serde(default)]
    title: String,
    #[serde(default = "default_locale")]
    locale: String,
    questions: Vec<QuestionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuestionDoc {
    id: String,
    dimension: String,
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    guidance: Option<String>,
    #[serde(default)]
    key: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    locale: Option<String>,
}

fn default_locale() -> String {
    "en".to_string()
}

/// Parses and validates a questionnaire document.
///
/// Defaults: `title` is empty, `locale` is `"en"`, `key` is false, and a
/// question without its own `locale` inherits the document's. Invalid
/// documents are rejected with every violated rule; nothing is repaired.
pub fn load_questionnaire(source: &[u8]) -> Result<Questionnaire, QuestionnaireError> {
    let value: serde_json::Value =
        serde_json::from_slice(source).map_err(|e| QuestionnaireError::Malformed(e.to_string()))?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(SCHEMA) => {}
        Some(other) => return Err(QuestionnaireError::UnsupportedSchema(other.to_string())),
        None => return Err(QuestionnaireError::Malformed("missing field `schema`".into())),
    }
    let doc: QuestionnaireDoc =
        serde_json::from_value(value).map_err(|e| QuestionnaireError::Malformed(e.to_string()))?;
    from_doc(doc)
}

fn from_doc(doc: QuestionnaireDoc) -> Result<Questionnaire, QuestionnaireError> {
    let mut unknown = Vec::new();
    let mut questions = Vec::with_capacity(doc.questions.len());
    for q in doc.questions {
        match q.dimension.parse::<DimensionId>() {
            Ok(dimension) => questions.push(Question {
                id: q.id,
                dimension,
                text: q.text,
                guidance: q.guidance,
                key: q.key,
                locale: q.locale.unwrap_or_else(|| doc.locale.clone()),
            }),
            Err(_) => unknown.push(Violation::UnknownDimension {
                id: q.id,
                token: q.dimension,
            }),
        }
    }
    match Questionnaire::new(doc.version, doc.title, doc.locale, questions) {
        Ok(q) if unknown.is_empty() => Ok(q),
        Ok(_) => Err(QuestionnaireError::Invalid(unknown)),
        Err(QuestionnaireError::Invalid(mut rest)) => {
            unknown.append(&mut rest);
            Err(QuestionnaireError::Invalid(unknown))
        }
        Err(other) => Err(other),
    }
}

impl Serialize for Questionnaire {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let doc = QuestionnaireDoc {
            schema: SCHEMA.to_string(),
            version: self.version,
            title: self.title.clone(),
            locale: self.locale.clone(),
            questions: self
                .questions
                .iter()
                .map(|q| QuestionDoc {
                    id: q.id.clone(),
                    dimension: q.dimension.token().to_string(),
                    text: q.text.clone(),
                    guidance: q.guidance.clone(),
                    key: q.key,
                    locale: (q.locale != self.locale).then(|| q.locale.clone()),
                })
                .collect(),
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Questionnaire {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = QuestionnaireDoc::deserialize(deserializer)?;
        if doc.schema != SCHEMA {
            return Err(serde::de::Error::custom(QuestionnaireError::UnsupportedSchema(doc.schema)));
        }
        from_doc(doc).map_err(serde::de::Error::custom)
    }
}

/// The built-in version-1 questionnaire: the framework's key questions.
pub fn canonical_fable() -> Questionnaire {
    load_questionnaire(CANONICAL_DOCUMENT.as_bytes()).expect("built-in questionnaire is valid")
}

/// The built-in questionnaire document, byte-for-byte as shipped.
pub fn canonical_document() -> &'static str {
    CANONICAL_DOCUMENT
}

/// Question-level differences between two versions of a questionnaire.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChangeSet {
    pub from_version: u32,
    pub to_version: u32,
    /// Questions only present in the new version, in its order.
    pub added: Vec<Question>,
    /// Ids only present in the old version, in its order.
    pub removed: Vec<String>,
    /// New content of questions whose text, guidance, dimension, key flag
    /// or locale changed.
    pub reworded: Vec<Question>,
}

impl ChangeSet {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.reworded.is_empty()
    }

    pub fn added_ids(&self) -> Vec<&str> {
        self.added.iter().map(|q| q.id.as_str()).collect()
    }

    pub fn reworded_ids(&self) -> Vec<&str> {
        self.reworded.iter().map(|q| q.id.as_str()).collect()
    }

    /// Applies the change-set to `base`. Surviving questions keep their
    /// position; added questions go at the end.
    pub fn apply(&self, base: &Questionnaire) -> Result<Questionnaire, QuestionnaireError> {
        let reworded: BTreeMap<&str, &Question> =
            self.reworded.iter().map(|q| (q.id.as_str(), q)).collect();
        let mut questions: Vec<Question> = base
            .questions
            .iter()
            .filter(|q| !self.removed.contains(&q.id))
            .map(|q| reworded.get(q.id.as_str()).map_or_else(|| q.clone(), |r| (*r).clone()))
            .collect();
        questions.extend(self.added.iter().cloned());
        Questionnaire::new(self.to_version, base.title.clone(), base.locale.clone(), questions)
    }
}

pub fn diff_versions(old: &Questionnaire, new: &Questionnaire) -> Result<ChangeSet, QuestionnaireError> {
    if old.version >= new.version {
        return Err(QuestionnaireError::VersionOrder {
            old: old.version,
            new: new.version,
        });
    }
    let mut changes = ChangeSet {
        from_version: old.version,
        to_version: new.version,
        ..ChangeSet::default()
    };
    for q in &new.questions {
        match old.question(&q.id) {
            None => changes.added.push(q.clone()),
            Some(prev) if prev != q => changes.reworded.push(q.clone()),
            Some(_) => {}
        }
    }
    changes.removed = old
        .questions
        .iter()
        .filter(|q| new.question(&q.id).is_none())
        .map(|q| q.id.clone())
        .collect();
    Ok(changes)
}
