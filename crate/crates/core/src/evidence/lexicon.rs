use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DiagnosisSet, EvidenceAssignment};
use crate::kb::{AtomKind, Ontology};
use crate::logic::AtomId;
use crate::text::{sentences, tokenize};

pub const DEFAULT_NEGATION_WINDOW: usize = 5;

pub const DEFAULT_NEGATION_CUES: &[&str] = &[
    "no",
    "not",
    "without",
    "absent",
    "negative for",
    "free of",
    "resolved",
];

/// Cues that make a mention underspecified; treated like negation.
pub const DEFAULT_HEDGE_CUES: &[&str] = &[
    "possible",
    "possibly",
    "probable",
    "probably",
    "likely",
    "questionable",
    "cannot exclude",
    "may",
    "might",
    "suspicious for",
    "concerning for",
];

/// On-disk lexicon (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconSpec {
    #[serde(default = "default_negation_cues")]
    pub negation_cues: Vec<String>,
    #[serde(default = "default_window")]
    pub negation_window: usize,
    #[serde(default = "default_hedge_cues")]
    pub hedge_cues: Vec<String>,
    #[serde(default)]
    pub findings: IndexMap<String, Vec<String>>,
    #[serde(default)]
    pub diagnoses: IndexMap<String, Vec<String>>,
}

fn default_negation_cues() -> Vec<String> {
    DEFAULT_NEGATION_CUES.iter().map(|s| s.to_string()).collect()
}

fn default_hedge_cues() -> Vec<String> {
    DEFAULT_HEDGE_CUES.iter().map(|s| s.to_string()).collect()
}

fn default_window() -> usize {
    DEFAULT_NEGATION_WINDOW
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("invalid lexicon JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("lexicon {section} entry `{name}` is not a declared {section} atom")]
    UnknownPredicate { section: &'static str, name: String },
    #[error("lexicon entry `{name}` has a phrase with no tokens")]
    EmptyPhrase { name: String },
    #[error("lexicon cue `{cue}` has no tokens")]
    EmptyCue { cue: String },
}

type Phrase = Vec<String>;

/// A lexicon bound to an ontology, with every phrase and cue pre-tokenized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    cues: Vec<Phrase>,
    window: usize,
    findings: Vec<(AtomId, Vec<Phrase>)>,
    diagnoses: Vec<(AtomId, Vec<Phrase>)>,
}

impl Lexicon {
    pub fn from_json(text: &str, ontology: &Ontology) -> Result<Self, LexiconError> {
        let spec: LexiconSpec = serde_json::from_str(text)?;
        Self::new(&spec, ontology)
    }

    pub fn new(spec: &LexiconSpec, ontology: &Ontology) -> Result<Self, LexiconError> {
        let mut cues = Vec::new();
        for cue in spec.negation_cues.iter().chain(&spec.hedge_cues) {
            let toks = tokenize(cue);
            if toks.is_empty() {
                return Err(LexiconError::EmptyCue { cue: cue.clone() });
            }
            cues.push(toks);
        }
        let section = |entries: &IndexMap<String, Vec<String>>,
                       kind: AtomKind,
                       label: &'static str|
         -> Result<Vec<(AtomId, Vec<Phrase>)>, LexiconError> {
            let mut out = Vec::new();
            for (name, phrases) in entries {
                let id = ontology
                    .lookup_kind(name, kind)
                    .ok_or_else(|| LexiconError::UnknownPredicate {
                        section: label,
                        name: name.clone(),
                    })?;
                let mut toks = Vec::with_capacity(phrases.len());
                for p in phrases {
                    let t = tokenize(p);
                    if t.is_empty() {
                        return Err(LexiconError::EmptyPhrase { name: name.clone() });
                    }
                    toks.push(t);
                }
                out.push((id, toks));
            }
            out.sort_by_key(|(id, _)| *id);
            Ok(out)
        };
        Ok(Lexicon {
            cues,
            window: spec.negation_window,
            findings: section(&spec.findings, AtomKind::Finding, "finding")?,
            diagnoses: section(&spec.diagnoses, AtomKind::Diagnosis, "diagnosis")?,
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    fn affirmed<'a>(
        &'a self,
        text: &str,
        entries: &'a [(AtomId, Vec<Phrase>)],
    ) -> impl Iterator<Item = AtomId> + 'a {
        let sents: Vec<Vec<String>> = sentences(text).map(tokenize).collect();
        entries
            .iter()
            .filter(move |(_, phrases)| {
                sents
                    .iter()
                    .any(|toks| phrases.iter().any(|p| self.affirmed_in(toks, p)))
            })
            .map(|(id, _)| *id)
    }

    /// Some occurrence of `phrase` in `tokens` has no cue ending inside the
    /// `window` tokens before it.
    fn affirmed_in(&self, tokens: &[String], phrase: &[String]) -> bool {
        if phrase.len() > tokens.len() {
            return false;
        }
        (0..=tokens.len() - phrase.len())
            .filter(|&s| tokens[s..s + phrase.len()] == *phrase)
            .any(|s| !self.cued_before(tokens, s))
    }

    fn cued_before(&self, tokens: &[String], start: usize) -> bool {
        let lo = start.saturating_sub(self.window);
        self.cues.iter().any(|cue| {
            cue.len() <= start - lo && (lo..=start - cue.len()).any(|c| tokens[c..c + cue.len()] == *cue)
        })
    }
}

/// Findings explicitly affirmed in `text`; everything else is absent.
pub fn extract_findings(text: &str, lexicon: &Lexicon, ontology: &Ontology) -> EvidenceAssignment {
    let mut v = EvidenceAssignment::absent(ontology);
    for id in lexicon.affirmed(text, &lexicon.findings) {
        v.affirm(ontology, id);
    }
    v
}

/// Diagnoses affirmed in `text`, with the same matching rules as findings.
pub fn extract_diagnoses(text: &str, lexicon: &Lexicon, _ontology: &Ontology) -> DiagnosisSet {
    lexicon.affirmed(text, &lexicon.diagnoses).collect()
}
