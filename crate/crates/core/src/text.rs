//! Tokenization shared by the lexicon matcher and the lexical metrics.

/// Lower-cases `text` and splits it into maximal alphanumeric runs; all
/// whitespace and punctuation act as separators.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Sentence boundaries for negation scoping: `.`, `;` and newlines.
pub fn sentences(text: &str) -> impl Iterator<Item = &str> {
    text.split(['.', ';', '\n']).filter(|s| !s.trim().is_empty())
}
