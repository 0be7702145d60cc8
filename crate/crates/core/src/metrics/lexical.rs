use std::collections::HashMap;

use thiserror::Error;

use crate::text::tokenize;

const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexicalError {
    #[error("{candidates} candidates but {references} references")]
    LengthMismatch { candidates: usize, references: usize },
}

fn check_lengths(candidates: usize, references: usize) -> Result<(), LexicalError> {
    if candidates == references {
        Ok(())
    } else {
        Err(LexicalError::LengthMismatch {
            candidates,
            references,
        })
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Corpus BLEU-4 with one reference per candidate and no smoothing.
///
/// Clipped n-gram matches and candidate n-gram totals are pooled over the
/// corpus. An order with no candidate n-grams anywhere (every candidate is
/// shorter than n) is left out of the geometric mean; any order with a zero
/// match count makes the score 0.
pub fn bleu<S: AsRef<str>, T: AsRef<str>>(candidates: &[S], references: &[T]) -> Result<f64, LexicalError> {
    check_lengths(candidates.len(), references.len())?;
    let mut matched = [0usize; MAX_ORDER];
    let mut total = [0usize; MAX_ORDER];
    let mut cand_len = 0;
    let mut ref_len = 0;
    for (c, r) in candidates.iter().zip(references) {
        let c = tokenize(c.as_ref());
        let r = tokenize(r.as_ref());
        cand_len += c.len();
        ref_len += r.len();
        for n in 1..=MAX_ORDER {
            let ref_counts = ngram_counts(&r, n);
            for (gram, count) in ngram_counts(&c, n) {
                matched[n - 1] += count.min(ref_counts.get(gram).copied().unwrap_or(0));
                total[n - 1] += count;
            }
        }
    }
    if cand_len == 0 {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    let mut orders = 0;
    for n in 0..MAX_ORDER {
        if total[n] == 0 {
            continue;
        }
        if matched[n] == 0 {
            return Ok(0.0);
        }
        log_sum += (matched[n] as f64 / total[n] as f64).ln();
        orders += 1;
    }
    let bp = if cand_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / cand_len as f64).exp()
    };
    Ok(bp * (log_sum / orders as f64).exp())
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// LCS-based F1 between two texts.
pub fn rouge_l(candidate: &str, reference: &str) -> f64 {
    let c = tokenize(candidate);
    let r = tokenize(reference);
    let lcs = lcs_len(&c, &r);
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / c.len() as f64;
    let rec = lcs as f64 / r.len() as f64;
    2.0 * p * rec / (p + rec)
}

/// Mean of [`rouge_l`] over aligned pairs; 0 for an empty corpus.
pub fn rouge_l_corpus<S: AsRef<str>, T: AsRef<str>>(
    candidates: &[S],
    references: &[T],
) -> Result<f64, LexicalError> {
    check_lengths(candidates.len(), references.len())?;
    if candidates.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = candidates
        .iter()
        .zip(references)
        .map(|(c, r)| rouge_l(c.as_ref(), r.as_ref()))
        .sum();
    Ok(sum / candidates.len() as f64)
}
