//! Text preprocessing, vocabulary construction, metadata encoding, and
//! dataset splitting.
//!
//! Tokenization rule, applied in order: split on whitespace, lowercase,
//! delete every character that is not Unicode-alphanumeric (so "cat's"
//! becomes "cats"), drop tokens containing any numeric character, drop
//! tokens shorter than 3 characters, drop stopwords. The stopword file is
//! normalized with the same character deletion when loaded, so an entry
//! like "don't" matches the stripped token "dont".

pub mod io;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::SeededRng;

/// Dense word-id assignment, ranked by document frequency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn from_words(words: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate vocabulary word '{w}'")));
            }
        }
        Ok(Vocabulary { words, index })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// FNV-1a over the words joined by newlines; stored in checkpoints so a
    /// model is never applied against the wrong vocabulary.
    pub fn hash(&self) -> u64 {
        let joined = self.words.join("\n");
        crate::numkit::fnv1a(joined.as_bytes())
    }
}

/// One bag-of-words document with optional metadata. Counts are stored
/// sparsely as (word id, count) pairs sorted by word id.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub counts: Vec<(u32, u32)>,
    pub n_tokens: u32,
    /// Index into the corpus label names; encodes a one-hot vector.
    pub label: Option<usize>,
    /// Length-C covariate vector; `None` means absent (treated as zeros).
    pub covariates: Option<Vec<f64>>,
}

impl Document {
    pub fn dense_counts(&self, v: usize) -> Vec<f64> {
        let mut out = vec![0.0; v];
        for &(w, c) in &self.counts {
            out[w as usize] = c as f64;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub vocabulary: Vocabulary,
    pub documents: Vec<Document>,
    pub label_names: Vec<String>,
    pub covariate_names: Vec<String>,
}

impl Corpus {
    pub fn n_docs(&self) -> usize {
        self.documents.len()
    }

    pub fn v(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn l(&self) -> usize {
        self.label_names.len()
    }

    pub fn c(&self) -> usize {
        self.covariate_names.len()
    }

    pub fn total_tokens(&self) -> u64 {
        self.documents.iter().map(|d| d.n_tokens as u64).sum()
    }

    /// Empirical word frequencies over the whole corpus, summing to one.
    pub fn word_frequencies(&self) -> Vec<f64> {
        let mut counts = vec![0.0f64; self.v()];
        for doc in &self.documents {
            for &(w, c) in &doc.counts {
                counts[w as usize] += c as f64;
            }
        }
        let total: f64 = counts.iter().sum();
        if total > 0.0 {
            for c in counts.iter_mut() {
                *c /= total;
            }
        }
        counts
    }
}

/// How a covariate field turns into columns of the covariate vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovariateEncoding {
    /// One column per distinct value, named `field=value`.
    OneHot,
    /// A single column holding the record's numeric value, which must be
    /// nonnegative.
    PassthroughReal,
}

/// Which record fields carry metadata and how to encode them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetadataSchema {
    pub label_field: Option<String>,
    pub covariate_fields: Vec<String>,
    pub covariate_encoding: BTreeMap<String, CovariateEncoding>,
}

impl MetadataSchema {
    pub fn encoding_for(&self, field: &str) -> CovariateEncoding {
        self.covariate_encoding
            .get(field)
            .copied()
            .unwrap_or(CovariateEncoding::OneHot)
    }
}

/// Schema plus the value dictionaries discovered from the input records;
/// everything `encode_document` needs.
#[derive(Debug, Clone, PartialEq)]
pub struct MetadataCodec {
    pub schema: MetadataSchema,
    pub label_values: Vec<String>,
    /// Per one-hot covariate field: sorted distinct values.
    pub onehot_values: BTreeMap<String, Vec<String>>,
    pub covariate_names: Vec<String>,
}

impl MetadataCodec {
    /// Scans all records for the distinct label and covariate values named
    /// by the schema. Values are sorted for a deterministic column order.
    pub fn build(schema: &MetadataSchema, records: &[InputRecord]) -> Result<Self> {
        let mut label_values = BTreeSet::new();
        let mut onehot: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for record in records {
            if let Some(field) = &schema.label_field {
                label_values.insert(record.metadata_string(field)?);
            }
            for field in &schema.covariate_fields {
                match schema.encoding_for(field) {
                    CovariateEncoding::OneHot => {
                        onehot
                            .entry(field.clone())
                            .or_default()
                            .insert(record.metadata_string(field)?);
                    }
                    CovariateEncoding::PassthroughReal => {
                        record.metadata_number(field)?;
                    }
                }
            }
        }
        let onehot_values: BTreeMap<String, Vec<String>> = onehot
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().collect()))
            .collect();
        let mut covariate_names = Vec::new();
        for field in &schema.covariate_fields {
            match schema.encoding_for(field) {
                CovariateEncoding::OneHot => {
                    for value in onehot_values.get(field).into_iter().flatten() {
                        covariate_names.push(format!("{field}={value}"));
                    }
                }
                CovariateEncoding::PassthroughReal => covariate_names.push(field.clone()),
            }
        }
        Ok(MetadataCodec {
            schema: schema.clone(),
            label_values: label_values.into_iter().collect(),
            onehot_values,
            covariate_names,
        })
    }

    /// True when the covariate vector is exactly the one-hot encoding of a
    /// single categorical field, which is what conditional label prediction
    /// requires.
    pub fn single_categorical_covariate(&self) -> bool {
        self.schema.covariate_fields.len() == 1
            && self.schema.covariate_fields.iter().all(|f| {
                matches!(self.schema.encoding_for(f), CovariateEncoding::OneHot)
            })
    }
}

/// One parsed input record, either raw text or pre-tokenized.
#[derive(Debug, Clone, PartialEq)]
pub struct InputRecord {
    pub id: String,
    pub text: Option<String>,
    pub tokens: Option<Vec<String>>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl InputRecord {
    pub fn metadata_string(&self, field: &str) -> Result<String> {
        let value = self.metadata.get(field).ok_or_else(|| Error::MissingField {
            field: field.to_string(),
            id: self.id.clone(),
        })?;
        Ok(match value {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }

    pub fn metadata_number(&self, field: &str) -> Result<f64> {
        let value = self.metadata.get(field).ok_or_else(|| Error::MissingField {
            field: field.to_string(),
            id: self.id.clone(),
        })?;
        let number = value.as_f64().ok_or_else(|| {
            Error::Invalid(format!(
                "field '{field}' of record {} is not a number",
                self.id
            ))
        })?;
        if !number.is_finite() || number < 0.0 {
            return Err(Error::Invalid(format!(
                "field '{field}' of record {} must be a nonnegative finite number",
                self.id
            )));
        }
        Ok(number)
    }
}

/// Stopword set, normalized with the tokenizer's character deletion rule.
#[derive(Debug, Clone, Default)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    /// The English list shipped with the crate.
    pub fn default_english() -> Self {
        StopwordList::from_text(include_str!("../../data/stopwords_english.txt"))
    }

    pub fn from_text(text: &str) -> Self {
        let words = text
            .lines()
            .map(|line| strip_token(&line.trim().to_lowercase()))
            .filter(|w| !w.is_empty())
            .collect();
        StopwordList { words }
    }

    pub fn empty() -> Self {
        StopwordList::default()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn strip_token(token: &str) -> String {
    token.chars().filter(|c| c.is_alphanumeric()).collect()
}

fn keep_token(token: &str, stopwords: &StopwordList) -> bool {
    !token.chars().any(char::is_numeric)
        && token.chars().count() >= 3
        && !stopwords.contains(token)
}

/// Lowercase, strip, and filter the whitespace-separated tokens of `text`.
pub fn tokenize(text: &str, stopwords: &StopwordList) -> Vec<String> {
    text.split_whitespace()
        .map(|raw| strip_token(&raw.to_lowercase()))
        .filter(|t| !t.is_empty() && keep_token(t, stopwords))
        .collect()
}

/// Filter already-tokenized input: the digit/length/stopword rules still
/// apply, but tokens are not lowercased or stripped.
pub fn filter_tokens(tokens: &[String], stopwords: &StopwordList) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !t.is_empty() && keep_token(t, stopwords))
        .cloned()
        .collect()
}

/// Ranks words by document frequency (descending, ties alphabetical) and
/// keeps the top `max_size`.
pub fn build_vocab(token_lists: &[Vec<String>], max_size: usize) -> Result<Vocabulary> {
    if max_size == 0 {
        return Err(Error::Config("vocabulary size must be positive".into()));
    }
    let mut doc_freq: HashMap<&str, u64> = HashMap::new();
    for tokens in token_lists {
        let distinct: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
        for word in distinct {
            *doc_freq.entry(word).or_insert(0) += 1;
        }
    }
    if doc_freq.is_empty() {
        return Err(Error::Invalid(
            "no tokens survive preprocessing; vocabulary would be empty".into(),
        ));
    }
    let mut ranked: Vec<(&str, u64)> = doc_freq.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(max_size);
    Vocabulary::from_words(ranked.into_iter().map(|(w, _)| w.to_string()).collect())
}

/// Counts in-vocabulary tokens and encodes the record's metadata. A document
/// whose tokens are all out of vocabulary is rejected with
/// [`Error::EmptyDocument`] so the caller can drop it with a warning.
pub fn encode_document(
    tokens: &[String],
    vocab: &Vocabulary,
    record: &InputRecord,
    codec: &MetadataCodec,
) -> Result<Document> {
    if vocab.is_empty() {
        return Err(Error::Config("cannot encode against an empty vocabulary".into()));
    }
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for token in tokens {
        if let Some(id) = vocab.id(token) {
            *counts.entry(id as u32).or_insert(0) += 1;
        }
    }
    let n_tokens: u32 = counts.values().sum();
    if n_tokens == 0 {
        return Err(Error::EmptyDocument {
            id: record.id.clone(),
        });
    }

    let label = match &codec.schema.label_field {
        Some(field) => {
            let value = record.metadata_string(field)?;
            let idx = codec
                .label_values
                .iter()
                .position(|v| *v == value)
                .ok_or_else(|| {
                    Error::Invalid(format!("unknown label value '{value}' in record {}", record.id))
                })?;
            Some(idx)
        }
        None => None,
    };

    let covariates = if codec.covariate_names.is_empty() {
        None
    } else {
        let mut vector = Vec::with_capacity(codec.covariate_names.len());
        for field in &codec.schema.covariate_fields {
            match codec.schema.encoding_for(field) {
                CovariateEncoding::OneHot => {
                    let value = record.metadata_string(field)?;
                    let values = &codec.onehot_values[field];
                    let pos = values.iter().position(|v| *v == value).ok_or_else(|| {
                        Error::Invalid(format!(
                            "unknown value '{value}' for covariate field '{field}' in record {}",
                            record.id
                        ))
                    })?;
                    for i in 0..values.len() {
                        vector.push(if i == pos { 1.0 } else { 0.0 });
                    }
                }
                CovariateEncoding::PassthroughReal => vector.push(record.metadata_number(field)?),
            }
        }
        Some(vector)
    };

    Ok(Document {
        id: record.id.clone(),
        counts: counts.into_iter().collect(),
        n_tokens,
        label,
        covariates,
    })
}

/// Splits documents into disjoint train/dev/test corpora sharing the
/// vocabulary. Sizes follow largest-remainder rounding of the fractions;
/// assignment shuffles the documents with the seeded generator.
pub fn split_corpus(
    corpus: &Corpus,
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<(Corpus, Corpus, Corpus)> {
    let fr = [fractions.0, fractions.1, fractions.2];
    if fr.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(Error::Config("split fractions must be nonnegative".into()));
    }
    let total: f64 = fr.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "split fractions must sum to 1, got {total}"
        )));
    }
    let d = corpus.n_docs();
    let sizes = largest_remainder_sizes(&fr, d);
    let names = ["train", "dev", "test"];
    for (size, name) in sizes.iter().zip(names) {
        if *size == 0 {
            return Err(Error::Invalid(format!("empty {name} split")));
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let mut rng = SeededRng::new(seed);
    rng.shuffle(&mut order);

    let take = |range: std::ops::Range<usize>| Corpus {
        vocabulary: corpus.vocabulary.clone(),
        documents: order[range]
            .iter()
            .map(|&i| corpus.documents[i].clone())
            .collect(),
        label_names: corpus.label_names.clone(),
        covariate_names: corpus.covariate_names.clone(),
    };

    let a = sizes[0];
    let b = sizes[0] + sizes[1];
    Ok((take(0..a), take(a..b), take(b..d)))
}

fn largest_remainder_sizes(fractions: &[f64; 3], total: usize) -> [usize; 3] {
    let exact: Vec<f64> = fractions.iter().map(|f| f * total as f64).collect();
    let mut sizes = [0usize; 3];
    for (s, e) in sizes.iter_mut().zip(&exact) {
        *s = e.floor() as usize;
    }
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for i in 0..(total - assigned) {
        sizes[order[i % 3]] += 1;
    }
    sizes
}

/// Tokenized input plus its source record, ready for encoding.
pub struct PreparedRecord {
    pub record: InputRecord,
    pub tokens: Vec<String>,
}

/// Tokenizes (or filters pre-tokenized) records.
pub fn prepare_records(records: Vec<InputRecord>, stopwords: &StopwordList) -> Vec<PreparedRecord> {
    records
        .into_iter()
        .map(|record| {
            let tokens = match (&record.tokens, &record.text) {
                (Some(tokens), _) => filter_tokens(tokens, stopwords),
                (None, Some(text)) => tokenize(text, stopwords),
                (None, None) => Vec::new(),
            };
            PreparedRecord { record, tokens }
        })
        .collect()
}

/// Result of building a corpus: the corpus itself plus the ids of documents
/// dropped because no token survived.
pub struct CorpusBuild {
    pub corpus: Corpus,
    pub dropped: Vec<String>,
}

/// Full preprocessing pipeline: tokenize, build the vocabulary over all
/// provided documents, resolve the metadata dictionaries, and encode every
/// document. Documents left without in-vocabulary tokens are dropped and
/// reported.
pub fn build_corpus(
    records: Vec<InputRecord>,
    schema: &MetadataSchema,
    stopwords: &StopwordList,
    max_vocab: usize,
) -> Result<CorpusBuild> {
    let prepared = prepare_records(records, stopwords);
    let token_lists: Vec<Vec<String>> = prepared.iter().map(|p| p.tokens.clone()).collect();
    let vocabulary = build_vocab(&token_lists, max_vocab)?;
    let codec = MetadataCodec::build(
        schema,
        &prepared.iter().map(|p| p.record.clone()).collect::<Vec<_>>(),
    )?;

    let mut documents = Vec::with_capacity(prepared.len());
    let mut dropped = Vec::new();
    for p in &prepared {
        match encode_document(&p.tokens, &vocabulary, &p.record, &codec) {
            Ok(doc) => documents.push(doc),
            Err(Error::EmptyDocument { id }) => dropped.push(id),
            Err(e) => return Err(e),
        }
    }
    Ok(CorpusBuild {
        corpus: Corpus {
            vocabulary,
            documents,
            label_names: codec.label_values.clone(),
            covariate_names: codec.covariate_names.clone(),
        },
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(id: &str, fields: &[(&str, serde_json::Value)]) -> InputRecord {
        InputRecord {
            id: id.to_string(),
            text: None,
            tokens: None,
            metadata: fields
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        }
    }

    #[test]
    fn tokenize_drops_stopwords_digits_and_short_tokens() {
        let sw = StopwordList::default_english();
        assert_eq!(tokenize("The 3 big cats ran.", &sw), vec!["big", "cats", "ran"]);
    }

    #[test]
    fn tokenize_empty_input() {
        let sw = StopwordList::default_english();
        assert!(tokenize("", &sw).is_empty());
    }

    #[test]
    fn tokenize_strips_apostrophes_against_shipped_list() {
        // "don't" normalizes to "dont", which the shipped list contains;
        // "stop" and "believin" are not stopwords.
        let sw = StopwordList::default_english();
        assert_eq!(
            tokenize("Don't STOP believin'", &sw),
            vec!["stop", "believin"]
        );
    }

    #[test]
    fn vocab_ranked_by_document_frequency() {
        let lists = vec![
            vec!["a-word".to_string(), "b-word".to_string()],
            vec!["a-word".to_string()],
        ];
        let vocab = build_vocab(&lists, 1).unwrap();
        assert_eq!(vocab.words(), &["a-word".to_string()]);
    }

    #[test]
    fn vocab_ties_break_alphabetically() {
        let lists = vec![vec!["yyy".to_string()], vec!["xxx".to_string()]];
        let vocab = build_vocab(&lists, 2).unwrap();
        assert_eq!(vocab.words(), &["xxx".to_string(), "yyy".to_string()]);
    }

    #[test]
    fn vocab_truncates_to_max_size() {
        let lists: Vec<Vec<String>> = (0..10).map(|i| vec![format!("word{i:02}")]).collect();
        let vocab = build_vocab(&lists, 5).unwrap();
        assert_eq!(vocab.len(), 5);
    }

    #[test]
    fn vocab_empty_input_errors() {
        assert!(build_vocab(&[vec![]], 5).is_err());
    }

    #[test]
    fn encode_counts_and_drops_oov() {
        let vocab = Vocabulary::from_words(vec!["big".into(), "cats".into(), "ran".into()]).unwrap();
        let codec = MetadataCodec::build(&MetadataSchema::default(), &[]).unwrap();
        let tokens = vec!["big".to_string(), "big".to_string(), "ran".to_string()];
        let doc = encode_document(&tokens, &vocab, &record("d0", &[]), &codec).unwrap();
        assert_eq!(doc.dense_counts(3), vec![2.0, 0.0, 1.0]);
        assert_eq!(doc.n_tokens, 3);
    }

    #[test]
    fn encode_rejects_all_oov() {
        let vocab = Vocabulary::from_words(vec!["big".into()]).unwrap();
        let codec = MetadataCodec::build(&MetadataSchema::default(), &[]).unwrap();
        let tokens = vec!["unknown".to_string()];
        let err = encode_document(&tokens, &vocab, &record("d1", &[]), &codec).unwrap_err();
        assert!(matches!(err, Error::EmptyDocument { .. }));
    }

    #[test]
    fn encode_one_hot_label() {
        let vocab = Vocabulary::from_words(vec!["word".into()]).unwrap();
        let schema = MetadataSchema {
            label_field: Some("tone".into()),
            ..Default::default()
        };
        let records = vec![
            record("a", &[("tone", "anti".into())]),
            record("b", &[("tone", "pro".into())]),
        ];
        let codec = MetadataCodec::build(&schema, &records).unwrap();
        assert_eq!(codec.label_values, vec!["anti".to_string(), "pro".to_string()]);
        let tokens = vec!["word".to_string()];
        let doc = encode_document(&tokens, &vocab, &records[1], &codec).unwrap();
        assert_eq!(doc.label, Some(1));
    }

    fn tiny_corpus(n: usize) -> Corpus {
        let vocab = Vocabulary::from_words(vec!["word".into()]).unwrap();
        let documents = (0..n)
            .map(|i| Document {
                id: format!("d{i}"),
                counts: vec![(0, 1)],
                n_tokens: 1,
                label: None,
                covariates: None,
            })
            .collect();
        Corpus {
            vocabulary: vocab,
            documents,
            label_names: vec![],
            covariate_names: vec![],
        }
    }

    #[test]
    fn split_sizes_largest_remainder() {
        let corpus = tiny_corpus(10);
        let (train, dev, test) = split_corpus(&corpus, (0.8, 0.1, 0.1), 7).unwrap();
        assert_eq!((train.n_docs(), dev.n_docs(), test.n_docs()), (8, 1, 1));
    }

    #[test]
    fn split_is_deterministic() {
        let corpus = tiny_corpus(10);
        let (a1, b1, c1) = split_corpus(&corpus, (0.6, 0.2, 0.2), 9).unwrap();
        let (a2, b2, c2) = split_corpus(&corpus, (0.6, 0.2, 0.2), 9).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
        assert_eq!(c1, c2);
    }

    #[test]
    fn split_rejects_empty_split() {
        let corpus = tiny_corpus(10);
        let err = split_corpus(&corpus, (0.5, 0.5, 0.0), 1).unwrap_err();
        assert!(err.to_string().contains("empty test split"));
    }

    #[test]
    fn split_is_a_disjoint_cover() {
        let corpus = tiny_corpus(23);
        let (a, b, c) = split_corpus(&corpus, (0.7, 0.15, 0.15), 3).unwrap();
        let mut ids: Vec<&str> = a
            .documents
            .iter()
            .chain(&b.documents)
            .chain(&c.documents)
            .map(|d| d.id.as_str())
            .collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 23);
    }

    proptest! {
        #[test]
        fn tokenize_is_idempotent(text in ".{0,200}") {
            let sw = StopwordList::default_english();
            let once = tokenize(&text, &sw);
            let again = tokenize(&once.join(" "), &sw);
            prop_assert_eq!(once, again);
        }

        #[test]
        fn vocab_invariant_to_document_order(seed in 0u64..500) {
            let lists: Vec<Vec<String>> = vec![
                vec!["alpha".into(), "beta".into()],
                vec!["beta".into(), "gamma".into()],
                vec!["gamma".into()],
                vec!["delta".into(), "alpha".into(), "beta".into()],
            ];
            let mut shuffled = lists.clone();
            let mut rng = SeededRng::new(seed);
            rng.shuffle(&mut shuffled);
            let a = build_vocab(&lists, 3).unwrap();
            let b = build_vocab(&shuffled, 3).unwrap();
            prop_assert_eq!(a.words(), b.words());
        }

        #[test]
        fn encoded_counts_sum_to_in_vocab_tokens(tokens in proptest::collection::vec("[a-f]{3,5}", 1..30)) {
            let vocab = Vocabulary::from_words(vec!["abc".into(), "def".into(), "fed".into()]).unwrap();
            let codec = MetadataCodec::build(&MetadataSchema::default(), &[]).unwrap();
            let rec = record("p", &[]);
            let in_vocab = tokens.iter().filter(|t| vocab.id(t).is_some()).count() as u32;
            match encode_document(&tokens, &vocab, &rec, &codec) {
                Ok(doc) => {
                    prop_assert_eq!(doc.n_tokens, in_vocab);
                    let total: u32 = doc.counts.iter().map(|&(_, c)| c).sum();
                    prop_assert_eq!(total, doc.n_tokens);
                }
                Err(Error::EmptyDocument { .. }) => prop_assert_eq!(in_vocab, 0),
                Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
            }
        }
    }
}
