//! Corpus file formats.
//!
//! Input is JSON-lines: one object per line with an `"id"` string, either
//! `"text"` (raw) or `"tokens"` (pre-tokenized, bypasses normalization), and
//! arbitrary further fields available to the metadata schema.
//!
//! A processed corpus is a directory:
//! - `vocab.txt` - one word per line, rank order;
//! - `counts.txt` - sparse triplets `doc_index word_index count`, one per line;
//! - `labels.tsv` - header `id` + one column per label name, 0/1 cells;
//! - `covariates.tsv` - header `id` + one column per covariate name;
//! - `manifest.json` - dimensions, schema, and the preprocessing seed.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, InputRecord, MetadataSchema, StopwordList, Vocabulary};
use crate::error::{Error, Result};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub d: usize,
    pub v: usize,
    pub l: usize,
    pub c: usize,
    pub seed: u64,
    pub schema: MetadataSchema,
}

/// Parses one JSON-lines record. `"id"` must be a string; `"text"` and
/// `"tokens"` are consumed when present; all other fields become metadata.
pub fn parse_jsonl_record(line: &str) -> Result<InputRecord> {
    let value: serde_json::Value = serde_json::from_str(line)
        .map_err(|e| Error::Invalid(format!("invalid JSON record: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Invalid("record is not a JSON object".into()))?;
    let id = obj
        .get("id")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Invalid("record is missing a string \"id\"".into()))?
        .to_string();
    let text = match obj.get("text") {
        None => None,
        Some(serde_json::Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(Error::Invalid(format!("\"text\" of record {id} is not a string"))),
    };
    let tokens = match obj.get("tokens") {
        None => None,
        Some(serde_json::Value::Array(items)) => {
            let mut out = Vec::with_capacity(items.len());
            for item in items {
                match item.as_str() {
                    Some(s) => out.push(s.to_string()),
                    None => {
                        return Err(Error::Invalid(format!(
                            "\"tokens\" of record {id} contains a non-string entry"
                        )))
                    }
                }
            }
            Some(out)
        }
        Some(_) => {
            return Err(Error::Invalid(format!(
                "\"tokens\" of record {id} is not an array"
            )))
        }
    };
    let metadata: BTreeMap<String, serde_json::Value> = obj
        .iter()
        .filter(|(k, _)| k.as_str() != "id" && k.as_str() != "text" && k.as_str() != "tokens")
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Ok(InputRecord {
        id,
        text,
        tokens,
        metadata,
    })
}

pub fn read_jsonl(path: &Path) -> Result<Vec<InputRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record =
            parse_jsonl_record(line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        records.push(record);
    }
    Ok(records)
}

/// Reads and tokenizes a JSON-lines file into bare token lists, e.g. a
/// reference corpus for external coherence.
pub fn read_token_corpus(path: &Path, stopwords: &StopwordList) -> Result<Vec<Vec<String>>> {
    let records = read_jsonl(path)?;
    Ok(crate::corpus::prepare_records(records, stopwords)
        .into_iter()
        .map(|p| p.tokens)
        .collect())
}

pub fn save_corpus(dir: &Path, corpus: &Corpus, schema: &MetadataSchema, seed: u64) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let vocab_path = dir.join("vocab.txt");
    let mut vocab_text = String::new();
    for word in corpus.vocabulary.words() {
        vocab_text.push_str(word);
        vocab_text.push('\n');
    }
    fs::write(&vocab_path, vocab_text).map_err(|e| Error::io(&vocab_path, e))?;

    let counts_path = dir.join("counts.txt");
    let mut counts_text = String::new();
    for (i, doc) in corpus.documents.iter().enumerate() {
        for &(w, c) in &doc.counts {
            counts_text.push_str(&format!("{i} {w} {c}\n"));
        }
    }
    fs::write(&counts_path, counts_text).map_err(|e| Error::io(&counts_path, e))?;

    let labels_path = dir.join("labels.tsv");
    let mut labels_text = String::from("id");
    for name in &corpus.label_names {
        labels_text.push('\t');
        labels_text.push_str(name);
    }
    labels_text.push('\n');
    for doc in &corpus.documents {
        labels_text.push_str(&doc.id);
        for l in 0..corpus.l() {
            labels_text.push('\t');
            labels_text.push(if doc.label == Some(l) { '1' } else { '0' });
        }
        labels_text.push('\n');
    }
    fs::write(&labels_path, labels_text).map_err(|e| Error::io(&labels_path, e))?;

    let cov_path = dir.join("covariates.tsv");
    let mut cov_text = String::from("id");
    for name in &corpus.covariate_names {
        cov_text.push('\t');
        cov_text.push_str(name);
    }
    cov_text.push('\n');
    for doc in &corpus.documents {
        cov_text.push_str(&doc.id);
        for j in 0..corpus.c() {
            cov_text.push('\t');
            let value = doc.covariates.as_ref().map_or(0.0, |c| c[j]);
            cov_text.push_str(&format!("{value}"));
        }
        cov_text.push('\n');
    }
    fs::write(&cov_path, cov_text).map_err(|e| Error::io(&cov_path, e))?;

    let manifest = Manifest {
        format_version: MANIFEST_VERSION,
        d: corpus.n_docs(),
        v: corpus.v(),
        l: corpus.l(),
        c: corpus.c(),
        seed,
        schema: schema.clone(),
    };
    let manifest_path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Invalid(format!("manifest serialization failed: {e}")))?;
    fs::write(&manifest_path, json + "\n").map_err(|e| Error::io(&manifest_path, e))?;
    Ok(())
}

pub fn parse_manifest(text: &str) -> Result<Manifest> {
    let manifest: Manifest = serde_json::from_str(text)
        .map_err(|e| Error::Invalid(format!("invalid manifest: {e}")))?;
    if manifest.format_version != MANIFEST_VERSION {
        return Err(Error::Invalid(format!(
            "unsupported manifest version {}",
            manifest.format_version
        )));
    }
    Ok(manifest)
}

/// Parses `counts.txt` triplets into per-document sparse counts.
pub fn parse_counts(text: &str, d: usize, v: usize) -> Result<Vec<Vec<(u32, u32)>>> {
    let mut docs: Vec<BTreeMap<u32, u32>> = vec![BTreeMap::new(); d];
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_ascii_whitespace();
        let (doc, word, count) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c), None) => (a, b, c),
            _ => {
                return Err(Error::Invalid(format!(
                    "counts line {} is not a doc/word/count triplet",
                    i + 1
                )))
            }
        };
        let doc: usize = doc
            .parse()
            .map_err(|_| Error::Invalid(format!("bad doc index on counts line {}", i + 1)))?;
        let word: u32 = word
            .parse()
            .map_err(|_| Error::Invalid(format!("bad word index on counts line {}", i + 1)))?;
        let count: u32 = count
            .parse()
            .map_err(|_| Error::Invalid(format!("bad count on counts line {}", i + 1)))?;
        if doc >= d || word as usize >= v {
            return Err(Error::Invalid(format!(
                "counts line {} out of range (doc {doc}, word {word})",
                i + 1
            )));
        }
        if count == 0 {
            return Err(Error::Invalid(format!("zero count on counts line {}", i + 1)));
        }
        let entry = docs[doc].entry(word).or_insert(0);
        *entry = entry
            .checked_add(count)
            .ok_or_else(|| Error::Invalid(format!("count overflow on counts line {}", i + 1)))?;
    }
    Ok(docs.into_iter().map(|m| m.into_iter().collect()).collect())
}

/// Parses a TSV with an `id` header column followed by named numeric
/// columns. Returns the names and per-row (id, values).
fn parse_numeric_tsv(text: &str, what: &str) -> Result<(Vec<String>, Vec<(String, Vec<f64>)>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Invalid(format!("{what} file is empty")))?;
    let mut cols = header.split('\t');
    if cols.next() != Some("id") {
        return Err(Error::Invalid(format!("{what} header must start with 'id'")));
    }
    let names: Vec<String> = cols.map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let id = parts
            .next()
            .ok_or_else(|| Error::Invalid(format!("{what} row {} has no id", i + 2)))?
            .to_string();
        let mut values = Vec::with_capacity(names.len());
        for part in parts {
            let value: f64 = part.parse().map_err(|_| {
                Error::Invalid(format!("{what} row {} has a non-numeric cell", i + 2))
            })?;
            if !value.is_finite() {
                return Err(Error::Invalid(format!(
                    "{what} row {} has a non-finite cell",
                    i + 2
                )));
            }
            values.push(value);
        }
        if values.len() != names.len() {
            return Err(Error::Invalid(format!(
                "{what} row {} has {} cells, expected {}",
                i + 2,
                values.len(),
                names.len()
            )));
        }
        rows.push((id, values));
    }
    Ok((names, rows))
}

pub fn parse_labels_tsv(text: &str) -> Result<(Vec<String>, Vec<(String, Option<usize>)>)> {
    let (names, rows) = parse_numeric_tsv(text, "labels")?;
    let mut out = Vec::with_capacity(rows.len());
    for (id, values) in rows {
        let ones: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect();
        let label = match ones.as_slice() {
            [] => None,
            [only] if values[*only] == 1.0 => Some(*only),
            _ => {
                return Err(Error::Invalid(format!(
                    "label row for {id} is not one-hot"
                )))
            }
        };
        out.push((id, label));
    }
    Ok((names, out))
}

pub fn parse_covariates_tsv(text: &str) -> Result<(Vec<String>, Vec<(String, Vec<f64>)>)> {
    let (names, rows) = parse_numeric_tsv(text, "covariates")?;
    for (id, values) in &rows {
        if values.iter().any(|v| *v < 0.0) {
            return Err(Error::Invalid(format!(
                "covariate row for {id} has a negative value"
            )));
        }
    }
    Ok((names, rows))
}

pub struct LoadedCorpus {
    pub corpus: Corpus,
    pub manifest: Manifest,
}

pub fn load_corpus(dir: &Path) -> Result<LoadedCorpus> {
    let read = |name: &str| -> Result<String> {
        let path = dir.join(name);
        fs::read_to_string(&path).map_err(|e| Error::io(&path, e))
    };

    let manifest = parse_manifest(&read("manifest.json")?)?;

    let vocab_text = read("vocab.txt")?;
    let words: Vec<String> = vocab_text.lines().map(str::to_string).collect();
    if words.len() != manifest.v {
        return Err(Error::shape("vocab.txt", manifest.v, words.len()));
    }
    let vocabulary = Vocabulary::from_words(words)?;

    let (label_names, label_rows) = parse_labels_tsv(&read("labels.tsv")?)?;
    if label_names.len() != manifest.l {
        return Err(Error::shape("labels.tsv", manifest.l, label_names.len()));
    }
    let (covariate_names, cov_rows) = parse_covariates_tsv(&read("covariates.tsv")?)?;
    if covariate_names.len() != manifest.c {
        return Err(Error::shape("covariates.tsv", manifest.c, covariate_names.len()));
    }
    if label_rows.len() != manifest.d || cov_rows.len() != manifest.d {
        return Err(Error::shape(
            "metadata rows",
            manifest.d,
            label_rows.len().max(cov_rows.len()),
        ));
    }

    let counts = parse_counts(&read("counts.txt")?, manifest.d, manifest.v)?;

    let mut documents = Vec::with_capacity(manifest.d);
    for (i, ((label_id, label), (cov_id, covariates))) in
        label_rows.into_iter().zip(cov_rows).enumerate()
    {
        if label_id != cov_id {
            return Err(Error::Invalid(format!(
                "row {} ids disagree between labels.tsv and covariates.tsv",
                i + 1
            )));
        }
        let sparse = counts[i].clone();
        let n_tokens: u32 = sparse.iter().map(|&(_, c)| c).sum();
        if n_tokens == 0 {
            return Err(Error::EmptyDocument { id: label_id });
        }
        documents.push(Document {
            id: label_id,
            counts: sparse,
            n_tokens,
            label,
            covariates: if manifest.c == 0 { None } else { Some(covariates) },
        });
    }

    Ok(LoadedCorpus {
        corpus: Corpus {
            vocabulary,
            documents,
            label_names,
            covariate_names,
        },
        manifest,
    })
}
