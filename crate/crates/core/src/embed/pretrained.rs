use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::WordEmbeddingTable;
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone)]
pub struct PretrainedLoad {
    pub table: WordEmbeddingTable,
    /// Number of vocabulary tokens found in the file.
    pub matched: usize,
    /// `matched / vocabulary size`.
    pub coverage: f64,
}

/// Reads a whitespace-separated text vector file (`token v1 v2 ... vd` per
/// line). Vocabulary rows absent from the file keep a seeded uniform init.
pub fn load_pretrained(
    path: &Path,
    vocab: &Vocabulary,
    dim: usize,
    seed: u64,
) -> Result<PretrainedLoad> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut table = WordEmbeddingTable::random(vocab.len(), dim, &mut seeded(seed));
    let reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let mut matched = vec![false; vocab.len()];
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = i + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(' ');
        let token = parts.next().unwrap_or_default();
        let values: Vec<&str> = parts.collect();
        if token.is_empty() || values.is_empty() {
            return Err(Error::MalformedVectorLine {
                line: lineno,
                reason: "expected a token followed by values".into(),
            });
        }
        if values.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: values.len(),
            });
        }
        let Some(row) = vocab.get(token) else {
            continue;
        };
        let mut target = table.vectors.row_mut(row);
        for (slot, raw) in target.iter_mut().zip(&values) {
            let v: f64 = raw.parse().map_err(|_| Error::MalformedVectorLine {
                line: lineno,
                reason: format!("not a number: {raw:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::MalformedVectorLine {
                    line: lineno,
                    reason: format!("non-finite value {raw:?}"),
                });
            }
            *slot = v;
        }
        matched[row] = true;
    }
    let matched = matched.iter().filter(|&&m| m).count();
    let coverage = if vocab.is_empty() {
        0.0
    } else {
        matched as f64 / vocab.len() as f64
    };
    Ok(PretrainedLoad {
        table,
        matched,
        coverage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn vocab() -> Vocabulary {
        Vocabulary::from_entries(vec![("data".into(), 3), ("file".into(), 2)])
    }

    fn file(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn copies_matching_rows() {
        let f = file("data 0.1 0.2\nunrelated 1 1\n");
        let load = load_pretrained(f.path(), &vocab(), 2, 0).unwrap();
        assert_eq!(load.table.vectors.row(0).to_vec(), vec![0.1, 0.2]);
        assert_eq!(load.matched, 1);
        assert_eq!(load.coverage, 0.5);
        let bound = 0.5 / 2.0;
        assert!(load.table.vectors.row(1).iter().all(|v| v.abs() <= bound));
    }

    #[test]
    fn empty_file_falls_back_to_random() {
        let f = file("");
        let load = load_pretrained(f.path(), &vocab(), 4, 0).unwrap();
        assert_eq!(load.coverage, 0.0);
        assert_eq!(load.table.vectors.dim(), (2, 4));
    }

    #[test]
    fn dimension_and_format_errors() {
        let f = file("data 0.1 0.2\n");
        assert!(matches!(
            load_pretrained(f.path(), &vocab(), 200, 0),
            Err(Error::DimensionMismatch {
                expected: 200,
                found: 2
            })
        ));
        let f = file("data 0.1 abc\n");
        assert!(matches!(
            load_pretrained(f.path(), &vocab(), 2, 0),
            Err(Error::MalformedVectorLine { line: 1, .. })
        ));
        let f = file("data\n");
        assert!(matches!(
            load_pretrained(f.path(), &vocab(), 2, 0),
            Err(Error::MalformedVectorLine { .. })
        ));
    }
}
