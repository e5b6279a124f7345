use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{FeatureVector, Provenance};

/// Externally computed per-image vectors keyed by image id.
///
/// File format: UTF-8, first line `#dim=<d>`, then `<image_id>,v1,...,vd`
/// per image. The image id is the image file name without extension.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    entries: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, id: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let id = id.into();
        if values.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: values.len(),
            });
        }
        if self.entries.contains_key(&id) {
            return Err(Error::domain(format!("duplicate embedding id `{id}`")));
        }
        self.entries.insert(id, values);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.entries.get(id).map(Vec::as_slice)
    }

    pub fn lookup(&self, id: &str) -> Result<FeatureVector> {
        let values = self
            .get(id)
            .ok_or_else(|| Error::MissingEmbedding(id.to_string()))?;
        FeatureVector::new(values.to_vec(), Provenance::Embedding)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        writeln!(out, "#dim={}", self.dim).expect("in-memory write");
        for (id, values) in &self.entries {
            write!(out, "{id}").expect("in-memory write");
            for v in values {
                write!(out, ",{v}").expect("in-memory write");
            }
            out.push(b'\n');
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_embeddings(&text, path)
}

pub fn parse_embeddings(text: &str, path: &Path) -> Result<EmbeddingTable> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "missing `#dim=<d>` header".into()))?;
    let dim: usize = header
        .trim()
        .strip_prefix("#dim=")
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| err(1, format!("expected `#dim=<d>`, found `{header}`")))?;

    let mut table = EmbeddingTable::new(dim);
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let id = fields.next().unwrap_or("").trim();
        if id.is_empty() {
            return Err(err(line_no, "empty image id".into()));
        }
        let values = fields
            .map(|f| {
                let v: f64 = f
                    .trim()
                    .parse()
                    .map_err(|_| err(line_no, format!("non-numeric value `{}`", f.trim())))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(err(line_no, format!("non-finite value `{}`", f.trim())))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != dim {
            return Err(err(
                line_no,
                format!("expected {dim} values for `{id}`, found {}", values.len()),
            ));
        }
        if table.entries.contains_key(id) {
            return Err(err(line_no, format!("duplicate image id `{id}`")));
        }
        table.entries.insert(id.to_string(), values);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<EmbeddingTable> {
        parse_embeddings(text, Path::new("emb.txt"))
    }

    fn line_of(text: &str) -> usize {
        match parse(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn header_only() {
        let t = parse("#dim=7\n").unwrap();
        assert_eq!((t.dim(), t.len()), (7, 0));
    }

    #[test]
    fn two_rows() {
        let t = parse("#dim=4\na,1,2,3,4\nb,0.5,-1e-3,0,2\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("b").unwrap(), &[0.5, -1e-3, 0.0, 2.0]);
        assert!(matches!(t.lookup("c"), Err(Error::MissingEmbedding(_))));
    }

    #[test]
    fn malformed_rows() {
        assert_eq!(line_of("#dim=4\na,1,2,3,4\nb,1,2,3\n"), 3);
        assert_eq!(line_of("#dim=2\na,1,x\n"), 2);
        assert_eq!(line_of("#dim=2\na,1,2\na,3,4\n"), 3);
        assert_eq!(line_of("dim=2\n"), 1);
        assert_eq!(line_of(""), 1);
    }

    #[test]
    fn write_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.txt");
        let mut t = EmbeddingTable::new(3);
        t.insert("img_1", vec![0.1, 0.2, 1e-17]).unwrap();
        t.insert("img_2", vec![-4.0, 5.5, 6.25]).unwrap();
        t.write(&path).unwrap();
        assert_eq!(load_embeddings(&path).unwrap(), t);
    }
}
