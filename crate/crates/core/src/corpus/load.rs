use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde_json::Value;

use super::{Corpus, CorpusBuilder, Journal, Paper};
use crate::{Error, Result};

/// Supported on-disk layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterchangeFormat {
    /// `papers.jsonl` plus `journals.csv` / `publishers.csv` / `authors.csv`.
    #[default]
    JsonlCsv,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CorpusPaths {
    pub papers: PathBuf,
    pub journals: PathBuf,
    #[serde(default)]
    pub publishers: Option<PathBuf>,
    /// `author_key,name` records used for name blocking.
    #[serde(default)]
    pub authors: Option<PathBuf>,
}

impl CorpusPaths {
    /// The conventional file names inside one directory.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        let optional = |name: &str| {
            let p = dir.join(name);
            p.exists().then_some(p)
        };
        Self {
            papers: dir.join("papers.jsonl"),
            journals: dir.join("journals.csv"),
            publishers: optional("publishers.csv"),
            authors: optional("authors.csv"),
        }
    }
}

pub fn load_corpus(
    paths: &CorpusPaths,
    format: InterchangeFormat,
    year_range: (i32, i32),
) -> Result<Corpus> {
    let InterchangeFormat::JsonlCsv = format;
    let mut builder = Corpus::builder().year_range(year_range.0, year_range.1);

    read_journals(&paths.journals, &mut builder)?;
    if let Some(p) = &paths.publishers {
        read_publishers(p, &mut builder)?;
    }
    if let Some(p) = &paths.authors {
        read_authors(p, &mut builder)?;
    }
    read_papers(&paths.papers, &mut builder)?;
    builder.build()
}

fn read_papers(path: &Path, builder: &mut CorpusBuilder) -> Result<()> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut seen = std::collections::HashMap::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let paper = parse_paper(&line).map_err(|(field, reason)| Error::Malformed {
            file: path.to_path_buf(),
            line: line_no,
            field,
            reason,
        })?;
        if seen.insert(paper.paper_id.clone(), line_no).is_some() {
            return Err(Error::DuplicatePaper {
                file: path.to_path_buf(),
                line: line_no,
                paper_id: paper.paper_id,
            });
        }
        builder.add_paper(paper);
    }
    Ok(())
}

type FieldError = (String, String);

fn parse_paper(line: &str) -> std::result::Result<Paper, FieldError> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| ("<record>".to_string(), e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| ("<record>".to_string(), "expected a JSON object".to_string()))?;

    let string = |field: &str| -> std::result::Result<String, FieldError> {
        match obj.get(field) {
            Some(Value::String(s)) if !s.is_empty() => Ok(s.clone()),
            Some(Value::Number(n)) => Ok(n.to_string()),
            Some(_) => Err((field.to_string(), "expected a non-empty string".to_string())),
            None => Err((field.to_string(), "missing".to_string())),
        }
    };
    let list = |field: &str| -> std::result::Result<Vec<String>, FieldError> {
        match obj.get(field) {
            None | Some(Value::Null) => Ok(Vec::new()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err((field.to_string(), "expected a list of ids".to_string())),
                })
                .collect(),
            Some(_) => Err((field.to_string(), "expected a list".to_string())),
        }
    };

    let year = obj
        .get("year")
        .ok_or_else(|| ("year".to_string(), "missing".to_string()))?
        .as_i64()
        .and_then(|y| i32::try_from(y).ok())
        .ok_or_else(|| ("year".to_string(), "expected an integer".to_string()))?;

    Ok(Paper {
        paper_id: string("paper_id")?,
        journal_id: string("journal_id")?,
        year,
        author_keys: list("author_keys")?,
        references: list("references")?,
    })
}

struct CsvTable {
    path: PathBuf,
    reader: csv::Reader<File>,
    headers: csv::StringRecord,
}

impl CsvTable {
    fn open(path: &Path, required: &[&str]) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(file);
        let headers = reader.headers()?.clone();
        for col in required {
            if !headers.iter().any(|h| h == *col) {
                return Err(Error::Malformed {
                    file: path.to_path_buf(),
                    line: 1,
                    field: (*col).to_string(),
                    reason: "missing column".to_string(),
                });
            }
        }
        Ok(Self {
            path: path.to_path_buf(),
            reader,
            headers,
        })
    }

    fn rows(&mut self) -> Result<Vec<(usize, Row)>> {
        let mut out = Vec::new();
        for record in self.reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let row = self
                .headers
                .iter()
                .zip(record.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect();
            out.push((line, Row(row)));
        }
        Ok(out)
    }

    fn malformed(&self, line: usize, field: &str, reason: impl Into<String>) -> Error {
        Error::Malformed {
            file: self.path.clone(),
            line,
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

struct Row(Vec<(String, String)>);

impl Row {
    fn get(&self, col: &str) -> &str {
        self.0
            .iter()
            .find(|(h, _)| h == col)
            .map_or("", |(_, v)| v.as_str())
    }

    fn list(&self, col: &str) -> Vec<String> {
        self.get(col)
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect()
    }
}

fn parse_flag(raw: &str) -> Option<bool> {
    match raw.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" | "t" => Some(true),
        "0" | "false" | "no" | "n" | "f" | "" => Some(false),
        _ => None,
    }
}

fn read_journals(path: &Path, builder: &mut CorpusBuilder) -> Result<()> {
    let mut table = CsvTable::open(
        path,
        &["journal_id", "issns", "publisher_id", "categories", "questionable_flag"],
    )?;
    for (line, row) in table.rows()? {
        let journal_id = row.get("journal_id");
        if journal_id.is_empty() {
            return Err(table.malformed(line, "journal_id", "empty"));
        }
        let questionable = parse_flag(row.get("questionable_flag"))
            .ok_or_else(|| table.malformed(line, "questionable_flag", "expected a boolean"))?;
        let publisher = row.get("publisher_id");
        builder.add_journal(Journal {
            issns: row.list("issns"),
            publisher_id: (!publisher.is_empty()).then(|| publisher.to_string()),
            categories: row.list("categories"),
            questionable,
            ..Journal::new(journal_id)
        });
    }
    Ok(())
}

fn read_publishers(path: &Path, builder: &mut CorpusBuilder) -> Result<()> {
    let mut table = CsvTable::open(path, &["publisher_id"])?;
    for (line, row) in table.rows()? {
        let id = row.get("publisher_id");
        if id.is_empty() {
            return Err(table.malformed(line, "publisher_id", "empty"));
        }
        let name = row.get("name");
        builder.add_publisher(id, (!name.is_empty()).then(|| name.to_string()));
    }
    Ok(())
}

fn read_authors(path: &Path, builder: &mut CorpusBuilder) -> Result<()> {
    let mut table = CsvTable::open(path, &["author_key", "name"])?;
    for (line, row) in table.rows()? {
        let key = row.get("author_key");
        if key.is_empty() {
            return Err(table.malformed(line, "author_key", "empty"));
        }
        builder.add_author(key, row.get("name"));
    }
    Ok(())
}
