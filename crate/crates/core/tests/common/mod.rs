#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FIRST_YEAR: i32 = 2012;
pub const LAST_YEAR: i32 = 2016;

const SURNAMES: [&str; 12] = [
    "Kim", "Lee", "Park", "Smith", "Müller", "Garcia", "Rossi", "Novak", "Tanaka", "Silva", "Cohen", "Dubois",
];

/// Writes a small multi-publisher corpus and a matching run configuration
/// into `dir`; returns the configuration path.
pub fn write_fixture(dir: &Path, seed: u64, extra_config: &str) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let journals = 12;
    let mut journal_csv = String::from("journal_id,issns,publisher_id,categories,questionable_flag\n");
    for j in 0..journals {
        let cats = if j < 6 { "11" } else if j == 6 { "11;22" } else { "22" };
        let questionable = j == 0 || j == 7;
        writeln!(journal_csv, "J{j:02},,P{},{cats},{questionable}", j % 4).unwrap();
    }
    let mut publishers = String::from("publisher_id,name\n");
    for p in 0..4 {
        writeln!(publishers, "P{p},Publisher {p}").unwrap();
    }

    let mut papers: Vec<(String, usize, i32)> = Vec::new();
    let mut lines = String::new();
    let mut authors = String::from("author_key,name\n");
    for year in FIRST_YEAR..=LAST_YEAR {
        for j in 0..journals {
            let n = 30 + (j * 7 % 13) + rng.random_range(0..4);
            for _ in 0..n {
                let id = format!("W{:05}", papers.len());
                let earlier: Vec<&(String, usize, i32)> = papers.iter().filter(|p| p.2 < year).collect();
                let mut refs: Vec<String> = Vec::new();
                let want = if earlier.is_empty() { 0 } else { rng.random_range(0..9) };
                for _ in 0..want {
                    let pick = if rng.random::<f64>() < 0.4 {
                        let same: Vec<_> = earlier.iter().filter(|p| p.1 % 4 == j % 4).collect();
                        if same.is_empty() {
                            continue;
                        }
                        same[rng.random_range(0..same.len())].0.clone()
                    } else {
                        earlier[rng.random_range(0..earlier.len())].0.clone()
                    };
                    if !refs.contains(&pick) {
                        refs.push(pick);
                    }
                }
                let team = rng.random_range(1..5);
                let mut keys = Vec::new();
                for k in 0..team {
                    let key = format!("{id}-{k}");
                    let surname = SURNAMES[rng.random_range(0..SURNAMES.len())];
                    let initial = (b'A' + rng.random_range(0..3u8)) as char;
                    writeln!(authors, "{key},\"{surname}, {initial}.\"").unwrap();
                    keys.push(key);
                }
                let record = serde_json::json!({
                    "paper_id": id,
                    "journal_id": format!("J{j:02}"),
                    "year": year,
                    "author_keys": keys,
                    "references": refs,
                });
                lines.push_str(&record.to_string());
                lines.push('\n');
                papers.push((id, j, year));
            }
        }
    }
    std::fs::create_dir_all(dir).unwrap();
    std::fs::write(dir.join("papers.jsonl"), lines).unwrap();
    std::fs::write(dir.join("journals.csv"), journal_csv).unwrap();
    std::fs::write(dir.join("publishers.csv"), publishers).unwrap();
    std::fs::write(dir.join("authors.csv"), authors).unwrap();
    let config = format!(
        r#"seed = {seed}
out_dir = "out"

[corpus]
papers = "papers.jsonl"
journals = "journals.csv"
publishers = "publishers.csv"
authors = "authors.csv"
year_range = [{FIRST_YEAR}, {LAST_YEAR}]

[impact]
reference_year = {LAST_YEAR}

[matching]
year = 2015

[novelty]
ensemble_count = 4
swaps_per_edge = 5.0
{extra_config}"#
    );
    let path = dir.join("run.toml");
    std::fs::write(&path, config).unwrap();
    path
}

/// Every CSV under `dir`, by file name, with contents.
pub fn csv_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}
