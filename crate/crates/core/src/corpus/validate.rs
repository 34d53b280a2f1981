use std::collections::HashSet;
use std::fmt;

use super::{validate_issn, Corpus};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    IssnChecksum { journal_id: String, issn: String },
    NoCategories { journal_id: String },
    BadCategory { journal_id: String, category: String },
    UnknownPublisher { journal_id: String, publisher_id: String },
    EmptyPublisher { publisher_id: String },
    UnknownJournal { paper_id: String, journal_id: String },
    YearOutOfRange { paper_id: String, year: i32 },
    SelfReference { paper_id: String },
    DuplicateReference { paper_id: String, reference: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IssnChecksum { journal_id, issn } => {
                write!(f, "journal {journal_id}: ISSN {issn} fails the checksum")
            }
            Violation::NoCategories { journal_id } => {
                write!(f, "journal {journal_id}: no subject categories")
            }
            Violation::BadCategory { journal_id, category } => {
                write!(f, "journal {journal_id}: category `{category}` is not a 2-digit code")
            }
            Violation::UnknownPublisher { journal_id, publisher_id } => {
                write!(f, "journal {journal_id}: unknown publisher {publisher_id}")
            }
            Violation::EmptyPublisher { publisher_id } => {
                write!(f, "publisher {publisher_id}: no journals")
            }
            Violation::UnknownJournal { paper_id, journal_id } => {
                write!(f, "paper {paper_id}: unknown journal {journal_id}")
            }
            Violation::YearOutOfRange { paper_id, year } => {
                write!(f, "paper {paper_id}: year {year} outside the corpus range")
            }
            Violation::SelfReference { paper_id } => write!(f, "paper {paper_id}: cites itself"),
            Violation::DuplicateReference { paper_id, reference } => {
                write!(f, "paper {paper_id}: reference {reference} listed more than once")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every record invariant. Violations are report content, never errors.
pub fn validate_corpus(corpus: &Corpus) -> ValidationReport {
    let mut violations = Vec::new();

    for journal in corpus.journals() {
        for issn in &journal.issns {
            if !validate_issn(issn) {
                violations.push(Violation::IssnChecksum {
                    journal_id: journal.journal_id.clone(),
                    issn: issn.clone(),
                });
            }
        }
        if journal.categories.is_empty() {
            violations.push(Violation::NoCategories {
                journal_id: journal.journal_id.clone(),
            });
        }
        for category in &journal.categories {
            if category.len() != 2 || !category.bytes().all(|b| b.is_ascii_digit()) {
                violations.push(Violation::BadCategory {
                    journal_id: journal.journal_id.clone(),
                    category: category.clone(),
                });
            }
        }
        if let Some(pid) = &journal.publisher_id {
            if corpus.publisher_idx(pid).is_none() {
                violations.push(Violation::UnknownPublisher {
                    journal_id: journal.journal_id.clone(),
                    publisher_id: pid.clone(),
                });
            }
        }
    }

    for publisher in corpus.publishers() {
        if publisher.journal_ids.is_empty() {
            violations.push(Violation::EmptyPublisher {
                publisher_id: publisher.publisher_id.clone(),
            });
        }
    }

    let (first, last) = corpus.year_range();
    for paper in corpus.papers() {
        if corpus.journal_idx(&paper.journal_id).is_none() {
            violations.push(Violation::UnknownJournal {
                paper_id: paper.paper_id.clone(),
                journal_id: paper.journal_id.clone(),
            });
        }
        if paper.year < first || paper.year > last {
            violations.push(Violation::YearOutOfRange {
                paper_id: paper.paper_id.clone(),
                year: paper.year,
            });
        }
        let mut seen = HashSet::new();
        for r in &paper.references {
            if *r == paper.paper_id {
                violations.push(Violation::SelfReference {
                    paper_id: paper.paper_id.clone(),
                });
            } else if !seen.insert(r.as_str()) {
                violations.push(Violation::DuplicateReference {
                    paper_id: paper.paper_id.clone(),
                    reference: r.clone(),
                });
            }
        }
    }

    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    fn base() -> crate::corpus::CorpusBuilder {
        Corpus::builder()
            .publisher("P1", None)
            .journal(journal("J1", Some("P1"), &["11"], false))
            .paper(paper("a", "J1", 2000, &[]))
            .paper(paper("b", "J1", 2001, &["a"]))
    }

    #[test]
    fn clean_fixture_has_empty_report() {
        assert!(validate_corpus(&base().build().unwrap()).is_clean());
    }

    #[test]
    fn bad_issn_names_journal() {
        let mut j = journal("J2", Some("P1"), &["12"], false);
        j.issns = vec!["0317-8472".into()];
        let report = validate_corpus(&base().journal(j).build().unwrap());
        assert_eq!(
            report.violations,
            vec![Violation::IssnChecksum {
                journal_id: "J2".into(),
                issn: "0317-8472".into()
            }]
        );
    }

    #[test]
    fn self_citation_is_one_violation() {
        let c = base().paper(paper("c", "J1", 2002, &["c", "a"])).build().unwrap();
        let report = validate_corpus(&c);
        assert_eq!(
            report.violations,
            vec![Violation::SelfReference { paper_id: "c".into() }]
        );
        // the index never carries the self edge
        let idx = c.paper_idx("c").unwrap();
        assert_eq!(c.references(idx).len(), 1);
    }

    #[test]
    fn structural_violations() {
        let c = base()
            .publisher("P9", None)
            .journal(journal("J3", Some("PX"), &[], false))
            .paper(paper("z", "J404", 1990, &["a", "a"]))
            .build()
            .unwrap();
        let report = validate_corpus(&c);
        let text: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        assert_eq!(report.violations.len(), 6, "{text:#?}");
        assert!(text.iter().any(|t| t.contains("publisher P9: no journals")));
        assert!(text.iter().any(|t| t.contains("unknown publisher PX")));
    }
}
