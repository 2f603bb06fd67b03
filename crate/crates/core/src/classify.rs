//! Partition a corpus of presentation files into graded-isomorphism classes.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::isotest::{self, Fingerprint, IsoOptions, Outcome, Side};
use crate::present::Presentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryReport {
    pub label: String,
    pub status: EntryStatus,
    pub error: Option<String>,
    pub name: Option<String>,
    pub digest: Option<String>,
    pub bucket: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceKind {
    /// Direct certificate, re-verified.
    Certificate,
    /// Equivalence through a chain of certified pairs; no composed map.
    Derived,
    Separated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub a: String,
    pub b: String,
    pub kind: EvidenceKind,
    pub certificate: Option<BTreeMap<String, String>>,
    pub via: Option<Vec<String>>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub presentations: usize,
    pub errors: usize,
    pub classes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub degree_bound: u32,
    pub entries: Vec<EntryReport>,
    pub classes: Vec<Vec<String>>,
    pub evidence: Vec<Evidence>,
    pub totals: Totals,
}

struct Parsed {
    label: String,
    pres: Presentation,
    fp: Fingerprint,
    bucket: String,
}

struct Class {
    bucket: String,
    members: Vec<usize>,
}

fn evidence(a: &str, b: &str, kind: EvidenceKind) -> Evidence {
    Evidence {
        a: a.to_string(),
        b: b.to_string(),
        kind,
        certificate: None,
        via: None,
        reason: None,
    }
}

/// Classifies `(label, text)` inputs. The result depends only on the set of
/// inputs, not their order.
pub fn classify(mut inputs: Vec<(String, String)>, opts: &IsoOptions) -> CorpusReport {
    inputs.sort_by(|x, y| x.0.cmp(&y.0));
    let mut entries = Vec::with_capacity(inputs.len());
    let mut pres: Vec<Option<Presentation>> = Vec::with_capacity(inputs.len());
    for (label, text) in &inputs {
        match Presentation::parse(text) {
            Ok(p) => {
                entries.push(EntryReport {
                    label: label.clone(),
                    status: EntryStatus::Ok,
                    error: None,
                    name: Some(p.name.clone()),
                    digest: None,
                    bucket: None,
                });
                pres.push(Some(p));
            }
            Err(e) => {
                entries.push(EntryReport {
                    label: label.clone(),
                    status: EntryStatus::Error,
                    error: Some(e.to_string()),
                    name: None,
                    digest: None,
                    bucket: None,
                });
                pres.push(None);
            }
        }
    }

    let bound = opts.max_degree.unwrap_or_else(|| {
        pres.iter()
            .flatten()
            .map(isotest::default_bound)
            .max()
            .unwrap_or(1)
    });
    let bound = pres
        .iter()
        .flatten()
        .map(isotest::truncation_bound)
        .fold(bound, u32::max);
    let pair_opts = IsoOptions {
        max_degree: Some(bound),
        ..opts.clone()
    };

    let mut parsed: Vec<Parsed> = Vec::new();
    for (entry, p) in entries.iter_mut().zip(pres) {
        let Some(p) = p else { continue };
        let fp = match Side::build(&p, bound, &pair_opts) {
            Ok(Ok(side)) => side.fingerprint(),
            Ok(Err(reason)) => {
                entry.status = EntryStatus::Error;
                entry.error = Some(reason.to_string());
                continue;
            }
            Err(e) => {
                entry.status = EntryStatus::Error;
                entry.error = Some(e.to_string());
                continue;
            }
        };
        let key = format!(
            "{}/{}/{}",
            p.characteristic(),
            p.mode(),
            fp.truncated_digest()
        );
        let bucket = hex::encode(Sha256::digest(key.as_bytes()))[..16].to_string();
        entry.digest = Some(fp.digest());
        entry.bucket = Some(bucket.clone());
        parsed.push(Parsed {
            label: entry.label.clone(),
            pres: p,
            fp,
            bucket,
        });
    }

    let mut classes: Vec<Class> = Vec::new();
    let mut ev = Vec::new();
    for (k, item) in parsed.iter().enumerate() {
        let mut joined = None;
        for (ci, class) in classes.iter().enumerate() {
            if class.bucket != item.bucket {
                continue;
            }
            let rep = &parsed[class.members[0]];
            match isotest::graded_isomorphism(&rep.pres, &item.pres, &pair_opts) {
                Ok(v) if v.outcome == Outcome::Isomorphic => {
                    let verified = v.images.as_ref().is_some_and(|im| {
                        matches!(
                            isotest::verify_certificate(&rep.pres, &item.pres, im),
                            Ok(true)
                        )
                    });
                    if !verified {
                        let mut e = evidence(&rep.label, &item.label, EvidenceKind::Inconclusive);
                        e.reason = Some("certificate failed re-verification".into());
                        ev.push(e);
                        continue;
                    }
                    let mut e = evidence(&rep.label, &item.label, EvidenceKind::Certificate);
                    e.certificate = v.certificate;
                    ev.push(e);
                    joined = Some(ci);
                    break;
                }
                Ok(v) => {
                    let kind = if v.outcome == Outcome::NotIsomorphic {
                        EvidenceKind::Separated
                    } else {
                        EvidenceKind::Inconclusive
                    };
                    let mut e = evidence(&rep.label, &item.label, kind);
                    e.reason = v.reason.map(|r| r.to_string());
                    ev.push(e);
                }
                Err(err) => {
                    let mut e = evidence(&rep.label, &item.label, EvidenceKind::Separated);
                    e.reason = Some(err.to_string());
                    ev.push(e);
                }
            }
        }
        match joined {
            Some(ci) => {
                let rep = &parsed[classes[ci].members[0]].label;
                for &m in &classes[ci].members[1..] {
                    let mut e = evidence(&parsed[m].label, &item.label, EvidenceKind::Derived);
                    e.via = Some(vec![
                        parsed[m].label.clone(),
                        rep.clone(),
                        item.label.clone(),
                    ]);
                    ev.push(e);
                }
                classes[ci].members.push(k);
            }
            None => classes.push(Class {
                bucket: item.bucket.clone(),
                members: vec![k],
            }),
        }
    }

    // class pairs from different buckets
    for (i, ci) in classes.iter().enumerate() {
        for cj in &classes[i + 1..] {
            if ci.bucket == cj.bucket {
                continue;
            }
            let (x, y) = (&parsed[ci.members[0]], &parsed[cj.members[0]]);
            let reason = if x.pres.characteristic() != y.pres.characteristic()
                || x.pres.mode() != y.pres.mode()
            {
                "different characteristic or mode".to_string()
            } else {
                match x.fp.difference(&y.fp) {
                    Some(r) => r.to_string(),
                    None => "fingerprint digests differ".to_string(),
                }
            };
            let mut e = evidence(&x.label, &y.label, EvidenceKind::Separated);
            e.reason = Some(reason);
            ev.push(e);
        }
    }

    let class_labels: Vec<Vec<String>> = classes
        .iter()
        .map(|c| c.members.iter().map(|&m| parsed[m].label.clone()).collect())
        .collect();
    let errors = entries
        .iter()
        .filter(|e| e.status == EntryStatus::Error)
        .count();
    CorpusReport {
        degree_bound: bound,
        totals: Totals {
            presentations: entries.len(),
            errors,
            classes: class_labels.len(),
        },
        entries,
        classes: class_labels,
        evidence: ev,
    }
}

/// Classifies every regular, non-hidden file in `dir`, labelled by file name.
pub fn classify_dir(dir: &Path, opts: &IsoOptions) -> io::Result<CorpusReport> {
    let mut inputs = Vec::new();
    let mut unreadable = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let label = entry.file_name().to_string_lossy().into_owned();
        if label.starts_with('.') || !entry.file_type()?.is_file() {
            continue;
        }
        match std::fs::read_to_string(entry.path()) {
            Ok(text) => inputs.push((label, text)),
            Err(e) => unreadable.push((label, e.to_string())),
        }
    }
    let mut report = classify(inputs, opts);
    for (label, err) in unreadable {
        report.entries.push(EntryReport {
            label,
            status: EntryStatus::Error,
            error: Some(err),
            name: None,
            digest: None,
            bucket: None,
        });
    }
    report.entries.sort_by(|x, y| x.label.cmp(&y.label));
    report.totals.presentations = report.entries.len();
    report.totals.errors = report
        .entries
        .iter()
        .filter(|e| e.status == EntryStatus::Error)
        .count();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(label: &str, body: &str) -> (String, String) {
        (
            label.to_string(),
            format!("algebra {label}\nchar 2\nmode commutative\n{body}"),
        )
    }

    #[test]
    fn empty_corpus() {
        let r = classify(Vec::new(), &IsoOptions::default());
        assert!(r.classes.is_empty());
        assert_eq!(r.totals.presentations, 0);
    }

    #[test]
    fn duplicates_merge_with_certificate() {
        let r = classify(
            vec![
                input("B", "gen x 1\ngen y 2\nrel x^2\n"),
                input("A", "gen x 1\ngen y 2\nrel x^2\n"),
                input("C", "gen x 1\n"),
                input("D", "gen x 1\ngen y 2\nrel x^2\n"),
            ],
            &IsoOptions::default(),
        );
        assert_eq!(r.classes, vec![vec!["A", "B", "D"], vec!["C"]]);
        let kinds: Vec<_> = r.evidence.iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds
                .iter()
                .filter(|&&k| k == EvidenceKind::Certificate)
                .count(),
            2
        );
        assert_eq!(
            kinds
                .iter()
                .filter(|&&k| k == EvidenceKind::Derived)
                .count(),
            1
        );
    }

    #[test]
    fn parse_failures_are_recorded() {
        let r = classify(
            vec![
                ("bad".into(), "algebra q\nchar 4\n".into()),
                input("ok", "gen x 1\n"),
            ],
            &IsoOptions::default(),
        );
        assert_eq!(r.totals.errors, 1);
        assert_eq!(r.classes, vec![vec!["ok"]]);
        let back: CorpusReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
