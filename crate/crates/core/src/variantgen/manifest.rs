//! On-disk suite layout:
//!
//! ```text
//! <outdir>/<domain>/suite-manifest.json
//! <outdir>/<domain>/original/domain.pddl
//! <outdir>/<domain>/original/problems/<instance>.pddl
//! <outdir>/<domain>/<CAT>-<CODE>/domain.pddl
//! <outdir>/<domain>/<CAT>-<CODE>/problems/<instance>.pddl   (problem-touching mechanisms)
//! ```
//!
//! Paths inside the manifest are relative to the manifest's directory.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::mechanism::MechanismId;
use super::suite::{writes_problems, VariantSuite};
use crate::pddl::{
    parse_domain, parse_problem_for, print_domain, print_problem, Domain, PddlError, Problem,
};

pub const MANIFEST_FILE: &str = "suite-manifest.json";
pub const ORIGINAL: &str = "original";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub domain: String,
    pub dummy_prefix: String,
    pub redundancy_ratio: f64,
    pub instances: Vec<String>,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    Ok,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// `original` or a mechanism id such as `SSC-PDU1`.
    pub mechanism: String,
    pub category: String,
    pub status: EntryStatus,
    pub reason: Option<String>,
    pub degenerate: bool,
    pub domain_file: Option<String>,
    pub domain_sha256: Option<String>,
    pub problems: Vec<ProblemFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub instance: String,
    pub file: String,
    pub sha256: String,
}

impl ManifestEntry {
    pub fn is_original(&self) -> bool {
        self.mechanism == ORIGINAL
    }

    /// `None` for the original entry.
    pub fn mechanism_id(&self) -> Option<MechanismId> {
        self.mechanism.parse().ok()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Pddl { path: PathBuf, source: PddlError },
    #[error("{path}: entry `{mechanism}` is skipped and has no files")]
    Skipped { path: PathBuf, mechanism: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ManifestError + '_ {
    move |source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_file(root: &Path, rel: &str, text: &str) -> Result<String, ManifestError> {
    let path = root.join(rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(sha256_hex(text.as_bytes()))
}

fn write_problems(
    root: &Path,
    dir: &str,
    instances: &[String],
    problems: &[Problem],
) -> Result<Vec<ProblemFile>, ManifestError> {
    instances
        .iter()
        .zip(problems)
        .map(|(instance, p)| {
            let file = format!("{dir}/problems/{instance}.pddl");
            let sha256 = write_file(root, &file, &print_problem(p))?;
            Ok(ProblemFile {
                instance: instance.clone(),
                file,
                sha256,
            })
        })
        .collect()
}

/// Writes every variant and the manifest under `<outdir>/<domain>/`.
/// Returns the manifest path.
pub fn write_suite(suite: &VariantSuite, outdir: &Path) -> Result<PathBuf, ManifestError> {
    let root = outdir.join(&suite.original.domain.name);
    fs::create_dir_all(&root).map_err(io_err(&root))?;

    let original_file = format!("{ORIGINAL}/domain.pddl");
    let original_problems =
        write_problems(&root, ORIGINAL, &suite.instances, &suite.original.problems)?;
    let mut entries = vec![ManifestEntry {
        mechanism: ORIGINAL.to_string(),
        category: ORIGINAL.to_string(),
        status: EntryStatus::Ok,
        reason: None,
        degenerate: false,
        domain_sha256: Some(write_file(
            &root,
            &original_file,
            &print_domain(&suite.original.domain),
        )?),
        domain_file: Some(original_file),
        problems: original_problems.clone(),
    }];

    for e in &suite.entries {
        let id = e.mechanism.id();
        let entry = match &e.result {
            Err(reason) => ManifestEntry {
                mechanism: id,
                category: e.mechanism.category().to_string(),
                status: EntryStatus::Skipped,
                reason: Some(reason.to_string()),
                degenerate: false,
                domain_file: None,
                domain_sha256: None,
                problems: Vec::new(),
            },
            Ok(v) => {
                let file = format!("{id}/domain.pddl");
                let hash = write_file(&root, &file, &print_domain(&v.domain))?;
                let problems = if writes_problems(e.mechanism) {
                    write_problems(&root, &id, &suite.instances, &v.problems)?
                } else {
                    original_problems.clone()
                };
                ManifestEntry {
                    mechanism: id,
                    category: e.mechanism.category().to_string(),
                    status: EntryStatus::Ok,
                    reason: None,
                    degenerate: e.degenerate,
                    domain_file: Some(file),
                    domain_sha256: Some(hash),
                    problems,
                }
            }
        };
        entries.push(entry);
    }

    let manifest = SuiteManifest {
        domain: suite.original.domain.name.clone(),
        dummy_prefix: suite.dummy_prefix.clone(),
        redundancy_ratio: suite.redundancy_ratio,
        instances: suite.instances.clone(),
        entries,
    };
    let path = root.join(MANIFEST_FILE);
    let mut text =
        serde_json::to_string_pretty(&manifest).map_err(|source| ManifestError::Json {
            path: path.clone(),
            source,
        })?;
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

pub fn load_manifest(path: &Path) -> Result<SuiteManifest, ManifestError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| ManifestError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Directory relative paths in a manifest resolve against.
pub fn manifest_root(manifest_path: &Path) -> PathBuf {
    manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default()
}

/// Parses the domain and problems an entry points at.
pub fn load_entry(
    root: &Path,
    entry: &ManifestEntry,
) -> Result<(Domain, Vec<(String, Problem)>), ManifestError> {
    let rel = entry
        .domain_file
        .as_ref()
        .ok_or_else(|| ManifestError::Skipped {
            path: root.to_path_buf(),
            mechanism: entry.mechanism.clone(),
        })?;
    let dpath = root.join(rel);
    let text = fs::read_to_string(&dpath).map_err(io_err(&dpath))?;
    let domain = parse_domain(&text).map_err(|source| ManifestError::Pddl {
        path: dpath.clone(),
        source,
    })?;
    let mut problems = Vec::new();
    for pf in &entry.problems {
        let ppath = root.join(&pf.file);
        let text = fs::read_to_string(&ppath).map_err(io_err(&ppath))?;
        let p = parse_problem_for(&text, &domain).map_err(|source| ManifestError::Pddl {
            path: ppath.clone(),
            source,
        })?;
        problems.push((pf.instance.clone(), p));
    }
    Ok((domain, problems))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::Execution;
    use crate::variantgen::{generate_suite, GeneratorConfig};

    #[test]
    fn writes_layout_and_reloads() {
        let d = parse_domain(include_str!("../../fixtures/gripper.pddl")).unwrap();
        let p = parse_problem_for(include_str!("../../fixtures/gripper-p1.pddl"), &d).unwrap();
        let suite =
            generate_suite(&d, &[p], &GeneratorConfig::default(), Execution::Parallel).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = write_suite(&suite, dir.path()).unwrap();
        assert_eq!(path, dir.path().join("gripper").join(MANIFEST_FILE));

        let m = load_manifest(&path).unwrap();
        assert_eq!(m.entries.len(), 32);
        assert!(m.entries.iter().all(|e| e.status == EntryStatus::Ok));
        let root = manifest_root(&path);
        assert!(root.join("SSC-PDU1/domain.pddl").is_file());
        assert!(root.join("MRC-ROB/problems/gripper-p1.pddl").is_file());
        assert!(root.join("TDC-RPD/problems/gripper-p1.pddl").is_file());
        assert!(!root.join("SSC-PDU1/problems").exists());

        let rob = m.entries.iter().find(|e| e.mechanism == "MRC-ROB").unwrap();
        let (_, probs) = load_entry(&root, rob).unwrap();
        assert_eq!(probs[0].1.objects.len(), 5);
        let pdu = m
            .entries
            .iter()
            .find(|e| e.mechanism == "SSC-PDU1")
            .unwrap();
        assert_eq!(pdu.problems, m.entries[0].problems);
        let (dom, _) = load_entry(&root, pdu).unwrap();
        assert_eq!(dom.predicates[0].name, "at-robby");

        // determinism: a second write is byte-identical
        let dir2 = tempfile::tempdir().unwrap();
        let path2 = write_suite(&suite, dir2.path()).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }
}
