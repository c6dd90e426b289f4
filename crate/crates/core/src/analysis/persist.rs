//! Saving and reloading a computed universe as a directory of structure
//! files plus a manifest.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::logic::ast::Theory;
use crate::logic::parse::serialize_theory;
use crate::structures::{parse_structure, FiniteStructure};

use super::classify::{hmax_flags, pc_flags};
use super::enumerate::ModelUniverse;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum PersistError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("manifest version {found} unsupported (expected {MANIFEST_VERSION})")]
    Version { found: u32 },
    #[error("theory hash mismatch: manifest {expected}, given theory {found}")]
    TheoryMismatch { expected: String, found: String },
    #[error(transparent)]
    Structure(#[from] crate::structures::StructureError),
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    version: u32,
    theory_sha256: String,
    bound: usize,
    members: Vec<String>,
    pc_flags: Option<Vec<bool>>,
    hmax_flags: Option<Vec<bool>>,
}

pub fn theory_hash(theory: &Theory) -> String {
    let mut h = Sha256::new();
    h.update(serialize_theory(theory).as_bytes());
    hex_string(&h.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PersistError + '_ {
    move |source| PersistError::Io { path: path.display().to_string(), source }
}

/// Write the members as numbered .pms files next to a manifest.json.
/// Classification flags are stored only if already computed.
pub fn save_universe(u: &ModelUniverse, dir: &Path) -> Result<(), PersistError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut names = Vec::new();
    for (i, m) in u.members().iter().enumerate() {
        let name = format!("member-{i:04}.pms");
        let path = dir.join(&name);
        fs::write(&path, m.serialize() + "\n").map_err(io_err(&path))?;
        names.push(name);
    }
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        theory_sha256: theory_hash(u.theory()),
        bound: u.bound(),
        members: names,
        pc_flags: u.pc_flags_cache.get().cloned(),
        hmax_flags: u.hmax_flags_cache.get().cloned(),
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| PersistError::Manifest(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(io_err(&path))
}

/// Reload a saved universe. The theory must hash to the manifest's value,
/// so stale directories are rejected instead of silently reused.
pub fn load_universe(theory: &Theory, dir: &Path) -> Result<ModelUniverse, PersistError> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| PersistError::Manifest(e.to_string()))?;
    if manifest.version != MANIFEST_VERSION {
        return Err(PersistError::Version { found: manifest.version });
    }
    let found = theory_hash(theory);
    if manifest.theory_sha256 != found {
        return Err(PersistError::TheoryMismatch {
            expected: manifest.theory_sha256,
            found,
        });
    }
    let mut members = Vec::new();
    for name in &manifest.members {
        let path = dir.join(name);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let m: FiniteStructure = parse_structure(&text)?.with_signature(theory.sig.clone())?;
        members.push(m);
    }
    let n = members.len();
    let u = ModelUniverse::from_members(theory.clone(), manifest.bound, members);
    let restore = |flags: Option<Vec<bool>>| {
        flags.filter(|f| f.len() == n)
    };
    if let Some(f) = restore(manifest.pc_flags) {
        let _ = u.pc_flags_cache.set(f);
    }
    if let Some(f) = restore(manifest.hmax_flags) {
        let _ = u.hmax_flags_cache.set(f);
    }
    Ok(u)
}

/// Compute the flags so a subsequent save includes them.
pub fn precompute_flags(u: &ModelUniverse) {
    pc_flags(u);
    hmax_flags(u);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::enumerate::enumerate_models;
    use crate::analysis::SearchBudget;
    use crate::corpus::{corpus_cycles, CycleVariant};

    fn t4_universe(bound: usize) -> ModelUniverse {
        let t = corpus_cycles(CycleVariant::Tn(4), bound).unwrap().theory;
        enumerate_models(&t, bound, &SearchBudget::default()).unwrap()
    }

    #[test]
    fn roundtrip_preserves_members_and_flags() {
        let u = t4_universe(3);
        precompute_flags(&u);
        let dir = tempfile::tempdir().unwrap();
        save_universe(&u, dir.path()).unwrap();
        let v = load_universe(u.theory(), dir.path()).unwrap();
        assert_eq!(u.members(), v.members());
        assert_eq!(u.bound(), v.bound());
        assert_eq!(u.pc_flags_cache.get(), v.pc_flags_cache.get());
        assert_eq!(u.hmax_flags_cache.get(), v.hmax_flags_cache.get());
    }

    #[test]
    fn flags_absent_when_never_computed() {
        let u = t4_universe(2);
        let dir = tempfile::tempdir().unwrap();
        save_universe(&u, dir.path()).unwrap();
        let v = load_universe(u.theory(), dir.path()).unwrap();
        assert!(v.pc_flags_cache.get().is_none());
    }

    #[test]
    fn wrong_theory_is_rejected() {
        let u = t4_universe(2);
        let dir = tempfile::tempdir().unwrap();
        save_universe(&u, dir.path()).unwrap();
        let other = corpus_cycles(CycleVariant::T, 2).unwrap().theory;
        assert!(matches!(
            load_universe(&other, dir.path()),
            Err(PersistError::TheoryMismatch { .. })
        ));
    }

    #[test]
    fn hash_is_stable_across_serialisation() {
        let t = corpus_cycles(CycleVariant::Tn(4), 3).unwrap().theory;
        let reparsed =
            crate::logic::parse_theory(&serialize_theory(&t)).unwrap();
        assert_eq!(theory_hash(&t), theory_hash(&reparsed));
    }
}
