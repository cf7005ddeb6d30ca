use std::fs;
use std::path::{Path, PathBuf};

use epscan_core::semantics::{parse_structure, ChoiceStructure};
use serde::Deserialize;
use sha2::{Digest, Sha256};

/// An input error: bad path, malformed file. Exit status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

pub struct Loaded {
    pub name: String,
    pub path: String,
    pub sha256: String,
    pub structure: ChoiceStructure,
}

pub fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<Loaded, InputError> {
    let text = read(path)?;
    let structure = parse_structure(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Loaded { name, path: path.display().to_string(), sha256: hex::encode(Sha256::digest(text.as_bytes())), structure })
}

#[derive(Debug, Deserialize)]
pub struct Manifest {
    pub structure: Vec<ManifestEntry>,
}

#[derive(Debug, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
}

/// Expands a list of paths: a directory stands for the structures listed
/// in its `manifest.toml`, as does a manifest file itself.
pub fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>, InputError> {
    let mut out = Vec::new();
    for p in paths {
        let manifest = if p.is_dir() {
            Some(p.join("manifest.toml"))
        } else if p.extension().is_some_and(|e| e == "toml") {
            Some(p.clone())
        } else {
            None
        };
        match manifest {
            Some(mpath) => {
                let m: Manifest = toml::from_str(&read(&mpath)?).map_err(|e| InputError(format!("{}: {e}", mpath.display())))?;
                let dir = mpath.parent().unwrap_or(Path::new("."));
                out.extend(m.structure.iter().map(|e| dir.join(&e.file)));
            }
            None => out.push(p.clone()),
        }
    }
    Ok(out)
}
