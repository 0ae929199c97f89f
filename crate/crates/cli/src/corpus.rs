//! The bundled grammar corpus and its manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::exit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedVerdict {
    Terminates,
    MayNotTerminate,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    Accept,
    Reject,
    Depth,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub input: String,
    pub expect: Expect,
    /// Golden tree, for accepted inputs.
    pub golden: Option<String>,
    pub max_depth: Option<usize>,
}

impl Fixture {
    pub fn exit_code(&self) -> i32 {
        match self.expect {
            Expect::Accept => exit::OK,
            Expect::Reject => exit::REJECT,
            Expect::Depth => exit::DEPTH,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub name: String,
    pub grammar: String,
    pub start: Option<String>,
    pub verdict: ExpectedVerdict,
    #[serde(default, rename = "fixture")]
    pub fixtures: Vec<Fixture>,
}

impl Entry {
    pub fn terminate_exit_code(&self) -> i32 {
        match self.verdict {
            ExpectedVerdict::Terminates => exit::OK,
            ExpectedVerdict::MayNotTerminate => exit::MAY_NOT_TERMINATE,
            ExpectedVerdict::Unknown => exit::UNKNOWN,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct Manifest {
    #[serde(rename = "entry")]
    pub entries: Vec<Entry>,
}

impl Manifest {
    pub fn entry(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// `corpus/` next to this crate's manifest.
pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn load_manifest(dir: &Path) -> Result<Manifest, String> {
    let path = dir.join("manifest.toml");
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}
