//! Locating and loading fixtures.

use std::path::{Path, PathBuf};

use sacurv::fixtures;
use sacurv::framecalc::FrameFixture;
use sacurv::Scalar;

use crate::config::{input_error, InputError};

pub const SEARCH_PATH_VAR: &str = "SACURV_FIXTURE_PATH";

/// Where a fixture's text came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Bundled(String),
    File(PathBuf),
}

impl Origin {
    pub fn describe(&self) -> String {
        match self {
            Origin::Bundled(name) => format!("bundled:{name}"),
            Origin::File(p) => p.display().to_string(),
        }
    }
}

pub struct Located {
    pub origin: Origin,
    pub text: String,
}

fn search_dirs() -> Vec<PathBuf> {
    std::env::var_os(SEARCH_PATH_VAR)
        .map(|v| {
            std::env::split_paths(&v)
                .filter(|p| !p.as_os_str().is_empty())
                .collect()
        })
        .unwrap_or_default()
}

fn read(path: &Path) -> Result<Located, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read fixture {}: {e}", path.display())))?;
    Ok(Located {
        origin: Origin::File(path.to_path_buf()),
        text,
    })
}

/// Resolution order: an existing file path, a bundled name, then
/// `<name>.toml` in each search-path directory.
pub fn locate(arg: &str) -> Result<Located, InputError> {
    let as_path = Path::new(arg);
    if as_path.is_file() {
        return read(as_path);
    }
    if let Some(text) = fixtures::source(arg) {
        return Ok(Located {
            origin: Origin::Bundled(arg.to_string()),
            text: text.to_string(),
        });
    }
    for dir in search_dirs() {
        let candidate = dir.join(format!("{arg}.toml"));
        if candidate.is_file() {
            return read(&candidate);
        }
    }
    Err(input_error(format!(
        "unknown fixture {arg:?}: not a file, not bundled ({}), and not found on {SEARCH_PATH_VAR}",
        fixtures::names().join(", ")
    )))
}

pub fn parse<S: Scalar>(loc: &Located) -> Result<FrameFixture<S>, InputError> {
    FrameFixture::from_toml_str(&loc.text)
        .map_err(|e| input_error(format!("invalid fixture {}: {e}", loc.origin.describe())))
}

/// Every fixture visible to `locate`, bundled ones first, then search-path
/// files sorted by path.
pub fn catalogue() -> Vec<Located> {
    let mut out: Vec<Located> = fixtures::names()
        .into_iter()
        .map(|n| Located {
            origin: Origin::Bundled(n.to_string()),
            text: fixtures::source(n).unwrap_or_default().to_string(),
        })
        .collect();
    let mut files: Vec<PathBuf> = search_dirs()
        .into_iter()
        .filter_map(|d| std::fs::read_dir(d).ok())
        .flat_map(|rd| rd.filter_map(|e| e.ok()).map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    out.extend(files.into_iter().filter_map(|p| read(&p).ok()));
    out
}
