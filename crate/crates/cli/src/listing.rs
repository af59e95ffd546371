use sacurv::framecalc::FrameFixture;
use sacurv::Rational;

use crate::report::{FixtureEntry, FixtureList, SCHEMA_VERSION};
use crate::source::{catalogue, Origin};

pub fn build() -> FixtureList {
    let fixtures = catalogue()
        .into_iter()
        .map(|loc| {
            let source = loc.origin.describe();
            let fallback = match &loc.origin {
                Origin::Bundled(n) => n.clone(),
                Origin::File(p) => p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
            };
            match FrameFixture::<Rational>::from_toml_str(&loc.text) {
                Ok(f) => FixtureEntry {
                    name: f.name.clone(),
                    source,
                    dimension: Some(f.dim()),
                    connection: Some(f.kind.name().to_string()),
                    strict: Some(f.strict),
                    description: f.description.clone(),
                    valid: true,
                },
                Err(e) => FixtureEntry {
                    name: fallback,
                    source,
                    dimension: None,
                    connection: None,
                    strict: None,
                    description: e.to_string(),
                    valid: false,
                },
            }
        })
        .collect();
    FixtureList {
        schema_version: SCHEMA_VERSION,
        command: "fixtures list",
        fixtures,
    }
}
