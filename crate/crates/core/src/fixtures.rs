//! Fixtures bundled with the library.

use crate::framecalc::{FixtureError, FrameFixture};
use crate::scalar::Scalar;

/// `(name, TOML source)` of every bundled fixture.
pub const BUNDLED: &[(&str, &str)] = &[
    ("example_r9", include_str!("../fixtures/example_r9.toml")),
    ("example_sac", include_str!("../fixtures/example_sac.toml")),
    (
        "flat_geodesic",
        include_str!("../fixtures/flat_geodesic.toml"),
    ),
];

pub fn names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

pub fn source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses a bundled fixture; `None` for an unknown name.
pub fn load<S: Scalar>(name: &str) -> Option<Result<FrameFixture<S>, FixtureError>> {
    source(name).map(FrameFixture::from_toml_str)
}
