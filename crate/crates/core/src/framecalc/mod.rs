//! Frame fixtures and the geometry induced on a half-lightlike submanifold:
//! second fundamental forms, shape operators, screen almost conformal
//! detection and change of screen.

mod fixture;
mod geometry;
mod sac;
mod screen;

pub use fixture::{inertia, ConnectionKind, FixtureError, FrameFixture, FrameRole};
pub use geometry::{
    derive_geometry, induced_geometry, CheckResult, CheckStatus, FixtureCheck, GeometryError,
    InducedGeometry,
};
pub use sac::{detect_sac, sac_fits, FormFit, SacDetection, SacForm};
pub use screen::{
    screen_change, screen_change_report, NewtonStep, ScreenChange, ScreenChangeError,
    ScreenChangeReport,
};
