//! Fixtures shared by the propagation benchmarks.

use firefront::{shoot_fan, Fan, ParamField};

/// The constant, spatially varying and time-dependent benchmark fields,
/// each with its time-dependence flag.
pub fn fields() -> [(&'static str, ParamField, bool); 3] {
    [
        (
            "constant",
            ParamField::parse("4", "2", "1", "0").unwrap(),
            false,
        ),
        (
            "spatial",
            ParamField::parse("4+cos(x1/2)", "2+sin(x2/2)", "1", "0").unwrap(),
            false,
        ),
        (
            "time_dependent",
            ParamField::parse("4+cos(x1/2)+t/2", "2+sin(x2/2)", "1", "t").unwrap(),
            true,
        ),
    ]
}

/// An unpruned fan over `[0, 3]` from the origin.
pub fn fan(field: &ParamField, time_dependent: bool, n_rays: usize, dt: f64) -> Fan {
    shoot_fan(field, [0.0, 0.0], n_rays, 0.0, 3.0, dt, time_dependent).expect("fan integrates")
}
