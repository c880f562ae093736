//! Built-in fixture configurations.

/// `(name, description, config)` for each fixture.
pub const GALLERY: &[(&str, &str, &str)] = &[
    (
        "quarter",
        "quarter Cantor measure, (4, {0, 2}) repeated",
        include_str!("../../fixtures/quarter.toml"),
    ),
    (
        "noncompact",
        "shifted top family with M = N = (2k+1)^2 and top multiplier 1 + P",
        include_str!("../../fixtures/noncompact.toml"),
    ),
    (
        "noncompact_offset",
        "the same family with N = (2k+1)^2 + 1",
        include_str!("../../fixtures/noncompact_offset.toml"),
    ),
    (
        "udz_failure",
        "(3, {0, 2, 4}) repeated; the digit set misses the uniform zero condition",
        include_str!("../../fixtures/udz_failure.toml"),
    ),
    (
        "uneven_density",
        "(2, {0, 1}) once, then (2, {0, 3}) repeated",
        include_str!("../../fixtures/uneven_density.toml"),
    ),
    (
        "consecutive_spectral",
        "consecutive digits with M_k | N_k from the second stage on",
        include_str!("../../fixtures/consecutive_spectral.toml"),
    ),
    (
        "consecutive_not_spectral",
        "consecutive digits with M_2 not dividing N_2",
        include_str!("../../fixtures/consecutive_not_spectral.toml"),
    ),
    (
        "three_digits_in_four",
        "(4, {0, 1, 2}) repeated; no frequency set exists",
        include_str!("../../fixtures/three_digits_in_four.toml"),
    ),
];

pub fn gallery_config(name: &str) -> Option<&'static str> {
    GALLERY.iter().find(|(n, _, _)| *n == name).map(|(_, _, c)| *c)
}
