//! Experiment configs bundled with the crate.

const PRESETS: &[(&str, &str)] = &[
    ("heterogeneous-demo", include_str!("../../presets/heterogeneous-demo.toml")),
    ("heterogeneous-degree", include_str!("../../presets/heterogeneous-degree.toml")),
    ("oracle-heterogeneity", include_str!("../../presets/oracle-heterogeneity.toml")),
    ("constant-property", include_str!("../../presets/constant-property.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

/// Config text of a bundled preset.
pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
