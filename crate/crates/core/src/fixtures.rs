//! Situation and traffic files bundled with the crate.

pub const EXAMPLE1: &str = include_str!("../fixtures/example1.toml");
pub const EXAMPLE2: &str = include_str!("../fixtures/example2.toml");
pub const AIRPORTS2023: &str = include_str!("../fixtures/airports2023.toml");
pub const TRAFFIC2023: &str = include_str!("../fixtures/traffic2023.toml");

/// Bundled situation files by name.
pub const SITUATIONS: &[(&str, &str)] = &[
    ("example1", EXAMPLE1),
    ("example2", EXAMPLE2),
    ("airports2023", AIRPORTS2023),
];

/// Bundled traffic files by name.
pub const TRAFFIC: &[(&str, &str)] = &[("traffic2023", TRAFFIC2023)];

pub fn situation(name: &str) -> Option<&'static str> {
    SITUATIONS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn traffic(name: &str) -> Option<&'static str> {
    TRAFFIC.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
