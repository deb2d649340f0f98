//! Bundled regression manifests and their expected results.

/// One bundled manifest with its `.expect` sidecar.
#[derive(Clone, Copy, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub manifest: &'static str,
    pub expect: &'static str,
}

macro_rules! entry {
    ($name:literal) => {
        CorpusEntry {
            name: $name,
            manifest: include_str!(concat!("../corpus/", $name, ".tomlish")),
            expect: include_str!(concat!("../corpus/", $name, ".expect")),
        }
    };
}

pub fn corpus() -> Vec<CorpusEntry> {
    vec![
        entry!("heisenberg"),
        entry!("levi_flat"),
        entry!("ex7_8"),
        entry!("c3_cubic"),
        entry!("ex8_6"),
        entry!("ex8_10"),
        entry!("ex8_11"),
        entry!("quadric_elliptic"),
        entry!("quadric_parabolic"),
        entry!("quadric_hyperbolic"),
        entry!("heisenberg_x_c"),
        entry!("tube_real"),
        entry!("orbit_heis3"),
        entry!("orbit_c4"),
        entry!("orbit_translations"),
        entry!("orbit_pair5"),
    ]
}

pub fn find(name: &str) -> Option<CorpusEntry> {
    corpus().into_iter().find(|e| e.name == name)
}

/// `key = value` expectations in file order.
pub fn parse_expect(src: &str) -> Vec<(String, String)> {
    src.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}
