#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use masstransport::{Process, ProcessSpec};

pub fn specs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

/// Every bundled spec, by file stem.
pub fn bundled() -> Vec<(String, Process)> {
    let mut entries: Vec<_> = std::fs::read_dir(specs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    entries.sort();
    entries
        .into_iter()
        .map(|path| {
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            let spec = ProcessSpec::from_path(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, Process::new(spec).unwrap())
        })
        .collect()
}

pub fn load(name: &str) -> Process {
    let spec = ProcessSpec::from_path(specs_dir().join(format!("{name}.json"))).unwrap();
    Process::new(spec).unwrap()
}
