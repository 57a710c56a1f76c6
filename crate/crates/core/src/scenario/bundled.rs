//! Scenario files shipped inside the binary.

use super::{Scenario, ScenarioError};

include!("bundled_list.rs");

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(name, _)| *name)
}

pub fn source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, src)| *src)
}

/// `None` when no bundled scenario has this name.
pub fn load(name: &str) -> Option<Result<Scenario, ScenarioError>> {
    source(name).map(Scenario::parse)
}

pub fn all() -> Result<Vec<Scenario>, (String, ScenarioError)> {
    BUNDLED
        .iter()
        .map(|(name, src)| Scenario::parse(src).map_err(|e| (name.to_string(), e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_file_is_listed_and_parses() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios");
        let mut on_disk: Vec<String> = std::fs::read_dir(dir)
            .unwrap()
            .filter_map(|e| {
                let name = e.unwrap().file_name().into_string().unwrap();
                name.strip_suffix(".scn").map(str::to_string)
            })
            .collect();
        on_disk.sort();
        let listed: Vec<String> = names().map(str::to_string).collect();
        assert_eq!(on_disk, listed);
        for s in all().unwrap() {
            assert!(names().any(|n| n == s.name), "{} has a mismatched name field", s.name);
        }
    }

    #[test]
    fn sync_sweep_example() {
        let s = load("fig5-LV-DP").unwrap().unwrap();
        assert_eq!(s.distribution, crate::controlplane::Distribution::Periodic { period: 1.0 });
        assert_eq!(s.collection, crate::controlplane::Collection::Passive);
        let sweep = s.sweep.unwrap();
        assert_eq!(sweep.parameter, super::super::SweepParam::SyncPeriod);
        assert_eq!(sweep.values, vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0]);
        assert!(load("nope").is_none());
    }
}
