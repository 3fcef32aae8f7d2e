//! Frozen expectations for every domain shipped in `battery/`.

use std::path::PathBuf;

use koenigs::domain_file;
use koenigs_core::completeness::{decide, predicted_components};
use koenigs_core::classifier::classify;
use serde_json::Value;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("battery")
}

#[test]
fn manifest_expectations_hold() {
    let m: Value = serde_json::from_str(&std::fs::read_to_string(dir().join("manifest.json")).unwrap()).unwrap();
    let domains = m["domains"].as_array().unwrap();
    assert!(domains.len() >= 19);
    for d in domains {
        let name = d["name"].as_str().unwrap();
        let text = std::fs::read_to_string(dir().join(d["file"].as_str().unwrap())).unwrap();
        let psi = domain_file::from_str(&text).unwrap_or_else(|e| panic!("{}: {}", name, e));
        let e = &d["expect"];
        let v = decide(&psi, Some(2.0));
        let (_, p2) = v.p.as_ref().unwrap();
        if let Some(c) = e["class"].as_str() {
            assert_eq!(classify(&psi).kind.name(), c, "{name} class");
        }
        if let Some(w) = e["weak_star_complete"].as_str() {
            assert_eq!(v.weak_star.status.as_str(), w, "{name} weak-star");
        }
        if let Some(r) = e["route"].as_str() {
            assert_eq!(v.weak_star.route, r, "{name} route");
        }
        if let Some(w) = e["p2_complete"].as_str() {
            assert_eq!(p2.status.as_str(), w, "{name} p=2");
        }
        if let Some(r) = e["p2_route"].as_str() {
            assert_eq!(p2.route, r, "{name} p=2 route");
        }
        if let Some(c) = e["components"].as_u64() {
            assert_eq!(predicted_components(&psi), Some(c as usize), "{name} components");
        }
        if let Some(c) = e["configuration"].as_str() {
            assert_eq!(v.features.configuration.as_deref(), Some(c), "{name} configuration");
        }
        assert!(v.consistent, "{name} inconsistent");
    }
}

#[test]
fn every_battery_file_is_listed() {
    let m = std::fs::read_to_string(dir().join("manifest.json")).unwrap();
    for entry in std::fs::read_dir(dir()).unwrap() {
        let f = entry.unwrap().file_name().into_string().unwrap();
        if f != "manifest.json" {
            assert!(m.contains(&format!("\"{}\"", f)), "{f} missing from manifest");
        }
    }
}
