//! The shipped `.fwid` corpus mirrors the registry. Regenerate with
//! `FW_BLESS=1 cargo test -p foxwright --test corpus`.

use std::fs;
use std::path::PathBuf;

use foxwright::catalog::{list_identities, Side};
use foxwright::harness::{sample_binding, TrialConfig};
use foxwright::notation::{parse_identity, print_identity};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn file_for(name: &str) -> PathBuf {
    corpus_dir().join(format!("{name}.fwid"))
}

#[test]
fn corpus_matches_registry_text() {
    let bless = std::env::var_os("FW_BLESS").is_some();
    if bless {
        fs::create_dir_all(corpus_dir()).unwrap();
    }
    for id in list_identities() {
        let text = print_identity(id);
        let path = file_for(&id.name);
        if bless {
            fs::write(&path, &text).unwrap();
        }
        let on_disk = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(on_disk, text, "{} is stale; rerun with FW_BLESS=1", path.display());
    }
    let files = fs::read_dir(corpus_dir()).unwrap().filter(|e| {
        e.as_ref().unwrap().path().extension().is_some_and(|x| x == "fwid")
    });
    assert_eq!(files.count(), list_identities().len(), "corpus has files with no registry entry");
    assert!(list_identities().len() >= 24);
}

#[test]
fn corpus_files_parse_to_registry_entries() {
    for id in list_identities() {
        let text = fs::read_to_string(file_for(&id.name)).unwrap();
        let parsed = parse_identity(&text).unwrap_or_else(|e| panic!("{}: {e}", id.name));
        assert_eq!(&parsed, id, "{}", id.name);
        assert_eq!(print_identity(&parsed), text, "{} is not a print fixpoint", id.name);
    }
}

#[test]
fn corpus_identities_evaluate_like_registry() {
    for id in list_identities() {
        let parsed = parse_identity(&fs::read_to_string(file_for(&id.name)).unwrap()).unwrap();
        let cfg = TrialConfig { seed: 99, ..TrialConfig::for_identity(&id.name) };
        for t in 0..20 {
            let b = sample_binding(id, &cfg, t).unwrap();
            for side in [Side::Lhs, Side::Rhs] {
                let want = id.eval_side(side, &b).unwrap();
                let got = parsed.eval_side(side, &b).unwrap();
                let rel = (want - got).norm() / want.norm().max(1.0);
                assert!(rel <= 1e-12, "{} trial {t}: {want} vs {got}", id.name);
            }
        }
    }
}
