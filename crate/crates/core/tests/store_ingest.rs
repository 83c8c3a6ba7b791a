mod common;

use common::{random_request, random_store};
use nfdb_core::ingest::ingest_alpha_table;
use nfdb_core::{execute_search, ingest_file, ingest_str, Store, SEED};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn lines_of_content(text: &str) -> usize {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .count()
}

#[test]
fn persistence_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fields.nfdb");
    let mut rng = StdRng::seed_from_u64(21);
    let (mut store, _) = random_store(&mut rng, 600);
    ingest_str(&mut store, SEED);
    store.save_to(&path).unwrap();
    let reopened = Store::open(&path).unwrap();
    assert_eq!(reopened.to_bytes(), store.to_bytes());
    assert_eq!(reopened.ledger(), store.ledger());
    assert_eq!(reopened.alpha_table(), store.alpha_table());
    assert_eq!(reopened.mass_table(), store.mass_table());
    for _ in 0..100 {
        let req = random_request(&mut rng);
        assert_eq!(
            execute_search(&reopened, &req).unwrap(),
            execute_search(&store, &req).unwrap()
        );
    }
    assert!(reopened.audit().is_empty());
}

#[test]
fn reingest_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("seed.jsonl");
    std::fs::write(&data, SEED).unwrap();
    let path = dir.path().join("db.nfdb");
    let mut store = Store::open(&path).unwrap();
    let first = ingest_file(&mut store, &data).unwrap();
    assert_eq!(first.total(), lines_of_content(SEED));
    assert!(first.rejected.is_empty(), "{:?}", first.rejected);
    let bytes = std::fs::read(&path).unwrap();

    let mut again = Store::open(&path).unwrap();
    let second = ingest_file(&mut again, &data).unwrap();
    assert_eq!(second.accepted, 0);
    assert_eq!(second.rejected.len(), first.accepted);
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
    assert!(again.audit().is_empty());
}

#[test]
fn reports_account_for_every_line() {
    let mut store = Store::new();
    let text = format!(
        "{SEED}\n{}\n{}\nnot json\n\n# comment\n",
        r#"{"kind":"field","degree":4,"poly":[1,0,0,0,-2],"group":"4T3","s":1,"disc":{"2":11},"h":[],"grd":"2^{11/8}"}"#,
        r#"{"kind":"field","degree":4,"poly":[1,0,0,0,5],"group":"4T3","s":2,"disc":{"2":4,"5":3},"h":[],"local":{"2":"[3,2]"}}"#,
    );
    let report = ingest_str(&mut store, &text);
    assert_eq!(report.total(), lines_of_content(&text));
    assert_eq!(report.rejected.len(), 3);
    // grd below rd is rejected as well
    assert!(report.rejected.iter().any(|(_, why)| why.contains("rd")));
    assert!(report.rejected.iter().all(|(line, _)| *line > 1));
    assert!(store.audit().is_empty());
}

#[test]
fn alpha_tables_from_text() {
    let mut store = Store::new();
    let report = ingest_alpha_table(&mut store, "# G alpha\n4T5 3/2\n5T5 2\n5T5 2\n6T16 1/2\n");
    assert_eq!(report.accepted, 2);
    assert_eq!(report.rejected.len(), 2);
    assert_eq!(store.alpha_table().len(), 2);
}
