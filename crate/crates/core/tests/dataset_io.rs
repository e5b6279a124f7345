use std::fs;
use std::path::Path;

use pupguard::dataset::{load_dataset, GrayImage, Label, CANONICAL_SIDE, MANIFEST_HEADER};
use pupguard::Error;

const HEADER: &str = "pair_id,subject_id,img1,img2,t1,t2,label";

fn setup(dir: &Path, rows: &[&str]) {
    fs::create_dir_all(dir.join("images")).unwrap();
    for (name, value) in [("a", 200u8), ("b", 90)] {
        GrayImage::filled(CANONICAL_SIDE, CANONICAL_SIDE, value)
            .write_pgm(&dir.join(format!("images/{name}.pgm")))
            .unwrap();
    }
    GrayImage::filled(64, 64, 10).write_pgm(&dir.join("images/small.pgm")).unwrap();
    let mut text = format!("{HEADER}\n");
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    fs::write(dir.join("manifest.csv"), text).unwrap();
}

fn row_error(dir: &Path) -> (usize, String) {
    match load_dataset(dir) {
        Err(Error::Manifest { row, message, .. }) => (row, message),
        other => panic!("expected a manifest error, got {other:?}"),
    }
}

#[test]
fn header_constant_matches() {
    assert_eq!(MANIFEST_HEADER.join(","), HEADER);
}

#[test]
fn header_only_manifest_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path(), &[]);
    assert!(load_dataset(dir.path()).unwrap().is_empty());
}

#[test]
fn two_rows_load_in_order() {
    let dir = tempfile::tempdir().unwrap();
    setup(
        dir.path(),
        &[
            "p1,s1,images/a.pgm,images/b.pgm,20240301090000.000000,20240301090001.500000,legit",
            "p2,s1,images/b.pgm,images/a.pgm,20240301091000.000000,20240301091000.250000,attack",
        ],
    );
    let ds = load_dataset(dir.path()).unwrap();
    assert_eq!(ds.pair_ids(), vec!["p1", "p2"]);
    assert_eq!(ds.pairs[0].label, Label::Legitimate);
    assert_eq!(ds.pairs[1].label, Label::Attack);
    assert_eq!(ds.pairs[0].first_id, "a");
    assert_eq!(ds.pairs[0].first.get(0, 0), 200);
    assert!((ds.pairs[0].interval().unwrap() - 1.5).abs() < 1e-12);
    assert!((ds.pairs[1].interval().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(load_dataset(dir.path()).unwrap().pairs, ds.pairs);
}

#[test]
fn missing_manifest() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_dataset(dir.path()), Err(Error::Io { .. })));
}

#[test]
fn missing_image_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    setup(
        dir.path(),
        &[
            "p1,s1,images/a.pgm,images/b.pgm,20240301090000.000000,20240301090001.000000,legit",
            "p2,s1,images/a.pgm,images/gone.pgm,20240301090000.000000,20240301090001.000000,legit",
        ],
    );
    let (row, message) = row_error(dir.path());
    assert_eq!(row, 2);
    assert!(message.contains("gone.pgm"));
}

#[test]
fn wrong_image_size() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path(), &["p1,s1,images/a.pgm,images/small.pgm,20240301090000.000000,20240301090001.000000,legit"]);
    let (row, message) = row_error(dir.path());
    assert_eq!(row, 1);
    assert!(message.contains("64x64"), "{message}");
}

#[test]
fn duplicate_pair_id() {
    let dir = tempfile::tempdir().unwrap();
    let line = "p1,s1,images/a.pgm,images/b.pgm,20240301090000.000000,20240301090001.000000,legit";
    setup(dir.path(), &[line, line]);
    let (row, message) = row_error(dir.path());
    assert_eq!(row, 2);
    assert!(message.contains("duplicate"));
}

#[test]
fn bad_fields() {
    let cases = [
        ("p1,s1,images/a.pgm,images/b.pgm,20240301090002.000000,20240301090001.000000,legit", "precedes"),
        ("p1,s1,images/a.pgm,images/b.pgm,2024-03-01,20240301090001.000000,legit", ""),
        ("p1,s1,images/a.pgm,images/b.pgm,20240301090000.000000,20240301090001.000000,maybe", "maybe"),
    ];
    for (line, needle) in cases {
        let dir = tempfile::tempdir().unwrap();
        setup(dir.path(), &[line]);
        let (row, message) = row_error(dir.path());
        assert_eq!(row, 1);
        assert!(message.contains(needle), "{message}");
    }
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path(), &[]);
    fs::write(dir.path().join("manifest.csv"), "id,a,b\n").unwrap();
    assert_eq!(row_error(dir.path()).0, 0);
}
