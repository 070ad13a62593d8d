//! The vendored benchmark files against their manifest.

use std::fs;
use std::path::PathBuf;

use oraclekit::bench::load_benchmarks;
use oraclekit::parse_pla;
use sha2::{Digest, Sha256};

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks")
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn manifest_checksums_and_shapes() {
    let mut reader = csv::Reader::from_path(dir().join("MANIFEST.csv")).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["function", "inputs", "outputs", "file", "sha256", "provenance"]
    );
    let mut vendored = 0;
    for row in reader.records() {
        let row = row.unwrap();
        if row[3].is_empty() {
            assert!(row[4].is_empty(), "{} lists a checksum without a file", &row[0]);
            continue;
        }
        let bytes = fs::read(dir().join(&row[3])).unwrap();
        assert_eq!(hex(&Sha256::digest(&bytes)), &row[4], "{} checksum", &row[0]);
        let table = parse_pla(std::str::from_utf8(&bytes).unwrap()).unwrap();
        assert_eq!(table.n.to_string(), &row[1], "{} inputs", &row[0]);
        assert_eq!(table.m.to_string(), &row[2], "{} outputs", &row[0]);
        vendored += 1;
    }
    assert_eq!(vendored, load_benchmarks(&dir()).unwrap().len());
}
