//! Replays the fuzz corpus seeds, and cheap mutations of them, through the
//! parsers. Errors are fine; panics are not.

use std::path::{Path, PathBuf};

use rand::prelude::*;

use ccsp::harness::gen::rng_from_seed;
use ccsp::harness::io::{parse_algebra_json, parse_instance_json, parse_language_json, parse_result_json};

fn corpus(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "empty corpus for {target}");
    out
}

fn parse(target: &str, text: &str) -> bool {
    match target {
        "parse_algebra" => parse_algebra_json(text).is_ok(),
        "parse_instance" => parse_instance_json(text, None).is_ok(),
        "parse_language" => parse_language_json(text).is_ok(),
        "parse_result" => parse_result_json(text).is_ok(),
        _ => unreachable!(),
    }
}

const TARGETS: [&str; 4] = ["parse_algebra", "parse_instance", "parse_language", "parse_result"];

#[test]
fn seeds_parse_as_expected() {
    let rejected = ["partial_tables.json", "algebra_path.json"];
    for target in TARGETS {
        for (path, text) in corpus(target) {
            let name = path.file_name().unwrap().to_str().unwrap();
            assert_eq!(parse(target, &text), !rejected.contains(&name), "{target}/{name}");
        }
    }
}

#[test]
fn mutated_seeds_do_not_panic() {
    let mut rng = rng_from_seed(11);
    for target in TARGETS {
        for (_, text) in corpus(target) {
            let bytes = text.as_bytes();
            for cut in (0..bytes.len()).step_by(7) {
                let _ = parse(target, &String::from_utf8_lossy(&bytes[..cut]));
            }
            for _ in 0..300 {
                let mut b = bytes.to_vec();
                for _ in 0..rng.gen_range(1..4) {
                    let i = rng.gen_range(0..b.len());
                    b[i] = *b"0123456789-[]{},:\"ae ".choose(&mut rng).unwrap();
                }
                let _ = parse(target, &String::from_utf8_lossy(&b));
            }
        }
    }
}
