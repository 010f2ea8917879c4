//! Replays the checked-in fuzz corpus seeds (and seeded mutations of them)
//! through the three untrusted-input parsers. The real fuzz targets live in
//! `fuzz/fuzz_targets/`; this test keeps their invariants exercised by
//! `cargo test` on stable.

use std::path::PathBuf;

use laserdet::dsp::seeded_rng;
use laserdet::svm::SvmModel;
use rand::Rng;

fn corpus(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut seeds: Vec<(PathBuf, Vec<u8>)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|_| panic!("fuzz corpus {} missing", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty(), "no seeds for {target}");
    seeds
}

fn wav_invariants(data: &[u8]) {
    if let Ok(buf) = laserdet::parse_wav(data) {
        assert!(!buf.is_empty());
        assert!(buf.sample_rate_hz() > 0);
        assert!(buf.samples().iter().all(|s| s.is_finite() && s.abs() <= 1.0));
        let bytes = laserdet::audio::wav_bytes(&buf);
        let again = laserdet::parse_wav(&bytes).expect("writer output parses");
        assert_eq!(again.len(), buf.len());
    }
}

fn manifest_invariants(data: &[u8]) {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(records) = laserdet::parse_manifest(text) {
            let rendered = laserdet::dataset::manifest_csv(&records);
            let again = laserdet::parse_manifest(&rendered).expect("round-trip parses");
            assert_eq!(again.len(), records.len());
        }
    }
}

fn model_invariants(data: &[u8]) {
    if let Ok(model) = SvmModel::from_bytes(data) {
        assert!(model.dim > 0 && !model.support_vectors.is_empty());
        let (label, score) = model.predict(&vec![0.0; model.dim]).unwrap();
        assert!(label == 1 || label == -1);
        assert!(score.is_finite());
        let bytes = model.to_bytes().unwrap();
        assert!(SvmModel::from_bytes(&bytes).is_ok());
    }
}

fn replay(target: &str, check: fn(&[u8])) {
    let seeds = corpus(target);
    let mut rng = seeded_rng(0xF022);
    for (path, bytes) in &seeds {
        check(bytes);
        // seeded mutations: flips, truncations, and splices of seed pairs
        for _ in 0..2000 {
            let mut mutated = bytes.clone();
            match rng.random::<u64>() % 4 {
                0 if !mutated.is_empty() => {
                    let at = rng.random::<u64>() as usize % mutated.len();
                    mutated[at] ^= 1 << (rng.random::<u64>() % 8);
                }
                1 if !mutated.is_empty() => {
                    let at = rng.random::<u64>() as usize % mutated.len();
                    mutated.truncate(at);
                }
                2 => {
                    let (_, other) = &seeds[rng.random::<u64>() as usize % seeds.len()];
                    let cut = if mutated.is_empty() {
                        0
                    } else {
                        rng.random::<u64>() as usize % mutated.len()
                    };
                    mutated.truncate(cut);
                    mutated.extend_from_slice(other);
                }
                _ => {
                    let at = if mutated.is_empty() {
                        0
                    } else {
                        rng.random::<u64>() as usize % mutated.len()
                    };
                    mutated.insert(at, rng.random::<u64>() as u8);
                }
            }
            check(&mutated);
        }
        // parsing the seed twice must agree (no hidden state)
        check(bytes);
        let _ = path;
    }
}

#[test]
fn wav_parse_seeds_and_mutations() {
    replay("wav_parse", wav_invariants);
}

#[test]
fn manifest_parse_seeds_and_mutations() {
    replay("manifest_parse", manifest_invariants);
}

#[test]
fn model_load_seeds_and_mutations() {
    replay("model_load", model_invariants);
}

#[test]
fn valid_seeds_actually_parse() {
    // the "valid" seeds must exercise the accept path, not just rejections
    let wav = corpus("wav_parse");
    assert!(wav
        .iter()
        .any(|(p, b)| p.ends_with("mono16.wav") && laserdet::parse_wav(b).is_ok()));
    let man = corpus("manifest_parse");
    assert!(man.iter().any(|(p, b)| {
        p.ends_with("valid.csv")
            && laserdet::parse_manifest(std::str::from_utf8(b).unwrap())
                .map(|r| r.len() == 4)
                .unwrap_or(false)
    }));
    let models = corpus("model_load");
    assert!(models
        .iter()
        .any(|(p, b)| p.ends_with("valid.svm") && SvmModel::from_bytes(b).is_ok()));
}
