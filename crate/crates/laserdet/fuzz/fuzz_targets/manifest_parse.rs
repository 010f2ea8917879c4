//! Fuzzes the manifest CSV parser. Accepted manifests must uphold the
//! uniqueness invariants and round-trip through serialization.

#![no_main]

use libfuzzer_sys::fuzz_target;
use std::collections::BTreeSet;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(records) = laserdet::parse_manifest(text) {
        let mut ids = BTreeSet::new();
        let mut keys = BTreeSet::new();
        for r in &records {
            assert!(ids.insert(r.clip_id.clone()), "duplicate clip_id accepted");
            assert!(
                keys.insert((r.speaker_id, r.utterance_id, r.label)),
                "duplicate (speaker, utterance, label) accepted"
            );
        }
        let rendered = laserdet::dataset::manifest_csv(&records);
        let again = laserdet::parse_manifest(&rendered).expect("serializer output parses");
        assert_eq!(again.len(), records.len());
    }
});
