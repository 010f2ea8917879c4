//! Fuzzes the RIFF/WAVE parser with arbitrary bytes. Parsing must never
//! panic, and any buffer it accepts must satisfy the AudioBuffer invariants.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(buf) = laserdet::parse_wav(data) {
        assert!(!buf.is_empty());
        assert!(buf.sample_rate_hz() > 0);
        assert!(buf.samples().iter().all(|s| s.is_finite() && s.abs() <= 1.0));

        // an accepted buffer must survive re-serialization and re-parsing
        let bytes = laserdet::audio::wav_bytes(&buf);
        let again = laserdet::parse_wav(&bytes).expect("writer output parses");
        assert_eq!(again.len(), buf.len());
        assert_eq!(again.sample_rate_hz(), buf.sample_rate_hz());
    }
});
