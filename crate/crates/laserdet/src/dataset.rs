//! Corpus manifests, the three train/test partition protocols, the synthetic
//! photo-acoustic corpus generator, and the anti-forensic noise injector.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::audio::{write_wav, AudioBuffer, CANONICAL_RATE_HZ};
use crate::dsp::{self, Butterworth};
use crate::error::{Error, Result};

pub const MANIFEST_HEADER: &str = "clip_id,speaker_id,utterance_id,label,path";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Acoustic,
    Laser,
}

impl Label {
    pub fn name(&self) -> &'static str {
        match self {
            Label::Acoustic => "acoustic",
            Label::Laser => "laser",
        }
    }

    /// Laser is the positive (+1) detection class.
    pub fn sign(&self) -> i8 {
        match self {
            Label::Acoustic => -1,
            Label::Laser => 1,
        }
    }

    pub fn from_sign(sign: i8) -> Label {
        if sign >= 0 {
            Label::Laser
        } else {
            Label::Acoustic
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClipRecord {
    pub clip_id: String,
    pub speaker_id: u32,
    pub utterance_id: u32,
    pub label: Label,
    pub path: PathBuf,
}

/// Parses manifest CSV text. Paths are kept as written; `load_manifest`
/// resolves them against the manifest's directory.
pub fn parse_manifest(text: &str) -> Result<Vec<ClipRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end_matches('\r') == MANIFEST_HEADER => {}
        Some((_, header)) => {
            return Err(Error::MalformedRow {
                line: 1,
                reason: format!("bad header {header:?}, expected {MANIFEST_HEADER:?}"),
            })
        }
        None => {
            return Err(Error::MalformedRow {
                line: 1,
                reason: "empty manifest".into(),
            })
        }
    }

    let mut records = Vec::new();
    let mut ids = BTreeSet::new();
    let mut keys = BTreeSet::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::MalformedRow {
                line: line_no,
                reason: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let clip_id = fields[0].trim().to_string();
        if clip_id.is_empty() {
            return Err(Error::MalformedRow {
                line: line_no,
                reason: "empty clip_id".into(),
            });
        }
        let speaker_id: u32 = fields[1].trim().parse().map_err(|_| Error::MalformedRow {
            line: line_no,
            reason: format!("bad speaker_id {:?}", fields[1]),
        })?;
        let utterance_id: u32 = fields[2].trim().parse().map_err(|_| Error::MalformedRow {
            line: line_no,
            reason: format!("bad utterance_id {:?}", fields[2]),
        })?;
        let label = match fields[3].trim() {
            "acoustic" => Label::Acoustic,
            "laser" => Label::Laser,
            other => {
                return Err(Error::UnknownLabel {
                    line: line_no,
                    label: other.to_string(),
                })
            }
        };
        if !ids.insert(clip_id.clone()) {
            return Err(Error::DuplicateKey {
                line: line_no,
                key: clip_id,
            });
        }
        if !keys.insert((speaker_id, utterance_id, label)) {
            return Err(Error::DuplicateKey {
                line: line_no,
                key: format!("({speaker_id}, {utterance_id}, {label})"),
            });
        }
        records.push(ClipRecord {
            clip_id,
            speaker_id,
            utterance_id,
            label,
            path: PathBuf::from(fields[4].trim()),
        });
    }
    Ok(records)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ClipRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path.to_path_buf())
        } else {
            Error::io(format!("reading {}", path.display()), e)
        }
    })?;
    let mut records = parse_manifest(&text)?;
    if let Some(dir) = path.parent() {
        for r in &mut records {
            if r.path.is_relative() {
                r.path = dir.join(&r.path);
            }
        }
    }
    Ok(records)
}

pub fn manifest_csv(records: &[ClipRecord]) -> String {
    let mut out = String::from(MANIFEST_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.clip_id,
            r.speaker_id,
            r.utterance_id,
            r.label,
            r.path.display()
        ));
    }
    out
}

// --- partitions ---

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// Random 70/30 split; speakers and texts may leak between sides.
    SdTd,
    /// First 14 speakers train, remaining 5 test.
    SiTd,
    /// Speakers 1-14 with utterances 1-3 train; speakers 15-19 with 4-5 test.
    SiTi,
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::SdTd => "sd_td",
            Protocol::SiTd => "si_td",
            Protocol::SiTi => "si_ti",
        }
    }

    pub const ALL: [Protocol; 3] = [Protocol::SdTd, Protocol::SiTd, Protocol::SiTi];
}

impl std::str::FromStr for Protocol {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "sd_td" | "sdtd" => Ok(Protocol::SdTd),
            "si_td" | "sitd" => Ok(Protocol::SiTd),
            "si_ti" | "siti" => Ok(Protocol::SiTi),
            other => Err(format!("unknown protocol {other:?}")),
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub protocol: Protocol,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

/// Expected corpus shape for the speaker-independent protocols.
const FULL_SPEAKERS: usize = 19;
const FULL_UTTERANCES: usize = 5;
const SI_TRAIN_SPEAKERS: usize = 14;
const TI_TRAIN_UTTERANCES: usize = 3;

fn require_complete(records: &[ClipRecord]) -> Result<(Vec<u32>, Vec<u32>)> {
    let speakers: Vec<u32> = records
        .iter()
        .map(|r| r.speaker_id)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let utterances: Vec<u32> = records
        .iter()
        .map(|r| r.utterance_id)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if speakers.len() != FULL_SPEAKERS || utterances.len() != FULL_UTTERANCES {
        return Err(Error::IncompleteCorpus(format!(
            "need {FULL_SPEAKERS} speakers x {FULL_UTTERANCES} utterances, found {} x {}",
            speakers.len(),
            utterances.len()
        )));
    }
    let expect = FULL_SPEAKERS * FULL_UTTERANCES * 2;
    if records.len() != expect {
        return Err(Error::IncompleteCorpus(format!(
            "need {expect} clips, found {}",
            records.len()
        )));
    }
    for &s in &speakers {
        for &u in &utterances {
            for label in [Label::Acoustic, Label::Laser] {
                if !records
                    .iter()
                    .any(|r| r.speaker_id == s && r.utterance_id == u && r.label == label)
                {
                    return Err(Error::IncompleteCorpus(format!(
                        "missing clip (speaker {s}, utterance {u}, {label})"
                    )));
                }
            }
        }
    }
    Ok((speakers, utterances))
}

/// Deterministic partition of the manifest under the given protocol.
pub fn make_partition(records: &[ClipRecord], protocol: Protocol, seed: u64) -> Result<Partition> {
    if records.is_empty() {
        return Err(Error::IncompleteCorpus("empty manifest".into()));
    }
    let (train, test) = match protocol {
        Protocol::SdTd => {
            let mut ids: Vec<&str> = records.iter().map(|r| r.clip_id.as_str()).collect();
            let mut rng = dsp::seeded_rng(dsp::derive_seed(seed, &[0x5d]));
            ids.shuffle(&mut rng);
            let n_train = (0.7 * records.len() as f64).floor() as usize;
            (
                ids[..n_train].iter().map(|s| s.to_string()).collect(),
                ids[n_train..].iter().map(|s| s.to_string()).collect(),
            )
        }
        Protocol::SiTd => {
            let (speakers, _) = require_complete(records)?;
            let cut = speakers[SI_TRAIN_SPEAKERS - 1];
            partition_by(records, |r| r.speaker_id <= cut, |r| r.speaker_id > cut)
        }
        Protocol::SiTi => {
            let (speakers, utterances) = require_complete(records)?;
            let sp_cut = speakers[SI_TRAIN_SPEAKERS - 1];
            let utt_cut = utterances[TI_TRAIN_UTTERANCES - 1];
            partition_by(
                records,
                |r| r.speaker_id <= sp_cut && r.utterance_id <= utt_cut,
                |r| r.speaker_id > sp_cut && r.utterance_id > utt_cut,
            )
        }
    };
    let partition = Partition {
        protocol,
        train,
        test,
    };
    validate_partition(&partition, records)?;
    Ok(partition)
}

fn partition_by(
    records: &[ClipRecord],
    train_rule: impl Fn(&ClipRecord) -> bool,
    test_rule: impl Fn(&ClipRecord) -> bool,
) -> (Vec<String>, Vec<String>) {
    let train = records
        .iter()
        .filter(|r| train_rule(r))
        .map(|r| r.clip_id.clone())
        .collect();
    let test = records
        .iter()
        .filter(|r| test_rule(r))
        .map(|r| r.clip_id.clone())
        .collect();
    (train, test)
}

/// Enforces the partition invariants: disjoint clip sets, and for the SI/TI
/// protocols disjoint speaker / utterance sets between train and test.
pub fn validate_partition(partition: &Partition, records: &[ClipRecord]) -> Result<()> {
    let train: BTreeSet<&str> = partition.train.iter().map(|s| s.as_str()).collect();
    let test: BTreeSet<&str> = partition.test.iter().map(|s| s.as_str()).collect();
    if !train.is_disjoint(&test) {
        return Err(Error::IncompleteCorpus(
            "train and test share clip ids".into(),
        ));
    }
    let side = |ids: &BTreeSet<&str>| -> (BTreeSet<u32>, BTreeSet<u32>) {
        let mut speakers = BTreeSet::new();
        let mut utts = BTreeSet::new();
        for r in records.iter().filter(|r| ids.contains(r.clip_id.as_str())) {
            speakers.insert(r.speaker_id);
            utts.insert(r.utterance_id);
        }
        (speakers, utts)
    };
    let (train_sp, train_utt) = side(&train);
    let (test_sp, test_utt) = side(&test);
    match partition.protocol {
        Protocol::SdTd => {}
        Protocol::SiTd => {
            if !train_sp.is_disjoint(&test_sp) {
                return Err(Error::IncompleteCorpus("speaker leakage".into()));
            }
        }
        Protocol::SiTi => {
            if !train_sp.is_disjoint(&test_sp) {
                return Err(Error::IncompleteCorpus("speaker leakage".into()));
            }
            if !train_utt.is_disjoint(&test_utt) {
                return Err(Error::IncompleteCorpus("utterance leakage".into()));
            }
        }
    }
    Ok(())
}

// --- synthetic corpus ---

/// Channel and corpus parameters for the desk-scale synthetic reproduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_speakers: u32,
    pub n_utterances: u32,
    pub clip_seconds: f64,
    /// Laser channel: low-pass corner of the photo-acoustic response.
    pub cutoff_hz: f64,
    /// Laser channel: band of the injected low-frequency noise.
    pub lf_noise_band: (f64, f64),
    /// Laser channel: SNR of that noise against the filtered speech.
    pub lf_noise_snr_db: f64,
    /// Acoustic channel: reverberation time of the synthetic room.
    pub rt60_s: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            n_speakers: 19,
            n_utterances: 5,
            clip_seconds: 3.0,
            cutoff_hz: 2000.0,
            lf_noise_band: (0.0, 2000.0),
            lf_noise_snr_db: 10.0,
            rt60_s: 0.3,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        let nyq = CANONICAL_RATE_HZ as f64 / 2.0;
        if self.cutoff_hz >= nyq || self.cutoff_hz <= 0.0 {
            return Err(Error::InvalidBand {
                low: 0.0,
                high: self.cutoff_hz,
                rate: CANONICAL_RATE_HZ,
            });
        }
        if self.clip_seconds <= 1.0 {
            return Err(Error::ClipTooShort {
                need: CANONICAL_RATE_HZ as usize,
                got: (self.clip_seconds * CANONICAL_RATE_HZ as f64) as usize,
            });
        }
        Ok(())
    }
}

/// Deterministic "dry" speech surrogate: a harmonic pulse train at a
/// per-speaker f0 under per-utterance amplitude-modulated voiced bursts,
/// interleaved with band-limited fricative noise bursts.
fn dry_utterance(cfg: &SynthConfig, speaker: u32, utterance: u32) -> Vec<f64> {
    let fs = CANONICAL_RATE_HZ as f64;
    let n = (cfg.clip_seconds * fs) as usize;

    let mut sp_rng = dsp::seeded_rng(dsp::derive_seed(cfg.seed, &[1, speaker as u64]));
    let f0 = 90.0 + 160.0 * sp_rng.random::<f64>();
    let tilt = 0.7 + 0.6 * sp_rng.random::<f64>();
    let vibrato_hz = 4.0 + 2.0 * sp_rng.random::<f64>();

    // burst placement is a property of the text, shared across speakers;
    // syllable-like stratification keeps the duty cycle similar across texts
    let mut txt_rng = dsp::seeded_rng(dsp::derive_seed(cfg.seed, &[2, utterance as u64]));
    let n_bursts = (2.0 * cfg.clip_seconds) as usize + (txt_rng.random::<u64>() % 3) as usize;
    let slot = cfg.clip_seconds / n_bursts as f64;
    let bursts: Vec<(f64, f64)> = (0..n_bursts)
        .map(|i| {
            let center = (i as f64 + 0.2 + 0.6 * txt_rng.random::<f64>()) * slot;
            let width = slot * (0.5 + 0.4 * txt_rng.random::<f64>());
            (center, width)
        })
        .collect();
    // fricative onsets ride the voiced burst edges
    let fricatives: Vec<(f64, f64)> = bursts
        .iter()
        .map(|&(c, w)| {
            let center = c + w * (0.6 + 0.4 * txt_rng.random::<f64>());
            let width = 0.05 + 0.10 * txt_rng.random::<f64>();
            (center, width)
        })
        .collect();

    // per-(speaker, utterance) phases and slight timing jitter
    let mut mix_rng = dsp::seeded_rng(dsp::derive_seed(
        cfg.seed,
        &[3, speaker as u64, utterance as u64],
    ));
    let jitter = 0.03 * (mix_rng.random::<f64>() - 0.5);
    let n_harm = (6500.0 / f0).floor() as usize;
    let phases: Vec<f64> = (0..n_harm)
        .map(|_| 2.0 * std::f64::consts::PI * mix_rng.random::<f64>())
        .collect();
    let vib_phase = 2.0 * std::f64::consts::PI * mix_rng.random::<f64>();

    let bump_sum = |centers: &[(f64, f64)], t: f64| -> f64 {
        centers
            .iter()
            .map(|&(c, w)| {
                let u = (t - (c + jitter)) / w;
                if u.abs() < 1.0 {
                    0.5 + 0.5 * (std::f64::consts::PI * u).cos()
                } else {
                    0.0
                }
            })
            .fold(0.0f64, f64::max)
    };

    let two_pi = 2.0 * std::f64::consts::PI;
    let mut phase = vec![0.0f64; n_harm];
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / fs;
        let f_inst = f0 * (1.0 + 0.01 * (two_pi * vibrato_hz * t + vib_phase).sin());
        let mut s = 0.0;
        for (k, ph) in phase.iter_mut().enumerate() {
            let h = (k + 1) as f64;
            *ph += two_pi * h * f_inst / fs;
            s += (*ph + phases[k]).sin() / h.powf(tilt);
        }
        out.push(s * bump_sum(&bursts, t));
    }

    // sibilant energy: 3-7.5 kHz noise gated by the fricative envelope
    let mut fric_rng = dsp::seeded_rng(dsp::derive_seed(
        cfg.seed,
        &[8, speaker as u64, utterance as u64],
    ));
    let sibilant = bandlimited_noise(n, (3000.0, 7500.0), CANONICAL_RATE_HZ, &mut fric_rng);
    let voiced_rms = mean_power(&out).sqrt();
    let sibilant_rms = mean_power(&sibilant).sqrt().max(1e-12);
    let gain = 0.35 * voiced_rms / sibilant_rms;
    for i in 0..n {
        let t = i as f64 / fs;
        out[i] += sibilant[i] * gain * bump_sum(&fricatives, t);
    }
    out
}

/// Exponentially decaying noise tail with a unit direct path.
fn room_impulse_response(rt60_s: f64, seed: u64) -> Vec<f64> {
    let fs = CANONICAL_RATE_HZ as f64;
    let len = (1.2 * rt60_s * fs) as usize;
    let mut rng = dsp::seeded_rng(seed);
    let tail = dsp::gaussians(&mut rng, len);
    let decay = -3.0 * std::f64::consts::LN_10 / (rt60_s * fs); // level -60 dB at rt60
    let mut h: Vec<f64> = tail
        .iter()
        .enumerate()
        .map(|(t, g)| 0.3 * g * (decay * t as f64).exp())
        .collect();
    h[0] = 1.0;
    let energy: f64 = h.iter().map(|v| v * v).sum();
    let norm = energy.sqrt();
    h.iter_mut().for_each(|v| *v /= norm);
    h
}

fn bandlimited_noise(n: usize, band: (f64, f64), rate: u32, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    let white = dsp::gaussians(rng, n);
    let kernel = dsp::fir_bandpass(513, band.0, band.1, rate as f64);
    dsp::convolve_same(&white, &kernel)
}

fn mean_power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// Adds `noise` to `signal` scaled for the requested SNR (dB).
fn mix_at_snr(signal: &[f64], noise: &[f64], snr_db: f64) -> Vec<f64> {
    let sp = mean_power(signal);
    let np = mean_power(noise);
    let target = sp / 10f64.powf(snr_db / 10.0);
    let g = if np > 0.0 { (target / np).sqrt() } else { 0.0 };
    signal
        .iter()
        .zip(noise)
        .map(|(s, v)| s + g * v)
        .collect()
}

/// Renders one clip through the acoustic (room) or laser (photo-acoustic)
/// channel model.
pub fn synth_clip(cfg: &SynthConfig, speaker: u32, utterance: u32, label: Label) -> AudioBuffer {
    let dry = dry_utterance(cfg, speaker, utterance);
    let samples = match label {
        Label::Acoustic => {
            let rir_seed = dsp::derive_seed(cfg.seed, &[4, speaker as u64, utterance as u64]);
            let rir = room_impulse_response(cfg.rt60_s, rir_seed);
            let wet = dsp::convolve_full(&dry, &rir);
            let wet = &wet[..dry.len()];
            let mut rng = dsp::seeded_rng(dsp::derive_seed(
                cfg.seed,
                &[5, speaker as u64, utterance as u64],
            ));
            let ambient = dsp::gaussians(&mut rng, wet.len());
            mix_at_snr(wet, &ambient, 30.0)
        }
        Label::Laser => {
            let lp = Butterworth::lowpass(12, cfg.cutoff_hz, CANONICAL_RATE_HZ as f64);
            let filtered = lp.filter(&dry);
            let mut rng = dsp::seeded_rng(dsp::derive_seed(
                cfg.seed,
                &[6, speaker as u64, utterance as u64],
            ));
            let colored = bandlimited_noise(filtered.len(), cfg.lf_noise_band, CANONICAL_RATE_HZ, &mut rng);
            let mixed = mix_at_snr(&filtered, &colored, cfg.lf_noise_snr_db);
            // broadband sensor self-noise; dominates the filter's stopband
            // leakage so the high subbands carry a clean noise floor
            let mut floor_rng = dsp::seeded_rng(dsp::derive_seed(
                cfg.seed,
                &[7, speaker as u64, utterance as u64],
            ));
            let floor = dsp::gaussians(&mut floor_rng, mixed.len());
            mix_at_snr(&mixed, &floor, 50.0)
        }
    };
    AudioBuffer::new(samples, CANONICAL_RATE_HZ)
        .expect("synthesized clip is non-empty and finite")
        .peak_normalized(0.9)
}

/// Writes the full corpus (n_speakers x n_utterances x 2 labels) plus its
/// manifest CSV into `out_dir`; returns the manifest records.
pub fn synth_corpus(cfg: &SynthConfig, out_dir: impl AsRef<Path>) -> Result<Vec<ClipRecord>> {
    cfg.validate()?;
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::io(format!("creating {}", out_dir.display()), e))?;

    let mut jobs = Vec::new();
    for speaker in 1..=cfg.n_speakers {
        for utterance in 1..=cfg.n_utterances {
            for label in [Label::Acoustic, Label::Laser] {
                jobs.push((speaker, utterance, label));
            }
        }
    }

    let records: Vec<ClipRecord> = jobs
        .par_iter()
        .map(|&(speaker, utterance, label)| -> Result<ClipRecord> {
            let clip_id = format!("s{speaker:02}_u{utterance}_{label}");
            let file = format!("{clip_id}.wav");
            let buf = synth_clip(cfg, speaker, utterance, label);
            write_wav(out_dir.join(&file), &buf)?;
            Ok(ClipRecord {
                clip_id,
                speaker_id: speaker,
                utterance_id: utterance,
                label,
                path: PathBuf::from(file),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let manifest_path = out_dir.join("manifest.csv");
    std::fs::write(&manifest_path, manifest_csv(&records))
        .map_err(|e| Error::io(format!("writing {}", manifest_path.display()), e))?;

    // return records with resolved paths, matching load_manifest
    Ok(records
        .into_iter()
        .map(|mut r| {
            r.path = out_dir.join(&r.path);
            r
        })
        .collect())
}

/// Adds seeded band-limited noise at the requested signal-to-noise ratio.
/// An infinite `snr_db` disables the noise and returns the buffer unchanged.
/// The output is renormalized only if it would clip.
pub fn add_colored_noise(
    buf: &AudioBuffer,
    band_hz: (f64, f64),
    snr_db: f64,
    seed: u64,
) -> Result<AudioBuffer> {
    if snr_db.is_infinite() && snr_db > 0.0 {
        return Ok(buf.clone());
    }
    let nyq = buf.sample_rate_hz() as f64 / 2.0;
    if !(band_hz.0 >= 0.0 && band_hz.0 < band_hz.1 && band_hz.1 <= nyq) {
        return Err(Error::InvalidBand {
            low: band_hz.0,
            high: band_hz.1,
            rate: buf.sample_rate_hz(),
        });
    }
    let mut rng = dsp::seeded_rng(seed);
    let noise = bandlimited_noise(buf.len(), band_hz, buf.sample_rate_hz(), &mut rng);
    let mixed = mix_at_snr(buf.samples(), &noise, snr_db);
    let peak = mixed.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let samples = if peak > 1.0 {
        mixed.iter().map(|v| v / peak).collect()
    } else {
        mixed
    };
    AudioBuffer::new(samples, buf.sample_rate_hz())
}
