//! Experiment harness: clip-level evaluation under the three partition
//! protocols, sliding-window splice detection, the pre-sensor noise
//! robustness sweep, and report serialization.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;

use crate::audio::{load_wav, resample, AudioBuffer, CANONICAL_RATE_HZ};
use crate::dataset::{
    add_colored_noise, make_partition, validate_partition, ClipRecord, Label, Partition, Protocol,
};
use crate::dsp::derive_seed;
use crate::dwt::WaveletSpec;
use crate::error::{Error, Result};
use crate::features::{featurize, CepstralConfig, FeatureVector, Scheme};
use crate::svm::{train, GammaMode, SvmConfig, SvmModel};

/// Everything an experiment needs beyond the manifest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub wavelet: WaveletSpec,
    pub cepstral: CepstralConfig,
    pub svm: SvmConfig,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            wavelet: WaveletSpec::default(),
            cepstral: CepstralConfig::default(),
            svm: SvmConfig::default(),
            seed: 42,
        }
    }
}

impl EvalConfig {
    /// Canonical one-line snapshot serialized into every report.
    pub fn snapshot(&self, scheme: Scheme) -> String {
        let gamma = match self.svm.gamma {
            GammaMode::Scale => "scale".to_string(),
            GammaMode::Fixed(g) => format!("{g}"),
        };
        format!(
            "scheme={} wavelet={} level={} boundary={:?} agg=mean_std svm_c={} gamma={} kkt_tol={} standardize={} seed={}",
            scheme,
            self.wavelet.family.name(),
            self.wavelet.level,
            self.wavelet.boundary,
            self.svm.c,
            gamma,
            self.svm.kkt_tol,
            self.svm.standardize,
            self.seed
        )
    }
}

pub fn fnv1a64(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClipVerdict {
    pub clip_id: String,
    pub truth: Label,
    pub predicted: Label,
    pub score: f64,
}

/// Outcome of one (protocol, scheme) experiment. Laser is the positive class.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub protocol: Protocol,
    pub scheme: Scheme,
    pub accuracy: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    pub verdicts: Vec<ClipVerdict>,
    pub seed: u64,
    pub config: String,
    pub config_hash: String,
}

impl EvalReport {
    fn from_verdicts(
        protocol: Protocol,
        scheme: Scheme,
        verdicts: Vec<ClipVerdict>,
        cfg: &EvalConfig,
    ) -> EvalReport {
        let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
        for v in &verdicts {
            match (v.truth, v.predicted) {
                (Label::Laser, Label::Laser) => tp += 1,
                (Label::Acoustic, Label::Laser) => fp += 1,
                (Label::Acoustic, Label::Acoustic) => tn += 1,
                (Label::Laser, Label::Acoustic) => fn_ += 1,
            }
        }
        let total = tp + fp + tn + fn_;
        let config = cfg.snapshot(scheme);
        EvalReport {
            protocol,
            scheme,
            accuracy: (tp + tn) as f64 / total.max(1) as f64,
            tp,
            fp,
            tn,
            fn_,
            verdicts,
            seed: cfg.seed,
            config_hash: format!("{:016x}", fnv1a64(&config)),
            config,
        }
    }

    pub fn test_size(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Clip features keyed by id, computed once and reused across seeds.
pub struct FeaturizedCorpus {
    pub scheme: Scheme,
    pub records: Vec<ClipRecord>,
    pub features: HashMap<String, FeatureVector>,
}

/// Loads a clip and canonicalizes it to 16 kHz mono.
pub fn load_clip(path: &Path) -> Result<AudioBuffer> {
    let raw = load_wav(path)?;
    resample(&raw, CANONICAL_RATE_HZ)
}

/// Featurizes every manifest clip in parallel (deterministic ordering).
pub fn featurize_corpus(
    records: &[ClipRecord],
    scheme: Scheme,
    cfg: &EvalConfig,
) -> Result<FeaturizedCorpus> {
    let feats: Vec<(String, FeatureVector)> = records
        .par_iter()
        .map(|r| -> Result<(String, FeatureVector)> {
            let buf = load_clip(&r.path)?;
            let fv = featurize(&buf, scheme, &cfg.wavelet, &cfg.cepstral)?;
            Ok((r.clip_id.clone(), fv))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeaturizedCorpus {
        scheme,
        records: records.to_vec(),
        features: feats.into_iter().collect(),
    })
}

fn label_of(records: &[ClipRecord], clip_id: &str) -> Label {
    records
        .iter()
        .find(|r| r.clip_id == clip_id)
        .expect("partition references a manifest clip")
        .label
}

/// Trains on the partition's train side only and scores the test side.
pub fn run_partition(
    corpus: &FeaturizedCorpus,
    partition: &Partition,
    cfg: &EvalConfig,
) -> Result<(EvalReport, SvmModel)> {
    // leakage guard: the standardizer and SVM may only ever see train clips
    validate_partition(partition, &corpus.records)?;
    let train_ids: std::collections::BTreeSet<&str> =
        partition.train.iter().map(|s| s.as_str()).collect();
    assert!(
        partition.test.iter().all(|id| !train_ids.contains(id.as_str())),
        "leakage guard: train/test overlap"
    );

    let mut x_train = Vec::with_capacity(partition.train.len());
    let mut y_train = Vec::with_capacity(partition.train.len());
    for id in &partition.train {
        let fv = corpus
            .features
            .get(id)
            .ok_or_else(|| Error::IncompleteCorpus(format!("no features for {id}")))?;
        x_train.push(fv.values.clone());
        y_train.push(label_of(&corpus.records, id).sign());
    }
    assert_eq!(
        x_train.len(),
        partition.train.len(),
        "leakage guard: training matrix size"
    );
    let model = train(&x_train, &y_train, corpus.scheme, &cfg.svm)?;

    let mut verdicts = Vec::with_capacity(partition.test.len());
    for id in &partition.test {
        let fv = corpus
            .features
            .get(id)
            .ok_or_else(|| Error::IncompleteCorpus(format!("no features for {id}")))?;
        let (sign, score) = model.predict(&fv.values)?;
        verdicts.push(ClipVerdict {
            clip_id: id.clone(),
            truth: label_of(&corpus.records, id),
            predicted: Label::from_sign(sign),
            score,
        });
    }
    Ok((
        EvalReport::from_verdicts(partition.protocol, corpus.scheme, verdicts, cfg),
        model,
    ))
}

/// One full experiment: partition, featurize, train, score.
pub fn run_experiment(
    records: &[ClipRecord],
    protocol: Protocol,
    scheme: Scheme,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    let corpus = featurize_corpus(records, scheme, cfg)?;
    let partition = make_partition(records, protocol, cfg.seed)?;
    run_partition(&corpus, &partition, cfg).map(|(report, _)| report)
}

/// Diagnostic resubstitution: trains and scores on the same clips. Measures
/// feature/generator fitness only, never generalization, so it bypasses the
/// leakage guard deliberately.
pub fn resubstitution_report(
    corpus: &FeaturizedCorpus,
    ids: &[String],
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    let mut x = Vec::with_capacity(ids.len());
    let mut y = Vec::with_capacity(ids.len());
    for id in ids {
        let fv = corpus
            .features
            .get(id)
            .ok_or_else(|| Error::IncompleteCorpus(format!("no features for {id}")))?;
        x.push(fv.values.clone());
        y.push(label_of(&corpus.records, id).sign());
    }
    let model = train(&x, &y, corpus.scheme, &cfg.svm)?;
    let verdicts = ids
        .iter()
        .map(|id| -> Result<ClipVerdict> {
            let fv = &corpus.features[id];
            let (sign, score) = model.predict(&fv.values)?;
            Ok(ClipVerdict {
                clip_id: id.clone(),
                truth: label_of(&corpus.records, id),
                predicted: Label::from_sign(sign),
                score,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::from_verdicts(
        Protocol::SdTd,
        corpus.scheme,
        verdicts,
        cfg,
    ))
}

// --- frame-by-frame splice scan ---

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Composition {
    PureAcoustic,
    PureLaser,
    Bordering,
}

impl Composition {
    pub fn name(&self) -> &'static str {
        match self {
            Composition::PureAcoustic => "pure_acoustic",
            Composition::PureLaser => "pure_laser",
            Composition::Bordering => "bordering",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameVerdict {
    pub frame_index: usize,
    pub start_s: f64,
    pub end_s: f64,
    pub predicted: Label,
    pub composition: Composition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameScanReport {
    pub verdicts: Vec<FrameVerdict>,
    pub accuracy_overall: f64,
    pub accuracy_non_bordering: f64,
    /// None when no frame straddles the boundary.
    pub accuracy_bordering: Option<f64>,
}

/// Ground-truth composition of the window [start, end) against a composite
/// whose samples before `boundary_s` are acoustic and after it laser.
/// A frame is bordering iff it strictly contains the boundary.
pub fn frame_composition(start_s: f64, end_s: f64, boundary_s: f64) -> Composition {
    if start_s < boundary_s && boundary_s < end_s {
        Composition::Bordering
    } else if end_s <= boundary_s {
        Composition::PureAcoustic
    } else {
        Composition::PureLaser
    }
}

/// Sliding-window scan of a composite clip with frame size `frame_s` and hop
/// `hop_s`. Bordering frames count as correct when the prediction matches
/// their majority content (an exact 50/50 split expects laser).
pub fn frame_scan(
    model: &SvmModel,
    composite: &AudioBuffer,
    boundary_s: f64,
    frame_s: f64,
    hop_s: f64,
    cfg: &EvalConfig,
) -> Result<FrameScanReport> {
    let fs = composite.sample_rate_hz() as f64;
    let frame_len = (frame_s * fs).round() as usize;
    let hop_len = (hop_s * fs).round() as usize;
    if composite.len() < frame_len || frame_len == 0 || hop_len == 0 {
        return Err(Error::ClipTooShort {
            need: frame_len,
            got: composite.len(),
        });
    }
    let n_frames = (composite.len() - frame_len) / hop_len + 1;

    let mut verdicts = Vec::with_capacity(n_frames);
    let (mut ok_all, mut ok_pure, mut n_pure, mut ok_border, mut n_border) = (0, 0, 0, 0, 0);
    for k in 0..n_frames {
        let start = k * hop_len;
        let seg = composite.segment(start, start + frame_len)?;
        let fv = featurize(&seg, model.scheme, &cfg.wavelet, &cfg.cepstral)?;
        let (sign, _) = model.predict(&fv.values)?;
        let predicted = Label::from_sign(sign);
        let start_s = start as f64 / fs;
        let end_s = start_s + frame_s;
        let composition = frame_composition(start_s, end_s, boundary_s);
        let expected = match composition {
            Composition::PureAcoustic => Label::Acoustic,
            Composition::PureLaser => Label::Laser,
            Composition::Bordering => {
                let laser_frac = (end_s - boundary_s) / frame_s;
                if laser_frac >= 0.5 {
                    Label::Laser
                } else {
                    Label::Acoustic
                }
            }
        };
        let correct = predicted == expected;
        ok_all += correct as usize;
        if composition == Composition::Bordering {
            n_border += 1;
            ok_border += correct as usize;
        } else {
            n_pure += 1;
            ok_pure += correct as usize;
        }
        verdicts.push(FrameVerdict {
            frame_index: k,
            start_s,
            end_s,
            predicted,
            composition,
        });
    }
    Ok(FrameScanReport {
        accuracy_overall: ok_all as f64 / n_frames as f64,
        accuracy_non_bordering: ok_pure as f64 / n_pure.max(1) as f64,
        accuracy_bordering: (n_border > 0).then(|| ok_border as f64 / n_border as f64),
        verdicts,
    })
}

// --- robustness sweep ---

/// Trains once on the clean train partition, then re-evaluates with colored
/// noise injected into the test clips at each SNR. `f64::INFINITY` disables
/// the noise, so that row reproduces the clean run exactly.
pub fn robustness_sweep(
    records: &[ClipRecord],
    protocol: Protocol,
    scheme: Scheme,
    cfg: &EvalConfig,
    snr_list_db: &[f64],
    band_hz: (f64, f64),
) -> Result<Vec<(f64, EvalReport)>> {
    let corpus = featurize_corpus(records, scheme, cfg)?;
    let partition = make_partition(records, protocol, cfg.seed)?;
    let (_, model) = run_partition(&corpus, &partition, cfg)?;

    let mut rows = Vec::with_capacity(snr_list_db.len());
    for &snr in snr_list_db {
        let verdicts: Vec<ClipVerdict> = partition
            .test
            .par_iter()
            .map(|id| -> Result<ClipVerdict> {
                let record = corpus
                    .records
                    .iter()
                    .find(|r| &r.clip_id == id)
                    .expect("test id in manifest");
                let clean = load_clip(&record.path)?;
                let noise_seed = derive_seed(cfg.seed, &[0xA0, fnv1a64(id)]);
                let noisy = add_colored_noise(&clean, band_hz, snr, noise_seed)?;
                let fv = featurize(&noisy, scheme, &cfg.wavelet, &cfg.cepstral)?;
                let (sign, score) = model.predict(&fv.values)?;
                Ok(ClipVerdict {
                    clip_id: id.clone(),
                    truth: record.label,
                    predicted: Label::from_sign(sign),
                    score,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((
            snr,
            EvalReport::from_verdicts(protocol, scheme, verdicts, cfg),
        ));
    }
    Ok(rows)
}

// --- report files ---

pub const REPORT_HEADER: &str = "protocol,scheme,accuracy,tp,fp,tn,fn,seed,config_hash";
pub const FRAME_HEADER: &str = "frame_index,start_s,label_pred,composition";

pub fn report_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.protocol, r.scheme, r.accuracy, r.tp, r.fp, r.tn, r.fn_, r.seed, r.config_hash
        ));
    }
    out
}

/// Parsed row of a report CSV (used for round-trip verification and tooling).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub protocol: Protocol,
    pub scheme: Scheme,
    pub accuracy: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    pub seed: u64,
    pub config_hash: String,
}

pub fn parse_report_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end_matches('\r') == REPORT_HEADER => {}
        other => {
            return Err(Error::MalformedRow {
                line: 1,
                reason: format!("bad report header {other:?}"),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, raw) in lines.enumerate() {
        let line = idx + 2;
        let row = raw.trim_end_matches('\r');
        if row.is_empty() {
            continue;
        }
        let f: Vec<&str> = row.split(',').collect();
        if f.len() != 9 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 9 fields, got {}", f.len()),
            });
        }
        let bad = |what: &str| Error::MalformedRow {
            line,
            reason: format!("bad {what}"),
        };
        rows.push(ReportRow {
            protocol: f[0].parse().map_err(|_| bad("protocol"))?,
            scheme: f[1].parse().map_err(|_| bad("scheme"))?,
            accuracy: f[2].parse().map_err(|_| bad("accuracy"))?,
            tp: f[3].parse().map_err(|_| bad("tp"))?,
            fp: f[4].parse().map_err(|_| bad("fp"))?,
            tn: f[5].parse().map_err(|_| bad("tn"))?,
            fn_: f[6].parse().map_err(|_| bad("fn"))?,
            seed: f[7].parse().map_err(|_| bad("seed"))?,
            config_hash: f[8].to_string(),
        });
    }
    Ok(rows)
}

pub fn frame_csv(report: &FrameScanReport) -> String {
    let mut out = String::from(FRAME_HEADER);
    out.push('\n');
    for v in &report.verdicts {
        out.push_str(&format!(
            "{},{},{},{}\n",
            v.frame_index,
            v.start_s,
            v.predicted,
            v.composition.name()
        ));
    }
    out
}

/// Human-readable accuracy grid: schemes as rows, protocols as columns.
/// Cells average over all matching reports (e.g. multiple SD_TD seeds).
pub fn format_grid(reports: &[EvalReport]) -> String {
    let mut schemes: Vec<Scheme> = Vec::new();
    for r in reports {
        if !schemes.contains(&r.scheme) {
            schemes.push(r.scheme);
        }
    }
    let mut protocols: Vec<Protocol> = Vec::new();
    for r in reports {
        if !protocols.contains(&r.protocol) {
            protocols.push(r.protocol);
        }
    }
    let mut out = format!("{:<12}", "scheme");
    for p in &protocols {
        out.push_str(&format!("{:>9}", p.name()));
    }
    out.push('\n');
    for s in &schemes {
        out.push_str(&format!("{:<12}", s.name()));
        for p in &protocols {
            let cells: Vec<f64> = reports
                .iter()
                .filter(|r| r.scheme == *s && r.protocol == *p)
                .map(|r| r.accuracy)
                .collect();
            if cells.is_empty() {
                out.push_str(&format!("{:>9}", "-"));
            } else {
                let mean = cells.iter().sum::<f64>() / cells.len() as f64;
                out.push_str(&format!("{:>9.3}", mean));
            }
        }
        out.push('\n');
    }
    out
}

/// Atomic write: temp file in the target directory, then rename.
pub fn write_atomic(path: impl AsRef<Path>, content: &str) -> Result<()> {
    let path = path.as_ref();
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let dir = dir.unwrap_or_else(|| Path::new("."));
    if !dir.exists() {
        return Err(Error::io(
            format!("writing {}", path.display()),
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("directory {} does not exist", dir.display()),
            ),
        ));
    }
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|s| s.to_string_lossy()).unwrap_or_default()
    ));
    std::fs::write(&tmp, content).map_err(|e| Error::io(format!("writing {}", tmp.display()), e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(format!("renaming to {}", path.display()), e))
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// One JSON object per report, carrying the full config snapshot and the
/// per-clip verdicts for reproducibility.
pub fn report_jsonl(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "{{\"protocol\":\"{}\",\"scheme\":\"{}\",\"accuracy\":{},\"tp\":{},\"fp\":{},\"tn\":{},\"fn\":{},\"seed\":{},\"config_hash\":\"{}\",\"config\":\"{}\",\"verdicts\":[",
            r.protocol,
            r.scheme,
            r.accuracy,
            r.tp,
            r.fp,
            r.tn,
            r.fn_,
            r.seed,
            r.config_hash,
            json_escape(&r.config)
        ));
        for (i, v) in r.verdicts.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{{\"clip_id\":\"{}\",\"truth\":\"{}\",\"predicted\":\"{}\",\"score\":{}}}",
                json_escape(&v.clip_id),
                v.truth,
                v.predicted,
                v.score
            ));
        }
        out.push_str("]}\n");
    }
    out
}

/// Writes the report set in all three forms: the pinned-schema CSV at
/// `path`, a human-readable accuracy grid at `<path>.txt`, and JSON-lines
/// with the full config snapshot and verdicts at `<path>.jsonl`.
pub fn write_report(reports: &[EvalReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_atomic(path, &report_csv(reports))?;
    let with_ext = |ext: &str| -> std::path::PathBuf {
        let mut os = path.as_os_str().to_owned();
        os.push(ext);
        std::path::PathBuf::from(os)
    };
    write_atomic(with_ext(".txt"), &format_grid(reports))?;
    write_atomic(with_ext(".jsonl"), &report_jsonl(reports))
}
