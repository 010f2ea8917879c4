//! Command-line interface exposing every workflow: corpus synthesis,
//! featurization, training, the three evaluation protocols, single-clip
//! detection, splice scanning, spectrum export and the robustness sweep.
//!
//! Exit codes: 0 = success (or "acoustic" for `detect`), 1 = error,
//! 2 = laser detected (so shell pipelines can gate on detection).

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use laserdet::dataset::{ClipRecord, Label};
use laserdet::error::{Error, Result};
use laserdet::eval::{
    self, fnv1a64, format_grid, frame_csv, frame_scan, load_clip, robustness_sweep, run_partition,
    write_atomic, EvalConfig, EvalReport,
};
use laserdet::features::{featurize, log_spectrum, CepstralConfig, FeatureVector, Scheme};
use laserdet::svm::{GammaMode, SvmConfig, SvmModel};
use laserdet::{
    load_manifest, make_partition, synth_corpus, Boundary, Protocol, SynthConfig, WaveletFamily,
    WaveletSpec,
};

#[derive(Parser)]
#[command(
    name = "laserdet",
    about = "Detects laser-injection (photo-acoustic) attacks on MEMS microphones",
    version
)]
struct Cli {
    /// Master seed; all randomness flows from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for per-clip parallel work (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// INI-style key=value config file (flags > file > defaults).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ModelFlags {
    /// Wavelet family: haar | db4.
    #[arg(long)]
    family: Option<WaveletFamily>,

    /// Decomposition level n (features have dimension 3(n+1)).
    #[arg(long)]
    level: Option<usize>,

    /// Boundary handling: symmetric | zero-pad.
    #[arg(long)]
    boundary: Option<Boundary>,

    /// SVM soft-margin parameter C.
    #[arg(long)]
    svm_c: Option<f64>,

    /// RBF width: "scale" or a positive number.
    #[arg(long)]
    gamma: Option<String>,

    /// Disable per-dimension z-score standardization.
    #[arg(long)]
    no_standardize: bool,

    /// Cepstral frame length in milliseconds.
    #[arg(long)]
    frame_ms: Option<f64>,

    /// Cepstral hop length in milliseconds.
    #[arg(long)]
    hop_ms: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the seeded synthetic photo-acoustic corpus and manifest.
    Synth {
        /// Output directory (defaults to $LASERDET_DATA_DIR/corpus).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        speakers: Option<u32>,
        #[arg(long)]
        utterances: Option<u32>,
        #[arg(long)]
        clip_seconds: Option<f64>,
        /// Laser channel low-pass corner frequency in Hz.
        #[arg(long)]
        cutoff_hz: Option<f64>,
        /// SNR (dB) of the laser channel's low-frequency noise.
        #[arg(long)]
        lf_snr_db: Option<f64>,
        /// Room reverberation time for acoustic clips, seconds.
        #[arg(long)]
        rt60_s: Option<f64>,
    },

    /// Compute per-clip features for a manifest and write them as CSV.
    Featurize {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        scheme: Scheme,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        model: ModelFlags,
    },

    /// Train an SVM on the train side of a protocol partition.
    Train {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        scheme: Scheme,
        #[arg(long)]
        protocol: Protocol,
        #[arg(long)]
        model_out: PathBuf,
        /// Reuse features from a `featurize` CSV instead of recomputing.
        #[arg(long)]
        features: Option<PathBuf>,
        #[command(flatten)]
        model: ModelFlags,
    },

    /// Run experiments over schemes x protocols and write a report CSV.
    Eval {
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Comma-separated list (default: dwt).
        #[arg(long, value_delimiter = ',')]
        schemes: Vec<Scheme>,
        /// Comma-separated list (default: all three).
        #[arg(long, value_delimiter = ',')]
        protocols: Vec<Protocol>,
        #[arg(long)]
        report_out: Option<PathBuf>,
        /// Number of seeds averaged for the random SD_TD split.
        #[arg(long, default_value_t = 10)]
        sd_seeds: u64,
        #[command(flatten)]
        model: ModelFlags,
    },

    /// Classify one WAV file: exit 0 = acoustic, 2 = laser.
    Detect {
        #[arg(long)]
        model: PathBuf,
        wav: PathBuf,
        #[command(flatten)]
        flags: ModelFlags,
    },

    /// Sliding-window splice scan of a composite clip.
    FrameScan {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        wav: PathBuf,
        /// Acoustic-to-laser splice position in seconds.
        #[arg(long)]
        boundary_s: f64,
        #[arg(long, default_value_t = 1.0)]
        frame_s: f64,
        #[arg(long, default_value_t = 0.5)]
        hop_s: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: ModelFlags,
    },

    /// Welch-averaged log spectrum of a WAV file as freq_hz,mag_db CSV.
    Spectrum {
        #[arg(long)]
        wav: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },

    /// Export DWT subband coefficients as CSV (for histogram plots) and
    /// print Cauchy/Lognormal fit parameters per subband.
    Coeffs {
        #[arg(long)]
        wav: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        flags: ModelFlags,
    },

    /// Accuracy-vs-SNR sweep with colored noise injected into test clips.
    Robustness {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value = "dwt")]
        scheme: Scheme,
        #[arg(long, default_value = "si_td")]
        protocol: Protocol,
        /// Comma-separated SNRs in dB; "inf" disables the noise.
        #[arg(long, value_delimiter = ',', default_value = "inf,30,20,10")]
        snr_list: Vec<f64>,
        /// Noise band as "low,high" in Hz.
        #[arg(long, default_value = "0,2000")]
        band: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        model: ModelFlags,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage and parse errors both land on stderr with exit code 1
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

/// INI-style config: `key = value` lines, `#`/`;` comments, sections ignored.
fn load_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
    let mut map = HashMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') || line.starts_with('[')
        {
            continue;
        }
        if let Some((k, v)) = line.split_once('=') {
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok(map)
}

struct Settings {
    seed: u64,
    eval: EvalConfig,
    data_dir: Option<PathBuf>,
}

fn resolve_settings(cli_seed: Option<u64>, config: &Option<PathBuf>, flags: &ModelFlags) -> Result<Settings> {
    let file = match config {
        Some(p) => load_config_file(p)?,
        None => HashMap::new(),
    };
    let fileval = |key: &str| file.get(key).map(|s| s.as_str());
    fn parsed<T: std::str::FromStr>(v: Option<&str>, what: &str) -> Result<Option<T>> {
        match v {
            None => Ok(None),
            Some(s) => s.parse::<T>().map(Some).map_err(|_| {
                Error::InvalidArgument(format!("bad config value for {what}: {s:?}"))
            }),
        }
    }

    let seed = cli_seed
        .or(parsed::<u64>(fileval("seed"), "seed")?)
        .unwrap_or(42);

    let mut wavelet = WaveletSpec::default();
    if let Some(f) = flags
        .family
        .or(parsed::<WaveletFamily>(fileval("wavelet.family"), "wavelet.family")?)
    {
        wavelet.family = f;
    }
    if let Some(l) = flags
        .level
        .or(parsed::<usize>(fileval("wavelet.level"), "wavelet.level")?)
    {
        if l == 0 {
            return Err(Error::InvalidLevel);
        }
        wavelet.level = l;
    }
    if let Some(b) = flags
        .boundary
        .or(parsed::<Boundary>(fileval("wavelet.boundary"), "wavelet.boundary")?)
    {
        wavelet.boundary = b;
    }

    let mut svm = SvmConfig::default();
    if let Some(c) = flags.svm_c.or(parsed::<f64>(fileval("svm.c"), "svm.c")?) {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "svm C must be positive, got {c}"
            )));
        }
        svm.c = c;
    }
    let gamma_str = flags
        .gamma
        .clone()
        .or(fileval("svm.gamma").map(|s| s.to_string()));
    if let Some(g) = gamma_str {
        svm.gamma = if g.eq_ignore_ascii_case("scale") {
            GammaMode::Scale
        } else {
            let v: f64 = g
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad gamma {g:?}")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "gamma must be positive, got {v}"
                )));
            }
            GammaMode::Fixed(v)
        };
    }
    if flags.no_standardize || fileval("svm.standardize") == Some("false") {
        svm.standardize = false;
    }

    let mut cepstral = CepstralConfig::default();
    if let Some(v) = flags
        .frame_ms
        .or(parsed::<f64>(fileval("cepstral.frame_ms"), "cepstral.frame_ms")?)
    {
        cepstral.frame_ms = v;
    }
    if let Some(v) = flags
        .hop_ms
        .or(parsed::<f64>(fileval("cepstral.hop_ms"), "cepstral.hop_ms")?)
    {
        cepstral.hop_ms = v;
    }

    let data_dir = std::env::var_os("LASERDET_DATA_DIR")
        .map(PathBuf::from)
        .or(fileval("data_dir").map(PathBuf::from));

    Ok(Settings {
        seed,
        eval: EvalConfig {
            wavelet,
            cepstral,
            svm,
            seed,
        },
        data_dir,
    })
}

fn resolve_manifest(explicit: Option<PathBuf>, settings: &Settings) -> Result<PathBuf> {
    explicit
        .or_else(|| settings.data_dir.as_ref().map(|d| d.join("corpus/manifest.csv")))
        .ok_or_else(|| {
            Error::InvalidArgument("--manifest is required (or set LASERDET_DATA_DIR)".into())
        })
}

fn announce_config(settings: &Settings, scheme: Option<Scheme>) {
    let snapshot = settings.eval.snapshot(scheme.unwrap_or(Scheme::Dwt));
    eprintln!("config: {:016x} [{snapshot}]", fnv1a64(&snapshot));
}

fn run(cli: Cli) -> Result<i32> {
    if let Some(jobs) = cli.jobs {
        if jobs > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build_global()
                .ok();
        }
    }

    match cli.command {
        Command::Synth {
            out,
            speakers,
            utterances,
            clip_seconds,
            cutoff_hz,
            lf_snr_db,
            rt60_s,
        } => {
            let settings = resolve_settings(cli.seed, &cli.config, &ModelFlags::default())?;
            let out = out
                .or_else(|| settings.data_dir.as_ref().map(|d| d.join("corpus")))
                .ok_or_else(|| {
                    Error::InvalidArgument("--out is required (or set LASERDET_DATA_DIR)".into())
                })?;
            let mut cfg = SynthConfig {
                seed: settings.seed,
                ..Default::default()
            };
            if let Some(v) = speakers {
                cfg.n_speakers = v;
            }
            if let Some(v) = utterances {
                cfg.n_utterances = v;
            }
            if let Some(v) = clip_seconds {
                cfg.clip_seconds = v;
            }
            if let Some(v) = cutoff_hz {
                cfg.cutoff_hz = v;
            }
            if let Some(v) = lf_snr_db {
                cfg.lf_noise_snr_db = v;
            }
            if let Some(v) = rt60_s {
                cfg.rt60_s = v;
            }
            announce_config(&settings, None);
            let records = synth_corpus(&cfg, &out)?;
            println!(
                "wrote {} clips and manifest to {}",
                records.len(),
                out.display()
            );
            Ok(0)
        }

        Command::Featurize {
            manifest,
            scheme,
            out,
            model,
        } => {
            let settings = resolve_settings(cli.seed, &cli.config, &model)?;
            announce_config(&settings, Some(scheme));
            let manifest = resolve_manifest(manifest, &settings)?;
            let records = load_manifest(&manifest)?;
            let corpus = eval::featurize_corpus(&records, scheme, &settings.eval)?;
            write_atomic(&out, &features_csv(&records, &corpus.features, scheme)?)?;
            println!("wrote {} feature rows to {}", records.len(), out.display());
            Ok(0)
        }

        Command::Train {
            manifest,
            scheme,
            protocol,
            model_out,
            features,
            model,
        } => {
            let settings = resolve_settings(cli.seed, &cli.config, &model)?;
            announce_config(&settings, Some(scheme));
            let manifest = resolve_manifest(manifest, &settings)?;
            let records = load_manifest(&manifest)?;
            let corpus = match features {
                Some(path) => eval::FeaturizedCorpus {
                    scheme,
                    records: records.clone(),
                    features: read_features_csv(&path, scheme)?,
                },
                None => eval::featurize_corpus(&records, scheme, &settings.eval)?,
            };
            let partition = make_partition(&records, protocol, settings.seed)?;
            let (report, trained) = run_partition(&corpus, &partition, &settings.eval)?;
            if !trained.converged {
                eprintln!("warning: SMO hit its iteration cap before meeting the KKT tolerance");
            }
            trained.save(&model_out)?;
            println!(
                "trained {} / {} on {} clips ({} SVs), held-out accuracy {:.3}; model at {}",
                scheme,
                protocol,
                partition.train.len(),
                trained.n_support_vectors(),
                report.accuracy,
                model_out.display()
            );
            Ok(0)
        }

        Command::Eval {
            manifest,
            schemes,
            protocols,
            report_out,
            sd_seeds,
            model,
        } => {
            let settings = resolve_settings(cli.seed, &cli.config, &model)?;
            let manifest = resolve_manifest(manifest, &settings)?;
            let records = load_manifest(&manifest)?;
            let schemes = if schemes.is_empty() {
                vec![Scheme::Dwt]
            } else {
                schemes
            };
            let protocols = if protocols.is_empty() {
                Protocol::ALL.to_vec()
            } else {
                protocols
            };
            announce_config(&settings, schemes.first().copied());

            let mut reports: Vec<EvalReport> = Vec::new();
            for &scheme in &schemes {
                let corpus = eval::featurize_corpus(&records, scheme, &settings.eval)?;
                for &protocol in &protocols {
                    let seeds: Vec<u64> = match protocol {
                        Protocol::SdTd => (0..sd_seeds.max(1))
                            .map(|k| settings.seed.wrapping_add(k))
                            .collect(),
                        _ => vec![settings.seed],
                    };
                    for s in seeds {
                        let cfg = EvalConfig {
                            seed: s,
                            ..settings.eval
                        };
                        let partition = make_partition(&records, protocol, s)?;
                        let (report, _) = run_partition(&corpus, &partition, &cfg)?;
                        reports.push(report);
                    }
                }
            }
            print!("{}", format_grid(&reports));
            if let Some(path) = report_out {
                eval::write_report(&reports, &path)?;
                println!("report CSV at {}", path.display());
            }
            Ok(0)
        }

        Command::Detect { model, wav, flags } => {
            let settings = resolve_settings(cli.seed, &cli.config, &flags)?;
            announce_config(&settings, None);
            let svm_model = SvmModel::load(&model)?;
            let buf = load_clip(&wav)?;
            let fv = featurize(&buf, svm_model.scheme, &settings.eval.wavelet, &settings.eval.cepstral)?;
            let (sign, score) = svm_model.predict(&fv.values)?;
            let label = Label::from_sign(sign);
            println!("{}\t{}\t{}", wav.display(), label, score);
            Ok(if label == Label::Laser { 2 } else { 0 })
        }

        Command::FrameScan {
            model,
            wav,
            boundary_s,
            frame_s,
            hop_s,
            out,
            flags,
        } => {
            let settings = resolve_settings(cli.seed, &cli.config, &flags)?;
            announce_config(&settings, None);
            let svm_model = SvmModel::load(&model)?;
            let buf = load_clip(&wav)?;
            if !(boundary_s >= 0.0 && boundary_s <= buf.duration_s()) {
                return Err(Error::InvalidArgument(format!(
                    "--boundary-s {boundary_s} outside the clip"
                )));
            }
            let report = frame_scan(&svm_model, &buf, boundary_s, frame_s, hop_s, &settings.eval)?;
            println!(
                "frames: {}  overall: {:.3}  non-bordering: {:.3}  bordering: {}",
                report.verdicts.len(),
                report.accuracy_overall,
                report.accuracy_non_bordering,
                report
                    .accuracy_bordering
                    .map(|a| format!("{a:.3}"))
                    .unwrap_or_else(|| "-".into()),
            );
            if let Some(path) = out {
                write_atomic(&path, &frame_csv(&report))?;
                println!("frame CSV at {}", path.display());
            }
            Ok(0)
        }

        Command::Spectrum { wav, out } => {
            let settings = resolve_settings(cli.seed, &cli.config, &ModelFlags::default())?;
            announce_config(&settings, None);
            let buf = load_clip(&wav)?;
            let rows = log_spectrum(&buf)?;
            let mut text = String::from("freq_hz,mag_db\n");
            for (f, db) in rows {
                text.push_str(&format!("{f},{db}\n"));
            }
            write_atomic(&out, &text)?;
            println!("spectrum CSV at {}", out.display());
            Ok(0)
        }

        Command::Coeffs { wav, out, flags } => {
            let settings = resolve_settings(cli.seed, &cli.config, &flags)?;
            announce_config(&settings, None);
            let buf = load_clip(&wav)?;
            let dec = laserdet::dwt_multilevel(buf.samples(), &settings.eval.wavelet)?;
            if dec.was_clamped() {
                eprintln!(
                    "warning: clip too short for level {}, clamped to {}",
                    settings.eval.wavelet.level,
                    dec.level()
                );
            }
            let mut text = String::from("subband,index,value\n");
            let mut names = vec!["ca".to_string()];
            for k in (1..=dec.level()).rev() {
                names.push(format!("cd{k}"));
            }
            for (name, band) in names.iter().zip(dec.subbands()) {
                for (i, v) in band.iter().enumerate() {
                    text.push_str(&format!("{name},{i},{v}\n"));
                }
            }
            write_atomic(&out, &text)?;
            for (name, band) in names.iter().zip(dec.subbands()) {
                for kind in [laserdet::FitKind::Cauchy, laserdet::FitKind::Lognormal] {
                    match laserdet::fit_distribution(band, kind) {
                        Ok(fit) => println!(
                            "{name}\t{kind:?}\tlocation {:+.6e}\tscale {:.6e}\tks {:.4}",
                            fit.location, fit.scale, fit.goodness
                        ),
                        Err(e) => println!("{name}\t{kind:?}\tunavailable: {e}"),
                    }
                }
            }
            println!("coefficient CSV at {}", out.display());
            Ok(0)
        }

        Command::Robustness {
            manifest,
            scheme,
            protocol,
            snr_list,
            band,
            out,
            model,
        } => {
            let settings = resolve_settings(cli.seed, &cli.config, &model)?;
            announce_config(&settings, Some(scheme));
            let manifest = resolve_manifest(manifest, &settings)?;
            let records = load_manifest(&manifest)?;
            let band = parse_band(&band)?;
            let rows = robustness_sweep(&records, protocol, scheme, &settings.eval, &snr_list, band)?;
            let mut text = String::from("snr_db,protocol,scheme,accuracy,tp,fp,tn,fn,seed,config_hash\n");
            for (snr, r) in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    snr, r.protocol, r.scheme, r.accuracy, r.tp, r.fp, r.tn, r.fn_, r.seed, r.config_hash
                ));
                println!("snr {:>8}: accuracy {:.3}", format!("{snr}"), r.accuracy);
            }
            write_atomic(&out, &text)?;
            println!("sweep CSV at {}", out.display());
            Ok(0)
        }
    }
}

fn parse_band(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || Error::InvalidArgument(format!("bad --band {s:?}, expected \"low,high\" in Hz"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let low: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let high: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    Ok((low, high))
}

/// Feature CSV: `clip_id,scheme,dim,v0..v{dim-1}`.
fn features_csv(
    records: &[ClipRecord],
    features: &HashMap<String, FeatureVector>,
    scheme: Scheme,
) -> Result<String> {
    let dim = features
        .values()
        .next()
        .map(|f| f.dim())
        .ok_or(Error::EmptyFrames)?;
    let mut header = String::from("clip_id,scheme,dim");
    for i in 0..dim {
        header.push_str(&format!(",v{i}"));
    }
    let mut out = header;
    out.push('\n');
    for r in records {
        let fv = features
            .get(&r.clip_id)
            .ok_or_else(|| Error::IncompleteCorpus(format!("no features for {}", r.clip_id)))?;
        out.push_str(&r.clip_id);
        out.push_str(&format!(",{scheme},{}", fv.dim()));
        for v in &fv.values {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    Ok(out)
}

fn read_features_csv(path: &Path, scheme: Scheme) -> Result<HashMap<String, FeatureVector>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading features {}", path.display()), e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::MalformedRow {
        line: 1,
        reason: "empty features file".into(),
    })?;
    if !header.starts_with("clip_id,scheme,dim") {
        return Err(Error::MalformedRow {
            line: 1,
            reason: format!("bad features header {header:?}"),
        });
    }
    let mut map = HashMap::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() < 4 {
            return Err(Error::MalformedRow {
                line,
                reason: "expected clip_id,scheme,dim,v0..".into(),
            });
        }
        let row_scheme: Scheme = fields[1].parse().map_err(|_| Error::MalformedRow {
            line,
            reason: format!("bad scheme {:?}", fields[1]),
        })?;
        if row_scheme != scheme {
            return Err(Error::MalformedRow {
                line,
                reason: format!("features are {row_scheme}, command wants {scheme}"),
            });
        }
        let dim: usize = fields[2].parse().map_err(|_| Error::MalformedRow {
            line,
            reason: format!("bad dim {:?}", fields[2]),
        })?;
        if fields.len() != 3 + dim {
            return Err(Error::MalformedRow {
                line,
                reason: format!("dim says {dim} values, row has {}", fields.len() - 3),
            });
        }
        let values: Vec<f64> = fields[3..]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::MalformedRow {
                line,
                reason: "bad feature value".into(),
            })?;
        map.insert(
            fields[0].to_string(),
            FeatureVector {
                scheme,
                values,
            },
        );
    }
    Ok(map)
}

