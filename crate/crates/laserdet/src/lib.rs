//! Detection of laser-injection (photo-acoustic) attacks on MEMS-microphone
//! voice assistants.
//!
//! A laser aimed at a MEMS microphone induces a response dominated by low
//! frequencies and free of room reverberation, unlike airborne sound. This
//! crate decomposes a clip into n+1 wavelet subbands, summarizes each band by
//! its variance, skew and excess kurtosis, and classifies the resulting
//! 3(n+1)-dimensional vector with an RBF-kernel SVM. MFCC/LFCC/CQCC cepstral
//! baselines, three train/test partition protocols, a sliding-window splice
//! scan, a colored-noise robustness sweep, and a seeded synthetic corpus
//! generator round out the toolkit.
//!
//! The `laserdet` binary exposes every workflow; see the README.
//!
//! ```
//! use laserdet::dataset::{synth_clip, Label, SynthConfig};
//! use laserdet::{dwt_moment_features, svm, Scheme, SvmConfig, WaveletSpec};
//!
//! // two synthetic clips through the acoustic and laser channel models
//! let cfg = SynthConfig { clip_seconds: 1.5, ..Default::default() };
//! let spec = WaveletSpec::default();
//! let clips = [
//!     (synth_clip(&cfg, 1, 1, Label::Acoustic), -1i8),
//!     (synth_clip(&cfg, 1, 1, Label::Laser), 1),
//! ];
//! let features: Vec<Vec<f64>> = clips
//!     .iter()
//!     .map(|(buf, _)| dwt_moment_features(buf, &spec).unwrap().values)
//!     .collect();
//! assert!(features.iter().all(|f| f.len() == 18)); // 3 * (5 + 1)
//!
//! let labels: Vec<i8> = clips.iter().map(|(_, y)| *y).collect();
//! let model = svm::train(&features, &labels, Scheme::Dwt, &SvmConfig::default()).unwrap();
//! let (label, _score) = model.predict(&features[1]).unwrap();
//! assert_eq!(label, 1); // laser
//! ```

pub mod audio;
pub mod dataset;
pub mod dsp;
pub mod dwt;
pub mod error;
pub mod eval;
pub mod features;
pub mod stats;
pub mod svm;

pub use audio::{load_wav, parse_wav, resample, write_wav, AudioBuffer, CANONICAL_RATE_HZ};
pub use dataset::{
    add_colored_noise, load_manifest, make_partition, parse_manifest, synth_corpus, ClipRecord,
    Label, Partition, Protocol, SynthConfig,
};
pub use dwt::{dwt_multilevel, idwt_multilevel, Boundary, WaveletDecomposition, WaveletFamily, WaveletSpec};
pub use error::{Error, Result};
pub use eval::{frame_scan, robustness_sweep, run_experiment, EvalConfig, EvalReport};
pub use features::{
    aggregate_frames, cqcc, dwt_moment_features, featurize, lfcc, log_spectrum, mfcc,
    CepstralConfig, FeatureVector, Scheme,
};
pub use stats::{fit_distribution, moments, DistributionFit, FitKind, MomentSet};
pub use svm::{train, GammaMode, SvmConfig, SvmModel};
