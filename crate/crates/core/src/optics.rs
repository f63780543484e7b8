//! Numerical simulator of the optical multiply-accumulate processor.
//!
//! The device evaluates `r = M y` with light: a first phase-only modulator
//! encodes the normalized distance chain as a stripe mask, a second one
//! encodes a tile of the sign matrix with two gray levels, and a cylindrical
//! lens focuses each row onto a single detector cell. Polarization projection
//! turns each imprinted phase `phi` into the amplitude factor `cos(phi)`, so
//! a camera pixel reads `I_p = I0 * (sum_q cos(phi_q) cos(alpha_pq))^2`.
//! Feasible rows show up as (near-)zero pixels; the sign of the row value is
//! lost at detection, which the zero test never needed.
//!
//! The field model is scalar: the polarization algebra collapses to the
//! cos() amplitude factors and all constant prefactors are folded into the
//! reference intensity `I0`, since only the ratios `I_p / I0` are observable.
//! Amplitudes accumulate left-to-right across each row so magnitudes compare
//! bit-for-bit against the exact row scan.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use thiserror::Error;

use crate::instance::ParadoxicalInstance;
use crate::mvm;
use crate::ENUMERATION_CAP;

/// Errors from mask construction and the simulation pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum OpticsError {
    /// A normalized chain entry is outside `[0, 1]`.
    #[error("value {value} at position {index} outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },
    /// Mask and field grids are not conformable.
    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    /// A tile does not fit on the device.
    #[error("{what} needs {needed} pixels but the frame provides {available}")]
    FrameOverflow {
        what: &'static str,
        needed: u64,
        available: u64,
    },
    /// The chain is longer than the enumeration cap.
    #[error("size {n} exceeds the enumeration cap {cap}")]
    SizeLimit { n: usize, cap: usize },
    /// A device parameter is out of its legal range.
    #[error("bad device configuration: {message}")]
    BadConfig { message: String },
    /// Row-range bookkeeping error surfaced from the sign-matrix engine.
    #[error(transparent)]
    Mvm(#[from] mvm::MvmError),
}

/// Device model: modulator extents, gray-level depth, frame rate, detector
/// noise, and the zero-pixel threshold.
///
/// `detect_eps: None` selects the sound default threshold
/// `I0 * (n * step)^2`, the squared worst-case accumulated quantization
/// error, which guarantees no false negatives in the noiseless regime.
/// `analytic_phase` disables quantization entirely (continuous phases), for
/// fidelity studies. `misalign_sigma` adds per-cell Gaussian phase jitter to
/// the vector mask, modeling imperfect imaging between the two modulators;
/// it defaults off.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpticalConfig {
    pub width: usize,
    pub height: usize,
    pub gray_levels: u32,
    pub frame_rate: f64,
    pub parallel_vectors: u64,
    pub noise_sigma: f64,
    pub detect_eps: Option<f64>,
    pub i0: f64,
    pub analytic_phase: bool,
    pub misalign_sigma: f64,
}

impl Default for OpticalConfig {
    fn default() -> Self {
        Self {
            width: 1920,
            height: 1080,
            gray_levels: 256,
            frame_rate: 60.0,
            parallel_vectors: 1080,
            noise_sigma: 0.0,
            detect_eps: None,
            i0: 1.0,
            analytic_phase: false,
            misalign_sigma: 0.0,
        }
    }
}

impl OpticalConfig {
    pub fn validate(&self) -> Result<(), OpticsError> {
        let bad = |message: String| Err(OpticsError::BadConfig { message });
        if self.width == 0 || self.height == 0 {
            return bad(format!("extents must be positive, got {}x{}", self.width, self.height));
        }
        if self.gray_levels < 2 && !self.analytic_phase {
            return bad(format!("gray_levels must be >= 2, got {}", self.gray_levels));
        }
        if !(self.frame_rate > 0.0 && self.frame_rate.is_finite()) {
            return bad(format!("frame_rate must be positive, got {}", self.frame_rate));
        }
        if self.parallel_vectors == 0 {
            return bad("parallel_vectors must be positive".into());
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise_sigma must be nonnegative, got {}", self.noise_sigma));
        }
        if !(self.i0 > 0.0 && self.i0.is_finite()) {
            return bad(format!("i0 must be positive, got {}", self.i0));
        }
        if let Some(eps) = self.detect_eps {
            if !(eps >= 0.0 && eps.is_finite()) {
                return bad(format!("detect_eps must be nonnegative, got {eps}"));
            }
        }
        if !(self.misalign_sigma >= 0.0 && self.misalign_sigma.is_finite()) {
            return bad(format!("misalign_sigma must be nonnegative, got {}", self.misalign_sigma));
        }
        Ok(())
    }

    pub fn quantizer(&self) -> Result<PhaseQuantizer, OpticsError> {
        self.validate()?;
        if self.analytic_phase {
            Ok(PhaseQuantizer::analytic())
        } else {
            PhaseQuantizer::with_levels(self.gray_levels)
        }
    }

    /// Worst-case accumulated amplitude error of one detector row,
    /// `n * step` (zero in analytic mode).
    pub fn amplitude_error_bound(&self, n: usize) -> f64 {
        match self.quantizer() {
            Ok(q) => n as f64 * q.phase_step(),
            Err(_) => f64::NAN,
        }
    }

    /// The zero-pixel intensity threshold actually applied: the explicit
    /// `detect_eps` when set, otherwise the sound default. In analytic mode
    /// the default shrinks to `I0 * (n * 1e-12)^2`, covering floating-point
    /// accumulation only.
    pub fn detection_threshold(&self, n: usize) -> f64 {
        if let Some(eps) = self.detect_eps {
            return eps;
        }
        let bound = self.amplitude_error_bound(n);
        if bound > 0.0 {
            self.i0 * bound * bound
        } else {
            let slack = n as f64 * 1e-12;
            self.i0 * slack * slack
        }
    }
}

/// Uniform phase grid over `[0, pi]`, or the analytic (continuous) limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseQuantizer {
    levels: Option<u32>,
}

impl PhaseQuantizer {
    pub fn with_levels(levels: u32) -> Result<Self, OpticsError> {
        if levels < 2 {
            return Err(OpticsError::BadConfig {
                message: format!("gray_levels must be >= 2, got {levels}"),
            });
        }
        Ok(Self { levels: Some(levels) })
    }

    pub fn analytic() -> Self {
        Self { levels: None }
    }

    /// Grid spacing `pi / (levels - 1)`; zero in analytic mode.
    pub fn phase_step(&self) -> f64 {
        match self.levels {
            Some(l) => PI / f64::from(l - 1),
            None => 0.0,
        }
    }

    /// Nearest representable level to `phase` (which must be in `[0, pi]`).
    pub fn quantize(&self, phase: f64) -> f64 {
        match self.levels {
            None => phase,
            Some(l) => {
                let steps = f64::from(l - 1);
                let g = (phase * steps / PI).round().clamp(0.0, steps);
                PI * g / steps
            }
        }
    }

    /// The amplitude the device reproduces for a target value in `[-1, 1]`:
    /// `cos` of the quantized arccosine.
    pub fn amplitude(&self, value: f64) -> f64 {
        self.quantize(value.clamp(-1.0, 1.0).acos()).cos()
    }
}

/// The effective distance chain after phase encoding: what the exact scan
/// must be fed to predict the device output.
pub fn quantized_chain(y_norm: &[f64], q: &PhaseQuantizer) -> Vec<f64> {
    y_norm.iter().map(|&v| q.amplitude(v)).collect()
}

/// A grid of modulator phases in radians, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMask {
    rows: usize,
    cols: usize,
    phases: Vec<f64>,
}

impl PhaseMask {
    fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut phases = Vec::with_capacity(rows * cols);
        for p in 0..rows {
            for q in 0..cols {
                phases.push(f(p, q));
            }
        }
        Self { rows, cols, phases }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn phase(&self, row: usize, col: usize) -> f64 {
        self.phases[row * self.cols + col]
    }

    /// Adds per-cell Gaussian phase jitter, clamped back into `[0, pi]`.
    /// Deliberately leaves the representable-level grid: this models analog
    /// imaging error, not programming.
    pub fn jitter(&mut self, sigma: f64, seed: u64) {
        if sigma <= 0.0 {
            return;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma).expect("finite sigma");
        for phase in &mut self.phases {
            *phase = (*phase + normal.sample(&mut rng)).clamp(0.0, PI);
        }
    }
}

/// A grid of real field amplitudes, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeGrid {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl AmplitudeGrid {
    pub fn uniform(rows: usize, cols: usize, value: f64) -> Self {
        Self { rows, cols, values: vec![value; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }
}

/// Detected per-row intensities covering global rows `lo..=hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityFrame {
    pub intensities: Vec<f64>,
    pub lo: u64,
    pub hi: u64,
}

/// A distance chain mapped into `[0, 1]` together with its scale.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedChain {
    pub values: Vec<f64>,
    pub scale: f64,
    /// Set when every entry was zero: the chain is left as zeros with scale
    /// one, and the instance is trivially feasible.
    pub all_zero: bool,
}

/// Maps the chain into `[0, 1]` by dividing through its maximum.
///
/// The exact product is recovered as `scale * (M y_norm)`, and the zero set
/// of `M y` is invariant under the positive rescaling.
pub fn normalize_distances(y: &[f64]) -> NormalizedChain {
    assert!(!y.is_empty(), "chain must be nonempty");
    assert!(y.iter().all(|d| d.is_finite() && *d >= 0.0), "chain entries must be nonnegative");
    let scale = y.iter().copied().fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return NormalizedChain { values: y.to_vec(), scale: 1.0, all_zero: true };
    }
    let values = y.iter().map(|d| d / scale).collect();
    NormalizedChain { values, scale, all_zero: false }
}

/// Builds the stripe mask for the distance chain: column `j` holds the
/// quantized `arccos(y_norm[j])`, replicated down all `rows`.
pub fn encode_vector_mask(
    y_norm: &[f64],
    rows: usize,
    q: &PhaseQuantizer,
) -> Result<PhaseMask, OpticsError> {
    let mut column = Vec::with_capacity(y_norm.len());
    for (index, &v) in y_norm.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(OpticsError::ValueOutOfRange { index, value: v });
        }
        column.push(q.quantize(v.acos()));
    }
    Ok(PhaseMask::from_fn(rows, y_norm.len(), |_, j| column[j]))
}

/// Builds the sign-matrix tile for global rows `lo..=hi`: phase `0` where
/// the matrix entry is `+1` and `pi` where it is `-1`. Both phases are exact
/// grid endpoints, so this mask carries no quantization error.
pub fn encode_matrix_mask(
    n: usize,
    lo: u64,
    hi: u64,
    cfg: &OpticalConfig,
) -> Result<PhaseMask, OpticsError> {
    cfg.validate()?;
    let spec = mvm::SignMatrixSpec::new(n)?;
    if n as u64 > cfg.width as u64 {
        return Err(OpticsError::FrameOverflow {
            what: "matrix tile columns",
            needed: n as u64,
            available: cfg.width as u64,
        });
    }
    if lo < 1 || hi > spec.row_count() || lo > hi {
        return Err(OpticsError::Mvm(mvm::MvmError::IndexOutOfRange {
            index: if lo < 1 { lo } else { hi },
            max: spec.row_count(),
        }));
    }
    let rows = hi - lo + 1;
    if rows > cfg.height as u64 {
        return Err(OpticsError::FrameOverflow {
            what: "matrix tile rows",
            needed: rows,
            available: cfg.height as u64,
        });
    }
    Ok(PhaseMask::from_fn(rows as usize, n, |p, q| {
        if mvm::sign_bit(lo - 1 + p as u64, q) == 1 {
            0.0
        } else {
            PI
        }
    }))
}

/// One polarization-projection stage: each output cell is the input cell
/// times `cos` of the mask phase at that cell.
pub fn project_amplitude(
    mask: &PhaseMask,
    input: &AmplitudeGrid,
) -> Result<AmplitudeGrid, OpticsError> {
    if mask.rows != input.rows || mask.cols != input.cols {
        return Err(OpticsError::ShapeMismatch {
            left_rows: mask.rows,
            left_cols: mask.cols,
            right_rows: input.rows,
            right_cols: input.cols,
        });
    }
    let values = mask
        .phases
        .iter()
        .zip(input.values.iter())
        .map(|(phi, a)| a * phi.cos())
        .collect();
    Ok(AmplitudeGrid { rows: mask.rows, cols: mask.cols, values })
}

/// The cylindrical-lens stage: sums each row left-to-right into one cell.
pub fn accumulate_rows(field: &AmplitudeGrid) -> Vec<f64> {
    (0..field.rows)
        .map(|p| {
            let mut acc = 0.0_f64;
            for q in 0..field.cols {
                acc += field.value(p, q);
            }
            acc
        })
        .collect()
}

/// The camera stage: `I_p = I0 * V_p^2` plus optional additive Gaussian
/// noise with standard deviation `noise_sigma * I0`, clamped at zero.
/// Deterministic per seed; with zero noise the square law is exact and the
/// RNG is never touched.
pub fn detect(v: &[f64], cfg: &OpticalConfig, seed: u64, lo: u64) -> IntensityFrame {
    assert!(!v.is_empty(), "detector frame must be nonempty");
    let mut intensities: Vec<f64> = v.iter().map(|&a| cfg.i0 * a * a).collect();
    if cfg.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, cfg.noise_sigma * cfg.i0).expect("validated sigma");
        for i in intensities.iter_mut() {
            *i = (*i + normal.sample(&mut rng)).max(0.0);
        }
    }
    let hi = lo + v.len() as u64 - 1;
    IntensityFrame { intensities, lo, hi }
}

/// Reads magnitudes back off a frame: `|V_p| = sqrt(I_p / I0)`. Signs are
/// unrecoverable; the zero test never needed them.
pub fn recover_magnitudes(frame: &IntensityFrame, cfg: &OpticalConfig) -> Vec<f64> {
    frame.intensities.iter().map(|i| (i / cfg.i0).sqrt()).collect()
}

/// Derives the per-frame noise seed from the run seed, so frames are
/// independent and the whole run is reproducible.
pub fn frame_seed(seed: u64, frame_index: u64) -> u64 {
    mix64(seed ^ mix64(frame_index.wrapping_add(1)))
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const MISALIGN_STREAM: u64 = 0x4D49_5341_4C49_474E;

/// Outcome of a full optical run over all `2^n` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalRun {
    /// The device verdict: some pixel fell at or below the threshold.
    pub feasible: bool,
    /// Global row indices of the (near-)zero pixels, ascending.
    pub candidate_rows: Vec<u64>,
    pub frames_used: u64,
    /// Intensity threshold applied to the zero-pixel test.
    pub detection_threshold: f64,
    /// Per-row amplitude error budget `n * step` the threshold derives from.
    pub amplitude_error_bound: f64,
    /// Normalization scale of the encoded chain.
    pub scale: f64,
    /// The chain was all zeros (trivially feasible).
    pub all_zero_chain: bool,
    pub per_frame_min_intensity: Vec<f64>,
}

/// Runs the full pipeline, streaming every detected frame to `on_frame`.
///
/// The `2^n` rows are tiled into `ceil(2^n / height)` frames; each frame is
/// encode -> project -> project -> accumulate -> detect. Candidate rows are
/// the pixels at or below the detection threshold.
pub fn solve_optical_frames(
    inst: &ParadoxicalInstance,
    cfg: &OpticalConfig,
    seed: u64,
    mut on_frame: impl FnMut(&IntensityFrame),
) -> Result<OpticalRun, OpticsError> {
    cfg.validate()?;
    let aug = inst.augment();
    let n = aug.n();
    if n > ENUMERATION_CAP {
        return Err(OpticsError::SizeLimit { n, cap: ENUMERATION_CAP });
    }
    if n > cfg.width {
        return Err(OpticsError::FrameOverflow {
            what: "chain columns",
            needed: n as u64,
            available: cfg.width as u64,
        });
    }
    let quantizer = cfg.quantizer()?;
    let normalized = normalize_distances(aug.y());
    let threshold = cfg.detection_threshold(n);
    let total_rows = 1u64 << n;
    let frames_used = total_rows.div_ceil(cfg.height as u64);

    let mut candidate_rows = Vec::new();
    let mut per_frame_min_intensity = Vec::with_capacity(frames_used as usize);
    for frame_index in 0..frames_used {
        let lo = frame_index * cfg.height as u64 + 1;
        let hi = (lo + cfg.height as u64 - 1).min(total_rows);
        let rows_here = (hi - lo + 1) as usize;

        let fseed = frame_seed(seed, frame_index);
        let mut vector_mask = encode_vector_mask(&normalized.values, rows_here, &quantizer)?;
        if cfg.misalign_sigma > 0.0 {
            vector_mask.jitter(cfg.misalign_sigma, mix64(fseed ^ MISALIGN_STREAM));
        }
        let matrix_mask = encode_matrix_mask(n, lo, hi, cfg)?;

        let input = AmplitudeGrid::uniform(rows_here, n, 1.0);
        let after_vector = project_amplitude(&vector_mask, &input)?;
        let after_matrix = project_amplitude(&matrix_mask, &after_vector)?;
        let amplitudes = accumulate_rows(&after_matrix);
        let frame = detect(&amplitudes, cfg, fseed, lo);

        let mut frame_min = f64::INFINITY;
        for (offset, &intensity) in frame.intensities.iter().enumerate() {
            frame_min = frame_min.min(intensity);
            if intensity <= threshold {
                candidate_rows.push(lo + offset as u64);
            }
        }
        per_frame_min_intensity.push(frame_min);
        on_frame(&frame);
    }

    Ok(OpticalRun {
        feasible: !candidate_rows.is_empty(),
        candidate_rows,
        frames_used,
        detection_threshold: threshold,
        amplitude_error_bound: cfg.amplitude_error_bound(n),
        scale: normalized.scale,
        all_zero_chain: normalized.all_zero,
        per_frame_min_intensity,
    })
}

/// [`solve_optical_frames`] without frame retention.
pub fn solve_optical(
    inst: &ParadoxicalInstance,
    cfg: &OpticalConfig,
    seed: u64,
) -> Result<OpticalRun, OpticsError> {
    solve_optical_frames(inst, cfg, seed, |_| {})
}

/// Peak multiply-accumulate rate of the device:
/// `width * height * parallel_vectors * frame_rate` operations per second.
///
/// At the defaults this is exactly `1920 * 1080 * 1080 * 60 =
/// 134_369_280_000` MAC/s, i.e. 0.134 Tera-MAC/s; rounding to one
/// significant figure gives 0.1 Tera-MAC/s, about 34% below the exact
/// product. This function reports the exact product.
pub fn throughput(cfg: &OpticalConfig) -> f64 {
    cfg.width as f64 * cfg.height as f64 * cfg.parallel_vectors as f64 * cfg.frame_rate
}

/// Modeled cost of one full scan at size `n`: the simulated MAC count
/// `2^n * n`, the frame count, and the wall time the device model predicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeledRun {
    pub mac_count: u64,
    pub frames: u64,
    pub seconds: f64,
}

pub fn modeled_run(cfg: &OpticalConfig, n: usize) -> Result<ModeledRun, OpticsError> {
    cfg.validate()?;
    if n == 0 || n > ENUMERATION_CAP {
        return Err(OpticsError::SizeLimit { n, cap: ENUMERATION_CAP });
    }
    let rows = 1u64 << n;
    let mac_count = rows * n as u64;
    Ok(ModeledRun {
        mac_count,
        frames: rows.div_ceil(cfg.height as u64),
        seconds: mac_count as f64 / throughput(cfg),
    })
}
