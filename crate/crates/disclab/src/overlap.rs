//! Pointer-state overlap and interference-precision arithmetic.

/// Margin value reported in place of infinity when every error is zero.
pub const MARGIN_CAP: f64 = 1e300;

/// Overlap magnitude of two equal-width Gaussian packets displaced by d:
/// |<g(x0, w)|g(x0+d, w)>| = exp(-d^2/(8 w^2)).
pub fn gaussian_overlap(displacement: f64, width: f64) -> f64 {
    let d = displacement;
    (-d * d / (8.0 * width * width)).exp()
}

/// Two N-disc pointer configurations compared disc by disc.
#[derive(Clone, Debug)]
pub struct PointerPair {
    /// Displacement between corresponding discs of the two pointer states.
    pub displacements: Vec<f64>,
    /// Common packet width.
    pub width: f64,
}

impl PointerPair {
    pub fn uniform(n: usize, displacement: f64, width: f64) -> Self {
        PointerPair {
            displacements: vec![displacement; n],
            width,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OverlapResult {
    /// Exact product of per-disc overlaps.
    pub exact: f64,
    /// exp(-sum_i delta_i) with delta_i = 1 - overlap_i.
    pub approximation: f64,
}

/// Total pointer overlap: the exact per-disc product alongside the
/// exponential approximation (1-delta)^N ~ exp(-N delta).
pub fn pointer_overlap(pair: &PointerPair) -> OverlapResult {
    let mut exact = 1.0;
    let mut delta_sum = 0.0;
    for &d in &pair.displacements {
        let o = gaussian_overlap(d, pair.width);
        exact *= o;
        delta_sum += 1.0 - o;
    }
    OverlapResult {
        exact,
        approximation: (-delta_sum).exp(),
    }
}

/// Per-disc positional precision lambda/N required for the two pointer
/// branches to interfere.
pub fn interference_precision(n_discs: usize, wavelength: f64) -> f64 {
    wavelength / n_discs as f64
}

#[derive(Clone, Copy, Debug)]
pub struct InterferenceVerdict {
    pub interferes: bool,
    /// threshold / max_error; capped at MARGIN_CAP when all errors vanish.
    pub margin: f64,
    pub threshold: f64,
    pub max_error: f64,
}

/// Apply the interference criterion to per-disc return errors: every disc
/// must sit within lambda/N of its goal (inclusive bound).
pub fn interference_verdict(per_disc_errors: &[f64], wavelength: f64) -> InterferenceVerdict {
    let n = per_disc_errors.len().max(1);
    let threshold = interference_precision(n, wavelength);
    let max_error = per_disc_errors.iter().copied().fold(0.0, f64::max);
    let margin = if max_error == 0.0 {
        MARGIN_CAP
    } else {
        (threshold / max_error).min(MARGIN_CAP)
    };
    InterferenceVerdict {
        interferes: max_error <= threshold,
        margin,
        threshold,
        max_error,
    }
}
