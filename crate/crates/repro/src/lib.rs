//! Reference values for the WDBC reproduction, as published.
//!
//! Feature names follow `effsel::data::WDBC_FEATURES`.

use std::path::PathBuf;

/// The bundled `wdbc.data`.
pub fn wdbc_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/wdbc.data")
}

/// 95% intervals per feature, columns d, D, U1, U2, U3, each `[lo, hi]`.
pub const INTERVALS: [(&str, [[f64; 2]; 5]); 30] = [
    ("radius mean", [[1.99, 2.41], [1.81, 2.31], [0.81, 0.87], [0.84, 0.88], [0.97, 0.99]]),
    ("texture mean", [[0.76, 1.12], [0.77, 1.13], [0.45, 0.59], [0.64, 0.71], [0.77, 0.86]]),
    ("perimeter mean", [[2.07, 2.5], [1.88, 2.39], [0.82, 0.88], [0.85, 0.89], [0.98, 0.99]]),
    ("area mean", [[1.86, 2.28], [1.62, 2.12], [0.78, 0.85], [0.82, 0.87], [0.96, 0.98]]),
    ("smoothness mean", [[0.61, 0.96], [0.62, 0.97], [0.38, 0.64], [0.62, 0.68], [0.73, 0.83]]),
    ("compactness mean", [[1.34, 1.72], [1.24, 1.66], [0.66, 0.75], [0.74, 0.8], [0.91, 0.95]]),
    ("concavity mean", [[1.79, 2.2], [1.64, 2.12], [0.77, 0.84], [0.81, 0.86], [0.96, 0.98]]),
    ("concave points mean", [[2.31, 2.76], [2.07, 2.61], [0.85, 0.9], [0.87, 0.91], [0.98, 0.99]]),
    ("symmetry mean", [[0.54, 0.89], [0.53, 0.89], [0.35, 0.51], [0.6, 0.67], [0.7, 0.81]]),
    ("fractal dimension mean", [[-0.14, 0.19], [-0.14, 0.19], [0.0, 0.14], [0.5, 0.53], [0.42, 0.55]]),
    ("radius se", [[1.23, 1.61], [1.05, 1.49], [0.63, 0.73], [0.73, 0.78], [0.89, 0.94]]),
    ("texture se", [[-0.15, 0.18], [-0.14, 0.18], [0.0, 0.13], [0.5, 0.53], [0.42, 0.56]]),
    ("perimeter se", [[1.19, 1.56], [1.01, 1.45], [0.61, 0.72], [0.72, 0.78], [0.88, 0.94]]),
    ("area se", [[1.16, 1.54], [0.96, 1.4], [0.61, 0.71], [0.71, 0.77], [0.87, 0.93]]),
    ("smoothness se", [[-0.03, 0.3], [-0.02, 0.3], [0.0, 0.21], [0.5, 0.56], [0.37, 0.51]]),
    ("compactness se", [[0.45, 0.8], [0.44, 0.8], [0.3, 0.47], [0.59, 0.65], [0.67, 0.78]]),
    ("concavity se", [[0.36, 0.71], [0.4, 0.73], [0.25, 0.43], [0.57, 0.63], [0.64, 0.76]]),
    ("concave points se", [[0.74, 1.1], [0.75, 1.11], [0.44, 0.58], [0.64, 0.7], [0.77, 0.86]]),
    ("symmetry se", [[-0.15, 0.18], [-0.16, 0.19], [0.0, 0.13], [0.5, 0.53], [0.42, 0.56]]),
    ("fractal dimension se", [[-0.008, 0.33], [-0.006, 0.33], [0.0, 0.23], [0.5, 0.56], [0.49, 0.62]]),
    ("radius worst", [[2.31, 2.76], [2.07, 2.61], [0.85, 0.9], [0.87, 0.91], [0.98, 0.99]]),
    ("texture worst", [[0.87, 1.24], [0.88, 1.25], [0.5, 0.63], [0.66, 0.73], [0.81, 0.89]]),
    ("perimeter worst", [[2.37, 2.82], [2.11, 2.66], [0.86, 0.91], [0.88, 0.92], [0.991, 0.997]]),
    ("area worst", [[2.01, 2.44], [1.72, 2.24], [0.81, 0.87], [0.84, 0.88], [0.97, 0.99]]),
    ("smoothness worst", [[0.78, 1.13], [0.76, 1.13], [0.46, 0.6], [0.65, 0.71], [0.78, 0.87]]),
    ("compactness worst", [[1.32, 1.7], [1.19, 1.62], [0.65, 0.75], [0.74, 0.8], [0.9, 0.95]]),
    ("concavity worst", [[1.61, 2.01], [1.54, 1.98], [0.73, 0.81], [0.78, 0.84], [0.94, 0.97]]),
    ("concave points worst", [[2.46, 2.92], [2.35, 2.87], [0.87, 0.92], [0.89, 0.92], [0.993, 0.998]]),
    ("symmetry worst", [[0.76, 1.12], [0.69, 1.08], [0.45, 0.59], [0.64, 0.71], [0.77, 0.86]]),
    ("fractal dimension worst", [[0.53, 0.88], [0.48, 0.85], [0.34, 0.5], [0.6, 0.67], [0.7, 0.81]]),
];

/// Features with a large effect (d > 0.8); D marks the same set.
pub const LARGE_D: [&str; 20] = [
    "radius mean",
    "texture mean",
    "perimeter mean",
    "area mean",
    "compactness mean",
    "concavity mean",
    "concave points mean",
    "radius se",
    "perimeter se",
    "area se",
    "concave points se",
    "radius worst",
    "texture worst",
    "perimeter worst",
    "area worst",
    "smoothness worst",
    "compactness worst",
    "concavity worst",
    "concave points worst",
    "symmetry worst",
];

/// Features selected by all five measures.
pub const COMMON: [&str; 15] = [
    "radius mean",
    "perimeter mean",
    "area mean",
    "compactness mean",
    "concavity mean",
    "concave points mean",
    "radius se",
    "perimeter se",
    "area se",
    "radius worst",
    "perimeter worst",
    "area worst",
    "compactness worst",
    "concavity worst",
    "concave points worst",
];

/// Mean score per measure (d, D, U1, U2, U3).
pub const MEANS: [f64; 5] = [1.29, 1.20, 0.56, 0.74, 0.84];

/// Decision rules for U1, U2, U3.
pub const U_RULES: [f64; 3] = [0.5, 0.7, 0.8];

pub fn interval(feature: &str) -> Option<[[f64; 2]; 5]> {
    INTERVALS.iter().find(|(n, _)| *n == feature).map(|(_, iv)| *iv)
}
