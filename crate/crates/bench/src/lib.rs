//! Shared inputs for the criterion benchmarks.

/// In-triangle points `(i/(r-1), j/(r-1))` with `i + j <= r - 1`.
pub fn triangle_points(resolution: usize) -> Vec<(f64, f64)> {
    let r = resolution.max(2);
    let step = 1.0 / (r - 1) as f64;
    (0..r)
        .flat_map(|i| (0..r - i).map(move |j| (i as f64 * step, j as f64 * step)))
        .collect()
}
