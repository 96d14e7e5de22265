//! Bounded scalar maximization: uniform pre-scan followed by golden-section refinement.

/// Options for [`maximize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Number of uniformly spaced points evaluated before refinement.
    pub prescan: usize,
    /// Bracket width at which golden-section refinement stops.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { prescan: 1000, tol: 1e-12, max_iter: 300 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> f64 {
    let v = f(x);
    if v.is_nan() { f64::NEG_INFINITY } else { v }
}

/// Maximizes `f` on `[lo, hi]`.
///
/// The pre-scan locates the best grid cell, then golden-section search runs on the
/// two cells around it. Both endpoints are always candidates, so maxima on the
/// boundary are found exactly.
pub fn maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, opts: &ScanOptions) -> Maximum {
    debug_assert!(lo <= hi);
    if hi - lo <= 0.0 {
        return Maximum { x: lo, value: eval(&f, lo) };
    }
    let n = opts.prescan.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let grid = |i: usize| if i + 1 == n { hi } else { lo + step * i as f64 };

    let mut best = Maximum { x: lo, value: eval(&f, lo) };
    let mut best_i = 0;
    for i in 1..n {
        let x = grid(i);
        let v = eval(&f, x);
        if v > best.value {
            best = Maximum { x, value: v };
            best_i = i;
        }
    }

    let mut a = grid(best_i.saturating_sub(1));
    let mut b = grid((best_i + 1).min(n - 1));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(&f, c);
    let mut fd = eval(&f, d);
    for _ in 0..opts.max_iter {
        if (b - a).abs() <= opts.tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(&f, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(&f, d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best.value {
            best = Maximum { x, value: v };
        }
    }
    let mid = 0.5 * (a + b);
    let vm = eval(&f, mid);
    if vm > best.value {
        best = Maximum { x: mid, value: vm };
    }
    best
}
