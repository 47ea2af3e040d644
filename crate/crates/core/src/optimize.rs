//! One-dimensional minimization: coarse scan, bracket, golden-section.
//!
//! The objectives met in this crate (`log u(e^y) - t*y` and friends) are
//! unimodal for the catalog families but nothing guarantees it for tabulated
//! weights, so the search runs golden-section from several coarse-scan local
//! minima and keeps the best.

use serde::Serialize;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Outcome flag of a scalar search, ordered from best to worst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Converged,
    /// Several coarse-scan basins led to different minima; the best is kept.
    MultiModal,
    /// The minimum sits on the edge of the search interval.
    Boundary,
    /// The objective was non-finite everywhere it was probed.
    NonFinite,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::Converged => "converged",
            SearchStatus::MultiModal => "multimodal",
            SearchStatus::Boundary => "boundary",
            SearchStatus::NonFinite => "nonfinite",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
    pub status: SearchStatus,
    /// True when the extremum is at the lower / upper end of the interval.
    pub at_lower: bool,
    pub at_upper: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub scan_points: usize,
    pub starts: usize,
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            scan_points: 33,
            starts: 4,
            xtol: 1e-11,
            max_iter: 200,
        }
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = sanitize(f(c));
    let mut fd = sanitize(f(d));
    for _ in 0..max_iter {
        if (b - a).abs() <= xtol * (1.0 + 0.5 * (a.abs() + b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = sanitize(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = sanitize(f(d));
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimize `f` over `[lo, hi]` with scan + bracket + golden-section and
/// `opts.starts` multi-starts.
pub fn minimize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, opts: &ScanOptions) -> Extremum {
    let n = opts.scan_points.max(3);
    let xs: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| sanitize(f(x))).collect();

    if fs.iter().all(|v| !v.is_finite()) {
        return Extremum {
            x: xs[0],
            value: fs[0],
            status: SearchStatus::NonFinite,
            at_lower: false,
            at_upper: false,
        };
    }

    // local minima of the coarse scan, best first
    let mut basins: Vec<usize> = (0..n)
        .filter(|&i| {
            let left = if i == 0 { f64::INFINITY } else { fs[i - 1] };
            let right = if i + 1 == n { f64::INFINITY } else { fs[i + 1] };
            fs[i].is_finite() && fs[i] <= left && fs[i] <= right
        })
        .collect();
    basins.sort_by(|&i, &j| fs[i].total_cmp(&fs[j]).then(i.cmp(&j)));
    basins.truncate(opts.starts.max(1));

    let mut best: Option<(f64, f64)> = None;
    let mut minima = Vec::with_capacity(basins.len());
    for &i in &basins {
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(n - 1)];
        let (mut x, mut v) = golden_section(&f, a, b, opts.xtol, opts.max_iter);
        if fs[i] < v {
            x = xs[i];
            v = fs[i];
        }
        minima.push((x, v));
        if best.is_none_or(|(_, bv)| v < bv) {
            best = Some((x, v));
        }
    }
    let (x, value) = best.expect("at least one finite basin");

    let span = (hi - lo).abs();
    let edge = (opts.xtol * 10.0).max(span * 1e-9);
    let at_lower = (x - lo).abs() <= edge;
    let at_upper = (hi - x).abs() <= edge;
    let scale = 1.0 + value.abs();
    let distinct = minima
        .iter()
        .filter(|(mx, mv)| (mx - x).abs() > 1e-3 * (1.0 + x.abs()) && (mv - value).abs() > 1e-9 * scale)
        .count();
    let status = if at_lower || at_upper {
        SearchStatus::Boundary
    } else if distinct > 0 {
        SearchStatus::MultiModal
    } else {
        SearchStatus::Converged
    };
    Extremum {
        x,
        value,
        status,
        at_lower,
        at_upper,
    }
}

/// Maximize `f` over `[lo, hi]`; the returned `value` is the maximum.
pub fn maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, opts: &ScanOptions) -> Extremum {
    let mut e = minimize(|x| -f(x), lo, hi, opts);
    e.value = -e.value;
    e
}
