//! Maps between the parameterization heights `(h1_m, h_m)` and the realized
//! profile maxima `(max h1, max h)`.

use super::CompositeKind;

/// `C4 / h_m` of the sessile zigzags: positive root of the lower-layer
/// matching quadratic, written without cancellation.
pub(crate) fn c4_ratio(sigma: f64, hbar: f64) -> f64 {
    let g = hbar - sigma - 1.0;
    2.0 * sigma / (sigma * hbar + (sigma * sigma * hbar * hbar + sigma * g * g).sqrt())
}

/// `C2 / h_m` of the sessile zigzags.
pub(crate) fn c2_ratio(sigma: f64, hbar: f64) -> f64 {
    let g = hbar - 1.0;
    2.0 * sigma / (sigma + (sigma * sigma + sigma * g * g).sqrt())
}

/// Lower-layer height at the type II line of the sessile lens.
fn sessile_lens_c4(sigma: f64, a: f64, b: f64) -> f64 {
    let q = (sigma + 1.0) * a + b;
    b / (sigma + 1.0) * ((1.0 - sigma) * b + (sigma + 1.0) * a) / q + a
}

/// Upper-layer height at the type I line of the sessile internal drop.
fn sessile_internal_drop_c2(sigma: f64, a: f64, b: f64) -> f64 {
    b + (b + (1.0 - sigma) * a) * a / (a + b)
}

/// Realized maxima `(max h1, max h)` for the given parameterization heights.
///
/// Kinds whose maxima are the parameterization heights map identically.
pub fn maxima_from_params(kind: CompositeKind, sigma: f64, h1_m: f64, h_m: f64) -> (f64, f64) {
    let (a, b) = (h1_m, h_m);
    let hb = b / a;
    match kind {
        CompositeKind::SessileLens => {
            if sigma > 1.0 && hb >= (sigma + 1.0) / (sigma - 1.0) {
                (a, b)
            } else {
                (sessile_lens_c4(sigma, a, b), b)
            }
        }
        CompositeKind::SessileInternalDrop => {
            if hb >= sigma - 1.0 {
                (a, sessile_internal_drop_c2(sigma, a, b))
            } else {
                (a, b)
            }
        }
        CompositeKind::TwoSideSessileZigZag => {
            if hb <= 1.0 {
                (a, c2_ratio(sigma, hb) * b)
            } else if hb <= sigma + 1.0 {
                (a, b)
            } else {
                (c4_ratio(sigma, hb) * b, b)
            }
        }
        CompositeKind::H1SessileZigZag => {
            if hb <= 1.0 {
                (a, c2_ratio(sigma, hb) * b)
            } else {
                (a, b)
            }
        }
        CompositeKind::HSessileZigZag => {
            if hb >= sigma + 1.0 {
                (c4_ratio(sigma, hb) * b, b)
            } else {
                (a, b)
            }
        }
        _ => (a, b),
    }
}

/// Inverse of [`maxima_from_params`]; `None` when no parameterization
/// produces the given maxima.
pub fn params_from_maxima(
    kind: CompositeKind,
    sigma: f64,
    h1_max: f64,
    h_max: f64,
) -> Option<(f64, f64)> {
    if !(h1_max > 0.0 && h_max > 0.0) {
        return None;
    }
    let ht = h_max / h1_max;
    let upper_inverse = || h_max / (ht - 2.0 * sigma + (4.0 * sigma * (sigma + 1.0 - ht)).sqrt());
    let lower_inverse = || {
        h_max
            / (sigma + 1.0 - 2.0 * sigma * ht
                + (4.0 * sigma * (sigma + 1.0) * ht * (ht - 1.0)).sqrt())
    };
    match kind {
        CompositeKind::TwoSideSessileZigZag => {
            if ht <= 1.0 {
                Some((h1_max, upper_inverse()))
            } else if ht <= sigma + 1.0 {
                Some((h1_max, h_max))
            } else {
                Some((lower_inverse(), h_max))
            }
        }
        CompositeKind::H1SessileZigZag => {
            if ht <= 1.0 {
                Some((h1_max, upper_inverse()))
            } else {
                Some((h1_max, h_max))
            }
        }
        CompositeKind::HSessileZigZag => {
            if ht >= sigma + 1.0 {
                Some((lower_inverse(), h_max))
            } else {
                Some((h1_max, h_max))
            }
        }
        CompositeKind::SessileLens => sessile_lens_inverse(sigma, h1_max, h_max),
        CompositeKind::SessileInternalDrop => sessile_internal_drop_inverse(sigma, h1_max, h_max),
        _ => Some((h1_max, h_max)),
    }
}

/// Candidates are checked against the forward map, which also selects the
/// branch of the case split.
fn accept(kind: CompositeKind, sigma: f64, cand: (f64, f64), target: (f64, f64)) -> bool {
    if !(cand.0 > 0.0 && cand.1 > 0.0) {
        return false;
    }
    let (m1, m) = maxima_from_params(kind, sigma, cand.0, cand.1);
    let tol = 1e-9 * (1.0 + target.0.abs() + target.1.abs());
    (m1 - target.0).abs() <= tol && (m - target.1).abs() <= tol
}

fn positive_roots(p: f64, q: f64) -> Vec<f64> {
    // x^2 + p x + q = 0
    let disc = p * p - 4.0 * q;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let big = if p >= 0.0 {
        -(p + sq) / 2.0
    } else {
        (-p + sq) / 2.0
    };
    let mut roots = vec![big];
    if big != 0.0 {
        roots.push(q / big);
    }
    roots.into_iter().filter(|r| *r > 0.0).collect()
}

fn sessile_lens_inverse(sigma: f64, h1_max: f64, h_max: f64) -> Option<(f64, f64)> {
    let kind = CompositeKind::SessileLens;
    let b = h_max;
    let k = (sigma + 1.0) * h1_max;
    // u = (sigma + 1) h1_m solves u^2 + u (2b - k) + (1 - sigma) b^2 - k b = 0.
    let mut cands: Vec<(f64, f64)> = positive_roots(2.0 * b - k, (1.0 - sigma) * b * b - k * b)
        .into_iter()
        .map(|u| (u / (sigma + 1.0), b))
        .collect();
    cands.push((h1_max, b));
    cands
        .into_iter()
        .find(|c| accept(kind, sigma, *c, (h1_max, h_max)))
}

fn sessile_internal_drop_inverse(sigma: f64, h1_max: f64, h_max: f64) -> Option<(f64, f64)> {
    let kind = CompositeKind::SessileInternalDrop;
    let a = h1_max;
    let c2 = h_max;
    // h_m solves b^2 + b (2a - C2) + (1 - sigma) a^2 - C2 a = 0.
    let mut cands: Vec<(f64, f64)> = positive_roots(2.0 * a - c2, (1.0 - sigma) * a * a - c2 * a)
        .into_iter()
        .map(|b| (a, b))
        .collect();
    cands.push((a, h_max));
    cands
        .into_iter()
        .find(|c| accept(kind, sigma, *c, (h1_max, h_max)))
}
