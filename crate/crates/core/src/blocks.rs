//! Leading-order building blocks: bulk parabolas, ultra-thin-film floors,
//! contact-line inner profiles and macroscopic contact angles.

use crate::error::{Error, Result};
use crate::potential::{phi_gap_raw, PotentialParams};

/// The two liquid layers: `H1` is the lower layer, `H` the upper one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    H1,
    H,
}

/// Bulk parabola families; each fixes its curvature from the pressures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BulkKind {
    /// Lower layer where both layers are thick.
    TypeIH1,
    /// Upper layer where both layers are thick.
    TypeIH,
    /// Lower layer while the upper layer is an ultra-thin film.
    TypeIIH1,
    /// Upper layer while the lower layer is an ultra-thin film.
    TypeIIIH,
}

impl BulkKind {
    /// Quadratic coefficient for pressures `(lambda1, lambda2)`.
    pub fn coeff(self, lambda1: f64, lambda2: f64, sigma: f64) -> f64 {
        match self {
            BulkKind::TypeIH1 => (lambda1 - lambda2) / (2.0 * sigma),
            BulkKind::TypeIH => (lambda2 - (sigma + 1.0) * lambda1) / (2.0 * sigma),
            BulkKind::TypeIIH1 => -lambda2 / (2.0 * (sigma + 1.0)),
            BulkKind::TypeIIIH => -lambda1 / 2.0,
        }
    }

    pub fn layer(self) -> Layer {
        match self {
            BulkKind::TypeIH1 | BulkKind::TypeIIH1 => Layer::H1,
            BulkKind::TypeIH | BulkKind::TypeIIIH => Layer::H,
        }
    }
}

/// A bulk parabola `value + slope (x - anchor) + coeff (x - anchor)^2`.
///
/// Pieces built from a vertex have `slope = 0`, so the height reads
/// `coeff (x - center)^2 + offset`. Anchoring at a contact line instead keeps
/// the degenerate `coeff = 0` cases (straight segments) representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkPiece {
    pub kind: BulkKind,
    pub coeff: f64,
    pub anchor: f64,
    pub value: f64,
    pub slope: f64,
}

impl BulkPiece {
    pub fn centered(kind: BulkKind, coeff: f64, center: f64, offset: f64) -> Self {
        BulkPiece {
            kind,
            coeff,
            anchor: center,
            value: offset,
            slope: 0.0,
        }
    }

    pub fn anchored(kind: BulkKind, coeff: f64, anchor: f64, value: f64, slope: f64) -> Self {
        BulkPiece {
            kind,
            coeff,
            anchor,
            value,
            slope,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let d = x - self.anchor;
        self.value + d * (self.slope + self.coeff * d)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.slope + 2.0 * self.coeff * (x - self.anchor)
    }

    /// Vertex position; `None` for a straight segment.
    pub fn center(&self) -> Option<f64> {
        if self.coeff == 0.0 {
            None
        } else {
            Some(self.anchor - self.slope / (2.0 * self.coeff))
        }
    }

    /// Height at the vertex; `None` for a straight segment.
    pub fn offset(&self) -> Option<f64> {
        self.center().map(|c| self.eval(c))
    }

    /// Maximum over `[a, b]`.
    pub fn max_on(&self, a: f64, b: f64) -> f64 {
        let mut m = self.eval(a).max(self.eval(b));
        if let Some(c) = self.center() {
            if c > a && c < b {
                m = m.max(self.eval(c));
            }
        }
        m
    }

    /// Image under `x -> -len - x`.
    pub fn mirrored(&self, len: f64) -> Self {
        BulkPiece {
            anchor: -len - self.anchor,
            slope: -self.slope,
            ..*self
        }
    }
}

/// Contact-line families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClType {
    /// Lower layer vanishes under a thick upper layer.
    I,
    /// Upper layer vanishes over a thick lower layer.
    II,
    /// Lower layer vanishes while the upper layer is thin.
    III,
    /// Upper layer vanishes while the lower layer is thin.
    IV,
}

impl ClType {
    /// Layer that drops to the ultra-thin film across this contact line.
    pub fn vanishing_layer(self) -> Layer {
        match self {
            ClType::I | ClType::III => Layer::H1,
            ClType::II | ClType::IV => Layer::H,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(ClType::I),
            "II" | "2" => Ok(ClType::II),
            "III" | "3" => Ok(ClType::III),
            "IV" | "4" => Ok(ClType::IV),
            other => Err(Error::Usage(format!("unknown contact-line type '{other}'"))),
        }
    }

    /// Factor `k` in the first integral `(h')^2 = k [phi(h) - phi(1)]`.
    fn first_integral_factor(self, sigma: f64) -> f64 {
        match self {
            ClType::I => 2.0 / sigma,
            ClType::II => 2.0 * (sigma + 1.0) / sigma,
            ClType::III => 2.0 / (sigma + 1.0),
            ClType::IV => 2.0,
        }
    }
}

/// Which way the vanishing layer goes when moving towards increasing `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Thin film on the left, thick layer on the right.
    Rising,
    /// Thick layer on the left, thin film on the right.
    Falling,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Rising => Orientation::Falling,
            Orientation::Falling => Orientation::Rising,
        }
    }
}

/// A resolved contact line of a leading-order solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClDescriptor {
    pub cl_type: ClType,
    pub position: f64,
    pub orientation: Orientation,
    /// Right minus left slope of the companion (non-vanishing) layer; zero
    /// when the companion is itself a thin film.
    pub slope_jump: f64,
}

impl ClDescriptor {
    pub fn mirrored(&self, len: f64) -> Self {
        ClDescriptor {
            position: -len - self.position,
            orientation: self.orientation.flipped(),
            slope_jump: -self.slope_jump,
            ..*self
        }
    }
}

/// Macroscopic slope magnitude of the vanishing layer at a contact line.
pub fn contact_angle(cl_type: ClType, sigma: f64, well_depth: f64) -> Result<f64> {
    if !(sigma > 0.0) || !(well_depth > 0.0) {
        return Err(Error::Domain(format!(
            "contact angle needs sigma > 0 and well depth > 0, got {sigma}, {well_depth}"
        )));
    }
    Ok((cl_type.first_integral_factor(sigma) * well_depth).sqrt())
}

/// Second-order constant heights of the ultra-thin films.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtfFloor {
    pub h1_floor: f64,
    pub h_floor: f64,
}

impl UtfFloor {
    pub fn for_layer(&self, layer: Layer) -> f64 {
        match layer {
            Layer::H1 => self.h1_floor,
            Layer::H => self.h_floor,
        }
    }
}

pub fn utf_floor(lambda1_0: f64, lambda2_0: f64, p: &PotentialParams) -> UtfFloor {
    let e2 = p.eps * p.eps / p.exponent_gap();
    UtfFloor {
        h1_floor: p.eps + e2 * lambda2_0,
        h_floor: p.eps + e2 * lambda1_0,
    }
}

/// Inner contact-line profile in scaled variables `(z, h/eps)`, rising
/// orientation: the height tends to 1 as `z -> -inf` and to `slope * z`
/// as `z -> +inf` (the corrector constant is zero).
#[derive(Debug, Clone)]
pub struct InnerProfile {
    pub cl_type: ClType,
    pub slope: f64,
    pub z: Vec<f64>,
    pub h: Vec<f64>,
    /// Decay rate of `h - 1` on the thin-film side.
    decay: f64,
    /// Dense table `(z, h, dh/dz)` used for Hermite evaluation.
    table_z: Vec<f64>,
    table_h: Vec<f64>,
    table_dh: Vec<f64>,
    /// Potential exponent `n`; the far-field offset decays like `h^(1-n)`.
    far_exponent: f64,
}

const INNER_START_OFFSET: f64 = 1e-6;
const QUAD_TOL: f64 = 1e-11;
const QUAD_MAX_DEPTH: u32 = 40;
const TAIL_END: f64 = 1e7;
const INNER_SAMPLES: usize = 2001;

/// Inner profile of the vanishing layer at a contact line, tabulated on
/// `[-half_width, half_width]` (units of eps).
pub fn cl_inner_profile(
    cl_type: ClType,
    sigma: f64,
    p: &PotentialParams,
    half_width: f64,
) -> Result<InnerProfile> {
    if !(half_width >= 5.0) {
        return Err(Error::Domain(format!(
            "half width must be at least 5 eps, got {half_width}"
        )));
    }
    let depth = p.well_depth();
    let k = cl_type.first_integral_factor(sigma);
    let slope = contact_angle(cl_type, sigma, depth)?;
    let (n, l) = (p.n, p.l);
    // dz/dt with t = ln(h - 1); bounded as h -> 1.
    let dz_dt = |t: f64| {
        let hm1 = t.exp();
        let gap = phi_gap_raw(n, l, hm1).max(0.0);
        hm1 / (k * gap).sqrt()
    };
    let t0 = INNER_START_OFFSET.ln();
    let h_top = slope * half_width * 1.5 + 10.0;
    let t1 = (h_top - 1.0).ln();
    let mut table_t = vec![t0];
    let mut table_zraw = vec![0.0];
    adaptive_simpson(&dz_dt, t0, t1, QUAD_TOL, &mut table_t, &mut table_zraw)?;

    // Offset chosen so that z(h) - h/slope -> 0 as h -> inf.
    let excess = |t: f64| {
        let hm1 = t.exp();
        let gap = phi_gap_raw(n, l, hm1).max(0.0);
        hm1 * (1.0 / (k * gap).sqrt() - 1.0 / slope)
    };
    let mut scratch_t = vec![t1];
    let mut scratch_v = vec![0.0];
    adaptive_simpson(
        &excess,
        t1,
        (TAIL_END - 1.0).ln(),
        QUAD_TOL,
        &mut scratch_t,
        &mut scratch_v,
    )?;
    let tail_mid = *scratch_v.last().unwrap();
    // Leading far-field term beyond TAIL_END: phi ~ -1/(n h^n).
    let nf = n as f64;
    let tail_far = 1.0 / (2.0 * slope * depth * nf * (nf - 1.0) * TAIL_END.powf(nf - 1.0));
    let z_top_raw = *table_zraw.last().unwrap();
    let limit = z_top_raw - h_top / slope + tail_mid + tail_far;
    let z0 = -limit;

    let table_h: Vec<f64> = table_t.iter().map(|t| 1.0 + t.exp()).collect();
    let table_z: Vec<f64> = table_zraw.iter().map(|z| z + z0).collect();
    let table_dh: Vec<f64> = table_t
        .iter()
        .map(|t| (k * phi_gap_raw(n, l, t.exp()).max(0.0)).sqrt())
        .collect();
    let decay = (k * p.exponent_gap() / 2.0).sqrt();
    let mut prof = InnerProfile {
        cl_type,
        slope,
        z: Vec::with_capacity(INNER_SAMPLES),
        h: Vec::with_capacity(INNER_SAMPLES),
        decay,
        table_z,
        table_h,
        table_dh,
        far_exponent: nf,
    };
    for i in 0..INNER_SAMPLES {
        let z = -half_width + 2.0 * half_width * i as f64 / (INNER_SAMPLES - 1) as f64;
        prof.z.push(z);
        prof.h.push(prof.height_at(z));
    }
    Ok(prof)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`, appending the running
/// integral at every panel midpoint and end to `(ts, acc)`.
fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    ts: &mut Vec<f64>,
    acc: &mut Vec<f64>,
) -> Result<()> {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_panel(f, (a, b), (fa, fm, fb), whole, tol, 0, ts, acc)
}

#[allow(clippy::too_many_arguments)]
fn simpson_panel<F: Fn(f64) -> f64>(
    f: &F,
    (a, b): (f64, f64),
    (fa, fm, fb): (f64, f64, f64),
    whole: f64,
    tol: f64,
    depth: u32,
    ts: &mut Vec<f64>,
    acc: &mut Vec<f64>,
) -> Result<()> {
    let m = 0.5 * (a + b);
    let (flm, frm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if !diff.is_finite() {
        return Err(Error::Numeric(format!(
            "inner profile quadrature produced {diff} on [{a}, {b}]"
        )));
    }
    if diff.abs() <= 15.0 * tol * (b - a).max(1e-3) || depth >= QUAD_MAX_DEPTH {
        if depth >= QUAD_MAX_DEPTH && diff.abs() > 1e3 * tol {
            return Err(Error::Numeric(format!(
                "inner profile quadrature did not converge on [{a}, {b}]: estimate {diff}"
            )));
        }
        let last = *acc.last().unwrap();
        ts.push(m);
        acc.push(last + left);
        ts.push(b);
        acc.push(last + left + right + diff / 15.0);
        return Ok(());
    }
    simpson_panel(f, (a, m), (fa, flm, fm), left, tol, depth + 1, ts, acc)?;
    simpson_panel(f, (m, b), (fm, frm, fb), right, tol, depth + 1, ts, acc)
}

impl InnerProfile {
    /// Scaled height at scaled position `z` (rising orientation).
    pub fn height_at(&self, z: f64) -> f64 {
        let zs = &self.table_z;
        let hs = &self.table_h;
        if z <= zs[0] {
            return 1.0 + (hs[0] - 1.0) * (self.decay * (z - zs[0])).exp();
        }
        let last = zs.len() - 1;
        if z >= zs[last] {
            // z(h) = h/slope - R(h) with R(h) ~ R_last (h_last/h)^(n-1).
            let r_last = hs[last] / self.slope - zs[last];
            let mut h = self.slope * z;
            for _ in 0..3 {
                h = self.slope * (z + r_last * (hs[last] / h).powf(self.far_exponent - 1.0));
            }
            return h;
        }
        let j = zs.partition_point(|&v| v <= z);
        let (za, zb) = (zs[j - 1], zs[j]);
        let dz = zb - za;
        let t = (z - za) / dz;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * hs[j - 1]
            + h10 * dz * self.table_dh[j - 1]
            + h01 * hs[j]
            + h11 * dz * self.table_dh[j]
    }

    /// Scaled height as a function of the far-field coordinate `u = slope * z`.
    pub fn height_at_far(&self, u: f64) -> f64 {
        self.height_at(u / self.slope)
    }

    /// Samples for the falling orientation (mirror image in `z`).
    pub fn mirrored_samples(&self) -> (Vec<f64>, Vec<f64>) {
        let z = self.z.iter().rev().map(|z| -z).collect();
        let h = self.h.iter().rev().copied().collect();
        (z, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pp() -> PotentialParams {
        PotentialParams::with_eps(0.01).unwrap()
    }

    #[test]
    fn contact_angle_values() {
        let d = 1.0 / 6.0;
        assert_relative_eq!(
            contact_angle(ClType::III, 0.2, d).unwrap(),
            0.527046,
            epsilon = 1e-6
        );
        assert_relative_eq!(
            contact_angle(ClType::IV, 7.0, d).unwrap(),
            0.577350,
            epsilon = 1e-6
        );
        assert_relative_eq!(
            contact_angle(ClType::I, 0.2, d).unwrap(),
            1.290994,
            epsilon = 1e-6
        );
        assert!(ClType::parse("V").is_err());
    }

    #[test]
    fn utf_floor_values() {
        let f = utf_floor(0.0, 0.0, &pp());
        assert_eq!((f.h1_floor, f.h_floor), (0.01, 0.01));
        let f = utf_floor(1.0, 0.0, &pp());
        assert_relative_eq!(f.h_floor, 0.0101, epsilon = 1e-15);
        assert!(utf_floor(0.0, 2.0, &pp()).h1_floor > utf_floor(0.0, 1.0, &pp()).h1_floor);
    }

    #[test]
    fn bulk_piece_forms_agree() {
        let c = BulkKind::TypeIH.coeff(0.3, 0.5, 0.2);
        let a = BulkPiece::centered(BulkKind::TypeIH, c, -0.4, 0.7);
        let b = BulkPiece::anchored(BulkKind::TypeIH, c, 0.1, a.eval(0.1), a.deriv(0.1));
        for k in 0..20 {
            let x = -1.0 + 0.1 * k as f64;
            assert_relative_eq!(a.eval(x), c * (x + 0.4) * (x + 0.4) + 0.7, epsilon = 1e-14);
            assert_relative_eq!(b.eval(x), a.eval(x), epsilon = 1e-14);
        }
        assert_relative_eq!(b.center().unwrap(), -0.4, epsilon = 1e-13);
        assert_relative_eq!(b.offset().unwrap(), 0.7, epsilon = 1e-13);
        let m = a.mirrored(2.0);
        assert_relative_eq!(m.eval(-2.0 - 0.3), a.eval(0.3), epsilon = 1e-14);
    }

    fn end_slope(pr: &InnerProfile) -> f64 {
        let n = pr.z.len();
        (pr.h[n - 1] - pr.h[n - 2]) / (pr.z[n - 1] - pr.z[n - 2])
    }

    #[test]
    fn inner_profile_far_field_and_inner_end() {
        for t in [ClType::I, ClType::II] {
            let pr = cl_inner_profile(t, 0.2, &pp(), 10.0).unwrap();
            let rel = (end_slope(&pr) - pr.slope).abs() / pr.slope;
            assert!(rel < 0.01, "{t:?}: far-field slope error {rel}");
            assert!((pr.h[0] - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn inner_profile_refinement_reduces_slope_error() {
        for t in [ClType::I, ClType::II, ClType::III, ClType::IV] {
            let a = cl_inner_profile(t, 0.2, &pp(), 10.0).unwrap();
            let b = cl_inner_profile(t, 0.2, &pp(), 20.0).unwrap();
            let ea = (end_slope(&a) - a.slope).abs();
            let eb = (end_slope(&b) - b.slope).abs();
            assert!(eb < ea, "{t:?}: {eb} !< {ea}");
            assert!((a.h[0] - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn inner_profile_monotone_and_mirrored() {
        let pr = cl_inner_profile(ClType::III, 0.7, &pp(), 10.0).unwrap();
        assert!(pr.h.windows(2).all(|w| w[1] > w[0]));
        let (z, h) = pr.mirrored_samples();
        assert!(h.windows(2).all(|w| w[1] < w[0]));
        assert_relative_eq!(z[0], -10.0, epsilon = 1e-12);
    }

    #[test]
    fn inner_profile_asymptote_has_zero_offset() {
        let pr = cl_inner_profile(ClType::I, 0.2, &pp(), 10.0).unwrap();
        // Far out, h/eps - slope*z decays like z^(1-n).
        let z = 2000.0;
        let gap = pr.height_at(z) - pr.slope * z;
        assert!(gap.abs() < 5e-3, "asymptotic offset {gap}");
    }

    #[test]
    fn inner_profile_slope_ratio_between_types() {
        let sigma = 0.45;
        let a = cl_inner_profile(ClType::I, sigma, &pp(), 10.0).unwrap();
        let b = cl_inner_profile(ClType::II, sigma, &pp(), 10.0).unwrap();
        assert_relative_eq!(b.slope / a.slope, (sigma + 1.0f64).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn inner_profile_rejects_narrow_window() {
        assert!(cl_inner_profile(ClType::I, 0.2, &pp(), 4.0).is_err());
    }
}
