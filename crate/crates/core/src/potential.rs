//! Intermolecular potential of Lennard-Jones type and its disjoining pressure.

use crate::error::{Error, Result};

/// Exponents `(n, l)` and length scale `eps` of the potential
/// `phi(h) = 1/(l h^l) - 1/(n h^n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    pub n: u32,
    pub l: u32,
    pub eps: f64,
}

/// Smallest admissible scaled height; anything below is treated as a domain error.
pub const MIN_SCALED_HEIGHT: f64 = 1e-3;

impl PotentialParams {
    pub fn new(n: u32, l: u32, eps: f64) -> Result<Self> {
        if n < 2 || l <= n {
            return Err(Error::Domain(format!(
                "exponents need l > n >= 2, got n={n}, l={l}"
            )));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        Ok(PotentialParams { n, l, eps })
    }

    /// Default exponents (2, 3).
    pub fn with_eps(eps: f64) -> Result<Self> {
        Self::new(2, 3, eps)
    }

    /// `|phi(1)| = 1/n - 1/l`.
    pub fn well_depth(&self) -> f64 {
        1.0 / self.n as f64 - 1.0 / self.l as f64
    }

    /// `l - n`, the curvature of `phi` at its minimum.
    pub fn exponent_gap(&self) -> f64 {
        (self.l - self.n) as f64
    }

    /// `phi(h)` at the unscaled argument.
    pub fn phi(&self, h: f64) -> Result<f64> {
        check_scaled(h)?;
        Ok(phi_raw(self.n, self.l, h))
    }

    /// `phi'(h)` at the unscaled argument.
    pub fn phi_prime(&self, h: f64) -> Result<f64> {
        check_scaled(h)?;
        Ok(phi_prime_raw(self.n, self.l, h))
    }

    /// `phi(h1/eps) + phi(h/eps)`.
    pub fn phi_eps(&self, h1: f64, h: f64) -> Result<f64> {
        Ok(self.phi(self.scaled(h1)?)? + self.phi(self.scaled(h)?)?)
    }

    /// `Pi_eps(h) = (1/eps) [(eps/h)^(n+1) - (eps/h)^(l+1)]`.
    pub fn pi_eps(&self, h: f64) -> Result<f64> {
        let u = self.scaled(h)?;
        let r = 1.0 / u;
        Ok((r.powi(self.n as i32 + 1) - r.powi(self.l as i32 + 1)) / self.eps)
    }

    /// Derivative of `pi_eps` with respect to `h`.
    pub fn pi_eps_deriv(&self, h: f64) -> Result<f64> {
        let u = self.scaled(h)?;
        let r = 1.0 / u;
        let n = self.n as i32;
        let l = self.l as i32;
        Ok(
            (-(n as f64 + 1.0) * r.powi(n + 2) + (l as f64 + 1.0) * r.powi(l + 2))
                / (self.eps * self.eps),
        )
    }

    fn scaled(&self, h: f64) -> Result<f64> {
        let u = h / self.eps;
        check_scaled(u)?;
        Ok(u)
    }
}

impl Default for PotentialParams {
    fn default() -> Self {
        PotentialParams {
            n: 2,
            l: 3,
            eps: 0.01,
        }
    }
}

fn check_scaled(u: f64) -> Result<()> {
    if !(u >= MIN_SCALED_HEIGHT) || !u.is_finite() {
        return Err(Error::Domain(format!(
            "height {u} (in units of eps) is below {MIN_SCALED_HEIGHT}"
        )));
    }
    Ok(())
}

pub(crate) fn phi_raw(n: u32, l: u32, h: f64) -> f64 {
    1.0 / (l as f64 * h.powi(l as i32)) - 1.0 / (n as f64 * h.powi(n as i32))
}

/// `phi(1 + u) - phi(1)` without cancellation for small `u`.
pub(crate) fn phi_gap_raw(n: u32, l: u32, u: f64) -> f64 {
    let log = u.ln_1p();
    (-(l as f64) * log).exp_m1() / l as f64 - (-(n as f64) * log).exp_m1() / n as f64
}

pub(crate) fn phi_prime_raw(n: u32, l: u32, h: f64) -> f64 {
    h.powi(-(n as i32) - 1) - h.powi(-(l as i32) - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(eps: f64) -> PotentialParams {
        PotentialParams::with_eps(eps).unwrap()
    }

    #[test]
    fn phi_values() {
        assert_relative_eq!(p(1.0).phi(1.0).unwrap(), -1.0 / 6.0, epsilon = 1e-15);
        let p28 = PotentialParams::new(2, 8, 1.0).unwrap();
        assert_relative_eq!(p28.phi(1.0).unwrap(), -0.375, epsilon = 1e-15);
        // Monotone tail towards zero.
        let mut prev = p(1.0).phi(2.0).unwrap();
        for k in 3..60 {
            let v = p(1.0).phi(k as f64).unwrap();
            assert!(v > prev && v < 0.0);
            prev = v;
        }
        assert!(p(1.0).phi(1e8).unwrap().abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters_and_heights() {
        assert!(PotentialParams::new(3, 3, 0.1).is_err());
        assert!(PotentialParams::new(1, 3, 0.1).is_err());
        assert!(PotentialParams::new(2, 3, 0.0).is_err());
        assert!(p(1.0).phi(0.0).is_err());
        assert!(p(1.0).phi(-1.0).is_err());
        assert!(p(0.01).pi_eps(0.5e-5).is_err());
        assert!(p(0.01).phi_eps(0.01, -0.1).is_err());
    }

    #[test]
    fn phi_eps_values() {
        assert_relative_eq!(
            p(0.01).phi_eps(0.01, 0.01).unwrap(),
            -1.0 / 3.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(p(1.0).phi_eps(1.0, 2.0).unwrap(), -0.25, epsilon = 1e-14);
    }

    #[test]
    fn pi_eps_values() {
        assert_eq!(p(0.01).pi_eps(0.01).unwrap(), 0.0);
        assert_relative_eq!(p(0.01).pi_eps(0.02).unwrap(), 6.25, epsilon = 1e-12);
        assert!(p(0.01).pi_eps(0.015).unwrap() > 0.0);
        assert!(p(0.01).pi_eps(0.008).unwrap() < 0.0);
        assert_relative_eq!(p(1.0).pi_eps_deriv(1.0).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn pi_eps_deriv_matches_central_difference() {
        let pp = p(0.01);
        let h = 2.0 * pp.eps;
        let d = 1e-6 * pp.eps;
        let fd = (pp.pi_eps(h + d).unwrap() - pp.pi_eps(h - d).unwrap()) / (2.0 * d);
        let an = pp.pi_eps_deriv(h).unwrap();
        assert!(((fd - an) / an).abs() <= 1e-6);
    }

    #[test]
    fn pi_eps_deriv_negative_past_maximum() {
        // Pi_eps peaks at h/eps = (l+1)/(n+1).
        let pp = p(0.01);
        let peak = pp.eps * 4.0 / 3.0;
        assert!(pp.pi_eps_deriv(peak * 1.01).unwrap() < 0.0);
        assert!(pp.pi_eps_deriv(peak * 0.99).unwrap() > 0.0);
    }

    fn expansion_error(eps: f64) -> f64 {
        let pp = p(eps);
        (0..=200)
            .map(|k| {
                let u = -1.0 + 2.0 * k as f64 / 200.0;
                (pp.pi_eps(eps + eps * eps * u).unwrap() - pp.exponent_gap() * u).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn pressure_expansion_near_unit_height_is_first_order() {
        for eps in [0.02, 0.01, 0.005] {
            let ratio = expansion_error(eps) / expansion_error(eps / 2.0);
            assert!((1.5..=2.5).contains(&ratio), "ratio {ratio} at eps {eps}");
        }
    }

    #[test]
    fn phi_minimum_at_one() {
        let pp = p(1.0);
        let v1 = pp.phi(1.0).unwrap();
        assert_relative_eq!(v1, -pp.well_depth(), epsilon = 1e-15);
        assert!(pp.phi_prime(0.999).unwrap() < 0.0);
        assert!(pp.phi_prime(1.001).unwrap() > 0.0);
        for k in 1..400 {
            let h = 0.2 + k as f64 * 0.05;
            assert!(pp.phi(h).unwrap() >= v1);
        }
    }

    proptest! {
        #[test]
        fn phi_eps_symmetric(a in 1e-3f64..5.0, b in 1e-3f64..5.0, eps in 1e-3f64..0.1) {
            let pp = p(eps);
            prop_assume!(a / eps >= MIN_SCALED_HEIGHT && b / eps >= MIN_SCALED_HEIGHT);
            prop_assert_eq!(pp.phi_eps(a, b).unwrap(), pp.phi_eps(b, a).unwrap());
        }

        #[test]
        fn pi_eps_is_scaled_phi_derivative(
            u in 0.05f64..50.0, eps in 1e-3f64..1.0, n in 2u32..5, gap in 1u32..5,
        ) {
            let pp = PotentialParams::new(n, n + gap, eps).unwrap();
            let direct = pp.pi_eps(u * eps).unwrap();
            let via_phi = pp.phi_prime(u).unwrap() / eps;
            let scale = direct.abs().max(via_phi.abs()).max(1e-300);
            prop_assert!((direct - via_phi).abs() <= 1e-12 * scale);
        }

        #[test]
        fn pi_eps_sign_follows_unit_height(u in 0.01f64..100.0, eps in 1e-3f64..1.0) {
            let pp = p(eps);
            let v = pp.pi_eps(u * eps).unwrap();
            if u > 1.0 + 1e-12 { prop_assert!(v > 0.0); }
            if u < 1.0 - 1e-12 { prop_assert!(v < 0.0); }
        }
    }
}
