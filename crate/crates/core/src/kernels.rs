//! Power-law dispersion relation and the seven collision kernels of the
//! isotropic mixed 3-/4-wave kinetic equation.
//!
//! Frequencies are the independent variable. With `omega = |k|^rho` the
//! wavenumber is recovered as `|k|(omega) = omega^(1/rho)` and the Jacobian
//! `|k|'(omega) = omega^(1/rho - 1) / rho` appears in every kernel.
//!
//! Kernels `K1..K3` carry the 4-wave strength `c1` and homogeneity `sigma`,
//! kernels `K4..K7` the 3-wave strength `c2` and homogeneity `gamma`. In the
//! three-argument kernels the fourth frequency is eliminated by the resonance
//! condition, `nu = omega + mu - eta`.

use crate::error::{Error, Result};

/// `omega(k) = |k|^rho` with `rho >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    rho: f64,
    inv_rho: f64,
}

impl Dispersion {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: rho,
                reason: "dispersion exponent must be finite and >= 1",
            });
        }
        Ok(Self {
            rho,
            inv_rho: 1.0 / rho,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Wavenumber magnitude `|k|(omega)`.
    pub fn k_of_omega(&self, omega: f64) -> Result<f64> {
        check_positive("k_of_omega", omega)?;
        Ok(self.k(omega))
    }

    /// Derivative `d|k|/domega`.
    pub fn dk_of_omega(&self, omega: f64) -> Result<f64> {
        check_positive("dk_of_omega", omega)?;
        Ok(self.dk(omega))
    }

    #[inline]
    pub(crate) fn k(&self, omega: f64) -> f64 {
        if self.rho == 1.0 {
            omega
        } else if self.rho == 2.0 {
            omega.sqrt()
        } else {
            omega.powf(self.inv_rho)
        }
    }

    #[inline]
    pub(crate) fn dk(&self, omega: f64) -> f64 {
        if self.rho == 1.0 {
            1.0
        } else if self.rho == 2.0 {
            0.5 / omega.sqrt()
        } else {
            self.inv_rho * omega.powf(self.inv_rho - 1.0)
        }
    }

    /// Measure weight `|k|^2 |k|'` used by the moment observables.
    #[inline]
    pub(crate) fn measure(&self, omega: f64) -> f64 {
        let k = self.k(omega);
        k * k * self.dk(omega)
    }
}

/// Strengths and homogeneity degrees of the collision kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub c1: f64,
    pub c2: f64,
    pub sigma: f64,
    pub gamma: f64,
}

impl KernelParams {
    pub fn new(c1: f64, c2: f64, sigma: f64, gamma: f64) -> Result<Self> {
        let p = Self {
            c1,
            c2,
            sigma,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("c1", self.c1),
            ("c2", self.c2),
            ("sigma", self.sigma),
            ("gamma", self.gamma),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and non-negative",
                });
            }
        }
        Ok(())
    }
}

fn check_positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { what, value })
    }
}

/// The kernels `K1..K7` for one choice of dispersion and parameters.
///
/// The public methods check their domain. The crate-internal `*_raw`
/// variants skip the checks and are used in the discrete sums, whose index
/// sets already guarantee admissible arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernels {
    pub disp: Dispersion,
    pub params: KernelParams,
}

impl Kernels {
    pub fn new(disp: Dispersion, params: KernelParams) -> Self {
        Self { disp, params }
    }

    fn check3(what: &'static str, omega: f64, mu: f64, eta: f64) -> Result<()> {
        check_positive(what, omega)?;
        check_positive(what, mu)?;
        check_positive(what, eta)?;
        check_positive(what, omega + mu - eta)
    }

    fn check_below(what: &'static str, omega: f64, mu: f64) -> Result<()> {
        check_positive(what, mu)?;
        if mu >= omega {
            return Err(Error::Domain { what, value: mu });
        }
        Ok(())
    }

    pub fn k1(&self, omega: f64, mu: f64, eta: f64) -> Result<f64> {
        Self::check3("kernel_k1", omega, mu, eta)?;
        Ok(self.k1_raw(omega, mu, eta))
    }

    pub fn k2(&self, omega: f64, mu: f64, eta: f64) -> Result<f64> {
        Self::check3("kernel_k2", omega, mu, eta)?;
        Ok(self.k2_raw(omega, mu, eta))
    }

    pub fn k3(&self, omega: f64, mu: f64, eta: f64) -> Result<f64> {
        Self::check3("kernel_k3", omega, mu, eta)?;
        Ok(self.k3_raw(omega, mu, eta))
    }

    pub fn k4(&self, omega: f64, mu: f64) -> Result<f64> {
        Self::check_below("kernel_k4", omega, mu)?;
        Ok(self.k4_raw(omega, mu))
    }

    pub fn k5(&self, omega: f64, mu: f64) -> Result<f64> {
        check_positive("kernel_k5", omega)?;
        check_positive("kernel_k5", mu)?;
        Ok(self.k5_raw(omega, mu))
    }

    pub fn k6(&self, omega: f64, mu: f64) -> Result<f64> {
        Self::check_below("kernel_k6", omega, mu)?;
        Ok(self.k6_raw(omega, mu))
    }

    pub fn k7(&self, omega: f64, mu: f64) -> Result<f64> {
        check_positive("kernel_k7", omega)?;
        if mu <= omega {
            return Err(Error::Domain {
                what: "kernel_k7",
                value: mu,
            });
        }
        Ok(self.k7_raw(omega, mu))
    }

    /// `|k|'(mu)|k|'(eta)|k|'(nu) |k|(mu)|k|(eta)|k|(nu) (omega mu eta nu)^sigma`,
    /// the factor shared by the three 4-wave kernels, plus `|k|(mu)`, `|k|(eta)`.
    #[inline]
    fn quartet(&self, omega: f64, mu: f64, eta: f64) -> (f64, f64, f64) {
        let d = &self.disp;
        let nu = omega + mu - eta;
        let (km, ke, kn) = (d.k(mu), d.k(eta), d.k(nu));
        let jac = d.dk(mu) * d.dk(eta) * d.dk(nu);
        let hom = (omega * mu * eta * nu).powf(self.params.sigma);
        (jac * km * ke * kn * hom, km, ke)
    }

    #[inline]
    pub(crate) fn k1_raw(&self, omega: f64, mu: f64, eta: f64) -> f64 {
        let (common, km, ke) = self.quartet(omega, mu, eta);
        self.params.c1 / self.disp.k(omega) * common * (km - 2.0 * ke)
    }

    #[inline]
    pub(crate) fn k2_raw(&self, omega: f64, mu: f64, eta: f64) -> f64 {
        let (common, _, ke) = self.quartet(omega, mu, eta);
        2.0 * self.params.c1 / self.disp.k(omega) * common * ke
    }

    #[inline]
    pub(crate) fn k3_raw(&self, omega: f64, mu: f64, eta: f64) -> f64 {
        let (common, _, _) = self.quartet(omega, mu, eta);
        self.params.c1 * common
    }

    /// `|k|(a)|k|(b)/|k|(omega) |k|'(a)|k|'(b) (omega a b)^gamma`.
    #[inline]
    fn triad(&self, omega: f64, a: f64, b: f64) -> f64 {
        let d = &self.disp;
        d.k(a) * d.k(b) / d.k(omega) * d.dk(a) * d.dk(b) * (omega * a * b).powf(self.params.gamma)
    }

    #[inline]
    pub(crate) fn k4_raw(&self, omega: f64, mu: f64) -> f64 {
        self.params.c2 * self.triad(omega, mu, omega - mu)
    }

    #[inline]
    pub(crate) fn k5_raw(&self, omega: f64, mu: f64) -> f64 {
        2.0 * self.params.c2 * self.triad(omega, mu, omega + mu)
    }

    #[inline]
    pub(crate) fn k6_raw(&self, omega: f64, mu: f64) -> f64 {
        2.0 * self.k4_raw(omega, mu)
    }

    #[inline]
    pub(crate) fn k7_raw(&self, omega: f64, mu: f64) -> f64 {
        2.0 * self.params.c2 * self.triad(omega, mu, mu - omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernels(rho: f64, c1: f64, c2: f64, sigma: f64, gamma: f64) -> Kernels {
        Kernels::new(
            Dispersion::new(rho).unwrap(),
            KernelParams::new(c1, c2, sigma, gamma).unwrap(),
        )
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1e-300)
    }

    #[test]
    fn wavenumber_values() {
        let d2 = Dispersion::new(2.0).unwrap();
        let d3 = Dispersion::new(3.0).unwrap();
        let d1 = Dispersion::new(1.0).unwrap();
        assert!(close(d2.k_of_omega(4.0).unwrap(), 2.0));
        assert!(close(d3.k_of_omega(8.0).unwrap(), 2.0));
        assert!(close(d1.k_of_omega(1.7).unwrap(), 1.7));
        assert!(close(d2.dk_of_omega(4.0).unwrap(), 0.25));
        assert!(close(d1.dk_of_omega(1.0).unwrap(), 1.0));
        assert!(close(d3.dk_of_omega(1.0).unwrap(), 1.0 / 3.0));
    }

    #[test]
    fn dispersion_rejects_bad_input() {
        assert!(Dispersion::new(0.5).is_err());
        assert!(Dispersion::new(f64::NAN).is_err());
        let d = Dispersion::new(2.0).unwrap();
        assert!(matches!(d.k_of_omega(0.0), Err(Error::Domain { .. })));
        assert!(d.dk_of_omega(-1.0).is_err());
    }

    #[test]
    fn params_reject_negative() {
        assert!(KernelParams::new(1.0, 1.0, -0.1, 0.0).is_err());
        assert!(KernelParams::new(-1.0, 1.0, 0.0, 0.0).is_err());
        assert!(KernelParams::new(1.0, 1.0, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn four_wave_kernel_values() {
        let kk = kernels(2.0, 1.0, 1.0, 0.0, 0.0);
        assert!(close(kk.k1(4.0, 1.0, 1.0).unwrap(), -0.0625));
        assert_eq!(kk.k1(4.0, 4.0, 1.0).unwrap(), 0.0);
        assert!(close(
            kernels(2.0, 2.0, 1.0, 0.0, 0.0).k1(4.0, 1.0, 1.0).unwrap(),
            -0.125
        ));
        assert!(close(kk.k2(4.0, 1.0, 1.0).unwrap(), 0.125));
        assert!(close(kk.k2(4.0, 2.0, 1.0).unwrap(), 0.125));
        assert_eq!(
            kernels(2.0, 0.0, 1.0, 0.0, 0.0).k2(4.0, 1.0, 1.0).unwrap(),
            0.0
        );
        assert!(close(kk.k3(4.0, 1.0, 1.0).unwrap(), 0.125));
        assert!(close(kk.k3(9.0, 1.0, 1.0).unwrap(), 0.125));
        assert_eq!(
            kernels(2.0, 0.0, 1.0, 0.3, 0.0).k3(2.0, 1.5, 0.5).unwrap(),
            0.0
        );
    }

    #[test]
    fn three_wave_kernel_values() {
        let kk = kernels(2.0, 1.0, 1.0, 0.0, 0.0);
        let off = kernels(2.0, 1.0, 0.0, 0.0, 0.0);
        assert!(close(kk.k4(4.0, 1.0).unwrap(), 0.125));
        assert!(close(kk.k4(4.0, 3.0).unwrap(), 0.125));
        assert_eq!(off.k4(4.0, 1.0).unwrap(), 0.0);
        assert!(close(kk.k5(4.0, 1.0).unwrap(), 0.25));
        assert!(close(kk.k5(4.0, 7.0).unwrap(), 0.25));
        assert_eq!(off.k5(4.0, 1.0).unwrap(), 0.0);
        assert!(close(kk.k6(4.0, 1.0).unwrap(), 0.25));
        assert!(close(kk.k6(4.0, 3.0).unwrap(), 0.25));
        assert_eq!(off.k6(4.0, 1.0).unwrap(), 0.0);
        assert!(close(kk.k7(1.0, 4.0).unwrap(), 0.5));
        assert!(close(kk.k7(1.0, 2.0).unwrap(), 0.5));
        assert_eq!(off.k7(1.0, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn kernel_domain_boundaries_are_errors() {
        let kk = kernels(2.0, 1.0, 1.0, 0.5, 0.5);
        assert!(kk.k1(1.0, 1.0, 2.0).is_err());
        assert!(kk.k2(0.0, 1.0, 0.5).is_err());
        assert!(kk.k3(1.0, -1.0, 0.5).is_err());
        assert!(kk.k4(2.0, 2.0).is_err());
        assert!(kk.k4(2.0, 0.0).is_err());
        assert!(kk.k6(2.0, 3.0).is_err());
        assert!(kk.k7(2.0, 2.0).is_err());
        assert!(kk.k7(0.0, 2.0).is_err());
        assert!(kk.k5(1.0, 0.0).is_err());
    }

    #[test]
    fn overflow_is_not_clamped() {
        let kk = kernels(2.0, 1.0, 1.0, 400.0, 0.0);
        assert!(kk.k3(10.0, 10.0, 10.0).unwrap().is_infinite());
    }
}
