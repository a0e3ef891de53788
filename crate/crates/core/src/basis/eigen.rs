use crate::error::{MorseError, Result};
use crate::params::{PhysicalParams, PrincipalParameter, RationalityMode};
use crate::special::{
    laguerre_derivative_scaled, laguerre_scaled, laguerre_second_derivative_scaled, log_gamma,
    Scaled,
};

/// Log of the one-dimensional factor `sqrt(beta (nu - 2n - 1) n! / Gamma(nu - n))`.
fn ln_mode_norm(nu: f64, beta: f64, n: u32) -> Result<f64> {
    let excess = nu - 2.0 * f64::from(n) - 1.0;
    if !(excess > 0.0) {
        return Err(MorseError::Domain(format!(
            "mode n = {n} is not bound for nu = {nu} (needs nu > 2n + 1)"
        )));
    }
    if !(beta > 0.0) {
        return Err(MorseError::Domain(format!(
            "range beta must be positive, got {beta}"
        )));
    }
    let n_f = f64::from(n);
    Ok(0.5 * (beta.ln() + excess.ln() + log_gamma(n_f + 1.0)? - log_gamma(nu - n_f)?))
}

/// `ln N_{n,m}` for the product state `|n, m>`.
pub fn ln_normalization(nu: f64, beta: f64, n: u32, m: u32) -> Result<f64> {
    Ok(ln_mode_norm(nu, beta, n)? + ln_mode_norm(nu, beta, m)?)
}

/// `N_{n,m} = beta sqrt((nu-2n-1)(nu-2m-1) n! m! / (Gamma(nu-n) Gamma(nu-m)))`,
/// assembled in log space. Underflows to zero for very deep wells; use
/// [`ln_normalization`] there.
pub fn normalization(nu: f64, beta: f64, n: u32, m: u32) -> Result<f64> {
    Ok(ln_normalization(nu, beta, n, m)?.exp())
}

/// Value and first two derivatives of a 1D mode at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSample {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

/// Normalized 1D Morse eigenfunction
/// `phi_n(x) = N_n z^s e^{-z/2} L_n^{2s}(z)` with `z = nu e^{-beta x}`, `s = p - n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode1D {
    n: u32,
    s: f64,
    nu: f64,
    ln_nu: f64,
    beta: f64,
    ln_norm: f64,
}

impl Mode1D {
    pub fn new(nu: f64, beta: f64, n: u32) -> Result<Self> {
        let ln_norm = ln_mode_norm(nu, beta, n)?;
        Ok(Self {
            n,
            s: 0.5 * (nu - 1.0) - f64::from(n),
            nu,
            ln_nu: nu.ln(),
            beta,
            ln_norm,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    fn alpha(&self) -> f64 {
        2.0 * self.s
    }

    /// `(ln z, z)` at position `x`.
    fn z(&self, x: f64) -> (f64, f64) {
        let ln_z = self.ln_nu - self.beta * x;
        (ln_z, ln_z.exp())
    }

    pub fn value(&self, x: f64) -> f64 {
        let (ln_z, z) = self.z(x);
        let ln_prefactor = self.ln_norm - 0.5 * z + self.s * ln_z;
        laguerre_scaled(self.n as usize, self.alpha(), z).times_exp(ln_prefactor)
    }

    pub fn density(&self, x: f64) -> f64 {
        let v = self.value(x);
        v * v
    }

    /// Value, `d/dx` and `d^2/dx^2` from the chain rule with `dz/dx = -beta z`.
    pub fn sample(&self, x: f64) -> ModeSample {
        let (ln_z, z) = self.z(x);
        let ln_prefactor = self.ln_norm - 0.5 * z + self.s * ln_z;
        let n = self.n as usize;
        let alpha = self.alpha();
        let l0 = laguerre_scaled(n, alpha, z);
        let l1 = laguerre_derivative_scaled(n, alpha, z);
        let l2 = laguerre_second_derivative_scaled(n, alpha, z);
        let at = |l: Scaled, extra: f64| l.times_exp(ln_prefactor + extra);

        let u = self.s - 0.5 * z;
        let value = at(l0, 0.0);
        // phi' = -beta P [ (s - z/2) L + z L' ]
        let first = -self.beta * (u * value + at(l1, ln_z));
        // phi'' = beta^2 P [ ((s - z/2)^2 - z/2) L + (2s - z + 1) z L' + z^2 L'' ]
        let second = self.beta
            * self.beta
            * ((u * u - 0.5 * z) * value
                + (2.0 * self.s - z + 1.0) * at(l1, ln_z)
                + at(l2, 2.0 * ln_z));
        ModeSample {
            value,
            first,
            second,
        }
    }

    /// Classical turning points `(wall, tail)` in position space.
    pub fn turning_points(&self) -> (f64, f64) {
        let root = (self.nu * self.nu - 4.0 * self.s * self.s).sqrt();
        let z_high = self.nu + root;
        // nu - root loses digits when s << nu
        let z_low = 4.0 * self.s * self.s / z_high;
        (
            (self.ln_nu - z_high.ln()) / self.beta,
            (self.ln_nu - z_low.ln()) / self.beta,
        )
    }

    /// Interval outside of which the density stays below `threshold` times its peak.
    ///
    /// The density has no nodes past the turning points and decays
    /// monotonically there, so each side is found by doubling outward and
    /// bisecting.
    pub fn support(&self, threshold: f64) -> (f64, f64) {
        let (wall, tail) = self.turning_points();
        let width = tail - wall;
        let samples = 2000;
        let peak = (0..=samples)
            .map(|i| self.density(wall + width * i as f64 / samples as f64))
            .fold(0.0, f64::max);
        let limit = threshold * peak;
        let step = 0.05 * width.max(1.0 / self.beta);
        let edge = |start: f64, direction: f64| {
            let mut inside = start;
            let mut offset = step;
            let mut outside = start + direction * offset;
            while self.density(outside) >= limit {
                inside = outside;
                offset *= 2.0;
                outside = start + direction * offset;
            }
            for _ in 0..60 {
                let mid = 0.5 * (inside + outside);
                if self.density(mid) >= limit {
                    inside = mid;
                } else {
                    outside = mid;
                }
                if (outside - inside).abs() <= 1e-9 * width.max(1.0) {
                    break;
                }
            }
            outside
        };
        (edge(wall, -1.0), edge(tail, 1.0))
    }
}

/// The bound sector of one well: parameter, range and every normalizable mode.
#[derive(Debug, Clone, PartialEq)]
pub struct MorseSystem {
    parameter: PrincipalParameter,
    beta: f64,
    modes: Vec<Option<Mode1D>>,
}

impl MorseSystem {
    /// `beta` is the range constant; `nu = 2p + 1`.
    pub fn new(parameter: PrincipalParameter, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(MorseError::Domain(format!(
                "range beta must be positive, got {beta}"
            )));
        }
        let nu = parameter.nu();
        let modes = (0..=parameter.k())
            .map(|n| Mode1D::new(nu, beta, n).ok())
            .collect();
        Ok(Self {
            parameter,
            beta,
            modes,
        })
    }

    pub fn from_physical(params: &PhysicalParams, mode: RationalityMode) -> Result<Self> {
        Self::new(
            PrincipalParameter::from_physical(params, mode)?,
            params.range,
        )
    }

    pub fn parameter(&self) -> &PrincipalParameter {
        &self.parameter
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn nu(&self) -> f64 {
        self.parameter.nu()
    }

    pub fn k(&self) -> u32 {
        self.parameter.k()
    }

    pub fn mode(&self, n: u32) -> Result<&Mode1D> {
        let k = self.k();
        match self.modes.get(n as usize) {
            Some(Some(mode)) => Ok(mode),
            Some(None) => Err(MorseError::Domain(format!(
                "mode n = {n} sits at the dissociation threshold and is not normalizable"
            ))),
            None => Err(MorseError::OutOfRange { k, n, m: 0 }),
        }
    }

    pub fn normalization(&self, n: u32, m: u32) -> Result<f64> {
        crate::spectrum::level_key(self.k(), n, m)?;
        normalization(self.nu(), self.beta, n, m)
    }

    /// `psi_{n,m}(x, y) = phi_n(x) phi_m(y)`.
    pub fn eigenfunction(&self, n: u32, m: u32, x: f64, y: f64) -> Result<f64> {
        crate::spectrum::level_key(self.k(), n, m)?;
        Ok(self.mode(n)?.value(x) * self.mode(m)?.value(y))
    }

    /// Union of the supports of the listed modes.
    pub fn support_of(&self, modes: &[u32], threshold: f64) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &n in modes {
            let (a, b) = self.mode(n)?.support(threshold);
            lo = lo.min(a);
            hi = hi.max(b);
        }
        if lo >= hi {
            return Err(MorseError::Domain("no modes to bound".into()));
        }
        Ok((lo, hi))
    }
}
