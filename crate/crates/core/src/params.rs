//! Physical constants of the Morse well and the principal parameter `p`.
//!
//! The principal parameter is carried twice: as the decimal text the caller
//! supplied (exact, used whenever an ordering decision is too close to call in
//! floating point) and as an `f64` working value. Its rationality class is a
//! declaration by the caller and is never guessed from the float.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{MorseError, Result};

/// Digits of pi used to expand `"<c>pi"` shorthand before rounding to
/// [`PI_EXPANSION_DIGITS`] significant digits.
const PI_DIGITS: &str =
    "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899";

/// Significant digits kept when `"<c>pi"` is expanded into decimal text.
pub const PI_EXPANSION_DIGITS: usize = 40;

/// Mass, well depth, range and reduced Planck constant of the isotropic well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub mass: f64,
    pub depth: f64,
    pub range: f64,
    pub hbar: f64,
}

impl PhysicalParams {
    pub fn new(mass: f64, depth: f64, range: f64, hbar: f64) -> Result<Self> {
        let params = Self {
            mass,
            depth,
            range,
            hbar,
        };
        params.validate()?;
        Ok(params)
    }

    /// Unit mass, range and hbar with the depth chosen so that the principal
    /// parameter equals `p`.
    pub fn for_principal(p: f64) -> Result<Self> {
        Self::new(1.0, depth_for_principal(p)?, 1.0, 1.0)
    }

    fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("mass", self.mass),
            ("depth", self.depth),
            ("range", self.range),
            ("hbar", self.hbar),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(MorseError::Domain(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// `nu = sqrt(8 m V0 / (beta^2 hbar^2))`.
    pub fn nu(&self) -> f64 {
        (8.0 * self.mass * self.depth / (self.range * self.range * self.hbar * self.hbar)).sqrt()
    }
}

/// Returns `(nu, p)` with `p = (nu - 1) / 2`.
pub fn derive_parameters(params: &PhysicalParams) -> Result<(f64, f64)> {
    params.validate()?;
    let nu = params.nu();
    if nu <= 1.0 {
        return Err(MorseError::NoBoundStates { nu });
    }
    Ok((nu, (nu - 1.0) / 2.0))
}

/// Well depth giving principal parameter `p` when mass, range and hbar are 1.
pub fn depth_for_principal(p: f64) -> Result<f64> {
    if !(p.is_finite() && p > 0.0) {
        return Err(MorseError::Domain(format!("p must be positive, got {p}")));
    }
    let nu = 2.0 * p + 1.0;
    Ok(nu * nu / 8.0)
}

/// Declared arithmetic class of `p`; decides which degeneracy algebra applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RationalityMode {
    Integer,
    Rational { r: u64, q: u64 },
    Irrational,
}

impl fmt::Display for RationalityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalityMode::Integer => write!(f, "integer"),
            RationalityMode::Rational { r, q } => write!(f, "rational {r}/{q}"),
            RationalityMode::Irrational => write!(f, "irrational"),
        }
    }
}

/// `p = k + epsilon` with `k = floor(p)`, together with the declared mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalParameter {
    p_text: String,
    p_value: f64,
    k: u32,
    epsilon: f64,
    mode: RationalityMode,
    exact_epsilon: BigRational,
}

impl PrincipalParameter {
    /// Parses `p_text` (a decimal such as `"9.42"`, `"7.5"`, `"1e1"`, or a
    /// multiple of pi such as `"3pi"`) and checks it against `mode`.
    pub fn new(p_text: &str, mode: RationalityMode) -> Result<Self> {
        let text = expand_text(p_text)?;
        let exact = parse_decimal(&text)?;
        if !exact.is_positive() {
            return Err(MorseError::Domain(format!(
                "p must be positive, got {p_text}"
            )));
        }
        let p_value: f64 = text
            .parse()
            .map_err(|_| MorseError::Parse(format!("cannot read {text:?} as a number")))?;
        let floor = exact.floor();
        let k = floor
            .to_integer()
            .to_u32()
            .ok_or_else(|| MorseError::Domain(format!("p = {text} is too large")))?;
        if p_value.floor() != f64::from(k) {
            return Err(MorseError::Inconsistent(format!(
                "p = {text} lies within rounding of an integer; floor is ambiguous in double precision"
            )));
        }
        let exact_epsilon = &exact - &floor;
        let tolerance = BigRational::from_float(4.0 * f64::EPSILON * p_value.max(1.0))
            .expect("finite tolerance");

        let (mode, epsilon) = match mode {
            RationalityMode::Integer => {
                if exact_epsilon > tolerance {
                    return Err(MorseError::Inconsistent(format!(
                        "p = {text} declared integer but has fractional part"
                    )));
                }
                (RationalityMode::Integer, 0.0)
            }
            RationalityMode::Rational { r, q } => {
                if q == 0 || r >= q {
                    return Err(MorseError::Inconsistent(format!(
                        "rational remainder {r}/{q} must satisfy 0 <= r < q"
                    )));
                }
                let g = r.gcd(&q);
                let (r, q) = (r / g, q / g);
                let declared = BigRational::new(BigInt::from(r), BigInt::from(q));
                if (&exact_epsilon - &declared).abs() > tolerance {
                    return Err(MorseError::Inconsistent(format!(
                        "p = {text} has fractional part {} which is not {r}/{q}",
                        exact_epsilon.to_f64().unwrap_or(f64::NAN)
                    )));
                }
                (RationalityMode::Rational { r, q }, r as f64 / q as f64)
            }
            RationalityMode::Irrational => (
                RationalityMode::Irrational,
                exact_epsilon.to_f64().unwrap_or(0.0),
            ),
        };

        Ok(Self {
            p_text: text,
            p_value,
            k,
            epsilon,
            mode,
            exact_epsilon,
        })
    }

    /// Builds the parameter from a working-precision value; the text is the
    /// shortest decimal that round-trips `p`.
    pub fn from_value(p: f64, mode: RationalityMode) -> Result<Self> {
        if !p.is_finite() {
            return Err(MorseError::Domain(format!("p must be finite, got {p}")));
        }
        Self::new(&format!("{p}"), mode)
    }

    /// Principal parameter of a physical well, under the declared mode.
    pub fn from_physical(params: &PhysicalParams, mode: RationalityMode) -> Result<Self> {
        let (_, p) = derive_parameters(params)?;
        Self::from_value(p, mode)
    }

    pub fn p_text(&self) -> &str {
        &self.p_text
    }

    pub fn p_value(&self) -> f64 {
        self.p_value
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mode(&self) -> RationalityMode {
        self.mode
    }

    /// `nu = 2p + 1`.
    pub fn nu(&self) -> f64 {
        2.0 * self.p_value + 1.0
    }

    /// `(r, q)` for the rational modes; `Integer` reports `(0, 1)`.
    pub fn rational_parts(&self) -> Option<(u64, u64)> {
        match self.mode {
            RationalityMode::Integer => Some((0, 1)),
            RationalityMode::Rational { r, q } => Some((r, q)),
            RationalityMode::Irrational => None,
        }
    }

    /// Fractional part of `p` as an exact rational: the declared `r/q` in the
    /// rational modes, the supplied decimal text otherwise.
    pub fn exact_epsilon(&self) -> BigRational {
        match self.rational_parts() {
            Some((r, q)) => BigRational::new(BigInt::from(r), BigInt::from(q)),
            None => self.exact_epsilon.clone(),
        }
    }
}

/// Same as [`PrincipalParameter::new`].
pub fn decompose(p_text: &str, mode: RationalityMode) -> Result<PrincipalParameter> {
    PrincipalParameter::new(p_text, mode)
}

/// Expands `"<c>pi"` shorthand; other text is returned trimmed.
fn expand_text(text: &str) -> Result<String> {
    let trimmed = text.trim();
    let lower = trimmed.to_ascii_lowercase();
    let Some(coefficient) = lower.strip_suffix("pi").or_else(|| lower.strip_suffix('π')) else {
        return Ok(trimmed.to_string());
    };
    let coefficient = coefficient.trim().trim_end_matches('*').trim();
    let coefficient = if coefficient.is_empty() {
        BigRational::one()
    } else {
        parse_decimal(coefficient)?
    };
    let value = coefficient * parse_decimal(PI_DIGITS)?;
    format_significant(&value, PI_EXPANSION_DIGITS)
}

/// Exact value of a plain decimal literal (optional sign, fraction and exponent).
pub(crate) fn parse_decimal(text: &str) -> Result<BigRational> {
    let err = || MorseError::Parse(format!("{text:?} is not a decimal number"));
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = text[pos + 1..].parse().map_err(|_| err())?;
            (&text[..pos], exp)
        }
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().map_err(|_| err())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    Ok(if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Rounds a positive rational to `digits` significant decimal digits.
fn format_significant(value: &BigRational, digits: usize) -> Result<String> {
    if !value.is_positive() {
        return Err(MorseError::Domain("pi multiple must be positive".into()));
    }
    let ten = BigRational::from_integer(BigInt::from(10u32));
    let mut exponent: i32 = 0;
    let mut scaled = value.clone();
    while scaled >= ten {
        scaled /= &ten;
        exponent += 1;
    }
    while scaled < BigRational::one() {
        scaled *= &ten;
        exponent -= 1;
    }
    // scaled in [1, 10): keep `digits` digits in total
    let shift = BigRational::from_integer(num_traits::pow(BigInt::from(10u32), digits - 1));
    let rounded = (scaled * shift).round().to_integer();
    let mut body = rounded.to_string();
    // rounding can carry into an extra digit
    if body.len() > digits {
        body.pop();
        exponent += 1;
    }
    let point = exponent + 1;
    Ok(if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), body)
    } else if point as usize >= body.len() {
        format!("{}{}", body, "0".repeat(point as usize - body.len()))
    } else {
        let (int_part, frac_part) = body.split_at(point as usize);
        format!("{int_part}.{frac_part}")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_and_p_from_exact_square() {
        let params = PhysicalParams::new(1.0, 45.125, 1.0, 1.0).unwrap();
        let (nu, p) = derive_parameters(&params).unwrap();
        assert_eq!(nu, 19.0);
        assert_eq!(p, 9.0);
    }

    #[test]
    fn nu_and_p_for_heavier_particle() {
        let params = PhysicalParams::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let (nu, p) = derive_parameters(&params).unwrap();
        assert_eq!(nu, 4.0);
        assert_eq!(p, 1.5);
    }

    #[test]
    fn depth_inverts_principal_parameter() {
        let p = 3.0 * std::f64::consts::PI;
        let depth = depth_for_principal(p).unwrap();
        let expected = (6.0 * std::f64::consts::PI + 1.0).powi(2) / 8.0;
        assert!((depth - expected).abs() <= 4.0 * f64::EPSILON * expected);
        let params = PhysicalParams::for_principal(p).unwrap();
        let (_, back) = derive_parameters(&params).unwrap();
        assert!((back - p).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_positive_and_unbound() {
        assert!(matches!(
            PhysicalParams::new(0.0, 1.0, 1.0, 1.0),
            Err(MorseError::Domain(_))
        ));
        assert!(matches!(
            PhysicalParams::new(1.0, -1.0, 1.0, 1.0),
            Err(MorseError::Domain(_))
        ));
        let shallow = PhysicalParams::new(1.0, 0.1, 1.0, 1.0).unwrap();
        assert!(matches!(
            derive_parameters(&shallow),
            Err(MorseError::NoBoundStates { .. })
        ));
    }

    #[test]
    fn decomposes_three_pi() {
        let param = decompose("3pi", RationalityMode::Irrational).unwrap();
        assert_eq!(param.k(), 9);
        assert!((param.epsilon() - (3.0 * std::f64::consts::PI - 9.0)).abs() < 1e-15);
        assert_eq!(param.p_text(), "9.424777960769379715387930149838508652592");
        assert_eq!(param.p_text().replace('.', "").len(), PI_EXPANSION_DIGITS);
    }

    #[test]
    fn decomposes_rational_and_integer() {
        let half = decompose("7.5", RationalityMode::Rational { r: 2, q: 4 }).unwrap();
        assert_eq!(half.k(), 7);
        assert_eq!(half.epsilon(), 0.5);
        assert_eq!(half.mode(), RationalityMode::Rational { r: 1, q: 2 });

        let nine = decompose("9", RationalityMode::Integer).unwrap();
        assert_eq!((nine.k(), nine.epsilon()), (9, 0.0));

        let third = decompose(
            "7.3333333333333333",
            RationalityMode::Rational { r: 1, q: 3 },
        )
        .unwrap();
        assert_eq!(third.k(), 7);
    }

    #[test]
    fn rejects_inconsistent_declarations() {
        assert!(matches!(
            decompose("7.5", RationalityMode::Rational { r: 1, q: 3 }),
            Err(MorseError::Inconsistent(_))
        ));
        assert!(matches!(
            decompose("7.5", RationalityMode::Integer),
            Err(MorseError::Inconsistent(_))
        ));
        assert!(matches!(
            decompose("7.5", RationalityMode::Rational { r: 3, q: 2 }),
            Err(MorseError::Inconsistent(_))
        ));
        assert!(matches!(
            decompose("0", RationalityMode::Irrational),
            Err(MorseError::Domain(_))
        ));
        assert!(matches!(
            decompose("-2", RationalityMode::Irrational),
            Err(MorseError::Domain(_))
        ));
        assert!(matches!(
            decompose("abc", RationalityMode::Irrational),
            Err(MorseError::Parse(_))
        ));
    }

    #[test]
    fn integer_equals_rational_zero() {
        let a = decompose("9", RationalityMode::Integer).unwrap();
        let b = decompose("9", RationalityMode::Rational { r: 0, q: 1 }).unwrap();
        assert_eq!(a.exact_epsilon(), b.exact_epsilon());
        assert_eq!(a.epsilon(), b.epsilon());
    }

    #[test]
    fn parses_decimal_forms() {
        let v = parse_decimal("1.25e1").unwrap();
        assert_eq!(v, BigRational::new(BigInt::from(25), BigInt::from(2)));
        let v = parse_decimal(".5").unwrap();
        assert_eq!(v, BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("").is_err());
    }
}
