//! Spectral functions of the intertwiners in the compact picture, the
//! `K`-types they act on, the Dirac spectrum on the sphere, and the
//! eigenvalues of `D(D^2 - 1)...(D^2 - m^2)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::special::{is_gamma_pole, lgamma};

/// Exact rationals used for spectral values.
pub type Rational = Ratio<i128>;

/// A number in `Z/2`, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);

    pub fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub fn int(v: i64) -> Self {
        HalfInt(2 * v)
    }

    /// `n/2`.
    pub fn half_of(n: usize) -> Self {
        HalfInt(n as i64)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(self.0 as i128, 2)
    }

    /// Parses `"3"`, `"-1/2"`, `"2.5"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::BadParameter(format!("not a half-integer: {s:?}"));
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "1" => Ok(HalfInt(2 * num)),
                "2" => Ok(HalfInt(num)),
                _ => Err(bad()),
            }
        } else if let Ok(v) = s.parse::<i64>() {
            Ok(HalfInt(2 * v))
        } else {
            let v: f64 = s.parse().map_err(|_| bad())?;
            let twice = 2.0 * v;
            if twice.fract() != 0.0 || twice.abs() > 1e15 {
                return Err(bad());
            }
            Ok(HalfInt(twice as i64))
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl<T: Neg<Output = T>> Mul<T> for Sign {
    type Output = T;
    fn mul(self, v: T) -> T {
        match self {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A `K`-type: highest weight `(j, 1/2, ..., 1/2[, ±1/2])` with its label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KType {
    pub j: HalfInt,
    pub sign: Sign,
    pub weight: Vec<HalfInt>,
}

/// `K`-types up to `j <= jmax`, two for each `j` in `1/2 + N`.
///
/// For odd `n` the sign is the last weight entry; for even `n` it records
/// which half-spin source the type comes from.
pub fn ktypes(n: usize, jmax: HalfInt) -> Result<Vec<KType>> {
    if n < 2 {
        return Err(Error::DimensionOutOfRange(n));
    }
    if jmax.is_integer() || jmax < HalfInt::HALF {
        return Err(Error::BadParameter(format!(
            "jmax must lie in 1/2 + N, got {jmax}"
        )));
    }
    let rank = n.div_ceil(2);
    let mut out = Vec::new();
    let mut j = HalfInt::HALF;
    while j <= jmax {
        for sign in Sign::BOTH {
            let mut weight = vec![HalfInt::HALF; rank];
            weight[0] = j;
            if n % 2 == 1 {
                weight[rank - 1] = sign * HalfInt::HALF;
            }
            out.push(KType { j, sign, weight });
        }
        j = j + HalfInt::int(1);
    }
    Ok(out)
}

/// `Z_{j,±}(l) = ±Gamma(n/2 + j - l) / Gamma(n/2 + j + l)`; zero where only
/// the denominator has a pole.
pub fn z_eval(j: HalfInt, sign: Sign, lambda: Complex64, n: usize) -> Result<Complex64> {
    let base = Complex64::new(n as f64 / 2.0 + j.to_f64(), 0.0);
    let num = base - lambda;
    let den = base + lambda;
    if is_gamma_pole(num) {
        return Err(Error::Pole);
    }
    if is_gamma_pole(den) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(sign * (lgamma(num) - lgamma(den)).exp())
}

/// `Z_{k+1/2,±}(-1/2 - m) = ±(n/2+k+m)(n/2+k+m-1)...(n/2+k-m)`.
pub fn z_exact(k: usize, sign: Sign, m: usize, n: usize) -> Rational {
    let top = HalfInt::half_of(n) + HalfInt::int(k as i64);
    let mut acc = Rational::from_integer(1);
    for i in -(m as i64)..=(m as i64) {
        acc *= (top + HalfInt::int(i)).to_rational();
    }
    sign * acc
}

/// `±(n/2 + k)`.
pub fn dirac_spectrum(k: usize, sign: Sign, n: usize) -> HalfInt {
    sign * (HalfInt::half_of(n) + HalfInt::int(k as i64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DmForm {
    /// `(D + m)(D + m - 1)...(D - m)`.
    Factored,
    /// `D (D^2 - 1)(D^2 - 4)...(D^2 - m^2)`.
    Polynomial,
}

/// Eigenvalue of `D_m` on the `(k, ±)` eigenspace of `D`.
pub fn dm_eigenvalue(m: usize, k: usize, sign: Sign, n: usize, form: DmForm) -> Rational {
    let d = dirac_spectrum(k, sign, n).to_rational();
    let m = m as i128;
    match form {
        DmForm::Factored => (-m..=m).fold(Rational::from_integer(1), |acc, i| acc * (d + i)),
        DmForm::Polynomial => (1..=m).fold(d, |acc, i| acc * (d * d - i * i)),
    }
}

/// `Z(l) Z(-l) - 1`, or `None` when either side is not finite.
pub fn reciprocity_residual(j: HalfInt, sign: Sign, lambda: Complex64, n: usize) -> Option<f64> {
    let a = z_eval(j, sign, lambda, n).ok()?;
    let b = z_eval(j, sign, -lambda, n).ok()?;
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return None;
    }
    Some((a * b - 1.0).norm())
}
