//! The real Clifford algebra `Cl(E^{n-1})` on generators `e_2, ..., e_n` with
//! `e_j^2 = -1`, and the paravector model `E^n = R + E^{n-1}`.
//!
//! Basis blades are indexed by bitmask: bit `i` stands for the generator
//! `e_{i+2}`. Index `0` is the scalar blade. Blades are orthonormal for the
//! canonical inner product, so `|a|^2` is the sum of squared coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, RngExt};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported ambient dimension (multivectors of size 2^7).
pub const MAX_DIM: usize = 8;

pub fn check_dim(n: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::DimensionOutOfRange(n))
    }
}

/// Number of basis blades of `Cl(E^{n-1})`.
pub fn blade_count(n: usize) -> usize {
    1 << (n - 1)
}

pub fn grade(blade: usize) -> u32 {
    blade.count_ones()
}

/// Sign of the product of basis blades `a * b` (the result blade is `a ^ b`).
pub fn blade_sign(a: usize, b: usize) -> f64 {
    let mut swaps = 0u32;
    let mut rest = a >> 1;
    while rest != 0 {
        swaps += (rest & b).count_ones();
        rest >>= 1;
    }
    // every shared generator squares to -1
    swaps += (a & b).count_ones();
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// The bitmask of the generator `e_j`, `2 <= j <= n`.
pub fn generator_blade(j: usize) -> usize {
    debug_assert!(j >= 2);
    1 << (j - 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Involution {
    /// `a'`: `e_j -> -e_j`.
    Principal,
    /// `a*`: reverses the order of generators.
    Reversion,
    /// `a-bar`: principal composed with reversion.
    Conjugation,
}

impl Involution {
    pub fn blade_sign(self, blade: usize) -> f64 {
        let g = grade(blade);
        let principal = if g.is_multiple_of(2) { 1.0 } else { -1.0 };
        let reversion = if (g * g.saturating_sub(1) / 2).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        match self {
            Involution::Principal => principal,
            Involution::Reversion => reversion,
            Involution::Conjugation => principal * reversion,
        }
    }
}

/// Element of `Cl(E^{n-1})` as a dense coefficient table over basis blades.
#[derive(Clone, PartialEq)]
pub struct MultiVec<S = f64> {
    n: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> MultiVec<S> {
    /// Builds a multivector from a full coefficient table.
    pub fn from_coeffs(n: usize, coeffs: Vec<S>) -> Result<Self> {
        check_dim(n)?;
        if coeffs.len() != blade_count(n) {
            return Err(Error::BadParameter(format!(
                "expected {} coefficients, got {}",
                blade_count(n),
                coeffs.len()
            )));
        }
        Ok(Self { n, coeffs })
    }

    pub fn zero_like(n: usize, template: &S) -> Self {
        Self {
            n,
            coeffs: vec![template.zero_like(); blade_count(n)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: usize) -> &S {
        &self.coeffs[blade]
    }

    pub fn coeff_mut(&mut self, blade: usize) -> &mut S {
        &mut self.coeffs[blade]
    }

    pub fn scalar_part(&self) -> &S {
        &self.coeffs[0]
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            })
        }
    }

    /// Geometric product, generated by `e_j e_k = -e_k e_j` and `e_j^2 = -1`.
    pub fn geom_product(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = Self::zero_like(self.n, &self.coeffs[0]);
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out.coeffs[i ^ j].acc_mul(a, b, blade_sign(i, j));
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, S::plus))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, S::minus))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Self {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Self {
            n: self.n,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|x| x.scale(c))
    }

    /// Multiplies every coefficient by the ring element `s`.
    pub fn scale_by(&self, s: &S) -> Self {
        self.map(|x| x.times(s))
    }

    pub fn involution(&self, kind: Involution) -> Self {
        Self {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(blade, c)| c.scale(kind.blade_sign(blade)))
                .collect(),
        }
    }

    /// `a'`
    pub fn principal(&self) -> Self {
        self.involution(Involution::Principal)
    }

    /// `a*`
    pub fn reversion(&self) -> Self {
        self.involution(Involution::Reversion)
    }

    /// `a-bar`
    pub fn conjugation(&self) -> Self {
        self.involution(Involution::Conjugation)
    }

    /// Splits into the paravector part and the remaining blades.
    pub fn to_paravec_parts(&self) -> (ParaVec<S>, Self) {
        let mut coords = Vec::with_capacity(self.n);
        coords.push(self.coeffs[0].clone());
        for j in 2..=self.n {
            coords.push(self.coeffs[generator_blade(j)].clone());
        }
        let mut rest = self.clone();
        rest.coeffs[0] = rest.coeffs[0].zero_like();
        for j in 2..=self.n {
            let b = generator_blade(j);
            rest.coeffs[b] = rest.coeffs[b].zero_like();
        }
        (ParaVec { coords }, rest)
    }
}

impl MultiVec<f64> {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeffs: vec![0.0; blade_count(n)],
        }
    }

    pub fn scalar(n: usize, value: f64) -> Self {
        let mut m = Self::zero(n);
        m.coeffs[0] = value;
        m
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    /// Basis blade `e_{j_1} ... e_{j_r}` for the given generator mask.
    pub fn blade(n: usize, blade: usize) -> Self {
        let mut m = Self::zero(n);
        m.coeffs[blade] = 1.0;
        m
    }

    /// The generator `e_j`, `2 <= j <= n`.
    pub fn generator(n: usize, j: usize) -> Self {
        Self::blade(n, generator_blade(j))
    }

    /// Squared norm for the canonical inner product.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Norm of everything except the scalar part.
    pub fn non_scalar_norm(&self) -> f64 {
        self.coeffs[1..].iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Norm of the part outside `E^n`.
    pub fn non_paravector_norm(&self) -> f64 {
        self.to_paravec_parts().1.norm()
    }

    pub fn lift<T: Scalar>(&self, template: &T) -> MultiVec<T> {
        MultiVec {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| template.constant_like(c))
                .collect(),
        }
    }

    /// Inverse `a-bar / |a|^2` of a Clifford-group element. Fails when
    /// `a a-bar` is not a positive scalar.
    pub fn clifford_inverse(&self) -> Result<Self> {
        let bar = self.conjugation();
        let prod = self * &bar;
        let n2 = prod.coeffs[0];
        if !(n2 > 0.0) || prod.non_scalar_norm() > 1e-10 * n2 {
            return Err(Error::NotInvertible);
        }
        Ok(bar.scale(1.0 / n2))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl<S: Scalar> Mul for &MultiVec<S> {
    type Output = MultiVec<S>;

    /// Panics on a dimension mismatch; use [`MultiVec::geom_product`] for a
    /// checked product.
    fn mul(self, rhs: Self) -> MultiVec<S> {
        self.geom_product(rhs)
            .expect("multivector dimension mismatch")
    }
}

impl<S: Scalar> Add for &MultiVec<S> {
    type Output = MultiVec<S>;
    fn add(self, rhs: Self) -> MultiVec<S> {
        self.checked_add(rhs)
            .expect("multivector dimension mismatch")
    }
}

impl<S: Scalar> Sub for &MultiVec<S> {
    type Output = MultiVec<S>;
    fn sub(self, rhs: Self) -> MultiVec<S> {
        self.checked_sub(rhs)
            .expect("multivector dimension mismatch")
    }
}

impl<S: Scalar> Neg for &MultiVec<S> {
    type Output = MultiVec<S>;
    fn neg(self) -> MultiVec<S> {
        self.map(S::negate)
    }
}

fn blade_name(blade: usize) -> String {
    if blade == 0 {
        return "1".into();
    }
    (0..MAX_DIM)
        .filter(|i| blade & (1 << i) != 0)
        .map(|i| format!("e{}", i + 2))
        .collect()
}

impl fmt::Debug for MultiVec<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(b, c)| format!("{c}*{}", blade_name(b)))
            .collect();
        if terms.is_empty() {
            write!(f, "0 (n={})", self.n)
        } else {
            write!(f, "{} (n={})", terms.join(" + "), self.n)
        }
    }
}

/// A vector of `E^n`, embedded as `x_1 + x_2 e_2 + ... + x_n e_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParaVec<S = f64> {
    coords: Vec<S>,
}

impl<S: Scalar> ParaVec<S> {
    pub fn from_coords(coords: Vec<S>) -> Result<Self> {
        check_dim(coords.len())?;
        Ok(Self { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn to_multivec(&self) -> MultiVec<S> {
        let n = self.dim();
        let mut m = MultiVec::zero_like(n, &self.coords[0]);
        m.coeffs[0] = self.coords[0].clone();
        for j in 2..=n {
            m.coeffs[generator_blade(j)] = self.coords[j - 1].clone();
        }
        m
    }

    /// `x-bar = (x_1, -x_2, ..., -x_n)`.
    pub fn conj(&self) -> Self {
        let mut coords = self.coords.clone();
        for c in coords.iter_mut().skip(1) {
            *c = c.negate();
        }
        Self { coords }
    }

    /// `|x|^2 = x x-bar`.
    pub fn norm_sqr_generic(&self) -> S {
        let mut acc = self.coords[0].zero_like();
        for c in &self.coords {
            acc.acc_mul(c, c, 1.0);
        }
        acc
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.minus(b))
                .collect(),
        })
    }
}

impl ParaVec<f64> {
    pub fn new(coords: &[f64]) -> Result<Self> {
        Self::from_coords(coords.to_vec())
    }

    pub fn zero(n: usize) -> Self {
        Self {
            coords: vec![0.0; n],
        }
    }

    /// The `j`-th basis vector, `1 <= j <= n` (`e_1` is the algebra unit).
    pub fn basis(n: usize, j: usize) -> Self {
        let mut x = Self::zero(n);
        x.coords[j - 1] = 1.0;
        x
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Returns `|x|` and `x^{-1} = x-bar / |x|^2`.
    pub fn norm_and_inverse(&self) -> Result<(f64, Self)> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::ZeroVector);
        }
        let inv = self.conj().scaled(1.0 / n2);
        Ok((n2.sqrt(), inv))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }

    pub fn lift<T: Scalar>(&self, template: &T) -> ParaVec<T> {
        ParaVec {
            coords: self
                .coords
                .iter()
                .map(|&c| template.constant_like(c))
                .collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> Self {
        Self {
            coords: (0..n).map(|_| rng.random_range(-radius..radius)).collect(),
        }
    }
}

/// Computes `a x (a')^{-1}` and returns it projected to `E^n` together with
/// the norm of the discarded non-paravector part.
pub fn sandwich(a: &MultiVec, x: &ParaVec) -> Result<(ParaVec, f64)> {
    if a.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: x.dim(),
        });
    }
    let a_prime_inv = a.principal().clifford_inverse()?;
    let full = &(a * &x.to_multivec()) * &a_prime_inv;
    let (p, rest) = full.to_paravec_parts();
    Ok((p, rest.norm()))
}

/// Operational membership test for the Clifford group: `a != 0`, `a a-bar` and
/// `a-bar a` are positive scalars and conjugation by `a` keeps `E^n` stable,
/// all within the relative tolerance `tol`.
pub fn in_clifford_group(a: &MultiVec, tol: f64) -> bool {
    clifford_group_defect(a).is_some_and(|d| d <= tol)
}

/// Relative defect of the Clifford-group conditions, `None` for degenerate
/// (zero or non-invertible) input.
pub fn clifford_group_defect(a: &MultiVec) -> Option<f64> {
    let n2 = a.norm_sqr();
    if !(n2 > 0.0) || !a.is_finite() {
        return None;
    }
    let bar = a.conjugation();
    let left = a * &bar;
    let right = &bar * a;
    if !(left.coeffs[0] > 0.0) || !(right.coeffs[0] > 0.0) {
        return None;
    }
    let mut defect = (left.non_scalar_norm() / n2).max(right.non_scalar_norm() / n2);
    defect = defect.max((left.coeffs[0] - n2).abs() / n2);
    let n = a.dim();
    for j in 1..=n {
        match sandwich(a, &ParaVec::basis(n, j)) {
            Ok((_, d)) => defect = defect.max(d),
            Err(_) => return None,
        }
    }
    Some(defect)
}

/// Product of `factor_count` random nonzero paravectors with coordinates
/// uniform in `[-1, 1]`; norms below 0.1 are rejected.
pub fn random_gamma<R: Rng + ?Sized>(rng: &mut R, n: usize, factor_count: usize) -> MultiVec {
    let mut acc = MultiVec::one(n);
    for _ in 0..factor_count {
        let v = loop {
            let v = ParaVec::random(rng, n, 1.0);
            if v.norm() > 0.1 {
                break v;
            }
        };
        acc = &acc * &v.to_multivec();
    }
    acc
}

/// Random unit element of the Clifford group (an element of the spin group
/// realized in `Cl(E^{n-1})`).
pub fn random_unit_gamma<R: Rng + ?Sized>(rng: &mut R, n: usize, factor_count: usize) -> MultiVec {
    let a = random_gamma(rng, n, factor_count);
    let norm = a.norm();
    a.scale(1.0 / norm)
}

/// Uniform random multivector with coefficients in `[-1, 1]`.
pub fn random_multivec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MultiVec {
    MultiVec {
        n,
        coeffs: (0..blade_count(n))
            .map(|_| rng.random_range(-1.0..1.0))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent blade multiplication: concatenate generator lists, bubble
    /// sort counting swaps, and cancel adjacent equal pairs with `e^2 = -1`.
    fn naive_blade_product(a: &[usize], b: &[usize]) -> (f64, Vec<usize>) {
        let mut word: Vec<usize> = a.iter().chain(b).copied().collect();
        let mut sign = 1.0;
        let mut changed = true;
        while changed {
            changed = false;
            let mut i = 0;
            while i + 1 < word.len() {
                if word[i] > word[i + 1] {
                    word.swap(i, i + 1);
                    sign = -sign;
                    changed = true;
                } else if word[i] == word[i + 1] {
                    word.drain(i..i + 2);
                    sign = -sign;
                    changed = true;
                    continue;
                }
                i += 1;
            }
        }
        (sign, word)
    }

    fn mask_to_list(mask: usize) -> Vec<usize> {
        (0..MAX_DIM)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| i + 2)
            .collect()
    }

    fn list_to_mask(list: &[usize]) -> usize {
        list.iter().map(|&j| generator_blade(j)).sum()
    }

    fn naive_product(a: &MultiVec, b: &MultiVec) -> MultiVec {
        let mut out = MultiVec::zero(a.dim());
        for (i, x) in a.coeffs().iter().enumerate() {
            for (j, y) in b.coeffs().iter().enumerate() {
                let (s, w) = naive_blade_product(&mask_to_list(i), &mask_to_list(j));
                *out.coeff_mut(list_to_mask(&w)) += s * x * y;
            }
        }
        out
    }

    #[test]
    fn sign_table_matches_naive_oracle() {
        for n in 2..=6 {
            for a in 0..blade_count(n) {
                for b in 0..blade_count(n) {
                    let (s, w) = naive_blade_product(&mask_to_list(a), &mask_to_list(b));
                    assert_eq!(list_to_mask(&w), a ^ b);
                    assert_eq!(s, blade_sign(a, b), "n={n} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn generator_products() {
        let n = 4;
        let e2 = MultiVec::generator(n, 2);
        let e3 = MultiVec::generator(n, 3);
        let e23 = &e2 * &e3;
        assert_eq!(e23, MultiVec::blade(n, 0b11));
        assert_eq!(&e3 * &e2, -&e23);
        assert_eq!(&e2 * &e2, MultiVec::scalar(n, -1.0));

        let one = MultiVec::one(n);
        let a = &one + &e2;
        let b = &one - &e2;
        assert_eq!(&a * &b, naive_product(&a, &b));
        assert_eq!(&a * &b, MultiVec::scalar(n, 2.0));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = MultiVec::one(3);
        let b = MultiVec::one(4);
        assert_eq!(
            a.geom_product(&b),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 4
            })
        );
        assert!(MultiVec::<f64>::from_coeffs(9, vec![0.0; 256]).is_err());
    }

    #[test]
    fn involutions_on_basis() {
        let n = 4;
        let e2 = MultiVec::generator(n, 2);
        assert_eq!(e2.principal(), -&e2);
        let e23 = MultiVec::blade(n, 0b11);
        assert_eq!(e23.reversion(), -&e23);
        let x = ParaVec::new(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let (p, rest) = x.to_multivec().conjugation().to_paravec_parts();
        assert_eq!(rest.norm(), 0.0);
        assert_eq!(p.coords(), &[1.0, -2.0, -3.0, -4.0]);
        assert_eq!(x.to_multivec().reversion(), x.to_multivec());
        assert_eq!(x.to_multivec().principal(), x.conj().to_multivec());
    }

    #[test]
    fn norm_and_inverse_examples() {
        let one = ParaVec::new(&[1.0, 0.0]).unwrap();
        assert_eq!(one.norm_and_inverse().unwrap(), (1.0, one.clone()));
        let e2 = ParaVec::new(&[0.0, 1.0]).unwrap();
        assert_eq!(
            e2.norm_and_inverse().unwrap(),
            (1.0, ParaVec::new(&[0.0, -1.0]).unwrap())
        );
        let x = ParaVec::new(&[1.0, 1.0]).unwrap();
        let (r, inv) = x.norm_and_inverse().unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(inv.coords(), &[0.5, -0.5]);
        let prod = &x.to_multivec() * &inv.to_multivec();
        assert!(prod.max_abs_diff(&MultiVec::one(2)) < 1e-15);
        assert_eq!(ParaVec::zero(3).norm_and_inverse(), Err(Error::ZeroVector));
    }

    #[test]
    fn sandwich_examples() {
        let n = 3;
        let x = ParaVec::new(&[0.3, -1.2, 0.7]).unwrap();
        let (y, d) = sandwich(&MultiVec::one(n), &x).unwrap();
        assert_eq!(y, x);
        assert_eq!(d, 0.0);

        let one = ParaVec::basis(n, 1);
        let (y, _) = sandwich(&MultiVec::generator(n, 2), &one).unwrap();
        assert_eq!(y.coords(), &[-1.0, 0.0, 0.0]);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = MultiVec::one(n)
            .scale(h)
            .checked_add(&MultiVec::generator(n, 2).scale(h))
            .unwrap();
        let (y, d) = sandwich(&a, &one).unwrap();
        assert!(d < 1e-15);
        assert!(y.dist(&ParaVec::basis(n, 2)) < 1e-15);

        assert_eq!(
            sandwich(&MultiVec::zero(n), &one),
            Err(Error::NotInvertible)
        );
    }

    #[test]
    fn clifford_group_membership() {
        let n = 4;
        assert!(in_clifford_group(&MultiVec::one(n), 1e-10));
        assert!(in_clifford_group(&MultiVec::blade(n, 0b11), 1e-10));
        let a = &MultiVec::one(n) + &MultiVec::blade(n, 0b111);
        assert!(!in_clifford_group(&a, 1e-10));
        let abar = &a * &a.conjugation();
        // (e2 e3 e4)^2 = +1, so a a-bar = 2 + 2 e2 e3 e4
        let expected = &MultiVec::scalar(n, 2.0) + &MultiVec::blade(n, 0b111).scale(2.0);
        assert!(abar.max_abs_diff(&expected) < 1e-15);
        assert!(!in_clifford_group(&MultiVec::zero(n), 1e-10));
    }

    #[test]
    fn random_gamma_is_in_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(random_gamma(&mut rng, 4, 0), MultiVec::one(4));
        for n in 2..=6 {
            for _ in 0..20 {
                let a = random_gamma(&mut rng, n, 5);
                let b = random_gamma(&mut rng, n, 3);
                assert!(in_clifford_group(&a, 1e-10), "{a:?}");
                let ab = (&a * &b).norm();
                assert!((ab - a.norm() * b.norm()).abs() <= 1e-12 * ab);
                let aa = &a * &a.conjugation();
                assert!(
                    aa.max_abs_diff(&MultiVec::scalar(n, a.norm_sqr())) <= 1e-10 * a.norm_sqr()
                );
            }
        }
    }

    #[test]
    fn ab_star_iff_a_inv_b_in_paravectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=5 {
            for trial in 0..50 {
                let a = random_gamma(&mut rng, n, 1 + trial % 4);
                // b = a * x keeps a^{-1} b a paravector; b = random keeps neither
                let b = if trial % 2 == 0 {
                    &a * &ParaVec::random(&mut rng, n, 1.0).to_multivec()
                } else {
                    random_gamma(&mut rng, n, 2 + trial % 3)
                };
                let scale = a.norm() * b.norm();
                let d1 = (&a * &b.reversion()).non_paravector_norm() / scale;
                let ainv = a.clifford_inverse().unwrap();
                let d2 = (&ainv * &b).non_paravector_norm() * a.norm() / b.norm();
                assert_eq!(
                    d1 < 1e-10,
                    d2 < 1e-10,
                    "n={n} trial={trial} d1={d1} d2={d2}"
                );
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn multivec(n: usize) -> impl Strategy<Value = MultiVec> {
            proptest::collection::vec(-2.0..2.0f64, blade_count(n))
                .prop_map(move |c| MultiVec::from_coeffs(n, c).unwrap())
        }

        fn triple() -> impl Strategy<Value = (MultiVec, MultiVec, MultiVec)> {
            (2usize..=6).prop_flat_map(|n| (multivec(n), multivec(n), multivec(n)))
        }

        proptest! {
            #[test]
            fn associativity((a, b, c) in triple()) {
                let lhs = &(&a * &b) * &c;
                let rhs = &a * &(&b * &c);
                let bound = 1e-12 * a.norm() * b.norm() * c.norm() * blade_count(a.dim()) as f64;
                prop_assert!(lhs.max_abs_diff(&rhs) <= bound);
            }

            #[test]
            fn involutions_respect_products((a, b, _c) in triple()) {
                let ab = &a * &b;
                prop_assert!(ab.principal().max_abs_diff(&(&a.principal() * &b.principal())) < 1e-12);
                prop_assert!(ab.reversion().max_abs_diff(&(&b.reversion() * &a.reversion())) < 1e-12);
                prop_assert_eq!(a.conjugation(), a.reversion().principal());
                prop_assert_eq!(a.conjugation(), a.principal().reversion());
            }
        }
    }
}
