//! Clifford (Vahlen) matrices `SL_2(Gamma_n)` and their Möbius action on the
//! compactified space `E^n ∪ {∞}`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngExt};

use crate::clifford::{self, clifford_group_defect, random_unit_gamma, MultiVec, ParaVec};
use crate::error::{Error, Result};
use crate::scalar::Analytic;

/// Default tolerance for the defining conditions, relative to entry norms.
pub const VALIDATION_TOL: f64 = 1e-8;

/// A point of `E^n ∪ {∞}`.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtPoint {
    Finite(ParaVec),
    Infinity,
}

impl ExtPoint {
    pub fn finite(&self) -> Option<&ParaVec> {
        match self {
            ExtPoint::Finite(x) => Some(x),
            ExtPoint::Infinity => None,
        }
    }

    /// Chordal distance, i.e. the Euclidean distance of the stereographic
    /// images on the unit sphere.
    pub fn chordal_dist(&self, other: &ExtPoint) -> f64 {
        match (self, other) {
            (ExtPoint::Infinity, ExtPoint::Infinity) => 0.0,
            (ExtPoint::Finite(x), ExtPoint::Infinity)
            | (ExtPoint::Infinity, ExtPoint::Finite(x)) => 2.0 / (1.0 + x.norm_sqr()).sqrt(),
            (ExtPoint::Finite(x), ExtPoint::Finite(y)) => {
                2.0 * x.dist(y) / ((1.0 + x.norm_sqr()).sqrt() * (1.0 + y.norm_sqr()).sqrt())
            }
        }
    }
}

/// Residuals of the three defining conditions of a Clifford matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Validation {
    /// Worst relative Clifford-group defect among the nonzero entries;
    /// infinite when an entry is nonzero but not invertible.
    pub membership: f64,
    /// `|ad* - bc* - 1|`, relative to `1 + |a||d| + |b||c|`.
    pub determinant: f64,
    /// Non-paravector part of `ab*`, relative to `|a||b|`.
    pub ab_star: f64,
    /// Non-paravector part of `cd*`, relative to `|c||d|`.
    pub cd_star: f64,
    pub valid: bool,
}

impl Validation {
    pub fn max_residual(&self) -> f64 {
        self.membership
            .max(self.determinant)
            .max(self.ab_star)
            .max(self.cd_star)
    }
}

/// Conformal factor, differential and rotation factor of `g` at a point.
#[derive(Clone, Debug)]
pub struct ConformalData {
    pub kappa: f64,
    pub differential: DMatrix<f64>,
    pub rotation: MultiVec,
}

#[derive(Clone, PartialEq)]
pub struct CliffordMat {
    pub a: MultiVec,
    pub b: MultiVec,
    pub c: MultiVec,
    pub d: MultiVec,
}

impl fmt::Debug for CliffordMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CliffordMat")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("c", &self.c)
            .field("d", &self.d)
            .finish()
    }
}

fn mat_mul(x: &[&MultiVec; 4], y: &[&MultiVec; 4]) -> [MultiVec; 4] {
    let [a, b, c, d] = x;
    let [p, q, r, s] = y;
    [
        &(*a * *p) + &(*b * *r),
        &(*a * *q) + &(*b * *s),
        &(*c * *p) + &(*d * *r),
        &(*c * *q) + &(*d * *s),
    ]
}

fn relative_defect(m: &MultiVec) -> f64 {
    if m.norm_sqr() == 0.0 {
        0.0
    } else {
        clifford_group_defect(m).unwrap_or(f64::INFINITY)
    }
}

impl CliffordMat {
    /// Builds a matrix after checking that all entries share one dimension.
    pub fn new(a: MultiVec, b: MultiVec, c: MultiVec, d: MultiVec) -> Result<Self> {
        let n = a.dim();
        for m in [&b, &c, &d] {
            if m.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.dim(),
                });
            }
        }
        Ok(Self { a, b, c, d })
    }

    /// Like [`CliffordMat::new`] but rejects matrices failing validation.
    pub fn new_checked(a: MultiVec, b: MultiVec, c: MultiVec, d: MultiVec) -> Result<Self> {
        let g = Self::new(a, b, c, d)?;
        let v = g.validate(VALIDATION_TOL);
        if !v.valid {
            return Err(Error::InvalidMatrix(format!("{v:?}")));
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn identity(n: usize) -> Self {
        Self {
            a: MultiVec::one(n),
            b: MultiVec::zero(n),
            c: MultiVec::zero(n),
            d: MultiVec::one(n),
        }
    }

    /// `w = (0, -1; 1, 0)`, the twisted inversion.
    pub fn weyl(n: usize) -> Self {
        Self {
            a: MultiVec::zero(n),
            b: MultiVec::scalar(n, -1.0),
            c: MultiVec::one(n),
            d: MultiVec::zero(n),
        }
    }

    /// `(1, v; 0, 1)`: the Möbius translation `x -> x + v`.
    pub fn translation(v: &ParaVec) -> Self {
        let n = v.dim();
        Self {
            a: MultiVec::one(n),
            b: v.to_multivec(),
            c: MultiVec::zero(n),
            d: MultiVec::one(n),
        }
    }

    /// `(1, 0; v, 1)`, an element of the opposite unipotent subgroup.
    pub fn lower_translation(v: &ParaVec) -> Self {
        let n = v.dim();
        Self {
            a: MultiVec::one(n),
            b: MultiVec::zero(n),
            c: v.to_multivec(),
            d: MultiVec::one(n),
        }
    }

    /// `diag(t, 1/t)`, acting by `x -> t^2 x`.
    pub fn dilation(n: usize, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::BadParameter(format!(
                "dilation needs t > 0, got {t}"
            )));
        }
        Ok(Self {
            a: MultiVec::scalar(n, t),
            b: MultiVec::zero(n),
            c: MultiVec::zero(n),
            d: MultiVec::scalar(n, 1.0 / t),
        })
    }

    /// `diag(m, (m*)^{-1}) = diag(m, m')` for a unit Clifford-group element,
    /// acting by `x -> m x m*`.
    pub fn rotation(m: &MultiVec) -> Result<Self> {
        if (m.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::BadParameter(format!(
                "rotation needs |m| = 1, got |m|^2 = {}",
                m.norm_sqr()
            )));
        }
        let defect = clifford_group_defect(m).ok_or(Error::NotInvertible)?;
        if defect > 1e-10 {
            return Err(Error::NotInCliffordGroup { defect });
        }
        Ok(Self {
            a: m.clone(),
            b: MultiVec::zero(m.dim()),
            c: MultiVec::zero(m.dim()),
            d: m.principal(),
        })
    }

    /// `diag(a, (a*)^{-1})` for any Clifford-group element.
    pub fn levi(a: &MultiVec) -> Result<Self> {
        let d = a.reversion().clifford_inverse()?;
        Ok(Self {
            a: a.clone(),
            b: MultiVec::zero(a.dim()),
            c: MultiVec::zero(a.dim()),
            d,
        })
    }

    fn entries(&self) -> [&MultiVec; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn validate(&self, tol: f64) -> Validation {
        let membership = self
            .entries()
            .iter()
            .map(|m| relative_defect(m))
            .fold(0.0, f64::max);
        let (na, nb, nc, nd) = (self.a.norm(), self.b.norm(), self.c.norm(), self.d.norm());
        let det = &(&self.a * &self.d.reversion()) - &(&self.b * &self.c.reversion());
        let det_err = (&det - &MultiVec::one(self.dim())).norm();
        let determinant = det_err / (1.0 + na * nd + nb * nc);
        let ab = (&self.a * &self.b.reversion()).non_paravector_norm();
        let cd = (&self.c * &self.d.reversion()).non_paravector_norm();
        let ab_star = if na * nb > 0.0 { ab / (na * nb) } else { ab };
        let cd_star = if nc * nd > 0.0 { cd / (nc * nd) } else { cd };
        let all_finite = self.entries().iter().all(|m| m.is_finite());
        let valid = all_finite
            && membership <= tol
            && determinant <= tol
            && ab_star <= tol
            && cd_star <= tol;
        Validation {
            membership,
            determinant,
            ab_star,
            cd_star,
            valid,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let [a, b, c, d] = mat_mul(&self.entries(), &other.entries());
        Ok(Self { a, b, c, d })
    }

    /// `(d*, -b*; -c*, a*)`.
    pub fn inverse(&self) -> Self {
        Self {
            a: self.d.reversion(),
            b: -&self.b.reversion(),
            c: -&self.c.reversion(),
            d: self.a.reversion(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(x, y)| x.max_abs_diff(y))
            .fold(0.0, f64::max)
    }

    pub fn max_entry_norm(&self) -> f64 {
        self.entries().iter().map(|m| m.norm()).fold(0.0, f64::max)
    }

    /// `cx + d`.
    pub fn denominator(&self, x: &ParaVec) -> MultiVec {
        &(&self.c * &x.to_multivec()) + &self.d
    }

    /// Möbius action `x -> (ax + b)(cx + d)^{-1}`, extended to `∞`.
    pub fn apply(&self, p: &ExtPoint) -> ExtPoint {
        match p {
            ExtPoint::Finite(x) => {
                let den = self.denominator(x);
                let scale = self.c.norm() * x.norm() + self.d.norm();
                if den.norm() <= 1e-14 * scale {
                    return ExtPoint::Infinity;
                }
                let num = &(&self.a * &x.to_multivec()) + &self.b;
                match den.clifford_inverse() {
                    Ok(inv) => ExtPoint::Finite((&num * &inv).to_paravec_parts().0),
                    Err(_) => ExtPoint::Infinity,
                }
            }
            ExtPoint::Infinity => {
                if self.c.norm() <= 1e-14 * self.a.norm() {
                    return ExtPoint::Infinity;
                }
                match self.c.clifford_inverse() {
                    Ok(inv) => ExtPoint::Finite((&self.a * &inv).to_paravec_parts().0),
                    Err(_) => ExtPoint::Infinity,
                }
            }
        }
    }

    /// Möbius action at a finite point whose image is finite.
    pub fn apply_finite(&self, x: &ParaVec) -> Result<ParaVec> {
        match self.apply(&ExtPoint::Finite(x.clone())) {
            ExtPoint::Finite(y) => Ok(y),
            ExtPoint::Infinity => Err(Error::PointAtInfinity),
        }
    }

    /// The Möbius action over an analytic scalar ring, e.g. on jets of the
    /// point.
    pub fn apply_generic<S: Analytic>(&self, x: &ParaVec<S>) -> Result<ParaVec<S>> {
        mobius_generic([&self.a, &self.b, &self.c, &self.d], x)
    }

    /// `g = nbar_{c a^{-1}} diag(a, (a*)^{-1}) n_{a^{-1} b}`.
    pub fn bruhat(&self) -> Result<(Self, Self, Self)> {
        let n = self.dim();
        if self.a.norm() <= 1e-14 * self.max_entry_norm() {
            return Err(Error::BruhatUndefined);
        }
        let a_inv = self
            .a
            .clifford_inverse()
            .map_err(|_| Error::BruhatUndefined)?;
        let lower = Self {
            a: MultiVec::one(n),
            b: MultiVec::zero(n),
            c: &self.c * &a_inv,
            d: MultiVec::one(n),
        };
        let diag = Self::levi(&self.a)?;
        let upper = Self {
            a: MultiVec::one(n),
            b: &a_inv * &self.b,
            c: MultiVec::zero(n),
            d: MultiVec::one(n),
        };
        Ok((lower, diag, upper))
    }

    pub fn conformal_data(&self, x: &ParaVec) -> Result<ConformalData> {
        let n = self.dim();
        let den = self.denominator(x);
        let n2 = den.norm_sqr();
        if n2 <= 1e-28 * (self.c.norm() * x.norm() + self.d.norm()).powi(2) {
            return Err(Error::PointAtInfinity);
        }
        let den_inv = den.clifford_inverse()?;
        let left = den.reversion().clifford_inverse()?;
        let mut differential = DMatrix::zeros(n, n);
        for j in 1..=n {
            let xi = ParaVec::basis(n, j).to_multivec();
            let image = &(&left * &xi) * &den_inv;
            for (i, v) in image.to_paravec_parts().0.coords().iter().enumerate() {
                differential[(i, j - 1)] = *v;
            }
        }
        Ok(ConformalData {
            kappa: 1.0 / n2,
            differential,
            rotation: den.principal().scale(1.0 / n2.sqrt()),
        })
    }

    /// `(a, b; c, d) -> (d', -c'; -b', a')`.
    pub fn theta(&self) -> Self {
        Self {
            a: self.d.principal(),
            b: -&self.c.principal(),
            c: -&self.b.principal(),
            d: self.a.principal(),
        }
    }

    /// Whether `g` is fixed by [`CliffordMat::theta`] within `tol`.
    pub fn in_ktilde(&self, tol: f64) -> bool {
        self.theta().max_abs_diff(self) <= tol * self.max_entry_norm().max(1.0)
    }
}

/// Sum of squared coefficients, which equals `m m-bar` on the Clifford group.
pub fn norm_sqr_generic<S: Analytic>(m: &MultiVec<S>) -> S {
    let mut acc = m.coeffs()[0].zero_like();
    for c in m.coeffs() {
        acc.acc_mul(c, c, 1.0);
    }
    acc
}

/// `m^{-1} = m-bar / |m|^2` for a Clifford-group valued element.
pub fn gamma_inverse_generic<S: Analytic>(m: &MultiVec<S>) -> Result<MultiVec<S>> {
    let n2 = norm_sqr_generic(m);
    if n2.constant_term() == Complex64::new(0.0, 0.0) {
        return Err(Error::NotInvertible);
    }
    Ok(m.conjugation().scale_by(&n2.recip()))
}

/// `(ax + b)(cx + d)^{-1}` over an analytic scalar ring.
pub fn mobius_generic<S: Analytic>(entries: [&MultiVec; 4], x: &ParaVec<S>) -> Result<ParaVec<S>> {
    let template = &x.coords()[0];
    let [a, b, c, d] = entries.map(|m| m.lift(template));
    let xm = x.to_multivec();
    let num = a.geom_product(&xm)?.checked_add(&b)?;
    let den = c.geom_product(&xm)?.checked_add(&d)?;
    if den.coeffs().iter().all(|z| z.constant_term().norm() == 0.0) {
        return Err(Error::PointAtInfinity);
    }
    let inv = gamma_inverse_generic(&den)?;
    Ok(num.geom_product(&inv)?.to_paravec_parts().0)
}

/// Generator families of `SL_2(Gamma_n)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Translation(ParaVec),
    LowerTranslation(ParaVec),
    Dilation(f64),
    Rotation(MultiVec),
    Weyl,
}

impl Generator {
    pub fn matrix(&self, n: usize) -> Result<CliffordMat> {
        let check = |d: usize| {
            if d == n {
                Ok(())
            } else {
                Err(Error::DimensionMismatch {
                    expected: n,
                    found: d,
                })
            }
        };
        clifford::check_dim(n)?;
        match self {
            Generator::Translation(v) => check(v.dim()).map(|_| CliffordMat::translation(v)),
            Generator::LowerTranslation(v) => {
                check(v.dim()).map(|_| CliffordMat::lower_translation(v))
            }
            Generator::Dilation(t) => CliffordMat::dilation(n, *t),
            Generator::Rotation(m) => {
                check(m.dim())?;
                CliffordMat::rotation(m)
            }
            Generator::Weyl => Ok(CliffordMat::weyl(n)),
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        match rng.random_range(0..5) {
            0 => Generator::Translation(ParaVec::random(rng, n, 1.0)),
            1 => Generator::LowerTranslation(ParaVec::random(rng, n, 1.0)),
            2 => Generator::Dilation(rng.random_range(0.5..2.0)),
            3 => Generator::Rotation(random_unit_gamma(rng, n, 3)),
            _ => Generator::Weyl,
        }
    }
}

/// Product of `depth` random generators.
pub fn random_group<R: Rng + ?Sized>(rng: &mut R, n: usize, depth: usize) -> CliffordMat {
    let mut g = CliffordMat::identity(n);
    for _ in 0..depth {
        let h = Generator::random(rng, n)
            .matrix(n)
            .expect("random generators are valid");
        g = g.mul(&h).expect("dimensions agree");
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pv(c: &[f64]) -> ParaVec {
        ParaVec::new(c).unwrap()
    }

    fn fin(c: &[f64]) -> ExtPoint {
        ExtPoint::Finite(pv(c))
    }

    fn random_point(rng: &mut ChaCha8Rng, n: usize) -> ParaVec {
        ParaVec::random(rng, n, 2.0)
    }

    #[test]
    fn validation_examples() {
        for n in 2..=5 {
            assert!(CliffordMat::identity(n).validate(1e-12).valid);
            assert!(CliffordMat::weyl(n).validate(1e-12).valid);
        }
        let mut e23 = MultiVec::zero(3);
        *e23.coeff_mut(0b11) = 1.0;
        let bad =
            CliffordMat::new(MultiVec::one(3), e23, MultiVec::zero(3), MultiVec::one(3)).unwrap();
        let v = bad.validate(VALIDATION_TOL);
        assert!(!v.valid);
        assert!((v.ab_star - 1.0).abs() < 1e-15);
        let scaled = CliffordMat::dilation(3, 2.0).unwrap();
        let off = CliffordMat {
            d: MultiVec::scalar(3, 1.0),
            ..scaled
        };
        assert!(!off.validate(VALIDATION_TOL).valid);
        assert!(CliffordMat::new_checked(
            MultiVec::one(3),
            MultiVec::zero(3),
            MultiVec::zero(3),
            MultiVec::scalar(3, 2.0)
        )
        .is_err());
        assert!(CliffordMat::new(
            MultiVec::one(3),
            MultiVec::zero(2),
            MultiVec::zero(3),
            MultiVec::one(3)
        )
        .is_err());
    }

    #[test]
    fn inverse_examples() {
        let w = CliffordMat::weyl(3);
        let wi = w.inverse();
        assert_eq!(wi.b, MultiVec::one(3));
        assert_eq!(wi.c, MultiVec::scalar(3, -1.0));
        assert_eq!(w.mul(&wi).unwrap(), CliffordMat::identity(3));
        assert_eq!(w.mul(&w).unwrap(), CliffordMat::identity(3).neg());
        let u = pv(&[0.5, -1.0, 2.0]);
        let v = pv(&[1.0, 0.25, -0.5]);
        let prod = CliffordMat::translation(&u)
            .mul(&CliffordMat::translation(&v))
            .unwrap();
        assert!(prod.max_abs_diff(&CliffordMat::translation(&u.add(&v))) < 1e-15);
    }

    #[test]
    fn action_examples() {
        let w = CliffordMat::weyl(3);
        let y = w.apply(&fin(&[2.0, 0.0, 0.0]));
        assert!(y.chordal_dist(&fin(&[-0.5, 0.0, 0.0])) < 1e-15);
        let x = pv(&[0.3, -1.2, 0.7]);
        let r2 = x.norm_sqr();
        let y = w.apply_finite(&x).unwrap();
        let expected = pv(&[-0.3 / r2, -1.2 / r2, 0.7 / r2]);
        assert!(y.dist(&expected) < 1e-15);
        assert_eq!(w.apply(&fin(&[0.0, 0.0, 0.0])), ExtPoint::Infinity);
        assert_eq!(w.apply(&ExtPoint::Infinity), fin(&[0.0, 0.0, 0.0]));
        assert_eq!(
            CliffordMat::identity(3).apply(&ExtPoint::Infinity),
            ExtPoint::Infinity
        );
        let t = CliffordMat::dilation(3, 1.5).unwrap();
        assert!(t.apply_finite(&x).unwrap().dist(&x.scaled(2.25)) < 1e-15);
        let v = pv(&[1.0, 2.0, -3.0]);
        assert!(
            CliffordMat::translation(&v)
                .apply_finite(&x)
                .unwrap()
                .dist(&x.add(&v))
                < 1e-15
        );
        assert!(CliffordMat::weyl(3)
            .apply_finite(&pv(&[0.0, 0.0, 0.0]))
            .is_err());
    }

    #[test]
    fn lower_translation_is_conjugated_translation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 4;
        let w = CliffordMat::weyl(n);
        for _ in 0..20 {
            let v = ParaVec::random(&mut rng, n, 1.0);
            let x = random_point(&mut rng, n);
            let lhs = CliffordMat::lower_translation(&v).apply(&ExtPoint::Finite(x.clone()));
            let conj = w
                .inverse()
                .mul(&CliffordMat::translation(&v.scaled(-1.0)))
                .unwrap()
                .mul(&w)
                .unwrap();
            let rhs = conj.apply(&ExtPoint::Finite(x));
            assert!(lhs.chordal_dist(&rhs) < 1e-12);
        }
    }

    #[test]
    fn bruhat_examples() {
        let v = pv(&[0.2, 0.4, -0.1]);
        let g = CliffordMat::lower_translation(&v);
        let (l, m, u) = g.bruhat().unwrap();
        assert_eq!(l, g);
        assert_eq!(m, CliffordMat::identity(3));
        assert_eq!(u, CliffordMat::identity(3));
        assert_eq!(
            CliffordMat::weyl(3).bruhat().unwrap_err(),
            Error::BruhatUndefined
        );
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut checked = 0;
        while checked < 50 {
            let g = random_group(&mut rng, 4, 6);
            let Ok((l, m, u)) = g.bruhat() else { continue };
            let back = l.mul(&m).unwrap().mul(&u).unwrap();
            assert!(back.max_abs_diff(&g) <= 1e-12 * g.max_entry_norm().max(1.0).powi(3));
            checked += 1;
        }
    }

    #[test]
    fn conformal_data_examples() {
        let v = pv(&[0.3, 0.1]);
        let cd = CliffordMat::translation(&v)
            .conformal_data(&pv(&[1.0, 2.0]))
            .unwrap();
        assert_eq!(cd.kappa, 1.0);
        assert_eq!(cd.differential, DMatrix::identity(2, 2));
        let x = pv(&[2.0, 0.0, 0.0]);
        let cd = CliffordMat::weyl(3).conformal_data(&x).unwrap();
        assert!((cd.kappa - 0.25).abs() < 1e-15);
        let t = 1.7;
        let cd = CliffordMat::dilation(3, t)
            .unwrap()
            .conformal_data(&x)
            .unwrap();
        assert!((cd.kappa - t * t).abs() < 1e-14);
        assert!(
            (cd.differential - DMatrix::identity(3, 3) * (t * t))
                .abs()
                .max()
                < 1e-14
        );
        assert_eq!(
            CliffordMat::weyl(3)
                .conformal_data(&pv(&[0.0, 0.0, 0.0]))
                .unwrap_err(),
            Error::PointAtInfinity
        );
    }

    fn fd_differential(g: &CliffordMat, x: &ParaVec, h: f64) -> DMatrix<f64> {
        let n = x.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 1..=n {
            let e = ParaVec::basis(n, j).scaled(h);
            let f = |s: f64| g.apply_finite(&x.add(&e.scaled(s))).unwrap();
            let col = f(-2.0)
                .sub(&f(2.0))
                .add(&f(1.0).sub(&f(-1.0)).scaled(8.0))
                .scaled(1.0 / (12.0 * h));
            for (i, v) in col.coords().iter().enumerate() {
                m[(i, j - 1)] = *v;
            }
        }
        m
    }

    #[test]
    fn differential_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..=5 {
            for _ in 0..20 {
                let g = random_group(&mut rng, n, 5);
                let x = random_point(&mut rng, n);
                let Ok(cd) = g.conformal_data(&x) else {
                    continue;
                };
                if cd.kappa > 1e3 || cd.kappa < 1e-3 {
                    continue;
                }
                let fd = fd_differential(&g, &x, 1e-4);
                let scale = cd.differential.abs().max();
                assert!((&fd - &cd.differential).abs().max() < 1e-7 * scale.max(1.0));
                let gram = cd.differential.transpose() * &cd.differential;
                let expected = DMatrix::identity(n, n) * (cd.kappa * cd.kappa);
                assert!((gram - expected).abs().max() < 1e-10 * cd.kappa * cd.kappa);
                assert!((cd.rotation.norm() - 1.0).abs() < 1e-12);
                // the rotation factor carries the orthogonal part of Dg
                let rot = crate::spinor::vector_action(&cd.rotation).unwrap() * cd.kappa;
                assert!((rot - &cd.differential).abs().max() < 1e-10 * cd.kappa);
            }
        }
    }

    #[test]
    fn theta_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let w = CliffordMat::weyl(3);
        assert_eq!(w.theta(), w);
        assert!(w.in_ktilde(1e-14));
        let t = CliffordMat::dilation(3, 3.0).unwrap();
        assert!(
            t.theta()
                .max_abs_diff(&CliffordMat::dilation(3, 1.0 / 3.0).unwrap())
                < 1e-15
        );
        assert!(!t.in_ktilde(1e-10));
        let m = random_unit_gamma(&mut rng, 3, 3);
        assert!(CliffordMat::rotation(&m).unwrap().in_ktilde(1e-12));
        for _ in 0..20 {
            let g = random_group(&mut rng, 3, 6);
            assert!(g.theta().theta().max_abs_diff(&g) == 0.0);
            let gh = g.mul(&w).unwrap();
            let lhs = gh.theta();
            let rhs = g.theta().mul(&w.theta()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12 * gh.max_entry_norm().max(1.0));
        }
    }

    #[test]
    fn weyl_conjugation_of_levi_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let w = CliffordMat::weyl(4);
        let t = 1.3;
        let conj = w
            .mul(&CliffordMat::dilation(4, t).unwrap())
            .unwrap()
            .mul(&w.inverse())
            .unwrap();
        assert!(conj.max_abs_diff(&CliffordMat::dilation(4, 1.0 / t).unwrap()) < 1e-15);
        let m = random_unit_gamma(&mut rng, 4, 3);
        let conj = w
            .mul(&CliffordMat::rotation(&m).unwrap())
            .unwrap()
            .mul(&w.inverse())
            .unwrap();
        assert!(conj.a.max_abs_diff(&m.principal()) < 1e-15);
        assert!(conj.d.max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn group_closure_and_action_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=5 {
            for _ in 0..50 {
                let g = random_group(&mut rng, n, 8);
                let h = random_group(&mut rng, n, 8);
                let gh = g.mul(&h).unwrap();
                assert!(gh.validate(1e-9).valid, "{:?}", gh.validate(1e-9));
                assert!(
                    g.mul(&g.inverse())
                        .unwrap()
                        .max_abs_diff(&CliffordMat::identity(n))
                        < 1e-9 * g.max_entry_norm().powi(2).max(1.0)
                );
                for p in [
                    ExtPoint::Finite(random_point(&mut rng, n)),
                    ExtPoint::Infinity,
                ] {
                    let lhs = gh.apply(&p);
                    let rhs = g.apply(&h.apply(&p));
                    assert!(lhs.chordal_dist(&rhs) < 1e-9);
                    assert!(g.apply(&p).chordal_dist(&g.neg().apply(&p)) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn global_and_inverse_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in 2..=5 {
            for _ in 0..50 {
                let g = random_group(&mut rng, n, 6);
                let x = random_point(&mut rng, n);
                let y = random_point(&mut rng, n);
                let (Ok(gx), Ok(gy)) = (g.apply_finite(&x), g.apply_finite(&y)) else {
                    continue;
                };
                let dx = g.denominator(&x);
                let dy = g.denominator(&y);
                let rhs = &(&dy.reversion().clifford_inverse().unwrap() * &x.sub(&y).to_multivec())
                    * &dx.clifford_inverse().unwrap();
                let lhs = gx.sub(&gy).to_multivec();
                assert!((&lhs - &rhs).norm() <= 1e-9 * lhs.norm().max(1e-3));
                let inv = &(&(-&g.c.reversion()) * &gx.to_multivec()) + &g.a.reversion();
                let one = &inv * &dx;
                assert!(
                    (&one - &MultiVec::one(n)).norm()
                        < 1e-9 * dx.norm().max(1.0) * inv.norm().max(1.0)
                );
            }
        }
    }

    #[test]
    fn generic_action_on_jets_matches_differential() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 3;
        let g = random_group(&mut rng, n, 5);
        let x = random_point(&mut rng, n);
        let jets = ParaVec::from_coords(Jet::point(x.coords(), 1)).unwrap();
        let y = g.apply_generic(&jets).unwrap();
        let plain = g.apply_finite(&x).unwrap();
        let cd = g.conformal_data(&x).unwrap();
        for i in 0..n {
            assert!((y.coords()[i].value().re - plain.coords()[i]).abs() < 1e-12);
            for j in 0..n {
                let mut alpha = vec![0u8; n];
                alpha[j] = 1;
                let d = y.coords()[i].derivative(&alpha);
                assert!((d.re - cd.differential[(i, j)]).abs() < 1e-10);
                assert!(d.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn generator_parameter_errors() {
        assert!(Generator::Dilation(0.0).matrix(3).is_err());
        assert!(Generator::Dilation(-1.0).matrix(3).is_err());
        assert!(Generator::Rotation(MultiVec::scalar(3, 2.0))
            .matrix(3)
            .is_err());
        assert!(Generator::Translation(pv(&[1.0, 2.0])).matrix(3).is_err());
        assert!(Generator::Weyl.matrix(1).is_err());
    }
}
