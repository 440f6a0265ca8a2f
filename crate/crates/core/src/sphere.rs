//! The sphere model: `SO_0(1, n+1)` acting on `S^n`, stereographic
//! coordinates, and the parameter match with the Clifford-matrix action.
//!
//! Coordinates on `R^{1, n+1}` are ordered `(e_{-1}, e_0, e_1, ..., e_n)`.
//! A point `xi` of `S^n` is the null line through `(1, xi)`.

use nalgebra::{DMatrix, DVector};

use crate::clifford::{MultiVec, ParaVec};
use crate::error::{Error, Result};
use crate::spinor::vector_action;
use crate::vahlen::{CliffordMat, ExtPoint};

#[derive(Clone, Debug, PartialEq)]
pub struct LorentzMat(pub DMatrix<f64>);

/// The sphere-model generator families with their parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum SphereGen {
    /// `a_s`, the boost in the `(e_{-1}, e_0)` plane.
    Boost(f64),
    /// `n_u`.
    N(ParaVec),
    /// `nbar_v = theta(n_v)`.
    NBar(ParaVec),
    /// `diag(1, -1, -1, 1, ..., 1)`.
    W,
    /// `diag(1, 1, R)` for the rotation `x -> m x m*` of `E^n`.
    Rotation(MultiVec),
}

fn form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(n + 2, n + 2);
    j[(0, 0)] = -1.0;
    j
}

impl LorentzMat {
    pub fn dim(&self) -> usize {
        self.0.nrows() - 2
    }

    pub fn boost(n: usize, s: f64) -> Self {
        let mut m = DMatrix::identity(n + 2, n + 2);
        m[(0, 0)] = s.cosh();
        m[(1, 1)] = s.cosh();
        m[(0, 1)] = s.sinh();
        m[(1, 0)] = s.sinh();
        Self(m)
    }

    fn unipotent(v: &ParaVec, sign: f64) -> Self {
        let n = v.dim();
        let h = v.norm_sqr() / 2.0;
        let mut m = DMatrix::identity(n + 2, n + 2);
        m[(0, 0)] = 1.0 + h;
        m[(0, 1)] = -sign * h;
        m[(1, 0)] = sign * h;
        m[(1, 1)] = 1.0 - h;
        for (i, &x) in v.coords().iter().enumerate() {
            m[(0, i + 2)] = x;
            m[(1, i + 2)] = sign * x;
            m[(i + 2, 0)] = x;
            m[(i + 2, 1)] = -sign * x;
        }
        Self(m)
    }

    pub fn n(u: &ParaVec) -> Self {
        Self::unipotent(u, 1.0)
    }

    pub fn nbar(v: &ParaVec) -> Self {
        Self::unipotent(v, -1.0)
    }

    pub fn w(n: usize) -> Self {
        let mut m = DMatrix::identity(n + 2, n + 2);
        m[(1, 1)] = -1.0;
        m[(2, 2)] = -1.0;
        Self(m)
    }

    pub fn rotation(r: &DMatrix<f64>) -> Self {
        let n = r.nrows();
        let mut m = DMatrix::identity(n + 2, n + 2);
        m.view_mut((2, 2), (n, n)).copy_from(r);
        Self(m)
    }

    /// `max |L^T J L - J|` and `|det L - 1|`.
    pub fn defect(&self) -> f64 {
        let j = form(self.dim());
        let preserved = (self.0.transpose() * &j * &self.0 - &j).abs().max();
        preserved.max((self.0.determinant() - 1.0).abs())
    }

    /// Action on a unit vector `xi` of `S^n`.
    pub fn act(&self, xi: &DVector<f64>) -> DVector<f64> {
        let mut lifted = DVector::zeros(xi.len() + 1);
        lifted[0] = 1.0;
        lifted.rows_mut(1, xi.len()).copy_from(xi);
        let image = &self.0 * lifted;
        image.rows(1, xi.len()) / image[0]
    }
}

pub fn sphere_model(n: usize, kind: &SphereGen) -> Result<LorentzMat> {
    crate::clifford::check_dim(n)?;
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
    match kind {
        SphereGen::Boost(s) => Ok(LorentzMat::boost(n, *s)),
        SphereGen::N(u) => check(u.dim()).map(|_| LorentzMat::n(u)),
        SphereGen::NBar(v) => check(v.dim()).map(|_| LorentzMat::nbar(v)),
        SphereGen::W => Ok(LorentzMat::w(n)),
        SphereGen::Rotation(m) => {
            check(m.dim())?;
            Ok(LorentzMat::rotation(&vector_action(m)?))
        }
    }
}

/// The Clifford matrix covering a sphere-model generator (one of the two
/// preimages).
pub fn calibrated(n: usize, kind: &SphereGen) -> Result<CliffordMat> {
    match kind {
        // a_s covers diag(t, 1/t) with e^s = t^2
        SphereGen::Boost(s) => CliffordMat::dilation(n, (s / 2.0).exp()),
        SphereGen::N(u) => Ok(CliffordMat::translation(u)),
        SphereGen::NBar(v) => Ok(CliffordMat::lower_translation(&v.conj())),
        SphereGen::W => Ok(CliffordMat::weyl(n)),
        SphereGen::Rotation(m) => CliffordMat::rotation(m),
    }
}

/// `c(v) = ((|v|^2 - 1)/(|v|^2 + 1), 2v/(|v|^2 + 1))`, `c(∞) = e_0`.
pub fn stereographic(p: &ExtPoint, n: usize) -> DVector<f64> {
    let mut out = DVector::zeros(n + 1);
    match p {
        ExtPoint::Infinity => out[0] = 1.0,
        ExtPoint::Finite(v) => {
            let r2 = v.norm_sqr();
            out[0] = (r2 - 1.0) / (r2 + 1.0);
            for (i, x) in v.coords().iter().enumerate() {
                out[i + 1] = 2.0 * x / (r2 + 1.0);
            }
        }
    }
    out
}

/// Inverse of [`stereographic`].
pub fn stereographic_inverse(xi: &DVector<f64>) -> ExtPoint {
    let denom = 1.0 - xi[0];
    if denom.abs() < 1e-15 {
        return ExtPoint::Infinity;
    }
    let coords: Vec<f64> = xi.iter().skip(1).map(|x| x / denom).collect();
    ExtPoint::Finite(ParaVec::from_coords(coords).expect("n >= 1"))
}

/// `|c(g v) - L c(v)|` for the generator and its calibrated Clifford matrix.
pub fn compare_models(n: usize, kind: &SphereGen, v: &ExtPoint) -> Result<f64> {
    let l = sphere_model(n, kind)?;
    let g = calibrated(n, kind)?;
    let via_clifford = stereographic(&g.apply(v), n);
    let via_lorentz = l.act(&stereographic(v, n));
    Ok((via_clifford - via_lorentz).amax())
}
