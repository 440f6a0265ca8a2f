//! Gamma matrices `E_1..E_n`, the spinor representation `tau` of
//! `Cl(E^{n-1})` through `gamma(e_j) = e_1 e_j`, its twist `tau'(a) = tau(a')`,
//! the volume element for odd `n`, and the rotation action of unit Clifford
//! group elements on `E^n`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::clifford::{self, blade_count, generator_blade, MultiVec, ParaVec};
use crate::error::{Error, Result};
use crate::scalar::Analytic;

pub type SpinOp = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn pauli() -> [SpinOp; 3] {
    [
        DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

/// Hermitian, pairwise anticommuting involutions for even `n = 2m`, built by
/// doubling: `g -> g (x) sz`, then append `1 (x) sx`, `1 (x) sy`.
fn hermitian_gammas(n: usize) -> Vec<SpinOp> {
    debug_assert!(n.is_multiple_of(2) && n >= 2);
    let [sx, sy, sz] = pauli();
    let mut gammas = vec![sz.clone(), sy.clone()];
    while gammas.len() < n {
        let size = gammas[0].nrows();
        let id = DMatrix::<Complex64>::identity(size, size);
        let mut next: Vec<SpinOp> = gammas.iter().map(|g| g.kronecker(&sz)).collect();
        next.push(id.kronecker(&sx));
        next.push(id.kronecker(&sy));
        gammas = next;
    }
    gammas
}

fn block_diag(a: &SpinOp, b: &SpinOp) -> SpinOp {
    let (p, q) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(p + q, p + q);
    out.view_mut((0, 0), (p, p)).copy_from(a);
    out.view_mut((p, p), (q, q)).copy_from(b);
    out
}

fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// Skew-Hermitian `E_1..E_n` with `E_i E_j + E_j E_i = -2 delta_ij`.
///
/// Even `n` gives the irreducible module of size `2^{n/2}`. Odd `n` gives
/// `sigma+ (+) sigma-` of size `2^{(n+1)/2}`, where `E_n` carries opposite
/// signs on the two blocks and the volume element acts as `+1 (+) -1`.
pub fn build_e(n: usize) -> Result<Vec<SpinOp>> {
    clifford::check_dim(n)?;
    if n.is_multiple_of(2) {
        return Ok(hermitian_gammas(n).into_iter().map(|g| g * I).collect());
    }
    let base: Vec<SpinOp> = hermitian_gammas(n - 1).into_iter().map(|g| g * I).collect();
    let size = base[0].nrows();
    let mut prod = DMatrix::<Complex64>::identity(size, size);
    for e in &base {
        prod *= e;
    }
    // sigma+(omega) = i^{(n+1)/2} E_1 ... E_n = 1  fixes E_n on the + block
    let last_plus = prod.adjoint() * i_pow(-((n as i64 + 1) / 2));
    let mut out: Vec<SpinOp> = base.iter().map(|e| block_diag(e, e)).collect();
    out.push(block_diag(&last_plus, &(-&last_plus)));
    Ok(out)
}

/// The spinor module for a fixed ambient dimension `n`.
#[derive(Debug, Clone)]
pub struct SpinRep {
    n: usize,
    e: Vec<SpinOp>,
    /// `tau` of every basis blade of `Cl(E^{n-1})`.
    blade_ops: Vec<SpinOp>,
}

impl SpinRep {
    pub fn new(n: usize) -> Result<Self> {
        let e = build_e(n)?;
        let size = e[0].nrows();
        let gens: Vec<SpinOp> = (2..=n).map(|j| &e[0] * &e[j - 1]).collect();
        let blade_ops = (0..blade_count(n))
            .map(|blade| {
                let mut m = DMatrix::<Complex64>::identity(size, size);
                for (bit, g) in gens.iter().enumerate() {
                    if blade & (1 << bit) != 0 {
                        m *= g;
                    }
                }
                m
            })
            .collect();
        Ok(Self { n, e, blade_ops })
    }

    /// Shared module for dimension `n`.
    pub fn shared(n: usize) -> Result<Arc<SpinRep>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SpinRep>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(rep) = guard.get(&n) {
            return Ok(rep.clone());
        }
        let rep = Arc::new(SpinRep::new(n)?);
        guard.insert(n, rep.clone());
        Ok(rep)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Size `N` of the spinor space.
    pub fn spinor_dim(&self) -> usize {
        self.e[0].nrows()
    }

    /// `E_j`, `1 <= j <= n`.
    pub fn e(&self, j: usize) -> &SpinOp {
        &self.e[j - 1]
    }

    pub fn gammas(&self) -> &[SpinOp] {
        &self.e
    }

    pub fn blade_op(&self, blade: usize) -> &SpinOp {
        &self.blade_ops[blade]
    }

    /// `tau(a)`, or `tau'(a) = tau(a')` when `primed`.
    pub fn tau(&self, a: &MultiVec, primed: bool) -> Result<SpinOp> {
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.dim(),
            });
        }
        let size = self.spinor_dim();
        let mut out = DMatrix::zeros(size, size);
        for (blade, &c) in a.coeffs().iter().enumerate() {
            if c != 0.0 {
                let sign = if primed { principal_sign(blade) } else { 1.0 };
                out += &self.blade_ops[blade] * Complex64::new(c * sign, 0.0);
            }
        }
        Ok(out)
    }

    pub fn tau_paravec(&self, x: &ParaVec, primed: bool) -> Result<SpinOp> {
        self.tau(&x.to_multivec(), primed)
    }

    /// Applies `tau(a)` (or `tau'(a)`) to a spinor whose components live in an
    /// analytic scalar ring.
    pub fn apply_tau<S: Analytic>(&self, a: &MultiVec<S>, primed: bool, v: &[S]) -> Vec<S> {
        let zero = v[0].zero_like();
        let mut out = vec![zero; v.len()];
        for (blade, c) in a.coeffs().iter().enumerate() {
            let sign = if primed { principal_sign(blade) } else { 1.0 };
            let w = apply_matrix(&self.blade_ops[blade], v);
            for (o, wi) in out.iter_mut().zip(&w) {
                o.acc_mul(c, wi, sign);
            }
        }
        out
    }

    /// `i^{[(n+1)/2]} E_1 ... E_n` for odd `n`.
    pub fn volume_element(&self) -> Result<SpinOp> {
        if self.n.is_multiple_of(2) {
            return Err(Error::BadParameter(
                "the volume element is central only for odd n".into(),
            ));
        }
        let size = self.spinor_dim();
        let mut prod = DMatrix::<Complex64>::identity(size, size);
        for e in &self.e {
            prod *= e;
        }
        Ok(prod * i_pow((self.n as i64 + 1) / 2))
    }
}

fn principal_sign(blade: usize) -> f64 {
    if blade.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Complex matrix times a vector over an analytic ring; zero entries skipped.
pub fn apply_matrix<S: Analytic>(m: &SpinOp, v: &[S]) -> Vec<S> {
    let zero = v[0].zero_like();
    (0..m.nrows())
        .map(|i| {
            let mut acc = zero.clone();
            for (l, vl) in v.iter().enumerate() {
                let c = m[(i, l)];
                if c != ZERO {
                    acc.acc_scaled_c(vl, c);
                }
            }
            acc
        })
        .collect()
}

/// Matrix of `x -> m x m*` on paravector coordinates, for a unit element `m`
/// of the Clifford group.
pub fn vector_action(m: &MultiVec) -> Result<DMatrix<f64>> {
    let n = m.dim();
    if (m.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(Error::BadParameter(format!(
            "rotation element must have unit norm, |m|^2 = {}",
            m.norm_sqr()
        )));
    }
    let defect = clifford::clifford_group_defect(m).ok_or(Error::NotInvertible)?;
    if defect > 1e-10 {
        return Err(Error::NotInCliffordGroup { defect });
    }
    let m_star = m.reversion();
    let mut out = DMatrix::zeros(n, n);
    for j in 1..=n {
        let image = &(m * &ParaVec::basis(n, j).to_multivec()) * &m_star;
        let (p, _) = image.to_paravec_parts();
        for (i, c) in p.coords().iter().enumerate() {
            out[(i, j - 1)] = *c;
        }
    }
    Ok(out)
}

/// One-parameter subgroups of the unit Clifford group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OneParam {
    /// `cos(t/2) + sin(t/2) e_j`: rotation in the `(1, e_j)` plane.
    Scalar(usize),
    /// `cos(t/2) + sin(t/2) e_j e_k`: rotation in the `(e_j, e_k)` plane.
    Bivector(usize, usize),
}

pub fn one_param(n: usize, kind: OneParam, t: f64) -> Result<MultiVec> {
    clifford::check_dim(n)?;
    let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
    let blade = match kind {
        OneParam::Scalar(j) if (2..=n).contains(&j) => generator_blade(j),
        OneParam::Bivector(j, k) if 2 <= j && j < k && k <= n => {
            generator_blade(j) | generator_blade(k)
        }
        _ => return Err(Error::BadParameter(format!("{kind:?} for n = {n}"))),
    };
    let mut m = MultiVec::scalar(n, c);
    *m.coeff_mut(blade) = s;
    Ok(m)
}

/// The expected rotation matrix of a one-parameter family: angle `t` in the
/// plane of the two paravector axes it mixes (`e_1` is the unit).
pub fn plane_rotation(n: usize, kind: OneParam, t: f64) -> DMatrix<f64> {
    let (p, q) = match kind {
        OneParam::Scalar(j) => (0, j - 1),
        OneParam::Bivector(j, k) => (j - 1, k - 1),
    };
    let mut r = DMatrix::identity(n, n);
    r[(p, p)] = t.cos();
    r[(q, q)] = t.cos();
    r[(p, q)] = -t.sin();
    r[(q, p)] = t.sin();
    r
}
