//! The spinor principal series in the noncompact picture:
//!
//! `pi_l(g) f(x) = |u|^{-2l-n-1} tau(u-bar) f((-c* + a* x) u^{-1})`,
//! `u = d* - b* x`, and its twist `pi'_l` built from `tau'`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{MultiVec, ParaVec};
use crate::error::{Error, Result};
use crate::field::{MatrixApplied, SpinorField};
use crate::jet::Jet;
use crate::scalar::Analytic;
use crate::special::gamma_real;
use crate::spinor::{SpinOp, SpinRep};
use crate::vahlen::{gamma_inverse_generic, norm_sqr_generic, CliffordMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Induced from `tau`.
    Plain,
    /// Induced from `tau'`.
    Primed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReprParam {
    pub lambda: Complex64,
    pub variant: Variant,
}

impl ReprParam {
    pub fn plain(lambda: f64) -> Self {
        Self {
            lambda: Complex64::new(lambda, 0.0),
            variant: Variant::Plain,
        }
    }

    pub fn primed(lambda: f64) -> Self {
        Self {
            lambda: Complex64::new(lambda, 0.0),
            variant: Variant::Primed,
        }
    }

    pub fn with_lambda(self, lambda: Complex64) -> Self {
        Self { lambda, ..self }
    }
}

/// Half-sum of the positive roots in the `lambda` normalization used here.
pub fn rho(n: usize) -> usize {
    n
}

/// Ingredients of `pi_l(g)` at one point.
pub struct Cocycle<S> {
    /// `u-bar`.
    pub u_bar: MultiVec<S>,
    /// `|u|^2`.
    pub u_norm_sqr: S,
    /// `(-c* + a* x) u^{-1}`.
    pub moving: ParaVec<S>,
}

pub fn cocycle<S: Analytic>(g: &CliffordMat, x: &ParaVec<S>) -> Result<Cocycle<S>> {
    let n = g.dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.dim(),
        });
    }
    let template = &x.coords()[0];
    let lift = |m: &MultiVec| m.reversion().lift(template);
    let xm = x.to_multivec();
    let u = lift(&g.d).checked_sub(&lift(&g.b).geom_product(&xm)?)?;
    let u_norm_sqr = norm_sqr_generic(&u);
    if u_norm_sqr.constant_term().norm() <= 1e-300 {
        return Err(Error::SingularPoint);
    }
    let top = lift(&g.a).geom_product(&xm)?.checked_sub(&lift(&g.c))?;
    let moving = top
        .geom_product(&gamma_inverse_generic(&u)?)?
        .to_paravec_parts()
        .0;
    Ok(Cocycle {
        u_bar: u.conjugation(),
        u_norm_sqr,
        moving,
    })
}

/// Applies the multiplier `|u|^{-2l-n-1} tau(u-bar)` (or `tau'`) to values
/// already taken at the moving point.
fn apply_multiplier<S: Analytic>(
    rep: &SpinRep,
    param: ReprParam,
    co: &Cocycle<S>,
    values: &[S],
) -> Vec<S> {
    let n = rep.dim() as f64;
    let exponent = -(param.lambda * 2.0 + n + 1.0) / 2.0;
    let scale = co.u_norm_sqr.powc(exponent);
    rep.apply_tau(&co.u_bar, param.variant == Variant::Primed, values)
        .into_iter()
        .map(|v| v.times(&scale))
        .collect()
}

/// `pi(g) f` as a field in its own right, so that representations can be
/// composed and differentiated.
pub struct Transported<'a, F: SpinorField> {
    pub g: CliffordMat,
    pub param: ReprParam,
    pub rep: Arc<SpinRep>,
    pub field: &'a F,
}

impl<'a, F: SpinorField> Transported<'a, F> {
    pub fn new(g: &CliffordMat, param: ReprParam, field: &'a F) -> Result<Self> {
        let rep = SpinRep::shared(g.dim())?;
        if field.dim() != g.dim() || field.spinor_dim() != rep.spinor_dim() {
            return Err(Error::DimensionMismatch {
                expected: g.dim(),
                found: field.dim(),
            });
        }
        Ok(Self {
            g: g.clone(),
            param,
            rep,
            field,
        })
    }
}

impl<F: SpinorField> SpinorField for Transported<'_, F> {
    fn dim(&self) -> usize {
        self.g.dim()
    }

    fn spinor_dim(&self) -> usize {
        self.rep.spinor_dim()
    }

    fn eval_generic<S: Analytic>(&self, x: &[S]) -> Result<Vec<S>> {
        let xp = ParaVec::from_coords(x.to_vec())?;
        let co = cocycle(&self.g, &xp)?;
        let values = self.field.eval_generic(co.moving.coords())?;
        Ok(apply_multiplier(&self.rep, self.param, &co, &values))
    }
}

/// `pi(g) h (x)` where `h` is only known through its values at single
/// points.
pub fn pi_value(
    g: &CliffordMat,
    param: ReprParam,
    x: &ParaVec,
    values_at: impl FnOnce(&ParaVec) -> Result<Vec<Complex64>>,
) -> Result<Vec<Complex64>> {
    let rep = SpinRep::shared(g.dim())?;
    let co = cocycle(g, &x.lift(&Complex64::new(0.0, 0.0)))?;
    let moving = ParaVec::from_coords(co.moving.coords().iter().map(|c| c.re).collect())?;
    let values = values_at(&moving)?;
    Ok(apply_multiplier(&rep, param, &co, &values))
}

/// The moving point `(-c* + a* x)(d* - b* x)^{-1}`.
pub fn moving_point(g: &CliffordMat, x: &ParaVec) -> Result<ParaVec> {
    let co = cocycle(g, &x.lift(&Complex64::new(0.0, 0.0)))?;
    ParaVec::from_coords(co.moving.coords().iter().map(|c| c.re).collect())
}

/// The Clifford matrix `(a*, -c*; -b*, d*)` whose action is the moving
/// point map `x -> (-c* + a* x)(d* - b* x)^{-1}`.
pub fn moving_matrix(g: &CliffordMat) -> Result<CliffordMat> {
    CliffordMat::new(
        g.a.reversion(),
        -&g.c.reversion(),
        -&g.b.reversion(),
        g.d.reversion(),
    )
}

/// The point whose moving point under `g` is `y`.
pub fn point_moving_to(g: &CliffordMat, y: &ParaVec) -> Result<ParaVec> {
    moving_matrix(g)?.inverse().apply_finite(y)
}

/// The point where `d* - b* x` vanishes, if any; `pi(g) f` is not defined
/// there.
pub fn singular_point(g: &CliffordMat) -> Option<ParaVec> {
    if g.b.norm() <= 1e-14 * g.max_entry_norm() {
        return None;
    }
    let b_inv = g.b.reversion().clifford_inverse().ok()?;
    Some((&b_inv * &g.d.reversion()).to_paravec_parts().0)
}

/// `d_s(x) = |x|^{s-1} sum_j x_j E_j`.
pub fn ds_kernel(rep: &SpinRep, s: Complex64, x: &ParaVec) -> Result<SpinOp> {
    if x.dim() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: x.dim(),
        });
    }
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::ZeroVector);
    }
    let size = rep.spinor_dim();
    let mut m = DMatrix::zeros(size, size);
    for (j, &xj) in x.coords().iter().enumerate() {
        m += rep.e(j + 1) * Complex64::new(xj, 0.0);
    }
    Ok(m * Complex64::new(r, 0.0).powc(s - 1.0))
}

/// `c_k = 2 pi^{n/2} / Gamma(n/2) / (2^k k! n (n+2) ... (n+2k-2))`.
pub fn c_const(n: usize, k: usize) -> f64 {
    let sphere = 2.0 * PI.powf(n as f64 / 2.0) / gamma_real(n as f64 / 2.0);
    let mut denom = 1.0;
    for i in 0..k {
        denom *= 2.0 * (i as f64 + 1.0) * (n + 2 * i) as f64;
    }
    sphere / denom
}

/// `Vol(S^{n-1})`.
pub fn sphere_volume(n: usize) -> f64 {
    c_const(n, 0)
}

fn max_entry(m: &SpinOp) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `D |x|^{s+1}` from first-order jets, next to `(s+1) d_s(x)`.
pub fn fundamental_sides(rep: &SpinRep, s: Complex64, x: &ParaVec) -> Result<(SpinOp, SpinOp)> {
    let n = rep.dim();
    let p = Jet::point(x.coords(), 1);
    let mut r2 = Jet::zero(p[0].layout());
    for xi in &p {
        r2 = r2.add(&xi.mul(xi));
    }
    let power = r2.try_powc((s + 1.0) / 2.0)?;
    let size = rep.spinor_dim();
    let mut lhs = DMatrix::zeros(size, size);
    for j in 0..n {
        let mut alpha = vec![0u8; n];
        alpha[j] = 1;
        lhs += rep.e(j + 1) * power.derivative(&alpha);
    }
    let rhs = ds_kernel(rep, s, x)? * (s + 1.0);
    Ok((lhs, rhs))
}

/// Largest entrywise difference relative to the largest entry.
pub fn fundamental_residual(rep: &SpinRep, s: Complex64, x: &ParaVec) -> Result<f64> {
    let (lhs, rhs) = fundamental_sides(rep, s, x)?;
    Ok(max_entry(&(&lhs - &rhs)) / max_entry(&rhs).max(f64::MIN_POSITIVE))
}

pub fn vec_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn vec_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Both sides of an identity at one point.
#[derive(Clone, Debug)]
pub struct Sides {
    pub lhs: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
}

impl Sides {
    pub fn abs_residual(&self) -> f64 {
        vec_diff(&self.lhs, &self.rhs)
    }

    /// Residual relative to the larger side.
    pub fn rel_residual(&self) -> f64 {
        let scale = vec_norm(&self.lhs).max(vec_norm(&self.rhs));
        if scale == 0.0 {
            0.0
        } else {
            self.abs_residual() / scale
        }
    }
}

/// `E_1 pi'_l(g) f (x)` next to `pi_l(g) E_1 f (x)`.
pub fn e1_intertwining<F: SpinorField>(
    g: &CliffordMat,
    lambda: Complex64,
    f: &F,
    x: &ParaVec,
) -> Result<Sides> {
    let rep = SpinRep::shared(g.dim())?;
    let primed = Transported::new(g, ReprParam::primed(0.0).with_lambda(lambda), f)?;
    let lhs = crate::spinor::apply_matrix(rep.e(1), &primed.eval(x.coords())?);
    let e1f = MatrixApplied {
        matrix: rep.e(1).clone(),
        field: f,
    };
    let rhs =
        Transported::new(g, ReprParam::plain(0.0).with_lambda(lambda), &e1f)?.eval(x.coords())?;
    Ok(Sides { lhs, rhs })
}

/// `pi(gh) f (x)` next to `pi(g) pi(h) f (x)`.
pub fn representation_property<F: SpinorField>(
    g: &CliffordMat,
    h: &CliffordMat,
    param: ReprParam,
    f: &F,
    x: &ParaVec,
) -> Result<Sides> {
    let gh = g.mul(h)?;
    let lhs = Transported::new(&gh, param, f)?.eval(x.coords())?;
    let inner = Transported::new(h, param, f)?;
    let rhs = Transported::new(g, param, &inner)?.eval(x.coords())?;
    Ok(Sides { lhs, rhs })
}

/// `D^{2k+1} pi'_{-k-1/2}(g) f (x)` next to `pi'_{k+1/2}(g) D^{2k+1} f (x)`,
/// both from jets of order `2k+1`.
pub fn dirac_intertwining<F: SpinorField>(
    g: &CliffordMat,
    k: usize,
    f: &F,
    x: &ParaVec,
) -> Result<Sides> {
    let rep = SpinRep::shared(g.dim())?;
    let half = k as f64 + 0.5;
    let order = 2 * k + 1;
    let source = Transported::new(g, ReprParam::primed(-half), f)?;
    let lhs = source.eval_jets(x.coords(), order)?.dirac_power(&rep, k)?;
    let rhs = pi_value(g, ReprParam::primed(half), x, |y| {
        f.eval_jets(y.coords(), order)?.dirac_power(&rep, k)
    })?;
    Ok(Sides { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::TestField;
    use crate::vahlen::random_group;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(rng: &mut ChaCha8Rng, n: usize) -> TestField {
        let size = SpinRep::shared(n).unwrap().spinor_dim();
        TestField::random(rng, n, size, 2, 0.5)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        vec_diff(a, b) <= tol * vec_norm(b).max(1.0)
    }

    #[test]
    fn identity_reproduces_jets() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let f = field(&mut rng, 3);
        let x = [0.2, -0.4, 0.1];
        let t = Transported::new(&CliffordMat::identity(3), ReprParam::plain(0.7), &f).unwrap();
        let a = t.eval_jets(&x, 3).unwrap();
        let b = f.eval_jets(&x, 3).unwrap();
        for (ca, cb) in a.components().iter().zip(b.components()) {
            for (p, q) in ca.coeffs().iter().zip(cb.coeffs()) {
                assert!((p - q).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn lower_unipotent_translates() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let f = field(&mut rng, 2);
        let u = ParaVec::new(&[0.3, -0.8]).unwrap();
        let g = CliffordMat::lower_translation(&u);
        let x = ParaVec::new(&[0.5, 0.25]).unwrap();
        for variant in [ReprParam::plain(0.4), ReprParam::primed(-1.5)] {
            let t = Transported::new(&g, variant, &f).unwrap();
            let got = t.eval(x.coords()).unwrap();
            let expected = f.eval(x.sub(&u).coords()).unwrap();
            assert!(close(&got, &expected, 1e-15));
        }
    }

    #[test]
    fn dilation_scales() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 3;
        let f = field(&mut rng, n);
        let t = 1.4;
        let lambda = Complex64::new(0.3, 0.7);
        let g = CliffordMat::dilation(n, t).unwrap();
        let x = ParaVec::new(&[0.2, 0.1, -0.3]).unwrap();
        let got = Transported::new(&g, ReprParam::plain(0.0).with_lambda(lambda), &f)
            .unwrap()
            .eval(x.coords())
            .unwrap();
        let factor = Complex64::new(t, 0.0).powc(lambda * 2.0 + n as f64);
        let expected: Vec<Complex64> = f
            .eval(x.scaled(t * t).coords())
            .unwrap()
            .iter()
            .map(|v| v * factor)
            .collect();
        assert!(close(&got, &expected, 1e-14));
    }

    #[test]
    fn weyl_at_origin_is_singular() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let f = field(&mut rng, 2);
        let t = Transported::new(&CliffordMat::weyl(2), ReprParam::plain(0.5), &f).unwrap();
        assert_eq!(t.eval(&[0.0, 0.0]).unwrap_err(), Error::SingularPoint);
    }

    #[test]
    fn kernel_examples() {
        let rep = SpinRep::new(3).unwrap();
        let e = ParaVec::basis(3, 1);
        for s in [Complex64::new(0.0, 0.0), Complex64::new(-2.5, 1.0)] {
            assert_eq!(ds_kernel(&rep, s, &e).unwrap(), rep.e(1).clone());
        }
        assert_eq!(
            ds_kernel(&rep, Complex64::new(1.0, 0.0), &ParaVec::zero(3)).unwrap_err(),
            Error::ZeroVector
        );
        assert!((c_const(2, 0) - 2.0 * PI).abs() < 1e-14);
        assert!((c_const(2, 1) - PI / 2.0).abs() < 1e-14);
        assert!((c_const(3, 0) - 4.0 * PI).abs() < 1e-13);
        assert!((c_const(3, 1) - 4.0 * PI / 6.0).abs() < 1e-13);
    }

    #[test]
    fn kernel_from_tau() {
        // |x|^{2l-n-1} tau(x) E_1 = d_{2l-n}(x)
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for n in 2..=5 {
            let rep = SpinRep::new(n).unwrap();
            for _ in 0..10 {
                let x = ParaVec::random(&mut rng, n, 2.0);
                let lambda =
                    Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
                let lhs = rep.tau_paravec(&x, false).unwrap()
                    * rep.e(1)
                    * Complex64::new(x.norm(), 0.0).powc(lambda * 2.0 - n as f64 - 1.0);
                let rhs = ds_kernel(&rep, lambda * 2.0 - n as f64, &x).unwrap();
                assert!(max_entry(&(&lhs - &rhs)) < 1e-12 * max_entry(&rhs));
            }
        }
    }

    #[test]
    fn fundamental_identity_examples() {
        let rep = SpinRep::new(2).unwrap();
        let x = ParaVec::new(&[1.0, 0.0]).unwrap();
        let (lhs, rhs) = fundamental_sides(&rep, Complex64::new(0.0, 0.0), &x).unwrap();
        assert!(max_entry(&(&lhs - rep.e(1))) < 1e-15);
        assert!(max_entry(&(&rhs - rep.e(1))) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for n in [2, 3] {
            let rep = SpinRep::new(n).unwrap();
            for _ in 0..50 {
                let x = ParaVec::random(&mut rng, n, 3.0);
                let s = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
                assert!(fundamental_residual(&rep, s, &x).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn representation_and_e1_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for n in [2, 3] {
            let f = field(&mut rng, n);
            let mut checked = 0;
            while checked < 20 {
                let g = random_group(&mut rng, n, 4);
                let h = random_group(&mut rng, n, 4);
                let x = ParaVec::random(&mut rng, n, 1.5);
                let lambda =
                    Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
                let param = ReprParam::primed(0.0).with_lambda(lambda);
                let Ok(sides) = representation_property(&g, &h, param, &f, &x) else {
                    continue;
                };
                assert!(sides.rel_residual() < 1e-9, "{}", sides.rel_residual());
                let sides = e1_intertwining(&g, lambda, &f, &x).unwrap();
                assert!(sides.rel_residual() < 1e-12);
                checked += 1;
            }
        }
    }

    #[test]
    fn dirac_intertwining_translation_and_dilation() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for n in [2, 3] {
            let f = field(&mut rng, n);
            let x = ParaVec::random(&mut rng, n, 1.0);
            for k in 0..=2 {
                let g = CliffordMat::lower_translation(&ParaVec::random(&mut rng, n, 1.0));
                let sides = dirac_intertwining(&g, k, &f, &x).unwrap();
                assert!(
                    sides.rel_residual() < 1e-13,
                    "k={k}: {}",
                    sides.rel_residual()
                );
                let g = CliffordMat::dilation(n, 1.3).unwrap();
                let sides = dirac_intertwining(&g, k, &f, &x).unwrap();
                assert!(sides.rel_residual() < 1e-10);
            }
        }
    }

    #[test]
    fn dirac_intertwining_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        for n in [2, 3] {
            let f = field(&mut rng, n);
            for k in 0..=2 {
                for _ in 0..10 {
                    let g = random_group(&mut rng, n, 6);
                    let x = ParaVec::random(&mut rng, n, 1.0);
                    let Ok(sides) = dirac_intertwining(&g, k, &f, &x) else {
                        continue;
                    };
                    assert!(
                        sides.rel_residual() < 1e-7,
                        "n={n} k={k}: {}",
                        sides.rel_residual()
                    );
                }
            }
        }
    }

    #[test]
    fn unprimed_dirac_intertwining_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        let n = 3;
        let f = field(&mut rng, n);
        let g = CliffordMat::rotation(&crate::clifford::random_unit_gamma(&mut rng, n, 3)).unwrap();
        let x = ParaVec::new(&[0.3, 0.2, -0.1]).unwrap();
        let rep = SpinRep::shared(n).unwrap();
        let lhs = Transported::new(&g, ReprParam::plain(-0.5), &f)
            .unwrap()
            .eval_jets(x.coords(), 1)
            .unwrap()
            .dirac_power(&rep, 0)
            .unwrap();
        let rhs = pi_value(&g, ReprParam::plain(0.5), &x, |y| {
            f.eval_jets(y.coords(), 1)?.dirac_power(&rep, 0)
        })
        .unwrap();
        assert!(Sides { lhs, rhs }.rel_residual() > 1e-3);
    }

    #[test]
    fn moving_point_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for n in [2, 3, 4] {
            for _ in 0..20 {
                let g = random_group(&mut rng, n, 5);
                assert!(moving_matrix(&g).unwrap().validate(1e-9).valid);
                let y = ParaVec::random(&mut rng, n, 1.0);
                let Ok(x) = point_moving_to(&g, &y) else {
                    continue;
                };
                let back = moving_point(&g, &x).unwrap();
                assert!(back.dist(&y) < 1e-9 * (1.0 + x.norm()));
            }
        }
    }
}
