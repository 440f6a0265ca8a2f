//! Spinor-valued fields on `E^n` that can be evaluated over any analytic
//! scalar ring (plain complex values, jets at a point, jets along a ray).

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, RngExt};

use crate::error::{Error, Result};
use crate::jet::{Jet, SpinorJet};
use crate::scalar::Analytic;
use crate::spinor::{apply_matrix, SpinOp, SpinRep};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub trait SpinorField: Send + Sync {
    fn dim(&self) -> usize;
    fn spinor_dim(&self) -> usize;

    /// Field components at `x`, computed in the scalar ring of `x`.
    fn eval_generic<S: Analytic>(&self, x: &[S]) -> Result<Vec<S>>;

    fn eval(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.eval_generic(&z)
    }

    /// Taylor jets of the field at `x` to the given order.
    fn eval_jets(&self, x: &[f64], order: usize) -> Result<SpinorJet> {
        SpinorJet::new(self.eval_generic(&Jet::point(x, order))?)
    }

    /// Upper bound for `|f(y)|` over the sphere `|y - center| = r`, when one
    /// is known in closed form.
    fn radial_envelope(&self, _center: &[f64], _r: f64) -> Option<f64> {
        None
    }
}

/// One term `(x - x0)^alpha exp(-a |x - x0|^2) v`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestTerm {
    pub exps: Vec<u8>,
    pub width: f64,
    pub center: Vec<f64>,
    pub spinor: Vec<Complex64>,
}

/// Finite sum of polynomial-times-Gaussian terms with constant spinors.
#[derive(Clone, Debug, PartialEq)]
pub struct TestField {
    n: usize,
    spinor_dim: usize,
    terms: Vec<TestTerm>,
}

type TermKey = (Vec<u8>, u64, Vec<u64>);

fn key(t: &TestTerm) -> TermKey {
    (
        t.exps.clone(),
        t.width.to_bits(),
        t.center.iter().map(|c| c.to_bits()).collect(),
    )
}

impl TestField {
    pub fn new(n: usize, spinor_dim: usize, terms: Vec<TestTerm>) -> Result<Self> {
        for t in &terms {
            if t.exps.len() != n || t.center.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: t.exps.len().max(t.center.len()),
                });
            }
            if t.spinor.len() != spinor_dim {
                return Err(Error::DimensionMismatch {
                    expected: spinor_dim,
                    found: t.spinor.len(),
                });
            }
            if !(t.width > 0.0 && t.width.is_finite()) {
                return Err(Error::BadParameter(format!(
                    "Gaussian width {} must be positive",
                    t.width
                )));
            }
        }
        Ok(Self {
            n,
            spinor_dim,
            terms,
        })
    }

    /// `x^alpha exp(-|x|^2) v`.
    pub fn monomial_gaussian(exps: &[u8], spinor: Vec<Complex64>) -> Result<Self> {
        let n = exps.len();
        let term = TestTerm {
            exps: exps.to_vec(),
            width: 1.0,
            center: vec![0.0; n],
            spinor,
        };
        let nd = term.spinor.len();
        Self::new(n, nd, vec![term])
    }

    /// `exp(-|x|^2) v`.
    pub fn gaussian(n: usize, spinor: Vec<Complex64>) -> Result<Self> {
        Self::monomial_gaussian(&vec![0; n], spinor)
    }

    /// A few random terms of degree at most `max_degree`, widths in
    /// `[0.6, 1.5]`, centers within `center_radius` of the origin.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        n: usize,
        spinor_dim: usize,
        max_degree: usize,
        center_radius: f64,
    ) -> Self {
        let count = rng.random_range(1..=3);
        let terms = (0..count)
            .map(|_| {
                let mut exps = vec![0u8; n];
                let degree = rng.random_range(0..=max_degree);
                for _ in 0..degree {
                    exps[rng.random_range(0..n)] += 1;
                }
                TestTerm {
                    exps,
                    width: rng.random_range(0.6..1.5),
                    center: (0..n)
                        .map(|_| {
                            if center_radius > 0.0 {
                                rng.random_range(-center_radius..center_radius)
                            } else {
                                0.0
                            }
                        })
                        .collect(),
                    spinor: (0..spinor_dim)
                        .map(|_| {
                            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                        })
                        .collect(),
                }
            })
            .collect();
        Self {
            n,
            spinor_dim,
            terms,
        }
    }

    pub fn terms(&self) -> &[TestTerm] {
        &self.terms
    }

    fn from_merged(n: usize, spinor_dim: usize, terms: impl IntoIterator<Item = TestTerm>) -> Self {
        let mut merged: BTreeMap<TermKey, TestTerm> = BTreeMap::new();
        for t in terms {
            match merged.get_mut(&key(&t)) {
                Some(existing) => {
                    for (a, b) in existing.spinor.iter_mut().zip(&t.spinor) {
                        *a += b;
                    }
                }
                None => {
                    merged.insert(key(&t), t);
                }
            }
        }
        let terms = merged
            .into_values()
            .filter(|t| t.spinor.iter().any(|z| *z != ZERO))
            .collect();
        Self {
            n,
            spinor_dim,
            terms,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_merged(
            self.n,
            self.spinor_dim,
            self.terms.iter().chain(&other.terms).cloned(),
        )
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let terms = self.terms.iter().map(|t| TestTerm {
            spinor: t.spinor.iter().map(|z| z * c).collect(),
            ..t.clone()
        });
        Self::from_merged(self.n, self.spinor_dim, terms)
    }

    /// `M f` for a constant matrix `M`.
    pub fn apply_matrix(&self, m: &SpinOp) -> Self {
        let terms = self.terms.iter().map(|t| TestTerm {
            spinor: apply_matrix(m, &t.spinor),
            ..t.clone()
        });
        Self::from_merged(self.n, m.nrows(), terms)
    }

    /// Exact `d f / d x_var` (0-based).
    pub fn partial(&self, var: usize) -> Self {
        let mut out = Vec::new();
        for t in &self.terms {
            let a = t.exps[var];
            if a > 0 {
                let mut exps = t.exps.clone();
                exps[var] -= 1;
                out.push(TestTerm {
                    exps,
                    spinor: t.spinor.iter().map(|z| z * a as f64).collect(),
                    ..t.clone()
                });
            }
            // shift the monomial to (x - x0)^(alpha + e_var)
            let mut exps = t.exps.clone();
            exps[var] += 1;
            out.push(TestTerm {
                exps,
                spinor: t.spinor.iter().map(|z| z * (-2.0 * t.width)).collect(),
                ..t.clone()
            });
        }
        Self::from_merged(self.n, self.spinor_dim, out)
    }

    /// Exact `Df = sum_j E_j d f / d x_j`.
    pub fn dirac(&self, rep: &SpinRep) -> Result<Self> {
        if rep.dim() != self.n || rep.spinor_dim() != self.spinor_dim {
            return Err(Error::DimensionMismatch {
                expected: rep.dim(),
                found: self.n,
            });
        }
        let mut acc = Self::from_merged(self.n, self.spinor_dim, []);
        for j in 0..self.n {
            acc = acc.add(&self.partial(j).apply_matrix(rep.e(j + 1)));
        }
        Ok(acc)
    }

    /// Exact `sum_j d^2 f / d x_j^2`.
    pub fn flat_laplacian(&self) -> Self {
        let mut acc = Self::from_merged(self.n, self.spinor_dim, []);
        for j in 0..self.n {
            acc = acc.add(&self.partial(j).partial(j));
        }
        acc
    }
}

impl SpinorField for TestField {
    fn dim(&self) -> usize {
        self.n
    }

    fn spinor_dim(&self) -> usize {
        self.spinor_dim
    }

    fn eval_generic<S: Analytic>(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let zero = x[0].zero_like();
        let mut out = vec![zero.clone(); self.spinor_dim];
        for t in &self.terms {
            let y: Vec<S> = x
                .iter()
                .zip(&t.center)
                .map(|(xi, &c)| xi.minus(&xi.constant_like(c)))
                .collect();
            let mut r2 = zero.clone();
            for yi in &y {
                r2.acc_mul(yi, yi, 1.0);
            }
            let mut s = r2.scale(-t.width).exp();
            for (yi, &a) in y.iter().zip(&t.exps) {
                for _ in 0..a {
                    s = s.times(yi);
                }
            }
            for (o, v) in out.iter_mut().zip(&t.spinor) {
                o.acc_scaled_c(&s, *v);
            }
        }
        Ok(out)
    }

    fn radial_envelope(&self, center: &[f64], r: f64) -> Option<f64> {
        let mut bound = 0.0;
        for t in &self.terms {
            let d: f64 = center
                .iter()
                .zip(&t.center)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let far = r + d;
            let near = (r - d).max(0.0);
            let degree: i32 = t.exps.iter().map(|&a| a as i32).sum();
            let v: f64 = t.spinor.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            bound += v * far.powi(degree) * (-t.width * near * near).exp();
        }
        Some(bound)
    }
}

/// `x -> M f(x)` for a constant matrix `M`.
pub struct MatrixApplied<'a, F: SpinorField> {
    pub matrix: SpinOp,
    pub field: &'a F,
}

impl<F: SpinorField> SpinorField for MatrixApplied<'_, F> {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn spinor_dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn eval_generic<S: Analytic>(&self, x: &[S]) -> Result<Vec<S>> {
        Ok(apply_matrix(&self.matrix, &self.field.eval_generic(x)?))
    }

    fn radial_envelope(&self, center: &[f64], r: f64) -> Option<f64> {
        let norm = self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        self.field.radial_envelope(center, r).map(|b| b * norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v2() -> Vec<Complex64> {
        vec![Complex64::new(1.0, -0.5), Complex64::new(0.25, 2.0)]
    }

    #[test]
    fn gaussian_jets_at_origin() {
        let f = TestField::gaussian(2, v2()).unwrap();
        let sj = f.eval_jets(&[0.0, 0.0], 2).unwrap();
        for (c, v) in sj.components().iter().zip(v2()) {
            assert!((c.value() - v).norm() < 1e-15);
            assert_eq!(c.derivative(&[1, 0]), ZERO);
            assert_eq!(c.derivative(&[0, 1]), ZERO);
            assert!((c.derivative(&[2, 0]) + v * 2.0).norm() < 1e-15);
            assert!((c.derivative(&[0, 2]) + v * 2.0).norm() < 1e-15);
            assert_eq!(c.derivative(&[1, 1]), ZERO);
        }
        let g = TestField::monomial_gaussian(&[1, 0], v2()).unwrap();
        let sj = g.eval_jets(&[0.0, 0.0], 1).unwrap();
        for (c, v) in sj.components().iter().zip(v2()) {
            assert!((c.derivative(&[1, 0]) - v).norm() < 1e-15);
        }
    }

    #[test]
    fn jets_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 2..=3 {
            let f = TestField::random(&mut rng, n, 2, 2, 0.5);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-0.7..0.7)).collect();
            let sj = f.eval_jets(&x, 3).unwrap();
            let h = 1e-2;
            let at = |dx: &[f64]| {
                let p: Vec<f64> = x.iter().zip(dx).map(|(a, b)| a + b).collect();
                f.eval(&p).unwrap()
            };
            for i in 0..n {
                // seven-point stencil for the third derivative along x_i
                let shift = |s: f64| {
                    let mut d = vec![0.0; n];
                    d[i] = s * h;
                    at(&d)
                };
                let (m3, m2, m1, p1, p2, p3) = (
                    shift(-3.0),
                    shift(-2.0),
                    shift(-1.0),
                    shift(1.0),
                    shift(2.0),
                    shift(3.0),
                );
                let mut alpha = vec![0u8; n];
                alpha[i] = 3;
                for c in 0..2 {
                    let fd = (-p3[c] + 8.0 * p2[c] - 13.0 * p1[c] + 13.0 * m1[c] - 8.0 * m2[c]
                        + m3[c])
                        / (8.0 * h * h * h);
                    let exact = sj.components()[c].derivative(&alpha);
                    assert!(
                        (fd - exact).norm() < 1e-6 * exact.norm().max(1.0) + 1e-6,
                        "{fd} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn symbolic_derivatives_match_jets() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for n in 2..=3 {
            let rep = SpinRep::new(n).unwrap();
            let f = TestField::random(&mut rng, n, rep.spinor_dim(), 3, 0.5);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let sj = f.eval_jets(&x, 5).unwrap();
            for k in 0..=2 {
                let mut g = f.clone();
                for _ in 0..2 * k + 1 {
                    g = g.dirac(&rep).unwrap();
                }
                let symbolic = g.eval(&x).unwrap();
                let jets = sj.dirac_power(&rep, k).unwrap();
                for (a, b) in symbolic.iter().zip(&jets) {
                    assert!(
                        (a - b).norm() < 1e-10 * b.norm().max(1.0),
                        "k={k}: {a} vs {b}"
                    );
                }
            }
            let lap = f.flat_laplacian().eval(&x).unwrap();
            let minus_lap = sj.laplacian().unwrap().value();
            for (a, b) in lap.iter().zip(&minus_lap) {
                assert!((a + b).norm() < 1e-11 * b.norm().max(1.0));
            }
        }
    }

    #[test]
    fn envelope_bounds_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let f = TestField::random(&mut rng, 2, 2, 2, 0.5);
        let center = [0.3, -0.2];
        for r in [0.0, 0.5, 1.0, 3.0, 6.0] {
            let bound = f.radial_envelope(&center, r).unwrap();
            for k in 0..64 {
                let t = k as f64 * std::f64::consts::TAU / 64.0;
                let y = [center[0] + r * t.cos(), center[1] + r * t.sin()];
                let v = f.eval(&y).unwrap();
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                assert!(norm <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn validation() {
        let bad = TestTerm {
            exps: vec![0, 0],
            width: 0.0,
            center: vec![0.0, 0.0],
            spinor: v2(),
        };
        assert!(TestField::new(2, 2, vec![bad.clone()]).is_err());
        assert!(TestField::new(3, 2, vec![TestTerm { width: 1.0, ..bad }]).is_err());
        let f = TestField::gaussian(2, v2()).unwrap();
        assert!(f.eval(&[1.0]).is_err());
    }
}
