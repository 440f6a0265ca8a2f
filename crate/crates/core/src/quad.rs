//! Convolutions `∫ |y|^e K(y/|y|) f(x - y) dy` in polar coordinates.
//!
//! The radial integral is split into three pieces:
//! `[0, eps]` uses the Taylor expansion of the angular average
//! `B(r) = ∫ K(w) f(x - r w) dw = sum_j b_j r^j` and integrates
//! `r^{e+n-1+j}` exactly, which also continues the result meromorphically
//! in `e`; `[eps, R]` uses Gauss–Legendre panels; `[R, ∞)` is either
//! bounded through the field's closed-form envelope or integrated after the
//! substitution `r = R/t`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::clifford::ParaVec;
use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::jet::{Jet, JetLayout};
use crate::principal::sphere_volume;
use crate::spinor::{apply_matrix, SpinOp, SpinRep};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let degree = NonZeroUsize::new(m.max(1)).expect("nonzero");
    GaussLegendre::new(degree).as_node_weight_pairs().to_vec()
}

/// Product quadrature on `S^{n-1}`: trapezoid for `n = 2`,
/// Gauss–Legendre in `cos(theta)` times trapezoid in `phi` for `n = 3`.
#[derive(Clone, Debug)]
pub struct AngularRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl AngularRule {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m < 4 {
            return Err(Error::BadParameter(format!(
                "angular node count {m} below 4"
            )));
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match n {
            2 => {
                for i in 0..m {
                    let t = 2.0 * PI * (i as f64 + 0.5) / m as f64;
                    nodes.push(vec![t.cos(), t.sin()]);
                    weights.push(2.0 * PI / m as f64);
                }
            }
            3 => {
                let phis = 2 * m;
                for (z, wz) in gauss_legendre(m) {
                    let rho = (1.0 - z * z).sqrt();
                    for i in 0..phis {
                        let p = 2.0 * PI * (i as f64 + 0.5) / phis as f64;
                        nodes.push(vec![z, rho * p.cos(), rho * p.sin()]);
                        weights.push(wz * 2.0 * PI / phis as f64);
                    }
                }
            }
            _ => {
                return Err(Error::BadParameter(format!(
                    "polar quadrature is implemented for n = 2, 3 only, got {n}"
                )))
            }
        }
        Ok(Self { nodes, weights })
    }
}

/// Angular part of a convolution kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// `1`: pairings with `|x|^s`.
    Scalar,
    /// `tau(w)`: the Knapp–Stein operator.
    Tau,
    /// `sum_j w_j E_j`: the kernel `d_s`.
    Dirac,
}

impl Kernel {
    fn matrix(self, rep: &SpinRep, omega: &[f64]) -> Result<SpinOp> {
        let size = rep.spinor_dim();
        Ok(match self {
            Kernel::Scalar => DMatrix::identity(size, size),
            Kernel::Tau => rep.tau_paravec(&ParaVec::new(omega)?, false)?,
            Kernel::Dirac => {
                let mut m = DMatrix::zeros(size, size);
                for (j, &w) in omega.iter().enumerate() {
                    m += rep.e(j + 1) * Complex64::new(w, 0.0);
                }
                m
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadConfig {
    /// Radius of the Taylor-treated ball.
    pub eps: f64,
    /// Outer truncation radius.
    pub r_max: f64,
    /// Gauss–Legendre nodes per radial panel.
    pub radial_nodes: usize,
    pub panel_width: f64,
    /// `m` in [`AngularRule::new`].
    pub angular_nodes: usize,
    /// Taylor order on `[0, eps]`.
    pub taylor_order: usize,
    /// Gauss–Legendre nodes on the inverted tail.
    pub tail_nodes: usize,
    /// Largest acceptable tail estimate.
    pub tail_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            eps: 0.2,
            r_max: 8.0,
            radial_nodes: 24,
            panel_width: 1.0,
            angular_nodes: 48,
            taylor_order: 16,
            tail_nodes: 48,
            tail_tol: 1e-5,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < self.r_max) {
            return Err(Error::BadParameter(format!(
                "need 0 < eps < R, got eps = {}, R = {}",
                self.eps, self.r_max
            )));
        }
        if self.radial_nodes < 4 || self.angular_nodes < 4 || self.tail_nodes < 4 {
            return Err(Error::BadParameter("node counts must be at least 4".into()));
        }
        if !(self.panel_width > 0.0) {
            return Err(Error::BadParameter("panel width must be positive".into()));
        }
        Ok(())
    }

    /// Same rule with every node count doubled.
    pub fn refined(&self) -> Self {
        Self {
            radial_nodes: 2 * self.radial_nodes,
            angular_nodes: 2 * self.angular_nodes,
            tail_nodes: 2 * self.tail_nodes,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Vec<Complex64>,
    /// Bound on (or estimate of) the error from `[R, ∞)`.
    pub tail_bound: f64,
    /// Size of the last Taylor term kept on `[0, eps]`.
    pub taylor_remainder: f64,
}

struct Prepared<'a, F: SpinorField> {
    f: &'a F,
    x: Vec<f64>,
    rule: AngularRule,
    kernels: Vec<SpinOp>,
    size: usize,
}

impl<'a, F: SpinorField> Prepared<'a, F> {
    fn new(kernel: Kernel, f: &'a F, x: &ParaVec, angular_nodes: usize) -> Result<Self> {
        let n = f.dim();
        if x.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.dim(),
            });
        }
        let rep = SpinRep::shared(n)?;
        let rule = AngularRule::new(n, angular_nodes)?;
        let kernels = rule
            .nodes
            .iter()
            .map(|w| kernel.matrix(&rep, w))
            .collect::<Result<_>>()?;
        Ok(Self {
            f,
            x: x.coords().to_vec(),
            rule,
            kernels,
            size: rep.spinor_dim(),
        })
    }

    /// `B(r) = sum_i w_i K(w_i) f(x - r w_i)`.
    fn angular(&self, r: f64) -> Result<Vec<Complex64>> {
        let mut acc = vec![ZERO; self.size];
        let mut y = vec![0.0; self.x.len()];
        for ((omega, &w), k) in self
            .rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .zip(&self.kernels)
        {
            for ((yi, xi), oi) in y.iter_mut().zip(&self.x).zip(omega) {
                *yi = xi - r * oi;
            }
            let v = self.f.eval(&y)?;
            for (a, b) in acc.iter_mut().zip(apply_matrix(k, &v)) {
                *a += b * w;
            }
        }
        Ok(acc)
    }

    /// Taylor coefficients `b_j` of `B(r)`, `j = 0..=order`.
    fn expansion(&self, order: usize) -> Result<Vec<Vec<Complex64>>> {
        let layout = JetLayout::get(1, order);
        let r = Jet::var(&layout, 0, 0.0);
        let mut acc = vec![vec![ZERO; self.size]; order + 1];
        for ((omega, &w), k) in self
            .rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .zip(&self.kernels)
        {
            let y: Vec<Jet> = self
                .x
                .iter()
                .zip(omega)
                .map(|(xi, oi)| {
                    Jet::constant(&layout, Complex64::new(*xi, 0.0))
                        .sub(&r.scale_complex(Complex64::new(*oi, 0.0)))
                })
                .collect();
            let v = apply_matrix(k, &self.f.eval_generic(&y)?);
            for (comp, jet) in v.iter().enumerate() {
                for (j, c) in jet.coeffs().iter().enumerate() {
                    acc[j][comp] += c * w;
                }
            }
        }
        Ok(acc)
    }
}

fn add_scaled(acc: &mut [Complex64], v: &[Complex64], c: Complex64) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b * c;
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Taylor coefficients of the angular average `B(r)` of `K(w) f(x - r w)`.
pub fn radial_expansion<F: SpinorField>(
    kernel: Kernel,
    f: &F,
    x: &ParaVec,
    order: usize,
    angular_nodes: usize,
) -> Result<Vec<Vec<Complex64>>> {
    Prepared::new(kernel, f, x, angular_nodes)?.expansion(order)
}

/// `∫ |y|^e K(y/|y|) f(x - y) dy`, meromorphically continued in `e` with
/// simple poles at `e = -n - j` where `b_j != 0`.
pub fn convolution<F: SpinorField>(
    kernel: Kernel,
    exponent: Complex64,
    f: &F,
    x: &ParaVec,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    cfg.validate()?;
    let n = f.dim();
    let prep = Prepared::new(kernel, f, x, cfg.angular_nodes)?;
    let a = exponent + n as f64;
    // [0, eps]
    let coeffs = prep.expansion(cfg.taylor_order)?;
    let mut value = vec![ZERO; prep.size];
    for (j, b) in coeffs.iter().enumerate() {
        let p = a + j as f64;
        if p.norm() < 1e-12 {
            return Err(Error::Pole);
        }
        add_scaled(&mut value, b, Complex64::new(cfg.eps, 0.0).powc(p) / p);
    }
    let last = coeffs.last().map_or(0.0, |b| norm(b));
    let taylor_remainder = last * cfg.eps.powf(a.re + cfg.taylor_order as f64)
        / (a.re + cfg.taylor_order as f64).abs().max(1.0);

    // [eps, R]
    let gl = gauss_legendre(cfg.radial_nodes);
    let panels = ((cfg.r_max - cfg.eps) / cfg.panel_width).ceil().max(1.0) as usize;
    let width = (cfg.r_max - cfg.eps) / panels as f64;
    for p in 0..panels {
        let lo = cfg.eps + p as f64 * width;
        for &(t, w) in &gl {
            let r = lo + 0.5 * width * (t + 1.0);
            let weight = Complex64::new(r, 0.0).powc(a - 1.0) * (0.5 * width * w);
            add_scaled(&mut value, &prep.angular(r)?, weight);
        }
    }

    // [R, ∞)
    let tail_bound = match f.radial_envelope(x.coords(), cfg.r_max) {
        Some(_) => {
            let vol = sphere_volume(n);
            let env = |r: f64| f.radial_envelope(x.coords(), r).unwrap_or(f64::INFINITY);
            inverted_tail(cfg.r_max, cfg.tail_nodes * 2, |r| {
                r.powf(a.re - 1.0) * vol * env(r)
            })
        }
        None => {
            let integrate = |nodes: usize| -> Result<Vec<Complex64>> {
                let mut acc = vec![ZERO; prep.size];
                for (t, w) in gauss_legendre(nodes) {
                    let t = 0.5 * (t + 1.0);
                    let r = cfg.r_max / t;
                    let jac = cfg.r_max / (t * t) * 0.5 * w;
                    let weight = Complex64::new(r, 0.0).powc(a - 1.0) * jac;
                    add_scaled(&mut acc, &prep.angular(r)?, weight);
                }
                Ok(acc)
            };
            let fine = integrate(cfg.tail_nodes)?;
            let coarse = integrate(cfg.tail_nodes / 2)?;
            add_scaled(&mut value, &fine, Complex64::new(1.0, 0.0));
            fine.iter()
                .zip(&coarse)
                .map(|(p, q)| (p - q).norm_sqr())
                .sum::<f64>()
                .sqrt()
        }
    };
    if !(tail_bound <= cfg.tail_tol) {
        return Err(Error::TailTooLarge {
            bound: tail_bound,
            tol: cfg.tail_tol,
        });
    }
    Ok(QuadResult {
        value,
        tail_bound,
        taylor_remainder,
    })
}

fn inverted_tail(r_max: f64, nodes: usize, g: impl Fn(f64) -> f64) -> f64 {
    gauss_legendre(nodes)
        .into_iter()
        .map(|(t, w)| {
            let t = 0.5 * (t + 1.0);
            let r = r_max / t;
            g(r) * r_max / (t * t) * 0.5 * w
        })
        .sum()
}

/// Knapp–Stein operator `J_l f(x) = ∫ |y|^{2l-n} tau(y/|y|) f(x - y) dy`
/// for `Re l > 0`.
pub fn knapp_stein<F: SpinorField>(
    lambda: Complex64,
    f: &F,
    x: &ParaVec,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(lambda.re > 0.0) {
        return Err(Error::BadParameter(format!(
            "the Knapp–Stein integral needs Re lambda > 0, got {lambda}"
        )));
    }
    convolution(Kernel::Tau, lambda * 2.0 - f.dim() as f64, f, x, cfg)
}

/// `D_s f(x) = ∫ d_s(y) f(x - y) dy` for `Re s > -n`.
pub fn ds_convolution<F: SpinorField>(
    s: Complex64,
    f: &F,
    x: &ParaVec,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(s.re > -(f.dim() as f64)) {
        return Err(Error::BadParameter(format!("D_s needs Re s > -n, got {s}")));
    }
    convolution(Kernel::Dirac, s, f, x, cfg)
}
