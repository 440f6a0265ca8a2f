//! Truncated multivariate Taylor jets over complex scalars.
//!
//! A jet of order `K` in `n` variables stores the Taylor coefficients
//! `c_alpha` of a function at an implicit base point for all multi-indices
//! with `|alpha| <= K`, so that `d^alpha f = alpha! c_alpha`. Arithmetic is
//! truncated at `K`; partial derivatives lower the order by one.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{Analytic, Scalar};
use crate::spinor::{apply_matrix, SpinRep};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Monomial bookkeeping shared by every jet with the same `(nvars, order)`.
pub struct JetLayout {
    nvars: usize,
    order: usize,
    exps: Vec<Vec<u8>>,
    degree_start: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    mul: Vec<(u32, u32, u32)>,
    /// Per variable: `(source, target in the order K-1 layout, alpha_j)`.
    partials: Vec<Vec<(u32, u32, f64)>>,
}

impl fmt::Debug for JetLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JetLayout(nvars={}, order={})", self.nvars, self.order)
    }
}

fn monomials_of_degree(nvars: usize, d: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if prefix.len() + 1 == nvars {
        prefix.push(d as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=d).rev() {
        prefix.push(first as u8);
        monomials_of_degree(nvars, d - first, prefix, out);
        prefix.pop();
    }
}

impl JetLayout {
    fn build(nvars: usize, order: usize) -> Self {
        let mut exps = Vec::new();
        let mut degree_start = Vec::new();
        for d in 0..=order {
            degree_start.push(exps.len());
            monomials_of_degree(nvars, d, &mut Vec::new(), &mut exps);
        }
        degree_start.push(exps.len());
        let index: HashMap<Vec<u8>, usize> = exps
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();

        let mut mul = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            let da: usize = a.iter().map(|&v| v as usize).sum();
            for (j, b) in exps[..degree_start[order - da + 1]].iter().enumerate() {
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                mul.push((i as u32, j as u32, index[&sum] as u32));
            }
        }

        let mut partials = vec![Vec::new(); nvars];
        if order > 0 {
            for (v, list) in partials.iter_mut().enumerate() {
                for (target, beta) in exps[..degree_start[order]].iter().enumerate() {
                    let mut alpha = beta.clone();
                    alpha[v] += 1;
                    list.push((index[&alpha] as u32, target as u32, alpha[v] as f64));
                }
            }
        }
        Self {
            nvars,
            order,
            exps,
            degree_start,
            index,
            mul,
            partials,
        }
    }

    /// Shared layout for `(nvars, order)`.
    pub fn get(nvars: usize, order: usize) -> Arc<JetLayout> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<JetLayout>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(JetLayout::build(nvars, order)))
            .clone()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `C(nvars + order, order)`.
    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u8>] {
        &self.exps
    }

    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    /// Index range of the monomials of total degree `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        self.degree_start[d]..self.degree_start[d + 1]
    }
}

pub fn factorial(alpha: &[u8]) -> f64 {
    alpha
        .iter()
        .map(|&a| (1..=a as u32).map(f64::from).product::<f64>())
        .product()
}

#[derive(Clone)]
pub struct Jet {
    layout: Arc<JetLayout>,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.layout.nvars)
            .field("order", &self.layout.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.same_shape(other) && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn zero(layout: &Arc<JetLayout>) -> Self {
        Self::constant(layout, ZERO)
    }

    pub fn constant(layout: &Arc<JetLayout>, c: Complex64) -> Self {
        let mut coeffs = vec![ZERO; layout.len()];
        coeffs[0] = c;
        Self {
            layout: layout.clone(),
            coeffs,
        }
    }

    /// The coordinate function `x_var` (0-based) around `base`.
    pub fn var(layout: &Arc<JetLayout>, var: usize, base: f64) -> Self {
        assert!(var < layout.nvars, "variable {var} out of range");
        let mut jet = Self::constant(layout, Complex64::new(base, 0.0));
        if layout.order > 0 {
            let mut alpha = vec![0u8; layout.nvars];
            alpha[var] = 1;
            jet.coeffs[layout.index[&alpha]] = ONE;
        }
        jet
    }

    /// Coordinate jets `x_1..x_n` around the point `base`.
    pub fn point(base: &[f64], order: usize) -> Vec<Jet> {
        let layout = JetLayout::get(base.len(), order);
        base.iter()
            .enumerate()
            .map(|(i, &b)| Jet::var(&layout, i, b))
            .collect()
    }

    pub fn from_coeffs(layout: &Arc<JetLayout>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != layout.len() {
            return Err(Error::DimensionMismatch {
                expected: layout.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            layout: layout.clone(),
            coeffs,
        })
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Taylor coefficient `c_alpha`.
    pub fn coeff(&self, alpha: &[u8]) -> Complex64 {
        self.layout.index_of(alpha).map_or(ZERO, |i| self.coeffs[i])
    }

    /// `d^alpha f` at the base point.
    pub fn derivative(&self, alpha: &[u8]) -> Complex64 {
        self.coeff(alpha) * factorial(alpha)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn same_shape(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout)
            || (self.layout.nvars == other.layout.nvars && self.layout.order == other.layout.order)
    }

    fn assert_shape(&self, other: &Self) {
        assert!(
            self.same_shape(other),
            "jet shape mismatch: {:?} vs {:?}",
            self.layout,
            other.layout
        );
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        self.assert_shape(other);
        Self {
            layout: self.layout.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    fn map_coeffs(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|c| f(*c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.layout);
        out.add_product(self, other, ONE);
        out
    }

    /// `self += c * a * b`.
    fn add_product(&mut self, a: &Self, b: &Self, c: Complex64) {
        self.assert_shape(a);
        self.assert_shape(b);
        for &(i, j, k) in &self.layout.mul {
            let x = a.coeffs[i as usize];
            if x != ZERO {
                self.coeffs[k as usize] += c * x * b.coeffs[j as usize];
            }
        }
    }

    pub fn scale_complex(&self, c: Complex64) -> Self {
        self.map_coeffs(|a| a * c)
    }

    /// `sum_m taylor[m] (self - c_0)^m`, i.e. `g(self)` for an analytic `g`
    /// whose Taylor coefficients at `c_0` are `taylor`.
    pub fn compose(&self, taylor: &[Complex64]) -> Self {
        let mut h = self.clone();
        h.coeffs[0] = ZERO;
        let k = self.order().min(taylor.len() - 1);
        let mut out = Self::constant(&self.layout, taylor[k]);
        for m in (0..k).rev() {
            out = out.mul(&h);
            out.coeffs[0] += taylor[m];
        }
        out
    }

    fn check_nonzero(&self) -> Result<()> {
        if self.value() == ZERO || !self.value().is_finite() {
            Err(Error::ZeroConstantTerm)
        } else {
            Ok(())
        }
    }

    pub fn try_recip(&self) -> Result<Self> {
        self.check_nonzero()?;
        let inv = self.value().inv();
        let mut taylor = Vec::with_capacity(self.order() + 1);
        let mut t = inv;
        for _ in 0..=self.order() {
            taylor.push(t);
            t *= -inv;
        }
        Ok(self.compose(&taylor))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.try_recip()?))
    }

    /// Principal-branch power. Non-integer real exponents need a positive
    /// real constant term.
    pub fn try_powc(&self, p: Complex64) -> Result<Self> {
        self.check_nonzero()?;
        let c0 = self.value();
        let real_fractional = p.im == 0.0 && p.re.fract() != 0.0;
        if real_fractional && (c0.im != 0.0 || c0.re <= 0.0) {
            return Err(Error::BadParameter(format!(
                "real power {} of non-positive base {c0}",
                p.re
            )));
        }
        let inv = c0.inv();
        let mut taylor = Vec::with_capacity(self.order() + 1);
        let mut t = c0.powc(p);
        for m in 0..=self.order() {
            taylor.push(t);
            t *= (p - m as f64) / (m as f64 + 1.0) * inv;
        }
        Ok(self.compose(&taylor))
    }

    pub fn try_sqrt(&self) -> Result<Self> {
        self.try_powc(Complex64::new(0.5, 0.0))
    }

    pub fn exp_jet(&self) -> Self {
        let e = self.value().exp();
        let mut taylor = Vec::with_capacity(self.order() + 1);
        let mut t = e;
        for m in 0..=self.order() {
            taylor.push(t);
            t /= m as f64 + 1.0;
        }
        self.compose(&taylor)
    }

    /// `d f / d x_var`, a jet of order `K - 1`.
    pub fn partial(&self, var: usize) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::InsufficientOrder { have: 0, need: 1 });
        }
        let target = JetLayout::get(self.nvars(), self.order() - 1);
        let mut coeffs = vec![ZERO; target.len()];
        for &(src, dst, f) in &self.layout.partials[var] {
            coeffs[dst as usize] = self.coeffs[src as usize] * f;
        }
        Ok(Self {
            layout: target,
            coeffs,
        })
    }

    /// `sum_j d^2 f / d x_j^2`, a jet of order `K - 2`.
    pub fn trace_hessian(&self) -> Result<Self> {
        if self.order() < 2 {
            return Err(Error::InsufficientOrder {
                have: self.order(),
                need: 2,
            });
        }
        let mut acc: Option<Jet> = None;
        for j in 0..self.nvars() {
            let d2 = self.partial(j)?.partial(j)?;
            acc = Some(match acc {
                None => d2,
                Some(a) => a.add(&d2),
            });
        }
        Ok(acc.expect("at least one variable"))
    }

    /// Drops the coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        let layout = JetLayout::get(self.nvars(), order);
        let coeffs = self.coeffs[..layout.len()].to_vec();
        Self { layout, coeffs }
    }
}

impl Scalar for Jet {
    fn constant_like(&self, c: f64) -> Self {
        Jet::constant(&self.layout, Complex64::new(c, 0.0))
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn negate(&self) -> Self {
        self.map_coeffs(|a| -a)
    }
    fn scale(&self, c: f64) -> Self {
        self.map_coeffs(|a| a * c)
    }
    fn acc_mul(&mut self, a: &Self, b: &Self, c: f64) {
        self.add_product(a, b, Complex64::new(c, 0.0));
    }
    fn acc_scaled(&mut self, a: &Self, c: f64) {
        self.acc_scaled_c(a, Complex64::new(c, 0.0));
    }
}

impl Analytic for Jet {
    fn constant_c(&self, c: Complex64) -> Self {
        Jet::constant(&self.layout, c)
    }
    fn scale_c(&self, c: Complex64) -> Self {
        self.scale_complex(c)
    }
    fn constant_term(&self) -> Complex64 {
        self.value()
    }
    fn exp(&self) -> Self {
        self.exp_jet()
    }
    fn powc(&self, p: Complex64) -> Self {
        self.try_powc(p)
            .expect("powc of a jet with invalid constant term")
    }
    fn recip(&self) -> Self {
        self.try_recip()
            .expect("reciprocal of a jet with zero constant term")
    }
    fn acc_scaled_c(&mut self, a: &Self, c: Complex64) {
        self.assert_shape(a);
        for (s, x) in self.coeffs.iter_mut().zip(&a.coeffs) {
            *s += c * x;
        }
    }
}

/// Spinor-valued jet: one jet per spinor component.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorJet {
    comps: Vec<Jet>,
}

impl SpinorJet {
    pub fn new(comps: Vec<Jet>) -> Result<Self> {
        let first = comps.first().ok_or(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        })?;
        for c in &comps[1..] {
            if !c.same_shape(first) {
                return Err(Error::DimensionMismatch {
                    expected: first.order(),
                    found: c.order(),
                });
            }
        }
        Ok(Self { comps })
    }

    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Jet> {
        self.comps
    }

    pub fn order(&self) -> usize {
        self.comps[0].order()
    }

    pub fn nvars(&self) -> usize {
        self.comps[0].nvars()
    }

    pub fn value(&self) -> Vec<Complex64> {
        self.comps.iter().map(Jet::value).collect()
    }

    pub fn partial(&self, var: usize) -> Result<Self> {
        Ok(Self {
            comps: self
                .comps
                .iter()
                .map(|c| c.partial(var))
                .collect::<Result<_>>()?,
        })
    }

    /// `Df = sum_j E_j d f / d x_j`.
    pub fn dirac(&self, rep: &SpinRep) -> Result<Self> {
        if rep.dim() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: rep.dim(),
                found: self.nvars(),
            });
        }
        if rep.spinor_dim() != self.comps.len() {
            return Err(Error::DimensionMismatch {
                expected: rep.spinor_dim(),
                found: self.comps.len(),
            });
        }
        let mut out: Option<Vec<Jet>> = None;
        for j in 0..self.nvars() {
            let dj = self.partial(j)?;
            let term = apply_matrix(rep.e(j + 1), &dj.comps);
            out = Some(match out {
                None => term,
                Some(mut acc) => {
                    for (a, t) in acc.iter_mut().zip(&term) {
                        a.acc_scaled_c(t, ONE);
                    }
                    acc
                }
            });
        }
        Ok(Self {
            comps: out.expect("at least one variable"),
        })
    }

    /// `D^2 = -sum_j d^2/dx_j^2`.
    pub fn laplacian(&self) -> Result<Self> {
        Ok(Self {
            comps: self
                .comps
                .iter()
                .map(|c| c.trace_hessian().map(|h| h.negate()))
                .collect::<Result<_>>()?,
        })
    }

    fn check_order(&self, k: usize) -> Result<()> {
        if self.order() < 2 * k + 1 {
            return Err(Error::InsufficientOrder {
                have: self.order(),
                need: 2 * k + 1,
            });
        }
        Ok(())
    }

    /// `D^{2k+1} f` at the base point, computed as `D` followed by `k`
    /// applications of the Laplacian.
    pub fn dirac_power(&self, rep: &SpinRep, k: usize) -> Result<Vec<Complex64>> {
        self.check_order(k)?;
        let mut g = self.truncate(2 * k + 1).dirac(rep)?;
        for _ in 0..k {
            g = g.laplacian()?;
        }
        Ok(g.value())
    }

    /// `D^{2k+1} f` at the base point read off directly from the Taylor
    /// coefficients:
    /// `(-1)^k sum_j E_j sum_{|b|=k} k!/b! d^{2b + e_j} f(0)`.
    pub fn dirac_power_direct(&self, rep: &SpinRep, k: usize) -> Result<Vec<Complex64>> {
        self.check_order(k)?;
        let n = self.nvars();
        let k_fact: f64 = (1..=k as u32).map(f64::from).product();
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let betas = JetLayout::get(n, k);
        let mut out = vec![ZERO; self.comps.len()];
        for j in 0..n {
            let mut grad = vec![ZERO; self.comps.len()];
            for beta in &betas.exps[betas.degree_range(k)] {
                let weight = sign * k_fact / factorial(beta);
                let mut alpha: Vec<u8> = beta.iter().map(|b| 2 * b).collect();
                alpha[j] += 1;
                for (g, c) in grad.iter_mut().zip(&self.comps) {
                    *g += c.derivative(&alpha) * weight;
                }
            }
            for (o, v) in out.iter_mut().zip(apply_matrix(rep.e(j + 1), &grad)) {
                *o += v;
            }
        }
        Ok(out)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            comps: self.comps.iter().map(|c| c.truncate(order)).collect(),
        }
    }
}
