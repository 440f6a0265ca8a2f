//! Regularized pairings `<|x|^s, f>` and `<d_s, f>` and their residues.
//!
//! Pairings are read as `<T, f> = (T * f)(0)`. For the radial `|x|^s` this is
//! the ordinary integral; for `d_s` it equals `D_s f(0)`, the convention
//! under which `D_s` is convolution with `d_s`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::ParaVec;
use crate::error::{Error, Result};
use crate::field::{SpinorField, TestField};
use crate::principal::c_const;
use crate::quad::{convolution, radial_expansion, Kernel, QuadConfig, QuadResult};
use crate::spinor::SpinRep;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingKind {
    /// `<|x|^s, f>`, poles at `s = -n - 2k`.
    Scalar,
    /// `<d_s, f>`, poles at `s = -n - 1 - 2k`.
    Dirac,
    /// `<d_s, f>` rewritten as `(1/(s+1)) <|x|^{s+1}, Df>`.
    ViaParts,
}

impl PairingKind {
    /// Location of the `k`-th pole in `s`.
    pub fn pole(self, n: usize, k: usize) -> f64 {
        match self {
            PairingKind::Scalar => -((n + 2 * k) as f64),
            PairingKind::Dirac | PairingKind::ViaParts => -((n + 2 * k + 1) as f64),
        }
    }
}

/// Meromorphically continued pairing at `s`.
pub fn pairing(
    kind: PairingKind,
    s: Complex64,
    f: &TestField,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let origin = ParaVec::zero(f.dim());
    match kind {
        PairingKind::Scalar => convolution(Kernel::Scalar, s, f, &origin, cfg),
        PairingKind::Dirac => convolution(Kernel::Dirac, s, f, &origin, cfg),
        PairingKind::ViaParts => {
            let s1 = s + 1.0;
            if s1.norm() < 1e-12 {
                return Err(Error::Pole);
            }
            let df = f.dirac(&*SpinRep::shared(f.dim())?)?;
            // (d_s * f)(0) = int d_s(y) f(-y) dy and d_s = D|y|^{s+1}/(s+1);
            // moving D onto f(-y) flips the sign twice, once for the
            // transpose and once for the reflection.
            let mut r = convolution(Kernel::Scalar, s1, &df, &origin, cfg)?;
            r.value = r.value.into_iter().map(|z| z / s1).collect();
            r.tail_bound /= s1.norm();
            r.taylor_remainder /= s1.norm();
            Ok(r)
        }
    }
}

/// Residue at the `k`-th pole, read off the Taylor coefficients of the
/// angular average near the origin.
pub fn pairing_residue(
    kind: PairingKind,
    f: &TestField,
    k: usize,
    cfg: &QuadConfig,
) -> Result<Vec<Complex64>> {
    let n = f.dim();
    let origin = ParaVec::zero(n);
    let need = match kind {
        PairingKind::Scalar | PairingKind::ViaParts => 2 * k,
        PairingKind::Dirac => 2 * k + 1,
    };
    if cfg.taylor_order < need {
        return Err(Error::InsufficientOrder {
            have: cfg.taylor_order,
            need,
        });
    }
    match kind {
        PairingKind::Scalar => {
            Ok(
                radial_expansion(Kernel::Scalar, f, &origin, need, cfg.angular_nodes)?
                    .swap_remove(need),
            )
        }
        PairingKind::Dirac => {
            Ok(
                radial_expansion(Kernel::Dirac, f, &origin, need, cfg.angular_nodes)?
                    .swap_remove(need),
            )
        }
        PairingKind::ViaParts => {
            let df = f.dirac(&*SpinRep::shared(n)?)?;
            let b = radial_expansion(Kernel::Scalar, &df, &origin, need, cfg.angular_nodes)?
                .swap_remove(need);
            // 1/(s+1) at s = -n - 1 - 2k
            let s1 = -((n + 2 * k) as f64);
            Ok(b.into_iter().map(|z| z / s1).collect())
        }
    }
}

/// `c_k (sum_j d^2/dx_j^2)^k f(0)`.
pub fn scalar_residue_formula(f: &TestField, k: usize) -> Result<Vec<Complex64>> {
    let mut g = f.clone();
    for _ in 0..k {
        g = g.flat_laplacian();
    }
    let c = c_const(f.dim(), k);
    Ok(g.eval(&vec![0.0; f.dim()])?
        .into_iter()
        .map(|z| z * c)
        .collect())
}

/// `D^{2k+1} f(0)` from a jet of order `2k + 1`.
pub fn dirac_power_at_origin(f: &TestField, k: usize) -> Result<Vec<Complex64>> {
    let rep = SpinRep::shared(f.dim())?;
    f.eval_jets(&vec![0.0; f.dim()], 2 * k + 1)?
        .dirac_power(&rep, k)
}

/// The residue of `<d_s, f>` at `s = -n - 1 - 2k`:
/// `(-1)^{k+1} c_k / (n + 2k) D^{2k+1} f(0)`.
pub fn dirac_residue_formula(f: &TestField, k: usize) -> Result<Vec<Complex64>> {
    let n = f.dim();
    let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
    let c = sign * c_const(n, k) / (n + 2 * k) as f64;
    Ok(dirac_power_at_origin(f, k)?
        .into_iter()
        .map(|z| z * c)
        .collect())
}

/// `c_k D^{2k+1} f(0)` with no further factor.
pub fn dirac_residue_uncorrected(f: &TestField, k: usize) -> Result<Vec<Complex64>> {
    let c = c_const(f.dim(), k);
    Ok(dirac_power_at_origin(f, k)?
        .into_iter()
        .map(|z| z * c)
        .collect())
}

/// `max |a - b| / max(|b|, floor)`.
pub fn rel_error(a: &[Complex64], b: &[Complex64], floor: f64) -> f64 {
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let scale = b.iter().map(|z| z.norm()).fold(floor, f64::max);
    diff / scale
}
