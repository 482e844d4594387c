//! Jacobi elliptic sine and the complete elliptic integral of the first
//! kind, computed with the arithmetic-geometric mean.
//!
//! Only the pieces the cnoidal-wave generator needs are implemented: `sn`
//! (with `cn` and `dn` as byproducts of the same Landen recursion) and
//! `K(m)`. Both use the parameter convention `m = k^2`, matching
//! `scipy.special`.

use crate::error::{Error, Result};

/// Elliptic parameter `m`, constrained to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParameter(f64);

impl EllipticParameter {
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() || !(0.0..=1.0).contains(&m) {
            return Err(Error::Domain(format!(
                "elliptic parameter m = {m} must lie in [0, 1]"
            )));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Absolute tolerance for the AGM / Landen iterations.
const AGM_TOL: f64 = 1e-12;

/// Within this distance of m = 1 the functions collapse to their
/// hyperbolic closed forms; the AGM scale sequence stagnates there.
const M_ONE_EPS: f64 = 1e-12;

/// Hard cap on Landen levels. The sequence contracts quadratically, so a
/// dozen levels already reach machine precision; 32 is unreachable.
const MAX_LEVELS: usize = 32;

/// Jacobi elliptic sine `sn(theta, m)`.
///
/// Reduces to `sin` at m = 0 and to `tanh` at m = 1.
pub fn jacobi_sn(theta: f64, m: EllipticParameter) -> Result<f64> {
    Ok(jacobi_sn_cn_dn(theta, m)?.0)
}

/// The triple `(sn, cn, dn)` at `theta` from one descending-Landen pass.
pub fn jacobi_sn_cn_dn(theta: f64, m: EllipticParameter) -> Result<(f64, f64, f64)> {
    if !theta.is_finite() {
        return Err(Error::Domain(format!(
            "argument theta = {theta} not finite"
        )));
    }
    Ok(sn_cn_dn_impl(theta, m.get()))
}

/// Unchecked kernel; callers guarantee m in [0, 1] and finite theta.
pub(crate) fn sn_cn_dn_impl(theta: f64, m: f64) -> (f64, f64, f64) {
    if 1.0 - m < M_ONE_EPS {
        let s = theta.tanh();
        let c = 1.0 / theta.cosh();
        return (s, c, c);
    }

    // Descending Landen ladder: a_{i+1} = (a_i + b_i)/2, b_{i+1} = sqrt(a_i b_i),
    // c_{i+1} = (a_i - b_i)/2, stopping once c_i is negligible.
    let mut a_seq = Vec::with_capacity(12);
    let mut c_seq = Vec::with_capacity(12);
    let mut a = 1.0f64;
    let mut b = (1.0 - m).sqrt();
    a_seq.push(a);
    c_seq.push(m.sqrt());
    while c_seq[c_seq.len() - 1].abs() > AGM_TOL && a_seq.len() < MAX_LEVELS {
        let an = 0.5 * (a + b);
        let cn = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        a_seq.push(an);
        c_seq.push(cn);
    }

    // Amplitude recursion: phi_{i-1} = (phi_i + asin((c_i/a_i) sin phi_i)) / 2.
    let top = a_seq.len() - 1;
    let mut phi = (1u64 << top) as f64 * a_seq[top] * theta;
    let mut phi_one = phi;
    for i in (1..=top).rev() {
        let s = ((c_seq[i] / a_seq[i]) * phi.sin()).clamp(-1.0, 1.0);
        if i == 1 {
            phi_one = phi;
        }
        phi = 0.5 * (phi + s.asin());
    }

    let sn = phi.sin();
    let cn = phi.cos();
    let dn = if top == 0 {
        1.0 // m = 0: ladder is trivial and dn is identically 1
    } else {
        cn / (phi_one - phi).cos()
    };
    (sn, cn, dn)
}

/// Complete elliptic integral of the first kind, `K(m) = pi / (2 agm(1, sqrt(1-m)))`.
///
/// `K` is the quarter period of `sn` in its first argument; it diverges
/// logarithmically as m -> 1, which is reported as a domain error.
pub fn complete_elliptic_k(m: EllipticParameter) -> Result<f64> {
    let m = m.get();
    if m == 1.0 {
        return Err(Error::Domain(
            "K(m) diverges logarithmically at m = 1".into(),
        ));
    }
    let mut a = 1.0f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..MAX_LEVELS {
        if (a - b).abs() <= AGM_TOL {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(core::f64::consts::PI / (2.0 * a))
}
