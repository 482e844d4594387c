//! Fourier-space helpers for the periodic pseudo-spectral discretization.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::solver::Grid;

/// Planned transforms plus the wavenumber table for one grid.
///
/// Forward/inverse transforms are unnormalized (rustfft convention); the
/// helpers below fold the 1/n where it belongs.
pub(crate) struct SpectralOps {
    n: usize,
    /// Angular wavenumbers in FFT layout, Nyquist mode zeroed so odd
    /// derivatives stay real-symmetric.
    k: Vec<f64>,
    /// Two-thirds-rule cutoff: modes with |index| > keep are aliased.
    keep: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl SpectralOps {
    pub(crate) fn new(grid: &Grid) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());

        let scale = 2.0 * std::f64::consts::PI / grid.length();
        let mut k = vec![0.0; n];
        for i in 1..n / 2 {
            k[i] = i as f64 * scale;
            k[n - i] = -(i as f64) * scale;
        }
        // k[n/2] stays zero

        SpectralOps {
            n,
            k,
            keep: n / 3,
            fwd,
            inv,
            scratch: vec![Complex64::ZERO; scratch_len],
        }
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub(crate) fn forward(&mut self, buf: &mut [Complex64]) {
        self.fwd.process_with_scratch(buf, &mut self.scratch);
    }

    pub(crate) fn inverse(&mut self, buf: &mut [Complex64]) {
        self.inv.process_with_scratch(buf, &mut self.scratch);
    }

    /// True if FFT index `i` survives the two-thirds truncation.
    pub(crate) fn kept(&self, i: usize) -> bool {
        i <= self.keep || i >= self.n - self.keep
    }

    /// Forward transform of a real field.
    pub(crate) fn spectrum_of(&mut self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }

    /// Real field from a spectrum (normalized inverse, real part).
    pub(crate) fn values_of(&mut self, hat: &[Complex64]) -> Vec<f64> {
        let mut buf = hat.to_vec();
        self.inverse(&mut buf);
        let inv_n = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * inv_n).collect()
    }

    /// Spectral derivative of given order: multiply by (i k)^order.
    pub(crate) fn derivative(&mut self, values: &[f64], order: u32) -> Vec<f64> {
        let mut hat = self.spectrum_of(values);
        for (h, &k) in hat.iter_mut().zip(&self.k) {
            let sym = match order {
                1 => Complex64::new(0.0, k),
                2 => Complex64::new(-k * k, 0.0),
                3 => Complex64::new(0.0, -k * k * k),
                _ => Complex64::new(0.0, k).powu(order),
            };
            *h *= sym;
        }
        self.values_of(&hat)
    }

    /// L2 invariant from the spectrum via Parseval: dx/n * sum |u_hat|^2.
    pub(crate) fn l2_from_spectrum(hat: &[Complex64], dx: f64) -> f64 {
        let sum: f64 = hat.iter().map(|c| c.norm_sqr()).sum();
        sum * dx / hat.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(0.0, 2.0 * std::f64::consts::PI, 256).unwrap()
    }

    #[test]
    fn derivative_of_sine_is_cosine() {
        let g = grid();
        let mut ops = SpectralOps::new(&g);
        let u: Vec<f64> = g.points().map(|x| x.sin()).collect();
        let ux = ops.derivative(&u, 1);
        for (x, d) in g.points().zip(&ux) {
            assert!((d - x.cos()).abs() < 1e-12);
        }
        // third derivative amplifies FFT roundoff by k_max^3 ~ 2e6
        let uxxx = ops.derivative(&u, 3);
        for (x, d) in g.points().zip(&uxxx) {
            assert!((d + x.cos()).abs() < 2e-7);
        }
    }

    #[test]
    fn roundtrip_is_identity() {
        let g = grid();
        let mut ops = SpectralOps::new(&g);
        let u: Vec<f64> = g
            .points()
            .map(|x| (3.0 * x).cos() + 0.2 * x.sin())
            .collect();
        let hat = ops.spectrum_of(&u);
        let back = ops.values_of(&hat);
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn parseval_matches_direct_sum() {
        let g = grid();
        let mut ops = SpectralOps::new(&g);
        let u: Vec<f64> = g.points().map(|x| 1.0 + x.sin()).collect();
        let hat = ops.spectrum_of(&u);
        let direct: f64 = u.iter().map(|v| v * v).sum::<f64>() * g.dx();
        let spectral = SpectralOps::l2_from_spectrum(&hat, g.dx());
        assert!((direct - spectral).abs() < 1e-10);
    }
}
