//! Spectral partial derivatives of periodic samples on a 4D grid.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

pub fn strides(n: [usize; 4]) -> [usize; 4] {
    [n[1] * n[2] * n[3], n[2] * n[3], n[3], 1]
}

/// ∂/∂x_axis of a periodic real field sampled on an n-grid with the given period.
/// The Nyquist mode is dropped, so the result is exact for band-limited data.
pub fn derivative(data: &[f64], n: [usize; 4], period: f64, axis: usize) -> Vec<f64> {
    let len = n[axis];
    let total: usize = n.iter().product();
    assert_eq!(data.len(), total);
    let st = strides(n);
    let s = st[axis];
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let factors: Vec<C64> = (0..len)
        .map(|m| {
            let signed = if 2 * m < len { m as f64 } else if 2 * m == len { return C64::new(0.0, 0.0) } else { m as f64 - len as f64 };
            C64::new(0.0, 2.0 * PI * signed / period) / len as f64
        })
        .collect();
    // Line starts are all indices whose axis coordinate is 0.
    let starts: Vec<usize> = (0..total).filter(|i| (i / s).is_multiple_of(len)).collect();
    let lines: Vec<(usize, Vec<f64>)> = starts
        .par_iter()
        .map(|&b| {
            let mut buf: Vec<C64> = (0..len).map(|j| C64::new(data[b + j * s], 0.0)).collect();
            fwd.process(&mut buf);
            for (z, f) in buf.iter_mut().zip(&factors) {
                *z *= f;
            }
            inv.process(&mut buf);
            (b, buf.iter().map(|z| z.re).collect())
        })
        .collect();
    let mut out = vec![0.0; total];
    for (b, line) in lines {
        for (j, v) in line.into_iter().enumerate() {
            out[b + j * s] = v;
        }
    }
    out
}
