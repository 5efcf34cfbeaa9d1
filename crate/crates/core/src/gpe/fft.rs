use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planned 2D transforms for a row-major `ny × nx` array.
pub(crate) struct Fft2 {
    nx: usize,
    ny: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    transposed: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Fft2 {
    pub(crate) fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        let row_fwd = planner.plan_fft_forward(nx);
        let row_inv = planner.plan_fft_inverse(nx);
        let col_fwd = planner.plan_fft_forward(ny);
        let col_inv = planner.plan_fft_inverse(ny);
        let scratch_len = [&row_fwd, &row_inv, &col_fwd, &col_inv]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            nx,
            ny,
            row_fwd,
            row_inv,
            col_fwd,
            col_inv,
            transposed: vec![Complex64::default(); nx * ny],
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    /// Unnormalised forward transform.
    pub(crate) fn forward(&mut self, data: &mut [Complex64]) {
        let (rows, cols) = (self.row_fwd.clone(), self.col_fwd.clone());
        self.apply(data, rows.as_ref(), cols.as_ref());
    }

    /// Inverse transform including the `1/(nx ny)` factor.
    pub(crate) fn inverse(&mut self, data: &mut [Complex64]) {
        let (rows, cols) = (self.row_inv.clone(), self.col_inv.clone());
        self.apply(data, rows.as_ref(), cols.as_ref());
        let scale = 1.0 / (self.nx * self.ny) as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    fn apply(&mut self, data: &mut [Complex64], rows: &dyn Fft<f64>, cols: &dyn Fft<f64>) {
        let (nx, ny) = (self.nx, self.ny);
        rows.process_with_scratch(data, &mut self.scratch);
        for j in 0..ny {
            for i in 0..nx {
                self.transposed[i * ny + j] = data[j * nx + i];
            }
        }
        cols.process_with_scratch(&mut self.transposed, &mut self.scratch);
        for i in 0..nx {
            for j in 0..ny {
                data[j * nx + i] = self.transposed[i * ny + j];
            }
        }
    }
}
