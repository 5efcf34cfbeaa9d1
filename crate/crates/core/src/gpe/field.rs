use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform periodic grid centred on the origin. Point `(i, j)` sits at
/// `((i - nx/2) dx, (j - ny/2) dy)`; storage is row-major with `i` fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::domain(
                    "Grid2D",
                    format!("{name} = {n} must be a power of two >= 2"),
                ));
            }
        }
        for (name, d) in [("dx", dx), ("dy", dy)] {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::domain(
                    "Grid2D",
                    format!("{name} = {d} must be positive"),
                ));
            }
        }
        Ok(Self { nx, ny, dx, dy })
    }

    /// Square `n × n` grid covering `[-half_width, half_width)` on both axes.
    pub fn square(n: usize, half_width: f64) -> Result<Self> {
        let d = 2.0 * half_width / n as f64;
        Self::new(n, n, d, d)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn dy(&self) -> f64 {
        self.dy
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx
    }
    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.dy
    }

    /// Coordinates of flat index `k`.
    pub fn position(&self, k: usize) -> (f64, f64) {
        (self.x(k % self.nx), self.y(k / self.nx))
    }

    /// Angular wavenumber of FFT bin `b` along an axis of `n` points.
    fn wavenumber(b: usize, n: usize, d: f64) -> f64 {
        let signed = if b < n / 2 {
            b as f64
        } else {
            b as f64 - n as f64
        };
        2.0 * PI * signed / (n as f64 * d)
    }

    /// `|k|²` for every FFT bin, in storage order.
    pub fn k_squared(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let kx = Self::wavenumber(k % self.nx, self.nx, self.dx);
                let ky = Self::wavenumber(k / self.nx, self.ny, self.dy);
                kx * kx + ky * ky
            })
            .collect()
    }

    /// Largest `|k|²` representable on the grid.
    pub fn k_squared_max(&self) -> f64 {
        (PI / self.dx).powi(2) + (PI / self.dy).powi(2)
    }

    /// Whether flat index `k` lies on the outermost ring of points.
    pub fn is_edge(&self, k: usize) -> bool {
        let (i, j) = (k % self.nx, k / self.nx);
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }
}

/// Complex order parameter sampled on a [`Grid2D`]; `|ψ|²` is an areal density.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl ComplexField2D {
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_values(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(
                "ComplexField2D",
                format!("{} values for a grid of {}", values.len(), grid.len()),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(grid: Grid2D, f: F) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.position(k);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    /// Real Gaussian `exp(-r²/2w²)` scaled to the given norm.
    pub fn gaussian(grid: Grid2D, width: f64, norm: f64) -> Self {
        let mut field = Self::from_fn(grid, |x, y| {
            Complex64::new((-(x * x + y * y) / (2.0 * width * width)).exp(), 0.0)
        });
        field.set_norm(norm);
        field
    }

    pub fn uniform(grid: Grid2D, value: Complex64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// `∫|ψ|² dA`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn peak_density(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max)
    }

    /// Largest density on the grid edge relative to the peak density.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.peak_density();
        if peak == 0.0 {
            return 0.0;
        }
        (0..self.grid.len())
            .filter(|&k| self.grid.is_edge(k))
            .map(|k| self.values[k].norm_sqr())
            .fold(0.0, f64::max)
            / peak
    }

    /// Rescales to `∫|ψ|² dA = norm`. A vacuum field is left untouched.
    pub fn set_norm(&mut self, norm: f64) {
        let current = self.norm();
        if current > 0.0 {
            let s = (norm / current).sqrt();
            self.values.iter_mut().for_each(|v| *v *= s);
        }
    }

    /// `sqrt(∫|ψ - φ|² dA)`.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        (self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * self.grid.cell_area())
        .sqrt()
    }

    /// Snapshot as CSV: `x,y,re,im`, one row per grid point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,re,im")?;
        for (k, v) in self.values.iter().enumerate() {
            let (x, y) = self.grid.position(k);
            writeln!(out, "{x},{y},{},{}", v.re, v.im)?;
        }
        Ok(())
    }

    /// Density as an 8-bit binary PGM, scaled to the peak. Rows run from
    /// the top of the image (largest y) down.
    pub fn write_density_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let peak = self.peak_density();
        write!(out, "P5\n{nx} {ny}\n255\n")?;
        let mut row = vec![0u8; nx];
        for j in (0..ny).rev() {
            for (i, px) in row.iter_mut().enumerate() {
                let d = self.values[j * nx + i].norm_sqr();
                *px = if peak > 0.0 {
                    (255.0 * d / peak).round() as u8
                } else {
                    0
                };
            }
            out.write_all(&row)?;
        }
        Ok(())
    }
}
