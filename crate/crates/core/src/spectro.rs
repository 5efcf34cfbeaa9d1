//! Kennard-Stepanov analysis of dye absorption and fluorescence spectra.
//!
//! With both spectra normalised to their peak, detailed balance predicts
//! `A(ε)/F(ε) = exp((ε - ε_ZPL) / k_B T)`, so `ln(A/F)` is a straight line in
//! photon energy whose slope gives the temperature and whose root gives the
//! zero-phonon line.

use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::constants::{BOLTZMANN_EV, HC_EV_NM};
use crate::error::{Error, Result};

/// Default inclusion floor, relative to the (unit) peak of each spectrum.
pub const DEFAULT_FLOOR: f64 = 1e-3;
pub const MIN_FIT_POINTS: usize = 10;
pub const MIN_R_SQUARED: f64 = 0.9;
const NORMALIZATION_TOLERANCE: f64 = 1e-6;

pub const CSV_HEADER: &str = "wavelength_nm,absorption,fluorescence";

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPair {
    wavelengths_nm: Vec<f64>,
    absorption: Vec<f64>,
    fluorescence: Vec<f64>,
    floor: f64,
}

impl SpectrumPair {
    pub fn new(
        wavelengths_nm: Vec<f64>,
        absorption: Vec<f64>,
        fluorescence: Vec<f64>,
        floor: f64,
    ) -> Result<Self> {
        let pair = Self::unchecked(wavelengths_nm, absorption, fluorescence, floor)?;
        if let Some(row) = pair.first_non_ascending() {
            return Err(Error::Spectrum(format!(
                "wavelengths not strictly ascending at row {}",
                row + 1
            )));
        }
        pair.validate_values()?;
        Ok(pair)
    }

    fn unchecked(w: Vec<f64>, a: Vec<f64>, f: Vec<f64>, floor: f64) -> Result<Self> {
        if w.len() != a.len() || w.len() != f.len() {
            return Err(Error::Spectrum(format!(
                "column lengths differ: {} wavelengths, {} absorption, {} fluorescence",
                w.len(),
                a.len(),
                f.len()
            )));
        }
        if !(floor > 0.0 && floor < 1.0) {
            return Err(Error::Spectrum(format!(
                "inclusion floor must lie in (0, 1), got {floor}"
            )));
        }
        Ok(Self {
            wavelengths_nm: w,
            absorption: a,
            fluorescence: f,
            floor,
        })
    }

    fn first_non_ascending(&self) -> Option<usize> {
        self.wavelengths_nm
            .windows(2)
            .position(|w| !(w[1] > w[0]))
            .map(|i| i + 1)
    }

    fn validate_values(&self) -> Result<()> {
        if self
            .wavelengths_nm
            .iter()
            .any(|&w| !(w > 0.0 && w.is_finite()))
        {
            return Err(Error::Spectrum("wavelengths must be positive".into()));
        }
        if self.included().count() == 0 {
            return Err(Error::NoFittablePoints);
        }
        for (name, column) in [
            ("absorption", &self.absorption),
            ("fluorescence", &self.fluorescence),
        ] {
            if let Some(row) = column
                .iter()
                .position(|&v| !(0.0..=1.0 + NORMALIZATION_TOLERANCE).contains(&v))
            {
                return Err(Error::Spectrum(format!(
                    "{name} value {} at row {} is outside [0, 1]",
                    column[row],
                    row + 1
                )));
            }
            let peak = column.iter().copied().fold(0.0, f64::max);
            if (peak - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::Spectrum(format!(
                    "{name} is not normalised to its peak (max = {peak})"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.wavelengths_nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavelengths_nm.is_empty()
    }

    pub fn wavelengths_nm(&self) -> &[f64] {
        &self.wavelengths_nm
    }
    pub fn absorption(&self) -> &[f64] {
        &self.absorption
    }
    pub fn fluorescence(&self) -> &[f64] {
        &self.fluorescence
    }
    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Whether row `i` is above the floor in both spectra.
    pub fn is_included(&self, i: usize) -> bool {
        self.absorption[i] > self.floor && self.fluorescence[i] > self.floor
    }

    /// Indices of rows used for fitting.
    pub fn included(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.is_included(i))
    }

    /// Same data with both spectra multiplied by `factor` (not renormalised).
    /// Useful for checking ratio invariance; the result skips peak checks.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            wavelengths_nm: self.wavelengths_nm.clone(),
            absorption: self.absorption.iter().map(|v| v * factor).collect(),
            fluorescence: self.fluorescence.iter().map(|v| v * factor).collect(),
            floor: self.floor * factor,
        }
    }

    /// Absorption and fluorescence exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            wavelengths_nm: self.wavelengths_nm.clone(),
            absorption: self.fluorescence.clone(),
            fluorescence: self.absorption.clone(),
            floor: self.floor,
        }
    }

    /// CSV text with the standard header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.wavelengths_nm[i], self.absorption[i], self.fluorescence[i]
            ));
        }
        out
    }
}

pub fn load_spectra(path: impl AsRef<Path>) -> Result<SpectrumPair> {
    load_spectra_with_floor(path, DEFAULT_FLOOR)
}

pub fn load_spectra_with_floor(path: impl AsRef<Path>, floor: f64) -> Result<SpectrumPair> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_spectra(&text, path, floor)
}

/// Parses `wavelength_nm,absorption,fluorescence` CSV. `path` is only used in
/// error messages.
pub fn parse_spectra(text: &str, path: &Path, floor: f64) -> Result<SpectrumPair> {
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        reason,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim().trim_start_matches('\u{feff}') == CSV_HEADER => {}
        Some((i, header)) => {
            return Err(parse_err(
                i + 1,
                format!("expected header `{CSV_HEADER}`, found `{header}`"),
            ))
        }
        None => return Err(parse_err(1, "empty file".into())),
    }
    let mut w = Vec::new();
    let mut a = Vec::new();
    let mut f = Vec::new();
    let mut line_of_row = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(
                i + 1,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let mut values = [0.0; 3];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field
                .parse::<f64>()
                .map_err(|e| parse_err(i + 1, format!("`{field}`: {e}")))?;
        }
        w.push(values[0]);
        a.push(values[1]);
        f.push(values[2]);
        line_of_row.push(i + 1);
    }
    let pair = SpectrumPair::unchecked(w, a, f, floor)?;
    if let Some(row) = pair.first_non_ascending() {
        return Err(parse_err(
            line_of_row[row],
            "wavelengths must be strictly ascending".into(),
        ));
    }
    pair.validate_values()?;
    Ok(pair)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KsOptions {
    /// Include the `ε³` density-of-states factor, i.e. fit `ln(ε³ A / F)`.
    /// The plain relation omits it.
    pub density_of_states: bool,
}

/// `(ε in eV, ln(A/F))` for every included row, in input order.
pub fn ks_log_ratio(pair: &SpectrumPair) -> Vec<(f64, f64)> {
    ks_log_ratio_with(pair, KsOptions::default())
}

pub fn ks_log_ratio_with(pair: &SpectrumPair, options: KsOptions) -> Vec<(f64, f64)> {
    pair.included()
        .map(|i| {
            let energy = HC_EV_NM / pair.wavelengths_nm[i];
            let mut ratio = (pair.absorption[i] / pair.fluorescence[i]).ln();
            if options.density_of_states {
                ratio += 3.0 * energy.ln();
            }
            (energy, ratio)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsFit {
    pub temperature_fit: f64,
    pub zpl_energy: f64,
    pub zpl_wavelength: f64,
    pub r_squared: f64,
    /// Wavelength span (nm) of the points used.
    pub valid_range: (f64, f64),
    /// d ln(A/F) / dε in 1/eV.
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

impl KsFit {
    /// Fitted line at photon energy `energy` (eV).
    pub fn line(&self, energy: f64) -> f64 {
        self.intercept + self.slope * energy
    }
}

pub fn fit_ks(pair: &SpectrumPair) -> Result<KsFit> {
    fit_ks_with(pair, KsOptions::default())
}

/// Weighted least-squares line through `(ε, ln(A/F))` with weights
/// `min(A, F)`.
pub fn fit_ks_with(pair: &SpectrumPair, options: KsOptions) -> Result<KsFit> {
    let rows: Vec<usize> = pair.included().collect();
    if rows.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            got: rows.len(),
        });
    }
    let data = ks_log_ratio_with(pair, options);
    let weights: Vec<f64> = rows
        .iter()
        .map(|&i| pair.absorption[i].min(pair.fluorescence[i]))
        .collect();

    let sw: f64 = weights.iter().sum();
    let mean_x = data
        .iter()
        .zip(&weights)
        .map(|((x, _), w)| w * x)
        .sum::<f64>()
        / sw;
    let mean_y = data
        .iter()
        .zip(&weights)
        .map(|((_, y), w)| w * y)
        .sum::<f64>()
        / sw;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for ((x, y), w) in data.iter().zip(&weights) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += w * dx * dx;
        sxy += w * dx * dy;
        syy += w * dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    if !(slope > 0.0) {
        return Err(Error::NegativeSlope { slope });
    }
    let ss_res: f64 = data
        .iter()
        .zip(&weights)
        .map(|((x, y), w)| w * (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    if r_squared < MIN_R_SQUARED {
        return Err(Error::PoorFit {
            r_squared,
            threshold: MIN_R_SQUARED,
        });
    }
    let zpl_energy = -intercept / slope;
    let lo = rows
        .iter()
        .map(|&i| pair.wavelengths_nm[i])
        .fold(f64::INFINITY, f64::min);
    let hi = rows
        .iter()
        .map(|&i| pair.wavelengths_nm[i])
        .fold(0.0, f64::max);
    Ok(KsFit {
        temperature_fit: 1.0 / (BOLTZMANN_EV * slope),
        zpl_energy,
        zpl_wavelength: HC_EV_NM / zpl_energy,
        r_squared,
        valid_range: (lo, hi),
        slope,
        intercept,
        points: rows.len(),
    })
}

/// Recipe for spectra that obey the Kennard-Stepanov relation exactly.
///
/// Fluorescence is a Gaussian in energy, absorption is fluorescence times the
/// Boltzmann factor. The zero-phonon line sits at
/// `ε_F + σ²/(2 k_B T)`, which makes the absorption another unit-peak
/// Gaussian, so both spectra are normalised without rescaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpectra {
    pub temperature: f64,
    /// Fluorescence peak energy, eV.
    pub fluorescence_peak_ev: f64,
    /// Gaussian standard deviation in energy, eV.
    pub width_ev: f64,
    pub wavelength_min_nm: f64,
    pub wavelength_max_nm: f64,
    pub points: usize,
}

impl Default for SyntheticSpectra {
    /// Roughly the shape of Rhodamine 6G in ethylene glycol at room temperature.
    fn default() -> Self {
        Self {
            temperature: 300.0,
            fluorescence_peak_ev: HC_EV_NM / 560.0,
            width_ev: 0.05,
            wavelength_min_nm: 450.0,
            wavelength_max_nm: 700.0,
            points: 501,
        }
    }
}

impl SyntheticSpectra {
    pub fn zpl_energy(&self) -> f64 {
        self.fluorescence_peak_ev + self.width_ev.powi(2) / (2.0 * BOLTZMANN_EV * self.temperature)
    }

    pub fn generate(&self) -> Result<SpectrumPair> {
        self.generate_with_floor(DEFAULT_FLOOR)
    }

    pub fn generate_with_floor(&self, floor: f64) -> Result<SpectrumPair> {
        if self.points < 2 || !(self.wavelength_max_nm > self.wavelength_min_nm) {
            return Err(Error::Spectrum(
                "synthetic grid needs >= 2 ascending points".into(),
            ));
        }
        let kt = BOLTZMANN_EV * self.temperature;
        let zpl = self.zpl_energy();
        let step = (self.wavelength_max_nm - self.wavelength_min_nm) / (self.points - 1) as f64;
        let wavelengths: Vec<f64> = (0..self.points)
            .map(|i| self.wavelength_min_nm + step * i as f64)
            .collect();
        let fluorescence: Vec<f64> = wavelengths
            .iter()
            .map(|&l| {
                let e = HC_EV_NM / l;
                (-0.5 * ((e - self.fluorescence_peak_ev) / self.width_ev).powi(2)).exp()
            })
            .collect();
        let absorption: Vec<f64> = wavelengths
            .iter()
            .zip(&fluorescence)
            .map(|(&l, f)| f * ((HC_EV_NM / l - zpl) / kt).exp())
            .collect();
        // The grid may miss the exact peaks; put the sampled maxima at one.
        let renorm = |v: Vec<f64>| {
            let peak = v.iter().copied().fold(0.0, f64::max);
            v.into_iter().map(|x| x / peak).collect::<Vec<_>>()
        };
        SpectrumPair::new(wavelengths, renorm(absorption), renorm(fluorescence), floor)
    }
}

/// Multiplies every sample by an independent `1 + N(0, rel_sigma)` factor
/// (clipped at zero) and renormalises each spectrum to unit peak.
pub fn with_multiplicative_noise<R: Rng + ?Sized>(
    pair: &SpectrumPair,
    rel_sigma: f64,
    rng: &mut R,
) -> Result<SpectrumPair> {
    let normal = Normal::new(1.0, rel_sigma)
        .map_err(|e| Error::Spectrum(format!("invalid noise level {rel_sigma}: {e}")))?;
    let mut noisy = |v: &[f64]| {
        let raw: Vec<f64> = v
            .iter()
            .map(|x| (x * normal.sample(rng)).max(0.0))
            .collect();
        let peak = raw.iter().copied().fold(0.0, f64::max);
        raw.into_iter().map(|x| x / peak).collect::<Vec<_>>()
    };
    let a = noisy(&pair.absorption);
    let f = noisy(&pair.fluorescence);
    SpectrumPair::new(pair.wavelengths_nm.clone(), a, f, pair.floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn parse(text: &str) -> Result<SpectrumPair> {
        parse_spectra(text, Path::new("test.csv"), DEFAULT_FLOOR)
    }

    #[test]
    fn parses_small_file() {
        let pair =
            parse("wavelength_nm,absorption,fluorescence\n500,1.0,0.2\n550,0.5,0.5\n600,0.1,1.0\n")
                .unwrap();
        assert_eq!(pair.len(), 3);
        assert_eq!(pair.included().count(), 3);
    }

    #[test]
    fn descending_rows_named() {
        let err =
            parse("wavelength_nm,absorption,fluorescence\n500,1.0,0.2\n550,0.5,0.5\n540,0.1,1.0\n")
                .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bad_fields_report_line() {
        let err =
            parse("wavelength_nm,absorption,fluorescence\n500,1.0,0.2\n550,x,0.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse("wavelength_nm,absorption,fluorescence\n500,1.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(matches!(
            parse("lambda,a,f\n1,1,1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn zero_fluorescence_is_unfittable() {
        let err = parse("wavelength_nm,absorption,fluorescence\n500,1.0,0\n550,0.5,0\n600,0.1,0\n")
            .unwrap_err();
        assert!(matches!(err, Error::NoFittablePoints), "{err}");
        assert!(err.to_string().contains("no fittable points"));
    }

    #[test]
    fn unnormalised_rejected() {
        let err =
            parse("wavelength_nm,absorption,fluorescence\n500,0.8,0.2\n550,0.5,1.0\n").unwrap_err();
        assert!(matches!(err, Error::Spectrum(_)), "{err}");
    }

    #[test]
    fn equal_spectra_give_zero_log_ratio() {
        let pair =
            parse("wavelength_nm,absorption,fluorescence\n500,1.0,0.2\n550,0.5,0.5\n600,0.2,1.0\n")
                .unwrap();
        let data = ks_log_ratio(&pair);
        assert_eq!(data[1].1, 0.0);
        assert_relative_eq!(data[1].0, HC_EV_NM / 550.0);
    }

    #[test]
    fn floor_excludes_weak_rows() {
        let pair = parse(
            "wavelength_nm,absorption,fluorescence\n500,1.0,0.0005\n550,0.5,0.5\n600,0.0001,1.0\n",
        )
        .unwrap();
        assert_eq!(pair.included().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn synthetic_log_ratio_is_linear() {
        let pair = SyntheticSpectra::default().generate().unwrap();
        let data = ks_log_ratio(&pair);
        let expected_slope = 1.0 / (BOLTZMANN_EV * 300.0);
        assert!((expected_slope - 38.68).abs() < 0.01);
        for w in data.windows(2) {
            let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            assert_relative_eq!(s, expected_slope, max_relative = 1e-7);
        }
    }

    #[test]
    fn log_ratio_scale_invariant() {
        let pair = SyntheticSpectra::default().generate().unwrap();
        let a = ks_log_ratio(&pair);
        let b = ks_log_ratio(&pair.scaled(0.37));
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            assert!((p.1 - q.1).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_recovers_temperature() {
        for t in [250.0, 300.0] {
            let recipe = SyntheticSpectra {
                temperature: t,
                ..Default::default()
            };
            let fit = fit_ks(&recipe.generate().unwrap()).unwrap();
            assert!(
                (fit.temperature_fit / t - 1.0).abs() < 1e-3,
                "{t}: {}",
                fit.temperature_fit
            );
            assert!(fit.r_squared > 0.9999);
            // Peak renormalisation on the sampled grid moves the ZPL by < kT·2e-4.
            assert_relative_eq!(fit.zpl_energy, recipe.zpl_energy(), max_relative = 1e-5);
        }
    }

    #[test]
    fn zpl_at_crossing() {
        let pair = SyntheticSpectra::default().generate().unwrap();
        let fit = fit_ks(&pair).unwrap();
        let w = pair.wavelengths_nm();
        let crossing = (1..pair.len())
            .find(|&i| {
                let d0 = pair.absorption()[i - 1] - pair.fluorescence()[i - 1];
                let d1 = pair.absorption()[i] - pair.fluorescence()[i];
                d0.signum() != d1.signum()
            })
            .unwrap();
        let spacing = w[1] - w[0];
        assert!((fit.zpl_wavelength - w[crossing]).abs() <= spacing);
    }

    #[test]
    fn fit_is_scale_invariant() {
        let pair = SyntheticSpectra::default().generate().unwrap();
        let a = fit_ks(&pair).unwrap();
        let b = fit_ks(&pair.scaled(5.0)).unwrap();
        assert_relative_eq!(a.temperature_fit, b.temperature_fit, max_relative = 1e-10);
    }

    #[test]
    fn swapped_spectra_rejected() {
        let pair = SyntheticSpectra::default().generate().unwrap();
        let err = fit_ks(&pair.swapped()).unwrap_err();
        match err {
            Error::NegativeSlope { slope } => {
                assert_relative_eq!(slope, -fit_ks(&pair).unwrap().slope, max_relative = 1e-10)
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn too_few_points() {
        let recipe = SyntheticSpectra {
            points: 6,
            ..Default::default()
        };
        assert!(matches!(
            fit_ks(&recipe.generate().unwrap()),
            Err(Error::InsufficientPoints { got, .. }) if got < MIN_FIT_POINTS
        ));
    }

    #[test]
    fn poor_fit_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pair = SyntheticSpectra::default().generate().unwrap();
        let noisy = with_multiplicative_noise(&pair, 0.8, &mut rng).unwrap();
        assert!(matches!(
            fit_ks(&noisy),
            Err(Error::PoorFit { .. }) | Err(Error::NegativeSlope { .. })
        ));
    }

    #[test]
    fn noisy_fit_within_five_percent() {
        let pair = SyntheticSpectra::default().generate().unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noisy = with_multiplicative_noise(&pair, 0.01, &mut rng).unwrap();
            let t = fit_ks(&noisy).unwrap().temperature_fit;
            assert!((t / 300.0 - 1.0).abs() < 0.05, "seed {seed}: {t}");
        }
    }

    #[test]
    fn density_of_states_option() {
        // Spectra built with the ε³ factor are recovered only with the option on.
        let recipe = SyntheticSpectra::default();
        let base = recipe.generate().unwrap();
        let kt = BOLTZMANN_EV * 300.0;
        let w = base.wavelengths_nm().to_vec();
        let f = base.fluorescence().to_vec();
        let raw: Vec<f64> = w
            .iter()
            .zip(&f)
            .map(|(&l, fl)| {
                let e = HC_EV_NM / l;
                fl * ((e - recipe.zpl_energy()) / kt).exp() / e.powi(3)
            })
            .collect();
        let peak = raw.iter().copied().fold(0.0, f64::max);
        let a: Vec<f64> = raw.iter().map(|v| v / peak).collect();
        let pair = SpectrumPair::new(w, a, f, DEFAULT_FLOOR).unwrap();
        let on = fit_ks_with(
            &pair,
            KsOptions {
                density_of_states: true,
            },
        )
        .unwrap();
        assert_relative_eq!(on.temperature_fit, 300.0, max_relative = 1e-6);
        let off = fit_ks(&pair).unwrap();
        assert!((off.temperature_fit - 300.0).abs() > 1.0);
    }

    #[test]
    fn csv_round_trip() {
        let pair = SyntheticSpectra::default().generate().unwrap();
        let back = parse_spectra(&pair.to_csv(), Path::new("mem"), DEFAULT_FLOOR).unwrap();
        assert_eq!(back, pair);
    }
}
