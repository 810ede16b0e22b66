//! Baseband measurement synthesis.
//!
//! Every phase is evaluated in cycles and reduced modulo one before the
//! complex exponential is taken. Sample indices `m_s` and `m_r` are 1-based
//! in all phase formulas; storage is 0-based with `m_s` fastest.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{bistatic_range, bistatic_speed, BistaticPair, RadarConfig, Target, Vec2};

/// Which atom model generates (or is assumed by) a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Inner, outer and coupling factors, with intra-ramp Doppler.
    Complete,
    /// Zero-velocity inner factor times the outer factor.
    Simplified,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Complete => "complete",
            ModelKind::Simplified => "simplified",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(ModelKind::Complete),
            "simplified" => Ok(ModelKind::Simplified),
            other => Err(Error::Config(format!("unknown model tag '{other}'"))),
        }
    }
}

/// Unit phasor `exp(j 2 pi cycles)`.
#[inline]
pub fn phasor(cycles: f64) -> Complex64 {
    let frac = cycles - cycles.round();
    let (s, c) = (TAU * frac).sin_cos();
    Complex64::new(c, s)
}

/// Phase of the inner signal, in cycles, for bistatic range `range` and
/// bistatic speed `speed`.
#[inline]
pub fn inner_cycles(cfg: &RadarConfig, range: f64, speed: f64, ms: usize) -> f64 {
    let ms_count = cfg.ms as f64;
    let rc = range / cfg.c;
    -cfg.f0 * rc + cfg.bandwidth / (2.0 * ms_count * cfg.ts) * rc * rc
        - (cfg.bandwidth / ms_count * range + cfg.f0 * cfg.ts * speed) / cfg.c * ms as f64
}

#[inline]
pub fn outer_cycles(cfg: &RadarConfig, speed: f64, mr: usize) -> f64 {
    -cfg.f0 / cfg.c * cfg.ramp_duration() * speed * mr as f64
}

#[inline]
pub fn coupling_cycles(cfg: &RadarConfig, range: f64, speed: f64, ms: usize, mr: usize) -> f64 {
    let ms_count = cfg.ms as f64;
    let b = cfg.bandwidth;
    let c = cfg.c;
    let u = mr as f64 * cfg.ramp_duration() + ms as f64 * cfg.ts;
    let vu_c = speed * u / c;
    -b / (ms_count * c) * speed * u * ms as f64
        + b / (ms_count * cfg.ts) * range * speed * u / (c * c)
        + b / (2.0 * ms_count * cfg.ts) * vu_c * vu_c
}

pub fn inner_phasor(cfg: &RadarConfig, range: f64, speed: f64, ms: usize) -> Complex64 {
    phasor(inner_cycles(cfg, range, speed, ms))
}

pub fn outer_phasor(cfg: &RadarConfig, speed: f64, mr: usize) -> Complex64 {
    phasor(outer_cycles(cfg, speed, mr))
}

pub fn coupling_phasor(cfg: &RadarConfig, range: f64, speed: f64, ms: usize, mr: usize) -> Complex64 {
    phasor(coupling_cycles(cfg, range, speed, ms, mr))
}

/// Atom entry from scalar range/speed.
pub fn atom_phasor(
    cfg: &RadarConfig,
    range: f64,
    speed: f64,
    ms: usize,
    mr: usize,
    model: ModelKind,
) -> Complex64 {
    match model {
        ModelKind::Complete => {
            inner_phasor(cfg, range, speed, ms)
                * outer_phasor(cfg, speed, mr)
                * coupling_phasor(cfg, range, speed, ms, mr)
        }
        ModelKind::Simplified => inner_phasor(cfg, range, 0.0, ms) * outer_phasor(cfg, speed, mr),
    }
}

fn check_index(what: &'static str, index: usize, bound: usize) -> Result<()> {
    if index == 0 || index > bound {
        return Err(Error::IndexOutOfRange { what, index, bound });
    }
    Ok(())
}

fn range_speed(x: &Vec2, v: &Vec2, pair: &BistaticPair) -> Result<(f64, f64)> {
    Ok((bistatic_range(x, pair), bistatic_speed(x, v, pair)?))
}

/// Fast-time factor of the atom at `(x, v)`; `ms` is 1-based.
pub fn inner_signal(x: &Vec2, v: &Vec2, pair: &BistaticPair, ms: usize, cfg: &RadarConfig) -> Result<Complex64> {
    check_index("m_s", ms, cfg.ms)?;
    let (r, s) = range_speed(x, v, pair)?;
    Ok(inner_phasor(cfg, r, s, ms))
}

/// Slow-time factor; `mr` is 1-based.
pub fn outer_signal(x: &Vec2, v: &Vec2, pair: &BistaticPair, mr: usize, cfg: &RadarConfig) -> Result<Complex64> {
    check_index("m_r", mr, cfg.mr)?;
    let s = bistatic_speed(x, v, pair)?;
    Ok(outer_phasor(cfg, s, mr))
}

/// Cross term coupling fast and slow time.
pub fn coupling_signal(
    x: &Vec2,
    v: &Vec2,
    pair: &BistaticPair,
    ms: usize,
    mr: usize,
    cfg: &RadarConfig,
) -> Result<Complex64> {
    check_index("m_s", ms, cfg.ms)?;
    check_index("m_r", mr, cfg.mr)?;
    let (r, s) = range_speed(x, v, pair)?;
    Ok(coupling_phasor(cfg, r, s, ms, mr))
}

pub fn atom_sample(
    x: &Vec2,
    v: &Vec2,
    pair: &BistaticPair,
    ms: usize,
    mr: usize,
    cfg: &RadarConfig,
    model: ModelKind,
) -> Result<Complex64> {
    check_index("m_s", ms, cfg.ms)?;
    check_index("m_r", mr, cfg.mr)?;
    let (r, s) = range_speed(x, v, pair)?;
    Ok(atom_phasor(cfg, r, s, ms, mr, model))
}

/// One `Ms x Mr` complex data matrix stored column-major (`m_s` fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    ms: usize,
    mr: usize,
    data: Vec<Complex64>,
}

impl Cube {
    pub fn zeros(ms: usize, mr: usize) -> Self {
        Self {
            ms,
            mr,
            data: vec![Complex64::new(0.0, 0.0); ms * mr],
        }
    }

    pub fn from_vec(ms: usize, mr: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != ms * mr {
            return Err(Error::Format(format!(
                "cube needs {} samples, got {}",
                ms * mr,
                data.len()
            )));
        }
        Ok(Self { ms, mr, data })
    }

    pub fn ms(&self) -> usize {
        self.ms
    }

    pub fn mr(&self) -> usize {
        self.mr
    }

    /// 0-based sample access.
    #[inline]
    pub fn get(&self, ms: usize, mr: usize) -> Complex64 {
        self.data[mr * self.ms + ms]
    }

    #[inline]
    pub fn set(&mut self, ms: usize, mr: usize, value: Complex64) {
        self.data[mr * self.ms + ms] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Fast-time column for ramp `mr` (0-based).
    pub fn ramp(&self, mr: usize) -> &[Complex64] {
        &self.data[mr * self.ms..(mr + 1) * self.ms]
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<self, other> = sum conj(self) * other`.
    pub fn dot(&self, other: &Cube) -> Complex64 {
        dot(&self.data, &other.data)
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.data.iter_mut().for_each(|z| *z *= factor);
    }

    pub fn add_assign(&mut self, other: &Cube) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }
}

/// `sum conj(a) * b`.
#[inline]
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

/// Additive noise power per complex sample and the seed of its stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma2: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self { sigma2: 0.0, seed: 0 }
    }
}

/// Q cubes of `Ms x Mr` samples, one per bistatic pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub cubes: Vec<Cube>,
    pub cfg: RadarConfig,
    pub model: ModelKind,
    pub seed: u64,
}

impl MeasurementSet {
    pub fn n_pairs(&self) -> usize {
        self.cubes.len()
    }

    pub fn energy(&self) -> f64 {
        self.cubes.iter().map(Cube::energy).sum()
    }
}

/// Circular complex Gaussian noise for cube `q`. Each cube draws from its own
/// ChaCha stream so cubes are independent of generation order.
pub fn noise_cube(cfg: &RadarConfig, noise: &NoiseSpec, q: usize) -> Cube {
    let mut cube = Cube::zeros(cfg.ms, cfg.mr);
    if noise.sigma2 == 0.0 {
        return cube;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    rng.set_stream(q as u64);
    let std = (noise.sigma2 / 2.0).sqrt();
    for z in cube.as_mut_slice() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *z = Complex64::new(std * re, std * im);
    }
    cube
}

/// Noiseless response of one target on one pair.
pub fn target_cube(
    target: &Target,
    pair: &BistaticPair,
    alpha: Complex64,
    cfg: &RadarConfig,
    model: ModelKind,
) -> Result<Cube> {
    let r = bistatic_range(&target.position, pair);
    let s = bistatic_speed(&target.position, &target.velocity, pair)?;
    let mut cube = Cube::zeros(cfg.ms, cfg.mr);
    for mr in 0..cfg.mr {
        for ms in 0..cfg.ms {
            cube.set(ms, mr, alpha * atom_phasor(cfg, r, s, ms + 1, mr + 1, model));
        }
    }
    Ok(cube)
}

/// Sum of target responses plus noise, for every pair.
pub fn synthesize(
    pairs: &[BistaticPair],
    targets: &[Target],
    cfg: &RadarConfig,
    noise: &NoiseSpec,
    model: ModelKind,
) -> Result<MeasurementSet> {
    cfg.validate()?;
    if !(noise.sigma2 >= 0.0 && noise.sigma2.is_finite()) {
        return Err(Error::Config(format!("noise power must be >= 0, got {}", noise.sigma2)));
    }
    for (k, t) in targets.iter().enumerate() {
        if t.alphas.len() != pairs.len() {
            return Err(Error::Config(format!(
                "target {k} has {} scattering coefficients for {} pairs",
                t.alphas.len(),
                pairs.len()
            )));
        }
    }
    let cubes = pairs
        .iter()
        .enumerate()
        .map(|(q, pair)| {
            let mut cube = noise_cube(cfg, noise, q);
            for t in targets {
                cube.add_assign(&target_cube(t, pair, t.alphas[q], cfg, model)?);
            }
            Ok(cube)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurementSet {
        cubes,
        cfg: *cfg,
        model,
        seed: noise.seed,
    })
}

/// Noise power giving the requested linear SNR for unit-variance
/// scattering coefficients and unit-modulus atoms.
pub fn sigma2_for_snr(snr: f64) -> Result<f64> {
    if !(snr.is_finite() && snr > 0.0) {
        return Err(Error::InvalidSnr(snr));
    }
    Ok(1.0 / snr)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
