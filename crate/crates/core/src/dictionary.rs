//! Complete and factorized dictionaries over a location/velocity grid.
//!
//! Atoms are vectorized with `m_s` fastest: entry `(m_r - 1) * Ms + m_s`
//! (1-based) holds sample `(m_s, m_r)`. Columns of the complete dictionary
//! follow the joint index `n * N_v + n_dot`.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{
    bistatic_range, unit_sum, BistaticPair, GridPair, JointIndex, RadarConfig, Vec2,
};
use crate::signal::{atom_phasor, coupling_cycles, inner_cycles, outer_cycles, phasor, Cube, ModelKind};

/// Per-pair geometry of one location grid point.
#[derive(Debug, Clone, Copy)]
struct LocGeometry {
    range: f64,
    unit_sum: Vec2,
}

/// Radar configuration, bistatic pairs and grids, with the bistatic range
/// and unit-vector sum of every (pair, location) precomputed.
#[derive(Debug, Clone)]
pub struct SensingModel {
    pub cfg: RadarConfig,
    pub pairs: Vec<BistaticPair>,
    pub grids: GridPair,
    geo: Vec<LocGeometry>,
}

impl SensingModel {
    pub fn new(cfg: RadarConfig, pairs: Vec<BistaticPair>, grids: GridPair) -> Result<Self> {
        cfg.validate()?;
        if pairs.is_empty() {
            return Err(Error::InvalidConfig("at least one bistatic pair is required".into()));
        }
        let mut geo = Vec::with_capacity(pairs.len() * grids.n_loc());
        for pair in &pairs {
            for x in &grids.loc_points {
                geo.push(LocGeometry {
                    range: bistatic_range(x, pair),
                    unit_sum: unit_sum(x, pair)?,
                });
            }
        }
        Ok(Self {
            cfg,
            pairs,
            grids,
            geo,
        })
    }

    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn n_loc(&self) -> usize {
        self.grids.n_loc()
    }

    pub fn n_vel(&self) -> usize {
        self.grids.n_vel()
    }

    pub fn n_joint(&self) -> usize {
        self.grids.n_joint()
    }

    pub fn samples(&self) -> usize {
        self.cfg.samples_per_cube()
    }

    #[inline]
    fn geometry(&self, q: usize, n: usize) -> LocGeometry {
        self.geo[q * self.grids.n_loc() + n]
    }

    /// Bistatic range of grid location `n` for pair `q`.
    #[inline]
    pub fn range(&self, q: usize, n: usize) -> f64 {
        self.geometry(q, n).range
    }

    /// Bistatic speed of grid velocity `n_dot` at grid location `n`.
    #[inline]
    pub fn speed(&self, q: usize, n: usize, n_dot: usize) -> f64 {
        self.geometry(q, n).unit_sum.dot(&self.grids.vel_points[n_dot])
    }

    pub fn check_joint(&self, q: usize, joint: JointIndex) -> Result<()> {
        if q >= self.n_pairs() {
            return Err(Error::IndexOutOfRange {
                what: "pair",
                index: q,
                bound: self.n_pairs(),
            });
        }
        if joint.loc >= self.n_loc() {
            return Err(Error::IndexOutOfRange {
                what: "location",
                index: joint.loc,
                bound: self.n_loc(),
            });
        }
        if joint.vel >= self.n_vel() {
            return Err(Error::IndexOutOfRange {
                what: "velocity",
                index: joint.vel,
                bound: self.n_vel(),
            });
        }
        Ok(())
    }

    /// Atom at a grid cell evaluated sample by sample from the phase
    /// formulas.
    pub fn atom(&self, q: usize, joint: JointIndex, model: ModelKind) -> Result<Cube> {
        self.check_joint(q, joint)?;
        let r = self.range(q, joint.loc);
        let s = self.speed(q, joint.loc, joint.vel);
        let mut cube = Cube::zeros(self.cfg.ms, self.cfg.mr);
        for mr in 0..self.cfg.mr {
            for ms in 0..self.cfg.ms {
                cube.set(ms, mr, atom_phasor(&self.cfg, r, s, ms + 1, mr + 1, model));
            }
        }
        Ok(cube)
    }
}

/// Separable form of one atom: `d[ms, mr] = fast[ms] * slow[mr] * w^(ms*mr)`
/// with 1-based indices. The atom phase is a bivariate quadratic, so this
/// form is exact up to rounding.
struct AtomKernel {
    fast: Vec<Complex64>,
    slow: Vec<Complex64>,
    cross: Complex64,
}

impl AtomKernel {
    fn new(cfg: &RadarConfig) -> Self {
        Self {
            fast: vec![Complex64::new(0.0, 0.0); cfg.ms],
            slow: vec![Complex64::new(0.0, 0.0); cfg.mr],
            cross: Complex64::new(1.0, 0.0),
        }
    }

    fn load(&mut self, cfg: &RadarConfig, range: f64, speed: f64, model: ModelKind) {
        match model {
            ModelKind::Complete => {
                for (i, f) in self.fast.iter_mut().enumerate() {
                    let ms = i + 1;
                    *f = phasor(inner_cycles(cfg, range, speed, ms) + coupling_cycles(cfg, range, speed, ms, 0));
                }
                for (i, g) in self.slow.iter_mut().enumerate() {
                    let mr = i + 1;
                    *g = phasor(outer_cycles(cfg, speed, mr) + coupling_cycles(cfg, range, speed, 0, mr));
                }
                let cross_cycles = cfg.bandwidth * cfg.ramp_duration() * speed / (cfg.ms as f64 * cfg.c)
                    * (speed / cfg.c - 1.0);
                self.cross = phasor(cross_cycles);
            }
            ModelKind::Simplified => {
                for (i, f) in self.fast.iter_mut().enumerate() {
                    *f = phasor(inner_cycles(cfg, range, 0.0, i + 1));
                }
                for (i, g) in self.slow.iter_mut().enumerate() {
                    *g = phasor(outer_cycles(cfg, speed, i + 1));
                }
                self.cross = Complex64::new(1.0, 0.0);
            }
        }
    }

    /// Writes the vectorized atom into `out`.
    fn fill(&self, out: &mut [Complex64]) {
        let ms_count = self.fast.len();
        let mut w_mr = Complex64::new(1.0, 0.0);
        for (mr, g) in self.slow.iter().enumerate() {
            w_mr *= self.cross;
            let mut x = Complex64::new(1.0, 0.0);
            let col = &mut out[mr * ms_count..(mr + 1) * ms_count];
            for (f, slot) in self.fast.iter().zip(col.iter_mut()) {
                x *= w_mr;
                *slot = f * g * x;
            }
        }
    }

    /// `<atom, residual>` without forming the atom.
    fn correlate(&self, residual: &[Complex64]) -> Complex64 {
        let ms_count = self.fast.len();
        let cross_conj = self.cross.conj();
        let mut y = Complex64::new(1.0, 0.0);
        let mut total = Complex64::new(0.0, 0.0);
        for (mr, g) in self.slow.iter().enumerate() {
            y *= cross_conj;
            let col = &residual[mr * ms_count..(mr + 1) * ms_count];
            // Horner in y over m_s = Ms..1
            let mut acc = Complex64::new(0.0, 0.0);
            for (f, r) in self.fast.iter().zip(col).rev() {
                acc = (acc + f.conj() * r) * y;
            }
            total += g.conj() * acc;
        }
        total
    }
}

/// Column-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[col * self.rows + row]
    }

    #[inline]
    pub fn col(&self, col: usize) -> &[Complex64] {
        &self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

struct Materialized {
    re: Vec<f64>,
    im: Vec<f64>,
}

/// The per-pair dictionaries `D^q` with one column per joint grid cell.
///
/// Columns are generated on demand unless the dictionary was materialized.
pub struct CompleteDictionary {
    model: Arc<SensingModel>,
    kind: ModelKind,
    stored: Option<Materialized>,
}

/// Default memory budget for [`CompleteDictionary::auto`], bytes.
pub const DEFAULT_MATERIALIZE_BUDGET: usize = 1_200 * 1024 * 1024;

impl CompleteDictionary {
    pub fn lazy(model: Arc<SensingModel>) -> Self {
        Self {
            model,
            kind: ModelKind::Complete,
            stored: None,
        }
    }

    /// Lazy dictionary built from either atom model.
    pub fn lazy_with(model: Arc<SensingModel>, kind: ModelKind) -> Self {
        Self {
            model,
            kind,
            stored: None,
        }
    }

    /// Stores every column up front (`16 * Q * N_x * N_v * Ms * Mr` bytes).
    pub fn materialized(model: Arc<SensingModel>) -> Self {
        let mut dict = Self::lazy(model);
        dict.materialize();
        dict
    }

    /// Materializes when the storage fits in `budget_bytes`.
    pub fn auto(model: Arc<SensingModel>, budget_bytes: usize) -> Self {
        let mut dict = Self::lazy(model);
        if dict.storage_bytes() <= budget_bytes {
            dict.materialize();
        }
        dict
    }

    pub fn storage_bytes(&self) -> usize {
        self.model.n_pairs() * self.model.n_joint() * self.model.samples() * 16
    }

    pub fn is_materialized(&self) -> bool {
        self.stored.is_some()
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn model(&self) -> &Arc<SensingModel> {
        &self.model
    }

    fn materialize(&mut self) {
        let m = &self.model;
        let samples = m.samples();
        let total = m.n_pairs() * m.n_joint() * samples;
        let mut re = Vec::with_capacity(total);
        let mut im = Vec::with_capacity(total);
        let mut kernel = AtomKernel::new(&m.cfg);
        let mut buf = vec![Complex64::new(0.0, 0.0); samples];
        for q in 0..m.n_pairs() {
            for n in 0..m.n_loc() {
                for n_dot in 0..m.n_vel() {
                    kernel.load(&m.cfg, m.range(q, n), m.speed(q, n, n_dot), self.kind);
                    kernel.fill(&mut buf);
                    re.extend(buf.iter().map(|z| z.re));
                    im.extend(buf.iter().map(|z| z.im));
                }
            }
        }
        self.stored = Some(Materialized { re, im });
    }

    /// Column `(n, n_dot)` of `D^q`.
    pub fn complete_atom(&self, q: usize, joint: JointIndex) -> Result<Cube> {
        self.model.check_joint(q, joint)?;
        let m = &self.model;
        let samples = m.samples();
        let data = match &self.stored {
            Some(st) => {
                let start = (q * m.n_joint() + joint.flat(m.n_vel())) * samples;
                (start..start + samples)
                    .map(|i| Complex64::new(st.re[i], st.im[i]))
                    .collect()
            }
            None => {
                let mut kernel = AtomKernel::new(&m.cfg);
                kernel.load(&m.cfg, m.range(q, joint.loc), m.speed(q, joint.loc, joint.vel), self.kind);
                let mut buf = vec![Complex64::new(0.0, 0.0); samples];
                kernel.fill(&mut buf);
                buf
            }
        };
        Cube::from_vec(m.cfg.ms, m.cfg.mr, data)
    }

    /// Adds `|<d^q_j, residual>|^2` into `objective[j]` for every joint
    /// index `j`.
    pub fn accumulate_energy(&self, q: usize, residual: &Cube, objective: &mut [f64]) {
        let m = &self.model;
        let n_vel = m.n_vel();
        debug_assert_eq!(objective.len(), m.n_joint());
        match &self.stored {
            Some(st) => {
                let samples = m.samples();
                let r_re: Vec<f64> = residual.as_slice().iter().map(|z| z.re).collect();
                let r_im: Vec<f64> = residual.as_slice().iter().map(|z| z.im).collect();
                let base = q * m.n_joint() * samples;
                for (j, obj) in objective.iter_mut().enumerate() {
                    let off = base + j * samples;
                    let d_re = &st.re[off..off + samples];
                    let d_im = &st.im[off..off + samples];
                    let mut acc_re = 0.0;
                    let mut acc_im = 0.0;
                    for k in 0..samples {
                        acc_re += d_re[k] * r_re[k] + d_im[k] * r_im[k];
                        acc_im += d_re[k] * r_im[k] - d_im[k] * r_re[k];
                    }
                    *obj += acc_re * acc_re + acc_im * acc_im;
                }
            }
            None => {
                let mut kernel = AtomKernel::new(&m.cfg);
                let residual = residual.as_slice();
                for n in 0..m.n_loc() {
                    let range = m.range(q, n);
                    for n_dot in 0..n_vel {
                        kernel.load(&m.cfg, range, m.speed(q, n, n_dot), self.kind);
                        objective[n * n_vel + n_dot] += kernel.correlate(residual).norm_sqr();
                    }
                }
            }
        }
    }
}

/// Inner dictionaries `Psi^q` (zero velocity) with on-demand outer
/// dictionaries `Phi^q_n` and velocity-conditioned inner columns.
pub struct FactorizedDictionary {
    model: Arc<SensingModel>,
    inner: Vec<CMatrix>,
    outer_cache: Option<Vec<OnceLock<CMatrix>>>,
}

impl FactorizedDictionary {
    pub fn new(model: Arc<SensingModel>) -> Self {
        let inner = (0..model.n_pairs())
            .map(|q| Self::build_inner(&model, q, None))
            .collect();
        Self {
            model,
            inner,
            outer_cache: None,
        }
    }

    /// Keeps every outer matrix once generated
    /// (`16 * Q * N_x * Mr * N_v` bytes when fully populated).
    pub fn with_outer_cache(mut self) -> Self {
        let slots = self.model.n_pairs() * self.model.n_loc();
        self.outer_cache = Some((0..slots).map(|_| OnceLock::new()).collect());
        self
    }

    pub fn model(&self) -> &Arc<SensingModel> {
        &self.model
    }

    fn build_inner(model: &SensingModel, q: usize, n_dot: Option<usize>) -> CMatrix {
        let cfg = &model.cfg;
        let rows = cfg.ms;
        let cols = model.n_loc();
        let mut data = Vec::with_capacity(rows * cols);
        for n in 0..cols {
            let range = model.range(q, n);
            let speed = n_dot.map_or(0.0, |nd| model.speed(q, n, nd));
            data.extend((1..=rows).map(|ms| phasor(inner_cycles(cfg, range, speed, ms))));
        }
        CMatrix { rows, cols, data }
    }

    fn check_pair(&self, q: usize) -> Result<()> {
        if q >= self.model.n_pairs() {
            return Err(Error::IndexOutOfRange {
                what: "pair",
                index: q,
                bound: self.model.n_pairs(),
            });
        }
        Ok(())
    }

    /// `Psi^q`, `Ms x N_x`.
    pub fn inner_matrix(&self, q: usize) -> Result<&CMatrix> {
        self.check_pair(q)?;
        Ok(&self.inner[q])
    }

    /// `Psi^q_v` for grid velocity `n_dot`, `Ms x N_x`.
    pub fn inner_cond_matrix(&self, q: usize, n_dot: usize) -> Result<CMatrix> {
        self.model.check_joint(q, JointIndex::new(0, n_dot))?;
        Ok(Self::build_inner(&self.model, q, Some(n_dot)))
    }

    /// Column `n` of `Psi^q_v` for grid velocity `n_dot`.
    pub fn inner_cond_column(&self, q: usize, n: usize, n_dot: usize) -> Result<Vec<Complex64>> {
        self.model.check_joint(q, JointIndex::new(n, n_dot))?;
        let cfg = &self.model.cfg;
        let range = self.model.range(q, n);
        let speed = self.model.speed(q, n, n_dot);
        Ok((1..=cfg.ms)
            .map(|ms| phasor(inner_cycles(cfg, range, speed, ms)))
            .collect())
    }

    fn build_outer(&self, q: usize, n: usize) -> CMatrix {
        let cfg = &self.model.cfg;
        let rows = cfg.mr;
        let cols = self.model.n_vel();
        let mut data = Vec::with_capacity(rows * cols);
        for n_dot in 0..cols {
            let speed = self.model.speed(q, n, n_dot);
            data.extend((1..=rows).map(|mr| phasor(outer_cycles(cfg, speed, mr))));
        }
        CMatrix { rows, cols, data }
    }

    /// `Phi^q_n`, `Mr x N_v`.
    pub fn outer_matrix(&self, q: usize, n: usize) -> Result<CMatrix> {
        self.model.check_joint(q, JointIndex::new(n, 0))?;
        Ok(match &self.outer_cache {
            Some(cache) => cache[q * self.model.n_loc() + n]
                .get_or_init(|| self.build_outer(q, n))
                .clone(),
            None => self.build_outer(q, n),
        })
    }

    /// Runs `f` against `Phi^q_n` without copying it out of the cache.
    pub(crate) fn with_outer<T>(&self, q: usize, n: usize, f: impl FnOnce(&CMatrix) -> T) -> T {
        match &self.outer_cache {
            Some(cache) => f(cache[q * self.model.n_loc() + n].get_or_init(|| self.build_outer(q, n))),
            None => f(&self.build_outer(q, n)),
        }
    }
}
