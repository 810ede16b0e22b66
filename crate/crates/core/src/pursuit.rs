//! Greedy joint-sparse recovery: block matching pursuit (BMP), its
//! factorized variant (FBMP) and the iterative refinement of the factorized
//! selection (IFBMP).
//!
//! All three share the same update: for every pair the selected complete
//! atom is projected out of the residual and the projection coefficient is
//! accumulated. Only the way the cell `(n*, n_dot*)` is picked differs.

use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dictionary::{CMatrix, CompleteDictionary, FactorizedDictionary};
use crate::error::{Error, Result};
use crate::geometry::JointIndex;
use crate::signal::{dot, Cube, MeasurementSet};

/// Picked grid cell and the value of the selection objective there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: JointIndex,
    pub objective: f64,
    /// Set when every candidate scored zero (e.g. an all-zero residual).
    pub degenerate: bool,
}

/// Per-pair residual matrices `R^q`, initialized to the measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSet {
    pub cubes: Vec<Cube>,
    pub iteration: usize,
}

impl ResidualSet {
    pub fn new(measurements: &MeasurementSet) -> Self {
        Self {
            cubes: measurements.cubes.clone(),
            iteration: 0,
        }
    }

    pub fn energy(&self) -> f64 {
        self.cubes.iter().map(Cube::energy).sum()
    }
}

/// One greedy round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub index: JointIndex,
    /// Coefficient increment added for each pair.
    pub increments: Vec<Complex64>,
    pub residual_energy: f64,
    pub select_seconds: f64,
}

/// Common support plus one coefficient per (pair, support cell).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseSolution {
    pub support: Vec<JointIndex>,
    /// `coeffs[q][k]` is the coefficient of `support[k]` for pair `q`.
    pub coeffs: Vec<Vec<Complex64>>,
    pub rounds: Vec<RoundRecord>,
}

impl SparseSolution {
    pub fn new(n_pairs: usize) -> Self {
        Self {
            support: Vec::new(),
            coeffs: vec![Vec::new(); n_pairs],
            rounds: Vec::new(),
        }
    }

    pub fn iterations_used(&self) -> usize {
        self.rounds.len()
    }

    /// Cell picked at each round, repeats included.
    pub fn selections(&self) -> Vec<JointIndex> {
        self.rounds.iter().map(|r| r.index).collect()
    }

    pub fn coefficient(&self, q: usize, joint: JointIndex) -> Option<Complex64> {
        let slot = self.support.iter().position(|s| *s == joint)?;
        self.coeffs.get(q).map(|c| c[slot])
    }

    pub fn mean_select_seconds(&self) -> f64 {
        if self.rounds.is_empty() {
            return 0.0;
        }
        self.rounds.iter().map(|r| r.select_seconds).sum::<f64>() / self.rounds.len() as f64
    }

    fn accumulate(&mut self, index: JointIndex, increments: &[Complex64]) {
        let slot = match self.support.iter().position(|s| *s == index) {
            Some(slot) => slot,
            None => {
                self.support.push(index);
                self.coeffs.iter_mut().for_each(|c| c.push(Complex64::new(0.0, 0.0)));
                self.support.len() - 1
            }
        };
        for (c, inc) in self.coeffs.iter_mut().zip(increments) {
            c[slot] += inc;
        }
    }
}

/// Recovery algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bmp,
    Fbmp,
    Ifbmp,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Bmp => "bmp",
            Algorithm::Fbmp => "fbmp",
            Algorithm::Ifbmp => "ifbmp",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bmp" => Ok(Algorithm::Bmp),
            "fbmp" => Ok(Algorithm::Fbmp),
            "ifbmp" => Ok(Algorithm::Ifbmp),
            other => Err(Error::Config(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// First maximum; ties resolve to the smallest index.
fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Exhaustive selection over all `N_x N_v` complete atoms:
/// `argmax sum_q |<d^q_{n, n_dot}, r^q>|^2`.
pub fn bmp_select(residuals: &ResidualSet, dict: &CompleteDictionary) -> Selection {
    let model = dict.model();
    let mut objective = vec![0.0; model.n_joint()];
    for (q, r) in residuals.cubes.iter().enumerate() {
        dict.accumulate_energy(q, r, &mut objective);
    }
    let (flat, value) = argmax(&objective);
    Selection {
        index: JointIndex::from_flat(flat, model.n_vel()),
        objective: value,
        degenerate: value <= 0.0,
    }
}

/// Projects the selected complete atom out of every residual and
/// accumulates the projection coefficients.
pub fn update(
    residuals: &mut ResidualSet,
    solution: &mut SparseSolution,
    dict: &CompleteDictionary,
    index: JointIndex,
) -> Result<Vec<Complex64>> {
    let samples = dict.model().samples() as f64;
    let mut increments = Vec::with_capacity(residuals.cubes.len());
    for (q, r) in residuals.cubes.iter_mut().enumerate() {
        let atom = dict.complete_atom(q, index)?;
        let c = atom.dot(r) / samples;
        for (res, d) in r.as_mut_slice().iter_mut().zip(atom.as_slice()) {
            *res -= c * d;
        }
        increments.push(c);
    }
    solution.accumulate(index, &increments);
    residuals.iteration += 1;
    Ok(increments)
}

/// Location objective `sum_q sum_mr |<psi^q_n, r^q_{:, mr}>|^2` for every
/// grid location, using one inner matrix per pair.
fn location_objective(residuals: &ResidualSet, inner: &[&CMatrix], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for (r, psi) in residuals.cubes.iter().zip(inner) {
        for (n, obj) in out.iter_mut().enumerate() {
            let col = psi.col(n);
            for mr in 0..r.mr() {
                *obj += dot(col, r.ramp(mr)).norm_sqr();
            }
        }
    }
}

/// Velocity objective at location `n` from the per-pair slow-time
/// projections `p^q`.
fn velocity_step(fdict: &FactorizedDictionary, n: usize, projections: &[Vec<Complex64>]) -> (usize, f64) {
    let n_vel = fdict.model().n_vel();
    let mut objective = vec![0.0; n_vel];
    for (q, p) in projections.iter().enumerate() {
        fdict.with_outer(q, n, |phi| {
            for (nd, obj) in objective.iter_mut().enumerate() {
                *obj += dot(phi.col(nd), p).norm_sqr();
            }
        });
    }
    argmax(&objective)
}

/// `p^q = (<psi^q, r^q_{:,1}>, ..., <psi^q, r^q_{:,Mr}>)` for one inner
/// column per pair.
fn slow_time_projections(residuals: &ResidualSet, columns: &[&[Complex64]]) -> Vec<Vec<Complex64>> {
    residuals
        .cubes
        .iter()
        .zip(columns)
        .map(|(r, col)| (0..r.mr()).map(|mr| dot(col, r.ramp(mr))).collect())
        .collect()
}

/// Location decision variable over the grid, either with the zero-velocity
/// inner dictionaries or conditioned on grid velocity `n_dot`.
pub fn location_decision_field(
    residuals: &ResidualSet,
    fdict: &FactorizedDictionary,
    n_dot: Option<usize>,
) -> Result<Vec<f64>> {
    let n_pairs = fdict.model().n_pairs();
    let mut field = vec![0.0; fdict.model().n_loc()];
    match n_dot {
        None => {
            let inner = (0..n_pairs)
                .map(|q| fdict.inner_matrix(q))
                .collect::<Result<Vec<_>>>()?;
            location_objective(residuals, &inner, &mut field);
        }
        Some(nd) => {
            let cond = (0..n_pairs)
                .map(|q| fdict.inner_cond_matrix(q, nd))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&CMatrix> = cond.iter().collect();
            location_objective(residuals, &refs, &mut field);
        }
    }
    Ok(field)
}

/// Two-step factorized selection: location from the inner dictionaries,
/// then velocity from the outer dictionaries at that location.
pub fn fbmp_select(residuals: &ResidualSet, fdict: &FactorizedDictionary) -> Selection {
    let n_pairs = fdict.model().n_pairs();
    let inner: Vec<&CMatrix> = (0..n_pairs)
        .map(|q| fdict.inner_matrix(q).expect("pair index in range"))
        .collect();
    let mut field = vec![0.0; fdict.model().n_loc()];
    location_objective(residuals, &inner, &mut field);
    let (n, loc_value) = argmax(&field);
    let columns: Vec<&[Complex64]> = inner.iter().map(|psi| psi.col(n)).collect();
    let p = slow_time_projections(residuals, &columns);
    let (nd, value) = velocity_step(fdict, n, &p);
    Selection {
        index: JointIndex::new(n, nd),
        objective: value,
        degenerate: loc_value <= 0.0,
    }
}

/// FBMP selection followed by up to `iterations` refinements that redo the
/// location step with inner atoms conditioned on the current velocity.
/// Returns the final selection and every intermediate cell (step 0 first).
pub fn ifbmp_select_traced(
    residuals: &ResidualSet,
    fdict: &FactorizedDictionary,
    iterations: usize,
) -> (Selection, Vec<JointIndex>) {
    let mut sel = fbmp_select(residuals, fdict);
    let mut trace = vec![sel.index];
    let n_pairs = fdict.model().n_pairs();
    let mut field = vec![0.0; fdict.model().n_loc()];
    for _ in 0..iterations {
        let prev = sel.index;
        let cond: Vec<CMatrix> = (0..n_pairs)
            .map(|q| fdict.inner_cond_matrix(q, prev.vel).expect("velocity index in range"))
            .collect();
        let refs: Vec<&CMatrix> = cond.iter().collect();
        location_objective(residuals, &refs, &mut field);
        let (n, loc_value) = argmax(&field);
        let columns: Vec<&[Complex64]> = cond.iter().map(|psi| psi.col(n)).collect();
        let p = slow_time_projections(residuals, &columns);
        let (nd, value) = velocity_step(fdict, n, &p);
        sel = Selection {
            index: JointIndex::new(n, nd),
            objective: value,
            degenerate: loc_value <= 0.0,
        };
        trace.push(sel.index);
        if sel.index == prev {
            break;
        }
    }
    (sel, trace)
}

pub fn ifbmp_select(residuals: &ResidualSet, fdict: &FactorizedDictionary, iterations: usize) -> Selection {
    ifbmp_select_traced(residuals, fdict, iterations).0
}

fn greedy_run(
    measurements: &MeasurementSet,
    dict: &CompleteDictionary,
    k: usize,
    mut select: impl FnMut(&ResidualSet) -> Selection,
) -> Result<SparseSolution> {
    if k == 0 {
        return Err(Error::Config("sparsity K must be >= 1".into()));
    }
    if measurements.cubes.len() != dict.model().n_pairs() {
        return Err(Error::Config(format!(
            "{} measurement cubes for {} bistatic pairs",
            measurements.cubes.len(),
            dict.model().n_pairs()
        )));
    }
    let mut residuals = ResidualSet::new(measurements);
    let mut solution = SparseSolution::new(measurements.cubes.len());
    for _ in 0..k {
        let start = Instant::now();
        let sel = select(&residuals);
        let select_seconds = start.elapsed().as_secs_f64();
        let increments = update(&mut residuals, &mut solution, dict, sel.index)?;
        solution.rounds.push(RoundRecord {
            index: sel.index,
            increments,
            residual_energy: residuals.energy(),
            select_seconds,
        });
    }
    Ok(solution)
}

/// K rounds of exhaustive selection and update.
pub fn bmp_run(measurements: &MeasurementSet, dict: &CompleteDictionary, k: usize) -> Result<SparseSolution> {
    greedy_run(measurements, dict, k, |r| bmp_select(r, dict))
}

/// K rounds of factorized selection; updates use complete atoms.
pub fn fbmp_run(
    measurements: &MeasurementSet,
    fdict: &FactorizedDictionary,
    dict: &CompleteDictionary,
    k: usize,
) -> Result<SparseSolution> {
    greedy_run(measurements, dict, k, |r| fbmp_select(r, fdict))
}

pub fn ifbmp_run(
    measurements: &MeasurementSet,
    fdict: &FactorizedDictionary,
    dict: &CompleteDictionary,
    k: usize,
    iterations: usize,
) -> Result<SparseSolution> {
    greedy_run(measurements, dict, k, |r| ifbmp_select(r, fdict, iterations))
}

/// Dispatches to the chosen algorithm. `iterations` only affects IFBMP.
pub fn recover(
    algorithm: Algorithm,
    measurements: &MeasurementSet,
    dict: &CompleteDictionary,
    fdict: &FactorizedDictionary,
    k: usize,
    iterations: usize,
) -> Result<SparseSolution> {
    match algorithm {
        Algorithm::Bmp => bmp_run(measurements, dict, k),
        Algorithm::Fbmp => fbmp_run(measurements, fdict, dict, k),
        Algorithm::Ifbmp => ifbmp_run(measurements, fdict, dict, k, iterations),
    }
}
