//! File formats: TOML scenes, cube and dictionary dumps (CSV or binary),
//! solution and metrics CSVs.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::analysis::{TheoremCheck, TrialMetrics};
use crate::dictionary::CompleteDictionary;
use crate::error::{Error, Result};
use crate::geometry::{GridPair, JointIndex, Target, Vec2};
use crate::pursuit::SparseSolution;
use crate::rng::{seed_stream, StreamRole};
use crate::signal::{Cube, MeasurementSet, ModelKind, NoiseSpec};

/// Parses TOML text, mapping failures to [`Error::Config`].
pub fn parse_toml<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

pub fn read_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_toml(&text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    /// One `[re, im]` per pair; drawn from CN(0, 1) when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<[f64; 2]>>,
}

/// Scene description.
///
/// ```toml
/// model = "complete"
/// [noise]
/// sigma2 = 0.0
/// seed = 7
/// [[targets]]
/// position = [8.5, -1.7]
/// velocity = [6.0, 6.0]
/// alphas = [[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    #[serde(default = "default_model")]
    pub model: ModelKind,
    #[serde(default = "NoiseSpec::noiseless")]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub targets: Vec<TargetSpec>,
}

fn default_model() -> ModelKind {
    ModelKind::Complete
}

impl SceneFile {
    /// Resolves the targets for `n_pairs` pairs. Missing alphas come from the
    /// alpha substream of the noise seed, one stream index per target.
    pub fn targets(&self, n_pairs: usize) -> Result<Vec<Target>> {
        self.targets
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let alphas = match &t.alphas {
                    Some(a) if a.len() == n_pairs => a.iter().map(|z| Complex64::new(z[0], z[1])).collect(),
                    Some(a) => {
                        return Err(Error::Config(format!(
                            "target {k}: {} alphas for {n_pairs} pairs",
                            a.len()
                        )))
                    }
                    None => {
                        let mut rng = seed_stream(self.noise.seed, k as u64, StreamRole::Alphas);
                        draw_alphas(&mut rng, n_pairs)
                    }
                };
                Ok(Target::new(
                    Vec2::new(t.position[0], t.position[1]),
                    Vec2::new(t.velocity[0], t.velocity[1]),
                    alphas,
                ))
            })
            .collect()
    }
}

/// i.i.d. CN(0, 1) draws.
pub fn draw_alphas<R: rand::Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(s * re, s * im)
        })
        .collect()
}

/// Header shared by the cube and dictionary dumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubeHeader {
    pub ms: usize,
    pub mr: usize,
    /// Number of cubes.
    pub q: usize,
    pub model: ModelKind,
    pub seed: u64,
}

impl CubeHeader {
    pub fn of(meas: &MeasurementSet) -> Self {
        Self {
            ms: meas.cfg.ms,
            mr: meas.cfg.mr,
            q: meas.cubes.len(),
            model: meas.model,
            seed: meas.seed,
        }
    }

    fn line(&self) -> String {
        format!(
            "# ms={} mr={} q={} model={} seed={}",
            self.ms,
            self.mr,
            self.q,
            self.model.as_str(),
            self.seed
        )
    }

    fn parse_line(line: &str) -> Result<Self> {
        let body = line
            .strip_prefix('#')
            .ok_or_else(|| Error::Format("missing '#' header".into()))?;
        let mut ms = None;
        let mut mr = None;
        let mut q = None;
        let mut model = None;
        let mut seed = None;
        for kv in body.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad header field '{kv}'")))?;
            let num = || v.parse::<u64>().map_err(|_| Error::Format(format!("bad value for {k}: '{v}'")));
            match k {
                "ms" => ms = Some(num()? as usize),
                "mr" => mr = Some(num()? as usize),
                "q" => q = Some(num()? as usize),
                "seed" => seed = Some(num()?),
                "model" => model = Some(v.parse::<ModelKind>()?),
                _ => {}
            }
        }
        let missing = |f: &str| Error::Format(format!("header lacks '{f}'"));
        Ok(Self {
            ms: ms.ok_or_else(|| missing("ms"))?,
            mr: mr.ok_or_else(|| missing("mr"))?,
            q: q.ok_or_else(|| missing("q"))?,
            model: model.ok_or_else(|| missing("model"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
        })
    }
}

/// Rows `q,m_s,m_r,re,im` with 1-based indices, m_s fastest.
pub fn write_cubes_csv<W: Write>(mut w: W, header: &CubeHeader, cubes: &[Cube]) -> Result<()> {
    writeln!(w, "{}", header.line())?;
    writeln!(w, "q,m_s,m_r,re,im")?;
    for (q, cube) in cubes.iter().enumerate() {
        for mr in 0..cube.mr() {
            for ms in 0..cube.ms() {
                let z = cube.get(ms, mr);
                writeln!(w, "{},{},{},{:e},{:e}", q + 1, ms + 1, mr + 1, z.re, z.im)?;
            }
        }
    }
    Ok(())
}

pub fn read_cubes_csv<R: Read>(r: R) -> Result<(CubeHeader, Vec<Cube>)> {
    let mut lines = BufReader::new(r).lines();
    let first = lines.next().ok_or_else(|| Error::Format("empty cube file".into()))??;
    let header = CubeHeader::parse_line(&first)?;
    let mut cubes = vec![Cube::zeros(header.ms, header.mr); header.q];
    let mut seen = 0usize;
    for line in lines {
        let line = line?;
        if line.is_empty() || line.starts_with('q') || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(Error::Format(format!("expected 5 fields: '{line}'")));
        }
        let idx = |s: &str, bound: usize, what| -> Result<usize> {
            let i: usize = s.trim().parse().map_err(|_| Error::Format(format!("bad index '{s}'")))?;
            if i == 0 || i > bound {
                return Err(Error::IndexOutOfRange { what, index: i, bound });
            }
            Ok(i - 1)
        };
        let val = |s: &str| -> Result<f64> { s.trim().parse().map_err(|_| Error::Format(format!("bad value '{s}'"))) };
        let q = idx(f[0], header.q, "q")?;
        let ms = idx(f[1], header.ms, "m_s")?;
        let mr = idx(f[2], header.mr, "m_r")?;
        cubes[q].set(ms, mr, Complex64::new(val(f[3])?, val(f[4])?));
        seen += 1;
    }
    if seen != header.q * header.ms * header.mr {
        return Err(Error::Format(format!(
            "{seen} samples for {} expected",
            header.q * header.ms * header.mr
        )));
    }
    Ok((header, cubes))
}

const CUBE_MAGIC: &[u8; 8] = b"MFCUBE01";

/// Magic, five little-endian u64 header words, then interleaved f64 pairs.
pub fn write_cubes_bin<W: Write>(mut w: W, header: &CubeHeader, cubes: &[Cube]) -> Result<()> {
    w.write_all(CUBE_MAGIC)?;
    let model = match header.model {
        ModelKind::Complete => 0u64,
        ModelKind::Simplified => 1,
    };
    for word in [header.ms as u64, header.mr as u64, header.q as u64, model, header.seed] {
        w.write_all(&word.to_le_bytes())?;
    }
    for cube in cubes {
        for z in cube.as_slice() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_cubes_bin<R: Read>(mut r: R) -> Result<(CubeHeader, Vec<Cube>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CUBE_MAGIC {
        return Err(Error::Format("not a cube dump".into()));
    }
    let mut word = [0u8; 8];
    let mut words = [0u64; 5];
    for w in words.iter_mut() {
        r.read_exact(&mut word)?;
        *w = u64::from_le_bytes(word);
    }
    let model = match words[3] {
        0 => ModelKind::Complete,
        1 => ModelKind::Simplified,
        m => return Err(Error::Format(format!("unknown model tag {m}"))),
    };
    let header = CubeHeader {
        ms: words[0] as usize,
        mr: words[1] as usize,
        q: words[2] as usize,
        model,
        seed: words[4],
    };
    let n = header.ms * header.mr;
    let mut cubes = Vec::with_capacity(header.q);
    for _ in 0..header.q {
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut word)?;
            let re = f64::from_le_bytes(word);
            r.read_exact(&mut word)?;
            data.push(Complex64::new(re, f64::from_le_bytes(word)));
        }
        cubes.push(Cube::from_vec(header.ms, header.mr, data)?);
    }
    Ok((header, cubes))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Writes CSV for a `.csv` extension and binary otherwise.
pub fn save_measurements(path: &Path, meas: &MeasurementSet) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    let header = CubeHeader::of(meas);
    if is_csv(path) {
        write_cubes_csv(w, &header, &meas.cubes)
    } else {
        write_cubes_bin(w, &header, &meas.cubes)
    }
}

pub fn load_cubes(path: &Path) -> Result<(CubeHeader, Vec<Cube>)> {
    let r = BufReader::new(File::open(path)?);
    if is_csv(path) {
        read_cubes_csv(r)
    } else {
        read_cubes_bin(r)
    }
}

/// Largest dictionary accepted by [`write_dictionary_csv`], in columns per pair.
pub const MAX_DUMP_COLUMNS: usize = 4096;

/// Every column of every pair as rows `q,joint,m_s,m_r,re,im` (1-based).
pub fn write_dictionary_csv<W: Write>(mut w: W, dict: &CompleteDictionary) -> Result<()> {
    let model = dict.model();
    if model.n_joint() > MAX_DUMP_COLUMNS {
        return Err(Error::Config(format!(
            "dictionary dump limited to {MAX_DUMP_COLUMNS} columns, got {}",
            model.n_joint()
        )));
    }
    let header = CubeHeader {
        ms: model.cfg.ms,
        mr: model.cfg.mr,
        q: model.n_pairs(),
        model: dict.kind(),
        seed: 0,
    };
    writeln!(w, "{} columns={}", header.line(), model.n_joint())?;
    writeln!(w, "q,joint,m_s,m_r,re,im")?;
    for q in 0..model.n_pairs() {
        for flat in 0..model.n_joint() {
            let atom = dict.complete_atom(q, JointIndex::from_flat(flat, model.n_vel()))?;
            for mr in 0..atom.mr() {
                for ms in 0..atom.ms() {
                    let z = atom.get(ms, mr);
                    writeln!(w, "{},{},{},{},{:e},{:e}", q + 1, flat + 1, ms + 1, mr + 1, z.re, z.im)?;
                }
            }
        }
    }
    Ok(())
}

/// One row per greedy round with the per-pair coefficient increments.
pub fn write_solution_csv<W: Write>(mut w: W, solution: &SparseSolution, grids: &GridPair) -> Result<()> {
    let q = solution.coeffs.len();
    let mut head = String::from("round,n,n_dot,x,y,vx,vy");
    for k in 1..=q {
        head.push_str(&format!(",re_{k},im_{k}"));
    }
    head.push_str(",residual_energy");
    writeln!(w, "{head}")?;
    for (round, rec) in solution.rounds.iter().enumerate() {
        let x = grids.location(rec.index.loc);
        let v = grids.velocity(rec.index.vel);
        write!(
            w,
            "{},{},{},{},{},{},{}",
            round + 1,
            rec.index.loc + 1,
            rec.index.vel + 1,
            x.x,
            x.y,
            v.x,
            v.y
        )?;
        for c in &rec.increments {
            write!(w, ",{:e},{:e}", c.re, c.im)?;
        }
        writeln!(w, ",{:e}", rec.residual_energy)?;
    }
    Ok(())
}

pub fn write_metrics_csv<W: Write>(w: W, rows: &[TrialMetrics]) -> Result<()> {
    write_rows(w, rows)
}

/// Serializes any row type with a header line.
pub fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TheoremRow {
    lambda: f64,
    gamma: f64,
    shift_x: f64,
    shift_y: f64,
    residual: f64,
    bound_ok: bool,
}

pub fn write_theorem_csv<W: Write>(w: W, checks: &[TheoremCheck]) -> Result<()> {
    let rows: Vec<TheoremRow> = checks
        .iter()
        .map(|c| TheoremRow {
            lambda: c.lambda,
            gamma: c.gamma,
            shift_x: c.shift.x,
            shift_y: c.shift.y,
            residual: c.residual,
            bound_ok: c.bound_ok,
        })
        .collect();
    write_rows(w, &rows)
}

/// Location field as rows `i,j,x,y,value` (0-based axis indices).
pub fn write_field_csv<W: Write>(mut w: W, field: &[f64], grids: &GridPair) -> Result<()> {
    if field.len() != grids.n_loc() {
        return Err(Error::Format(format!("field of {} values for {} cells", field.len(), grids.n_loc())));
    }
    writeln!(w, "i,j,x,y,value")?;
    for (n, value) in field.iter().enumerate() {
        let (i, j) = grids.loc_axes(n);
        let p = grids.location(n);
        writeln!(w, "{i},{j},{},{},{:e}", p.x, p.y, value)?;
    }
    Ok(())
}
