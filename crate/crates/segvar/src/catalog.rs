//! The construction catalog: closed-form antithetic schemes from the
//! literature, each exposed as a segment set where one exists and as a
//! direct sampler.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{self, SolverOptions};
use crate::sampling::{random_permutation, Exchangeable, IidUniform, Sampler, SegmentSampler};
use crate::segments::{build_segment_set, SegmentSet};
use crate::transforms;

/// Default cap on generated vertices (AJ and compositions blow up
/// exponentially).
pub const DEFAULT_VERTEX_CAP: u128 = 1_000_000;

/// Latin hypercube segment sets have `2 d!` vertices; eight is where that
/// stops being reasonable.
pub const LH_MAX_DIMENSION: usize = 8;

/// Rotation sampling: `2d` vertices, edges `(i, d+i)`.
///
/// Marginally standard uniform for every `d` but never constant-sum (except
/// in no dimension at all: the vertex sums straddle `d/2`).
pub fn rotation_segment_set(d: usize) -> Result<SegmentSet> {
    if d < 2 {
        return Err(Error::BadConstruction("rotation needs d >= 2".into()));
    }
    let df = d as f64;
    let mut coordinates = vec![vec![0.0; 2 * d]; d];
    for l in 1..=d {
        for m in 1..=d {
            let hi = if m < d + 2 - l {
                (l + m - 1) as f64 / df
            } else {
                (l + m - 1 - d) as f64 / df
            };
            let lo = if m < d + 2 - l {
                (l + m - 2) as f64 / df
            } else {
                (l + m - 2 - d) as f64 / df
            };
            coordinates[l - 1][m - 1] = hi;
            coordinates[l - 1][d + m - 1] = lo;
        }
    }
    let edges = (1..=d).map(|i| (i, d + i)).collect();
    build_segment_set(coordinates, edges)
}

/// Base-b displacement construction: `2 b^(d-2)` vertices, edges
/// `(m, b^(d-2)+m)`. Strictly d-CTM exactly when `b = 2`.
pub fn aj_segment_set(d: usize, b: u32) -> Result<SegmentSet> {
    aj_segment_set_capped(d, b, DEFAULT_VERTEX_CAP)
}

pub fn aj_segment_set_capped(d: usize, b: u32, vertex_cap: u128) -> Result<SegmentSet> {
    if d < 2 || b < 1 {
        return Err(Error::BadConstruction(
            "base-b construction needs d >= 2 and b >= 1".into(),
        ));
    }
    let segments = (b as u128).pow(d.saturating_sub(2) as u32);
    if 2 * segments > vertex_cap {
        return Err(Error::SizeLimit {
            requested: 2 * segments,
            cap: vertex_cap,
            unit: "vertices",
        });
    }
    let nb = segments as usize;
    let mut coordinates = vec![vec![0.0; 2 * nb]; d];
    for m in 0..nb {
        let (y, z) = aj_vertex_pair(d, b, m as u64);
        for l in 0..d {
            coordinates[l][m] = y[l];
            coordinates[l][nb + m] = z[l];
        }
    }
    let edges = (1..=nb).map(|i| (i, nb + i)).collect();
    build_segment_set(coordinates, edges)
}

/// Endpoints of the `m`-th segment (0-based) of the base-b construction:
/// `y` is the V=0 endpoint, `z` the V=1 endpoint.
fn aj_vertex_pair(d: usize, b: u32, m: u64) -> (Vec<f64>, Vec<f64>) {
    let big = (b as u64).pow(d as u32 - 2);
    let mut y = vec![0.0; d];
    let mut z = vec![0.0; d];
    y[0] = m as f64 / big as f64;
    z[0] = (m + 1) as f64 / big as f64;
    for i in 2..d {
        let p = (b as u64).pow((d - i) as u32);
        let half = p / b as u64;
        let yi = ((m % p) + half) % p;
        y[i - 1] = yi as f64 / p as f64;
        z[i - 1] = (yi + 1) as f64 / p as f64;
    }
    y[d - 1] = 1.0;
    z[d - 1] = 0.0;
    (y, z)
}

/// Circulant variates: `d` circular shifts of the solved first row on the
/// circulant graph `C_d(offsets)`.
pub fn ccv_segment_set(d: usize, offsets: &[usize]) -> Result<SegmentSet> {
    let row = optimizer::solve_circulant(d, offsets, SolverOptions::default())?;
    let edges = optimizer::circulant_edges(d, offsets)?;
    let mut coordinates = vec![vec![0.0; d]; d];
    for k in 0..d {
        for i in 0..d {
            coordinates[k][i] = row[(i + k) % d];
        }
    }
    build_segment_set(coordinates, edges)
}

/// Latin hypercube segment set: `2 d!` vertices indexed by the permutations
/// of `0..d`, edges `(k, d!+k)`. Meant for the generalized representation
/// with iid V.
pub fn lh_segment_set(d: usize) -> Result<SegmentSet> {
    if d < 2 {
        return Err(Error::BadConstruction("lh needs d >= 2".into()));
    }
    if d > LH_MAX_DIMENSION {
        return Err(Error::SizeLimit {
            requested: 2 * factorial(d),
            cap: 2 * factorial(LH_MAX_DIMENSION),
            unit: "vertices",
        });
    }
    let perms = permutations_lex(d);
    let nf = perms.len();
    let df = d as f64;
    let mut coordinates = vec![vec![0.0; 2 * nf]; d];
    for (k, perm) in perms.iter().enumerate() {
        for l in 0..d {
            coordinates[l][k] = (perm[l] as f64 + 1.0) / df;
            coordinates[l][nf + k] = perm[l] as f64 / df;
        }
    }
    let edges = (1..=nf).map(|k| (k, nf + k)).collect();
    build_segment_set(coordinates, edges)
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All permutations of `0..d` in lexicographic order.
pub fn permutations_lex(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(factorial(d) as usize);
    let mut current: Vec<usize> = (0..d).collect();
    loop {
        out.push(current.clone());
        // next_permutation
        let Some(i) = (0..d - 1).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..d).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// The strict 3-CTM map: (U1, U2, U3) as a function of one uniform, with
/// U1+U2+U3 = 3/2 identically.
pub fn gaffke3_map(v: f64) -> [f64; 3] {
    if v < 0.5 {
        [v, v + 0.5, 1.0 - 2.0 * v]
    } else {
        [v, v - 0.5, 2.0 - 2.0 * v]
    }
}

/// One ILH iteration applied in place to row-major draws: each row gets its
/// own independent permutation and moves to `(perm + row) / d`.
pub fn ilh_iterate_rows(rows: &mut [f64], d: usize, rng: &mut ChaCha8Rng) {
    assert_eq!(rows.len() % d, 0);
    for row in rows.chunks_exact_mut(d) {
        let perm = random_permutation(d, rng);
        for l in 0..d {
            row[l] = (perm[l] as f64 + row[l]) / d as f64;
        }
    }
}

/// One step of the 3-dimensional superstar map on `[-1,1]^3`:
/// `x' = x/3 + (2/3) v` where `v` is the permutation of `(-1,0,1)` given by
/// `perm` (entries are a permutation of `0..3`, mapped to `perm - 1`).
pub fn superstar_step(x: [f64; 3], perm: &[usize; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = x[i] / 3.0 + 2.0 / 3.0 * (perm[i] as f64 - 1.0);
    }
    out
}

/// Superstar trajectory of length `t` from `x0` (coordinates in [-1,1]
/// summing to 0), drawing one random permutation per step.
pub fn superstar_trajectory(x0: [f64; 3], t: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(t + 1);
    out.push(x0);
    let mut x = x0;
    for _ in 0..t {
        let p = random_permutation(3, rng);
        x = superstar_step(x, &[p[0], p[1], p[2]]);
        out.push(x);
    }
    out
}

/// Flat JSON descriptor for a construction.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct ConstructionSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<usize>>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<ConstructionSpec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<ConstructionSpec>>,
    #[serde(default)]
    pub exchangeable: bool,
}

/// A validated catalog entry.
#[derive(Debug, Clone)]
pub struct Construction {
    pub kind: Kind,
    /// Wrap draws with a uniform random coordinate permutation.
    pub exchangeable: bool,
}

#[derive(Debug, Clone)]
pub enum Kind {
    AntitheticPair,
    Rotation { d: usize },
    Aj { d: usize, b: u32 },
    Gaffke3,
    GaffkeD { d: usize },
    Ccv { d: usize, offsets: Vec<usize> },
    Rbs { d: usize },
    Lh { d: usize },
    Ilh { d: usize, t: usize, base: Option<Box<Construction>> },
    Custom { path: String, set: SegmentSet },
    Composed { parts: Vec<Construction> },
}

impl Construction {
    pub fn new(kind: Kind) -> Self {
        Construction {
            kind,
            exchangeable: false,
        }
    }

    pub fn exchangeable(mut self) -> Self {
        self.exchangeable = true;
        self
    }

    pub fn from_spec(spec: &ConstructionSpec) -> Result<Construction> {
        let need_d = || {
            spec.d.ok_or_else(|| {
                Error::BadConstruction(format!("kind `{}` needs a dimension d", spec.kind))
            })
        };
        let kind = match spec.kind.as_str() {
            "antithetic-pair" => Kind::AntitheticPair,
            "rotation" => Kind::Rotation { d: need_d()? },
            "aj-base-b" | "aj" => Kind::Aj {
                d: need_d()?,
                b: spec.b.unwrap_or(2),
            },
            "gaffke3" => Kind::Gaffke3,
            "gaffke-d" => Kind::GaffkeD { d: need_d()? },
            "ccv" => Kind::Ccv {
                d: need_d()?,
                offsets: spec.offsets.clone().unwrap_or_else(|| vec![1]),
            },
            "rbs" => Kind::Rbs { d: need_d()? },
            "lh" => Kind::Lh { d: need_d()? },
            "ilh" => Kind::Ilh {
                d: need_d()?,
                t: spec.t.unwrap_or(1),
                base: match &spec.base {
                    Some(b) => Some(Box::new(Construction::from_spec(b)?)),
                    None => None,
                },
            },
            "custom" => {
                let path = spec.path.clone().ok_or_else(|| {
                    Error::BadConstruction("custom kind needs a segment-set path".into())
                })?;
                let text = std::fs::read_to_string(&path)?;
                Kind::Custom {
                    path,
                    set: SegmentSet::from_json(&text)?,
                }
            }
            "composed" => {
                let parts = spec
                    .parts
                    .as_ref()
                    .ok_or_else(|| Error::BadConstruction("composed kind needs parts".into()))?;
                if parts.len() < 2 {
                    return Err(Error::BadConstruction(
                        "composed kind needs at least two parts".into(),
                    ));
                }
                Kind::Composed {
                    parts: parts
                        .iter()
                        .map(Construction::from_spec)
                        .collect::<Result<_>>()?,
                }
            }
            other => return Err(Error::UnknownKind(other.to_string())),
        };
        let c = Construction {
            kind,
            exchangeable: spec.exchangeable,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn to_spec(&self) -> ConstructionSpec {
        let mut spec = ConstructionSpec {
            exchangeable: self.exchangeable,
            ..Default::default()
        };
        match &self.kind {
            Kind::AntitheticPair => spec.kind = "antithetic-pair".into(),
            Kind::Rotation { d } => {
                spec.kind = "rotation".into();
                spec.d = Some(*d);
            }
            Kind::Aj { d, b } => {
                spec.kind = "aj-base-b".into();
                spec.d = Some(*d);
                spec.b = Some(*b);
            }
            Kind::Gaffke3 => spec.kind = "gaffke3".into(),
            Kind::GaffkeD { d } => {
                spec.kind = "gaffke-d".into();
                spec.d = Some(*d);
            }
            Kind::Ccv { d, offsets } => {
                spec.kind = "ccv".into();
                spec.d = Some(*d);
                spec.offsets = Some(offsets.clone());
            }
            Kind::Rbs { d } => {
                spec.kind = "rbs".into();
                spec.d = Some(*d);
            }
            Kind::Lh { d } => {
                spec.kind = "lh".into();
                spec.d = Some(*d);
            }
            Kind::Ilh { d, t, base } => {
                spec.kind = "ilh".into();
                spec.d = Some(*d);
                spec.t = Some(*t);
                spec.base = base.as_ref().map(|b| Box::new(b.to_spec()));
            }
            Kind::Custom { path, .. } => {
                spec.kind = "custom".into();
                spec.path = Some(path.clone());
            }
            Kind::Composed { parts } => {
                spec.kind = "composed".into();
                spec.parts = Some(parts.iter().map(|p| p.to_spec()).collect());
            }
        }
        spec
    }

    fn validate(&self) -> Result<()> {
        match &self.kind {
            Kind::Rotation { d } | Kind::GaffkeD { d } | Kind::Rbs { d } | Kind::Lh { d }
                if *d < 2 =>
            {
                Err(Error::BadConstruction("d must be at least 2".into()))
            }
            Kind::Aj { d, b } => {
                if *d < 2 || *b < 1 {
                    Err(Error::BadConstruction("aj needs d >= 2 and b >= 1".into()))
                } else {
                    Ok(())
                }
            }
            Kind::Ccv { d, offsets } => {
                optimizer::circulant_edges(*d, offsets).map(|_| ())
            }
            Kind::Ilh { d, t, base } => {
                if *d < 2 || *t < 1 {
                    return Err(Error::BadConstruction("ilh needs d >= 2 and T >= 1".into()));
                }
                if let Some(b) = base {
                    if b.dimension() != *d {
                        return Err(Error::DimensionMismatch {
                            left: *d,
                            right: b.dimension(),
                        });
                    }
                }
                Ok(())
            }
            Kind::Composed { parts } => {
                let d = parts[0].dimension();
                for p in parts {
                    if p.dimension() != d {
                        return Err(Error::DimensionMismatch {
                            left: d,
                            right: p.dimension(),
                        });
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn dimension(&self) -> usize {
        match &self.kind {
            Kind::AntitheticPair => 2,
            Kind::Gaffke3 => 3,
            Kind::Rotation { d }
            | Kind::Aj { d, .. }
            | Kind::GaffkeD { d }
            | Kind::Ccv { d, .. }
            | Kind::Rbs { d }
            | Kind::Lh { d }
            | Kind::Ilh { d, .. } => *d,
            Kind::Custom { set, .. } => set.d,
            Kind::Composed { parts } => parts[0].dimension(),
        }
    }

    /// Whether this construction is advertised as strictly d-CTM.
    pub fn advertises_ctm(&self) -> bool {
        match &self.kind {
            Kind::AntitheticPair | Kind::Gaffke3 | Kind::GaffkeD { .. } | Kind::Rbs { .. } => true,
            // d = 2 degenerates to the antithetic pair for every base.
            Kind::Aj { d, b } => *b == 2 || *d == 2,
            Kind::Ccv { .. } => true,
            Kind::Ilh { base, .. } => base.as_ref().is_some_and(|b| b.advertises_ctm()),
            Kind::Composed { parts } => parts.iter().all(|p| p.advertises_ctm()),
            Kind::Rotation { .. } | Kind::Lh { .. } | Kind::Custom { .. } => false,
        }
    }

    /// The segment set underlying this construction, when the literature
    /// gives one. Mixing constructions (gaffke-d, rbs) have none.
    pub fn segment_set(&self) -> Result<SegmentSet> {
        match &self.kind {
            Kind::AntitheticPair => {
                build_segment_set(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![(1, 2)])
            }
            Kind::Rotation { d } => rotation_segment_set(*d),
            Kind::Aj { d, b } => aj_segment_set(*d, *b),
            Kind::Gaffke3 => aj_segment_set(3, 2),
            Kind::Ccv { d, offsets } => ccv_segment_set(*d, offsets),
            Kind::Lh { d } => lh_segment_set(*d),
            Kind::Custom { set, .. } => Ok(set.clone()),
            Kind::Ilh { d, t, base } => {
                // T-fold deterministic composition of the Latin hypercube
                // structure over the base set (iid base: the LH set itself,
                // meant for the generalized representation).
                let lh = lh_segment_set(*d)?;
                let mut acc = match base {
                    Some(b) => transforms::deterministic_compose(&lh, &b.segment_set()?)?,
                    None => lh.clone(),
                };
                let extra = if base.is_some() { *t } else { t - 1 };
                for _ in 0..extra {
                    acc = transforms::deterministic_compose(&lh, &acc)?;
                }
                Ok(acc)
            }
            Kind::Composed { parts } => {
                let sets: Vec<SegmentSet> = parts
                    .iter()
                    .map(|p| p.segment_set())
                    .collect::<Result<_>>()?;
                let mut acc = sets[0].clone();
                for s in &sets[1..] {
                    acc = transforms::stochastic_compose(&acc, s)?;
                }
                Ok(acc)
            }
            Kind::GaffkeD { .. } | Kind::Rbs { .. } => Err(Error::BadConstruction(
                "this construction mixes independent uniforms and has no single segment set"
                    .into(),
            )),
        }
    }

    /// A stateless sampler for this construction (exchangeable-wrapped when
    /// the flag is set).
    pub fn sampler(&self) -> Result<Box<dyn Sampler>> {
        let inner: Box<dyn Sampler> = match &self.kind {
            Kind::AntitheticPair => Box::new(AntitheticPairSampler),
            Kind::Rotation { d } => Box::new(RotationSampler { d: *d }),
            Kind::Aj { d, b } => Box::new(AjSampler::new(*d, *b)?),
            Kind::Gaffke3 => Box::new(Gaffke3Sampler),
            Kind::GaffkeD { d } => Box::new(GaffkeDSampler { d: *d }),
            Kind::Ccv { .. } | Kind::Custom { .. } | Kind::Composed { .. } => {
                Box::new(SegmentSampler::new(self.segment_set()?)?)
            }
            Kind::Rbs { d } => Box::new(RbsSampler::new(*d)),
            Kind::Lh { d } => Box::new(IlhSampler {
                d: *d,
                t: 1,
                base: None,
            }),
            Kind::Ilh { d, t, base } => Box::new(IlhSampler {
                d: *d,
                t: *t,
                base: match base {
                    Some(b) => Some(b.sampler()?),
                    None => None,
                },
            }),
        };
        if self.exchangeable {
            Ok(Box::new(Exchangeable(inner)))
        } else {
            Ok(inner)
        }
    }

    pub fn label(&self) -> String {
        let base = match &self.kind {
            Kind::AntitheticPair => "antithetic-pair".to_string(),
            Kind::Rotation { d } => format!("rotation(d={d})"),
            Kind::Aj { d, b } => format!("aj(d={d},b={b})"),
            Kind::Gaffke3 => "gaffke3".to_string(),
            Kind::GaffkeD { d } => format!("gaffke-d(d={d})"),
            Kind::Ccv { d, offsets } => format!("ccv(d={d},{offsets:?})"),
            Kind::Rbs { d } => format!("rbs(d={d})"),
            Kind::Lh { d } => format!("lh(d={d})"),
            Kind::Ilh { d, t, base } => match base {
                Some(b) => format!("ilh(d={d},T={t},base={})", b.label()),
                None => format!("ilh(d={d},T={t})"),
            },
            Kind::Custom { path, .. } => format!("custom({path})"),
            Kind::Composed { parts } => {
                let inner: Vec<String> = parts.iter().map(|p| p.label()).collect();
                format!("composed[{}]", inner.join(" | "))
            }
        };
        if self.exchangeable {
            format!("{base}+exch")
        } else {
            base
        }
    }
}

impl Sampler for Box<dyn Sampler> {
    fn dimension(&self) -> usize {
        self.as_ref().dimension()
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        self.as_ref().sample_into(rng, out)
    }
}

struct AntitheticPairSampler;

impl Sampler for AntitheticPairSampler {
    fn dimension(&self) -> usize {
        2
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let v: f64 = rng.random();
        out[0] = v;
        out[1] = 1.0 - v;
    }
}

struct RotationSampler {
    d: usize,
}

impl Sampler for RotationSampler {
    fn dimension(&self) -> usize {
        self.d
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let u: f64 = rng.random();
        out[0] = u;
        for l in 2..=self.d {
            out[l - 1] = ((l - 1) as f64 / self.d as f64 + u).fract();
        }
    }
}

/// Direct base-b displacement sampler.
///
/// For `b = 2` the construction displaces the binary digits of `U_1`, so a
/// random bit stream drives it at any dimension without overflow: coordinate
/// `i` flips bit `i-1` and keeps the tail. Other bases run the segment
/// arithmetic on 64-bit integers, which caps `b^(d-2)`.
enum AjSampler {
    Bits { d: usize },
    Integer { d: usize, b: u32, segments: u64 },
}

impl AjSampler {
    fn new(d: usize, b: u32) -> Result<Self> {
        if b == 2 && d > 2 {
            return Ok(AjSampler::Bits { d });
        }
        let bits = (d.saturating_sub(2)) as f64 * (b as f64).log2();
        if bits > 62.0 {
            return Err(Error::SizeLimit {
                requested: (b as u128).pow(d as u32 - 2),
                cap: 1u128 << 62,
                unit: "segments",
            });
        }
        Ok(AjSampler::Integer {
            d,
            b,
            segments: (b as u64).pow(d as u32 - 2),
        })
    }
}

impl Sampler for AjSampler {
    fn dimension(&self) -> usize {
        match self {
            AjSampler::Bits { d } | AjSampler::Integer { d, .. } => *d,
        }
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        match *self {
            AjSampler::Bits { d } => aj2_bits_sample(d, rng, out),
            AjSampler::Integer { d, b, segments } => {
                let m = rng.random_range(0..segments);
                let v: f64 = rng.random();
                let (y, z) = aj_vertex_pair(d, b, m);
                for l in 0..d {
                    out[l] = z[l] * v + y[l] * (1.0 - v);
                }
            }
        }
    }
}

/// Bit-stream sampler for base 2: bits `c_1..c_{d-2}` index the segment and
/// the tail bits are the position V on it.
fn aj2_bits_sample(d: usize, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let total_bits = d - 2 + 64;
    let words = total_bits / 64 + 2;
    let bits: Vec<u64> = (0..words).map(|_| rng.random()).collect();
    let bit = |idx: usize| -> u64 { (bits[idx / 64] >> (63 - idx % 64)) & 1 };
    // 64 bits starting at `idx`, as a fraction in [0,1).
    let frac = |idx: usize| -> f64 {
        let w = idx / 64;
        let off = idx % 64;
        let x = if off == 0 {
            bits[w]
        } else {
            (bits[w] << off) | (bits[w + 1] >> (64 - off))
        };
        x as f64 * (0.5f64).powi(64)
    };
    out[0] = frac(0);
    for i in 2..d {
        out[i - 1] = (1 - bit(i - 2)) as f64 * 0.5 + frac(i - 1) * 0.5;
    }
    out[d - 1] = 1.0 - frac(d - 2);
}

struct Gaffke3Sampler;

impl Sampler for Gaffke3Sampler {
    fn dimension(&self) -> usize {
        3
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        out.copy_from_slice(&gaffke3_map(rng.random()));
    }
}

/// Independent antithetic pairs, plus the 3-CTM triple on a fresh uniform
/// when `d` is odd.
struct GaffkeDSampler {
    d: usize,
}

impl Sampler for GaffkeDSampler {
    fn dimension(&self) -> usize {
        self.d
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let pairs = if self.d.is_multiple_of(2) {
            self.d / 2
        } else {
            (self.d - 3) / 2
        };
        for p in 0..pairs {
            let v: f64 = rng.random();
            out[2 * p] = v;
            out[2 * p + 1] = 1.0 - v;
        }
        if self.d % 2 == 1 {
            let triple = gaffke3_map(rng.random());
            out[self.d - 3..].copy_from_slice(&triple);
        }
    }
}

/// Degenerate random balanced sampling: one uniform spread over a shifted
/// grid, then a terminal random permutation. Distributionally equal to the
/// exchangeable circulant construction on `C_d({1})`, and the fastest way to
/// sample it.
struct RbsSampler {
    d: usize,
    /// Per-coordinate grid offsets `(c_l + 1) / 2`; coordinate `l` is
    /// `offset_l - slope * z1`.
    offsets: Vec<f64>,
    slope: f64,
}

impl RbsSampler {
    fn new(d: usize) -> Self {
        let offsets = (1..=d)
            .map(|l| (2.0 * l as f64 - 3.0) / (2.0 * (d as f64 - 1.0)))
            .collect();
        RbsSampler {
            d,
            offsets,
            slope: 1.0 / (2.0 * (d as f64 - 1.0)),
        }
    }
}

impl Sampler for RbsSampler {
    fn dimension(&self) -> usize {
        self.d
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let d = self.d;
        let z1 = 2.0 * rng.random::<f64>() - 1.0;
        out[0] = (z1 + 1.0) / 2.0;
        for l in 2..=d {
            out[l - 1] = self.offsets[l - 1] - self.slope * z1;
        }
        for i in (1..d).rev() {
            let j = rng.random_range(0..=i);
            out.swap(i, j);
        }
    }
}

/// `t` Latin hypercube iterations over a base draw (iid uniforms when no
/// base is given). `t = 1` with no base is the ordinary Latin hypercube.
struct IlhSampler {
    d: usize,
    t: usize,
    base: Option<Box<dyn Sampler>>,
}

impl Sampler for IlhSampler {
    fn dimension(&self) -> usize {
        self.d
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        match &self.base {
            Some(b) => b.sample_into(rng, out),
            None => IidUniform { d: self.d }.sample_into(rng, out),
        }
        for _ in 0..self.t {
            let perm = random_permutation(self.d, rng);
            for l in 0..self.d {
                out[l] = (perm[l] as f64 + out[l]) / self.d as f64;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_batch, stream_rng};

    #[test]
    fn rotation_set_matches_direct_sampler_supports() {
        let s = rotation_segment_set(2).unwrap();
        assert_eq!(s.n, 4);
        assert_eq!(s.edges, vec![(1, 3), (2, 4)]);
        let report = s.uniformity_residuals();
        assert!(report.is_standard_uniform(1e-12));
        assert!(!report.is_constant_sum(1e-10));
    }

    #[test]
    fn rotation_vertex_sums_vary() {
        for d in 2..=5 {
            let s = rotation_segment_set(d).unwrap();
            let sums: Vec<f64> = (1..=s.n).map(|k| s.vertex_sum(k)).collect();
            let spread = sums.iter().cloned().fold(f64::MIN, f64::max)
                - sums.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread > 0.5, "d = {d}: sums {sums:?}");
        }
    }

    #[test]
    fn aj32_segments_are_the_published_pair() {
        let s = aj_segment_set(3, 2).unwrap();
        assert_eq!(s.n, 4);
        assert_eq!(s.edges, vec![(1, 3), (2, 4)]);
        // Segment 1: (0, 1/2, 1) -> (1/2, 1, 0)
        let v1: Vec<f64> = (1..=3).map(|l| s.x(l, 1)).collect();
        let v3: Vec<f64> = (1..=3).map(|l| s.x(l, 3)).collect();
        assert_eq!(v1, vec![0.0, 0.5, 1.0]);
        assert_eq!(v3, vec![0.5, 1.0, 0.0]);
        // Segment 2: (1/2, 0, 1) -> (1, 1/2, 0)
        let v2: Vec<f64> = (1..=3).map(|l| s.x(l, 2)).collect();
        let v4: Vec<f64> = (1..=3).map(|l| s.x(l, 4)).collect();
        assert_eq!(v2, vec![0.5, 0.0, 1.0]);
        assert_eq!(v4, vec![1.0, 0.5, 0.0]);
    }

    #[test]
    fn aj_ctm_only_for_base_two() {
        for (b, expect_ctm) in [(2u32, true), (3, false), (4, false)] {
            let s = aj_segment_set(4, b).unwrap();
            let report = s.uniformity_residuals();
            assert!(report.is_standard_uniform(1e-10), "b = {b}");
            assert_eq!(report.is_constant_sum(1e-10), expect_ctm, "b = {b}");
        }
    }

    #[test]
    fn aj_size_limit() {
        assert!(matches!(
            aj_segment_set(30, 5),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn aj2_bitstream_matches_mod_arithmetic() {
        // For moderate d the digit-displacement sampler must agree with the
        // textbook formula evaluated from its own U_1.
        let mut rng = stream_rng(17, 0);
        for d in [3usize, 5, 9, 12] {
            let sampler = AjSampler::Bits { d };
            for _ in 0..200 {
                let mut u = vec![0.0; d];
                sampler.sample_into(&mut rng, &mut u);
                let u1 = u[0];
                for i in 2..d {
                    let direct = (2.0f64.powi(i as i32 - 2) * u1 + 0.5).fract();
                    assert!(
                        (u[i - 1] - direct).abs() < 1e-9,
                        "d={d} i={i}: {} vs {direct}",
                        u[i - 1]
                    );
                }
                let last = 1.0 - (2.0f64.powi(d as i32 - 2) * u1).fract();
                assert!((u[d - 1] - last).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn aj2_sampler_sums_to_half_d() {
        let mut rng = stream_rng(3, 0);
        for d in [3usize, 4, 64, 300] {
            let sampler = AjSampler::new(d, 2).unwrap();
            let mut u = vec![0.0; d];
            for _ in 0..100 {
                sampler.sample_into(&mut rng, &mut u);
                let sum: f64 = u.iter().sum();
                assert!(
                    (sum - d as f64 / 2.0).abs() < 1e-10,
                    "d = {d}: sum = {sum}"
                );
            }
        }
    }

    #[test]
    fn ccv_c3_is_the_published_triangle() {
        let s = ccv_segment_set(3, &[1]).unwrap();
        let v1: Vec<f64> = (1..=3).map(|l| s.x(l, 1)).collect();
        let v2: Vec<f64> = (1..=3).map(|l| s.x(l, 2)).collect();
        let v3: Vec<f64> = (1..=3).map(|l| s.x(l, 3)).collect();
        assert_eq!(v1, vec![0.0, 0.5, 1.0]);
        assert_eq!(v2, vec![0.5, 1.0, 0.0]);
        assert_eq!(v3, vec![1.0, 0.0, 0.5]);
        let report = s.uniformity_residuals();
        assert!(report.is_standard_uniform(1e-9));
        assert!(report.is_constant_sum(1e-10));
    }

    #[test]
    fn ccv_c4_offset2_first_row() {
        let s = ccv_segment_set(4, &[2]).unwrap();
        let row = &s.coordinates[0];
        let want = [0.0, 0.0, 1.0, 1.0];
        for (got, want) in row.iter().zip(want) {
            assert!((got - want).abs() < 1e-8, "{row:?}");
        }
    }

    #[test]
    fn ccv_d2_is_antithetic_pair() {
        let s = ccv_segment_set(2, &[1]).unwrap();
        assert_eq!(s.n, 2);
        let report = s.uniformity_residuals();
        assert!(report.is_constant_sum(1e-12));
    }

    #[test]
    fn gaffke3_values() {
        assert_eq!(gaffke3_map(0.0), [0.0, 0.5, 1.0]);
        let u = gaffke3_map(0.75);
        assert!((u[0] - 0.75).abs() < 1e-15);
        assert!((u[1] - 0.25).abs() < 1e-15);
        assert!((u[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gaffke_d_constant_sum() {
        for d in [2usize, 4, 5, 7] {
            let c = Construction::new(Kind::GaffkeD { d });
            let batch = sample_batch(&*c.sampler().unwrap(), 10_000, 5, 0, "gr");
            for row in batch.rows() {
                let sum: f64 = row.iter().sum();
                assert!((sum - d as f64 / 2.0).abs() < 1e-12, "d = {d}");
            }
        }
    }

    #[test]
    fn rbs_constant_sum_and_seeded() {
        let c = Construction::new(Kind::Rbs { d: 4 });
        let batch = sample_batch(&*c.sampler().unwrap(), 10_000, 9, 0, "rbs");
        for row in batch.rows() {
            let sum: f64 = row.iter().sum();
            assert!((sum - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lh_set_counts() {
        let s = lh_segment_set(3).unwrap();
        assert_eq!(s.n, 12);
        assert_eq!(s.edge_count(), 6);
        assert!(matches!(lh_segment_set(9), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn lh_set_d2_boxes() {
        let s = lh_segment_set(2).unwrap();
        // Permutations (0,1) and (1,0): vertices (1/2,1),(1,1/2),(0,1/2),(1/2,0).
        assert_eq!(s.coordinates[0], vec![0.5, 1.0, 0.0, 0.5]);
        assert_eq!(s.coordinates[1], vec![1.0, 0.5, 0.5, 0.0]);
        assert_eq!(s.edges, vec![(1, 3), (2, 4)]);
    }

    #[test]
    fn ilh_iteration_preserves_sum_and_range() {
        let c = Construction::new(Kind::Ccv {
            d: 3,
            offsets: vec![1],
        });
        let mut batch = sample_batch(&*c.sampler().unwrap(), 5_000, 21, 0, "ccv");
        let mut rng = stream_rng(22, 0);
        ilh_iterate_rows(&mut batch.samples, 3, &mut rng);
        for row in batch.rows() {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.5).abs() < 1e-12);
            assert!(row.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn ilh_zero_row_maps_to_grid() {
        let mut rows = vec![0.0, 0.0, 0.0];
        // identity permutation comes out of a fixed seed? force by direct map
        for (l, x) in rows.iter_mut().enumerate() {
            *x = (l as f64 + *x) / 3.0;
        }
        assert_eq!(rows, vec![0.0, 1.0 / 3.0, 2.0 / 3.0]);
    }

    #[test]
    fn superstar_steps_match_ilh_coupling() {
        // U = (X+1)/2 turns the superstar map into the d=3 ILH iteration
        // with the same permutation.
        let mut rng = stream_rng(7, 0);
        let mut x = [0.0, 0.0, 0.0];
        let mut u = [0.5, 0.5, 0.5];
        for _ in 0..50 {
            let p = random_permutation(3, &mut rng);
            let perm = [p[0], p[1], p[2]];
            x = superstar_step(x, &perm);
            for l in 0..3 {
                u[l] = (perm[l] as f64 + u[l]) / 3.0;
            }
            for l in 0..3 {
                assert!(((x[l] + 1.0) / 2.0 - u[l]).abs() < 1e-15);
            }
            let sum: f64 = x.iter().sum();
            assert!(sum.abs() < 1e-12);
        }
    }

    #[test]
    fn superstar_plain_step() {
        let x1 = superstar_step([0.0, 0.0, 0.0], &[0, 1, 2]);
        assert_eq!(x1, [-2.0 / 3.0, 0.0, 2.0 / 3.0]);
    }

    #[test]
    fn spec_json_round_trip() {
        let c = Construction::new(Kind::Ilh {
            d: 3,
            t: 2,
            base: Some(Box::new(Construction::new(Kind::Ccv {
                d: 3,
                offsets: vec![1],
            }))),
        })
        .exchangeable();
        let spec = c.to_spec();
        let text = serde_json::to_string(&spec).unwrap();
        let back: ConstructionSpec = serde_json::from_str(&text).unwrap();
        let c2 = Construction::from_spec(&back).unwrap();
        assert_eq!(c2.label(), c.label());
    }

    #[test]
    fn unknown_kind_rejected() {
        let spec = ConstructionSpec {
            kind: "frobnicate".into(),
            ..Default::default()
        };
        assert!(matches!(
            Construction::from_spec(&spec),
            Err(Error::UnknownKind(_))
        ));
    }
}
