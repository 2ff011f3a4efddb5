//! Draw generation: common-V and generalized segment sampling, generalized
//! Latin hypercube matrices, joint and conditional CDFs, and the seeded
//! stream plumbing that makes every batch bit-reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segments::SegmentSet;

/// Draws per RNG chunk when batch generation is parallelized. Each chunk has
/// its own stream, so the merged batch does not depend on scheduling.
const CHUNK: usize = 8192;

/// Streams are split as `(user stream) * 2^20 + chunk index`.
const STREAM_CHUNKS: u64 = 1 << 20;

/// A seedable generator with 2^64 addressable streams.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A stateless sampler of d-dimensional vectors with Uniform(0,1) marginals.
///
/// Samplers take the RNG explicitly; parallel use means one stream per
/// worker.
pub trait Sampler: Send + Sync {
    fn dimension(&self) -> usize;
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]);

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        self.sample_into(rng, &mut out);
        out
    }
}

/// Independent Uniform(0,1) coordinates.
pub struct IidUniform {
    pub d: usize,
}

impl Sampler for IidUniform {
    fn dimension(&self) -> usize {
        self.d
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        for x in out.iter_mut() {
            *x = rng.random();
        }
    }
}

/// All coordinates equal to one uniform (the hypercube diagonal).
pub struct Comonotone {
    pub d: usize,
}

impl Sampler for Comonotone {
    fn dimension(&self) -> usize {
        self.d
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let v: f64 = rng.random();
        out.fill(v);
    }
}

/// Common-V sampling on a segment set: pick an edge uniformly, then a
/// uniform point on it.
pub struct SegmentSampler {
    set: SegmentSet,
}

impl SegmentSampler {
    pub fn new(set: SegmentSet) -> Result<Self> {
        if set.edges.is_empty() {
            return Err(Error::EmptyEdgeSet);
        }
        Ok(SegmentSampler { set })
    }

    pub fn set(&self) -> &SegmentSet {
        &self.set
    }
}

impl Sampler for SegmentSampler {
    fn dimension(&self) -> usize {
        self.set.d
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let v: f64 = rng.random();
        let w: f64 = rng.random();
        let k = pick_edge(self.set.edge_count(), w);
        let (i, j) = self.set.edge(k);
        for l in 1..=self.set.d {
            out[l - 1] = self.set.x(l, i) * v + (1.0 - v) * self.set.x(l, j);
        }
    }
}

/// Wraps a sampler with a uniform random coordinate permutation, yielding the
/// exchangeable version of the construction.
pub struct Exchangeable<S>(pub S);

impl<S: Sampler> Sampler for Exchangeable<S> {
    fn dimension(&self) -> usize {
        self.0.dimension()
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        self.0.sample_into(rng, out);
        // Fisher-Yates on the freshly drawn coordinates.
        for i in (1..out.len()).rev() {
            let j = rng.random_range(0..=i);
            out.swap(i, j);
        }
    }
}

/// Edge choice `K = min(floor(|E| W) + 1, |E|)` as a 1-based index.
///
/// The clamp covers the measure-zero event `W = 1`, which floating point can
/// produce.
fn pick_edge(edge_count: usize, w: f64) -> usize {
    (((edge_count as f64 * w) as usize) + 1).min(edge_count)
}

/// A batch of draws with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DrawBatch {
    /// Row-major samples, `n` rows of `d`.
    pub samples: Vec<f64>,
    pub n: usize,
    pub d: usize,
    /// Human-readable construction descriptor.
    pub construction: String,
    pub seed: u64,
    pub stream: u64,
}

impl DrawBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.samples[i * self.d..(i + 1) * self.d]
    }

    pub fn column(&self, l: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.samples[i * self.d + l]).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks_exact(self.d)
    }
}

/// Generate `n` draws from any sampler, chunk-parallel and reproducible for a
/// given `(seed, stream)`.
pub fn sample_batch(
    sampler: &dyn Sampler,
    n: usize,
    seed: u64,
    stream: u64,
    label: &str,
) -> DrawBatch {
    let d = sampler.dimension();
    let mut samples = vec![0.0; n * d];
    samples
        .par_chunks_mut(CHUNK * d)
        .enumerate()
        .for_each(|(chunk_idx, block)| {
            let mut rng = stream_rng(seed, stream * STREAM_CHUNKS + chunk_idx as u64);
            for row in block.chunks_exact_mut(d) {
                sampler.sample_into(&mut rng, row);
            }
        });
    DrawBatch {
        samples,
        n,
        d,
        construction: label.to_string(),
        seed,
        stream,
    }
}

/// Common-V draws from a segment set (representation with one shared V).
///
/// The set must pass the uniformity checks; use [`draw_unchecked`] to skip
/// the validation.
pub fn draw(s: &SegmentSet, n: usize, seed: u64) -> Result<DrawBatch> {
    let report = s.uniformity_residuals();
    if !report.is_standard_uniform(1e-8) {
        return Err(Error::Infeasible(
            "segment set fails the uniformity checks; use draw_unchecked to force".into(),
        ));
    }
    draw_unchecked(s, n, seed, 0)
}

pub fn draw_unchecked(s: &SegmentSet, n: usize, seed: u64, stream: u64) -> Result<DrawBatch> {
    let sampler = SegmentSampler::new(s.clone())?;
    Ok(sample_batch(&sampler, n, seed, stream, "segment-set"))
}

/// Generalized draws: one shared edge choice per draw, but coordinate `l`
/// uses the `l`-th component of a vector from `v_source`.
pub fn draw_generalized(
    s: &SegmentSet,
    v_source: &dyn Sampler,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<DrawBatch> {
    if s.edges.is_empty() {
        return Err(Error::EmptyEdgeSet);
    }
    if v_source.dimension() != s.d {
        return Err(Error::DimensionMismatch {
            left: s.d,
            right: v_source.dimension(),
        });
    }
    let d = s.d;
    let mut samples = vec![0.0; n * d];
    samples
        .par_chunks_mut(CHUNK * d)
        .enumerate()
        .for_each(|(chunk_idx, block)| {
            let mut rng = stream_rng(seed, stream * STREAM_CHUNKS + chunk_idx as u64);
            let mut v = vec![0.0; d];
            for row in block.chunks_exact_mut(d) {
                let w: f64 = rng.random();
                let k = pick_edge(s.edge_count(), w);
                let (i, j) = s.edge(k);
                v_source.sample_into(&mut rng, &mut v);
                for l in 1..=d {
                    row[l - 1] = s.x(l, i) * v[l - 1] + s.x(l, j) * (1.0 - v[l - 1]);
                }
            }
        });
    Ok(DrawBatch {
        samples,
        n,
        d,
        construction: "generalized-segment-set".into(),
        seed,
        stream,
    })
}

/// A generalized Latin hypercube sample: `p` rows, each built from an
/// independent permutation and an independent base vector.
#[derive(Debug, Clone)]
pub struct GlhSample {
    /// Row-major `p x d` matrix; row `i` is one stratified coordinate.
    pub matrix: Vec<f64>,
    pub p: usize,
    pub d: usize,
    pub base: String,
    /// Permutations actually used (kept for audit).
    pub permutations: Vec<Vec<usize>>,
}

impl GlhSample {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.d..(i + 1) * self.d]
    }

    /// Column `l`: the d-th point of the sample as a `p`-vector.
    pub fn point(&self, l: usize) -> Vec<f64> {
        (0..self.p).map(|i| self.matrix[i * self.d + l]).collect()
    }
}

/// Draw a GLH sample with the given base measure for the V vectors.
pub fn glh_sample(p: usize, d: usize, base: &dyn Sampler, seed: u64, stream: u64) -> GlhSample {
    let mut rng = stream_rng(seed, stream);
    glh_sample_with_rng(p, d, base, &mut rng)
}

pub fn glh_sample_with_rng(
    p: usize,
    d: usize,
    base: &dyn Sampler,
    rng: &mut ChaCha8Rng,
) -> GlhSample {
    assert_eq!(base.dimension(), d, "base sampler dimension must equal d");
    let mut matrix = vec![0.0; p * d];
    let mut permutations = Vec::with_capacity(p);
    let mut v = vec![0.0; d];
    for i in 0..p {
        let perm = random_permutation(d, rng);
        base.sample_into(rng, &mut v);
        for l in 0..d {
            let strat = perm[l] as f64;
            matrix[i * d + l] = ((strat + 1.0) / d as f64) * v[l] + (strat / d as f64) * (1.0 - v[l]);
        }
        permutations.push(perm);
    }
    GlhSample {
        matrix,
        p,
        d,
        base: "glh".into(),
        permutations,
    }
}

/// Uniform random permutation of `0..d`.
pub fn random_permutation(d: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Conditional CDF `P(U <= u | K = k)` for the common-V representation.
///
/// Coordinates split by the sign of `x_{l,i(k)} - x_{l,j(k)}` into the
/// increasing and decreasing sets; the conditional copula is the Frechet
/// bound `max(v+ + v- - 1, 0)` between the two blocks.
pub fn conditional_cdf(s: &SegmentSet, k: usize, u: &[f64]) -> Result<f64> {
    assert_eq!(u.len(), s.d);
    let (i, j) = s.edge(k);
    let mut v_plus = 1.0f64;
    let mut v_minus = 1.0f64;
    for l in 1..=s.d {
        let (alpha, beta) = s.conditional_support(k, l)?;
        let v = ((u[l - 1] - alpha) / (beta - alpha)).clamp(0.0, 1.0);
        if s.x(l, i) - s.x(l, j) >= 0.0 {
            v_plus = v_plus.min(v);
        } else {
            v_minus = v_minus.min(v);
        }
    }
    Ok((v_plus + v_minus - 1.0).max(0.0))
}

/// Joint CDF of the common-V representation: average of the conditional CDFs
/// over the edge choice.
pub fn joint_cdf(s: &SegmentSet, u: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for k in 1..=s.edge_count() {
        total += conditional_cdf(s, k, u)?;
    }
    Ok(total / s.edge_count() as f64)
}
