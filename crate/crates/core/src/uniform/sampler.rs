//! Exact Boltzmann sampler for `M_q`: the multiplicity of part `k` is
//! geometric with `P(r_k = m) = (1 - q^k) q^{km}`, independently in `k`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partitions::Partition;

/// Samples per independent generator stream in [`sample_many`].
pub const CHUNK: usize = 8192;
pub const DEFAULT_TAIL_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct UniformSampler {
    q: f64,
    /// `dists[k - 1]` draws the multiplicity of part `k`.
    dists: Vec<Geometric>,
}

impl UniformSampler {
    /// Parts above `K` are never drawn, where `K` is the least value with
    /// `Σ_{k>K} q^k = q^{K+1}/(1-q) < tail_eps`.
    pub fn new(q: f64, tail_eps: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("sampling needs q in (0, 1), got {q}")));
        }
        if !(tail_eps > 0.0 && tail_eps < 1.0) {
            return Err(Error::domain(format!("tail_eps must lie in (0, 1), got {tail_eps}")));
        }
        let mut dists = Vec::new();
        let mut qk = q;
        loop {
            if qk / (1.0 - q) < tail_eps {
                break;
            }
            let d = Geometric::new(1.0 - qk)
                .map_err(|e| Error::numeric(format!("geometric law for q^k = {qk}: {e}")))?;
            dists.push(d);
            qk *= q;
        }
        Ok(UniformSampler { q, dists })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Largest part that can be drawn.
    pub fn max_part(&self) -> usize {
        self.dists.len()
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Partition {
        let mut parts = Vec::new();
        for (i, d) in self.dists.iter().enumerate().rev() {
            let m = d.sample(rng);
            parts.extend(std::iter::repeat_n(i + 1, m as usize));
        }
        Partition::new(parts).expect("parts are emitted in decreasing order")
    }
}

/// A sampler paired with its own seeded generator.
#[derive(Clone, Debug)]
pub struct SampleStream {
    sampler: UniformSampler,
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(sampler: UniformSampler, seed: u64) -> Self {
        SampleStream { sampler, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn sampler(&self) -> &UniformSampler {
        &self.sampler
    }
}

impl Iterator for SampleStream {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        Some(self.sampler.sample(&mut self.rng))
    }
}

/// One partition drawn from the generator seeded with `seed`.
pub fn sample(q: f64, seed: u64) -> Result<Partition> {
    let sampler = UniformSampler::new(q, DEFAULT_TAIL_EPS)?;
    Ok(sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed)))
}

/// `count` samples. Chunk `c` of [`CHUNK`] samples uses stream `c` of the
/// generator seeded with `seed`, so the output does not depend on the number
/// of worker threads.
pub fn sample_many(sampler: &UniformSampler, count: usize, seed: u64) -> Vec<Partition> {
    let chunks = count.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<Partition>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(count - c * CHUNK);
            (0..len).map(|_| sampler.sample(&mut rng)).collect()
        })
        .collect();
    per_chunk.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_q() {
        assert!(UniformSampler::new(0.0, 1e-12).is_err());
        assert!(UniformSampler::new(1.0, 1e-12).is_err());
        assert!(sample(-0.1, 1).is_err());
    }

    #[test]
    fn tiny_q_gives_empty() {
        let s = UniformSampler::new(0.001, 1e-12).unwrap();
        let out = sample_many(&s, 100, 1);
        assert!(out.iter().filter(|p| p.is_empty()).count() >= 95);
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let s = UniformSampler::new(0.6, 1e-12).unwrap();
        let a = sample_many(&s, 20000, 42);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| sample_many(&s, 20000, 42));
        assert_eq!(a, b);
        assert_ne!(a, sample_many(&s, 20000, 43));
        assert_eq!(sample(0.6, 9).unwrap(), sample(0.6, 9).unwrap());
    }

    #[test]
    fn stream_matches_single_draws() {
        let s = UniformSampler::new(0.4, 1e-12).unwrap();
        let first = SampleStream::new(s.clone(), 11).next().unwrap();
        assert_eq!(first, sample(0.4, 11).unwrap());
        // Stream 0 of a seed is the plain generator, so sample_many starts the same way.
        let many = sample_many(&s, 5, 11);
        let streamed: Vec<_> = SampleStream::new(s, 11).take(5).collect();
        assert_eq!(many, streamed);
    }

    #[test]
    fn cutoff_respects_tail() {
        let s = UniformSampler::new(0.5, 1e-12).unwrap();
        let k = s.max_part() as i32;
        assert!(0.5f64.powi(k + 1) / 0.5 < 1e-12);
        assert!(0.5f64.powi(k) / 0.5 >= 1e-12);
    }

    #[test]
    fn single_box_frequency() {
        // P(λ = (1)) = q (q;q)_∞
        let q = 0.3f64;
        let s = UniformSampler::new(q, 1e-12).unwrap();
        let n = 40000;
        let hits = sample_many(&s, n, 5).iter().filter(|p| p.parts() == [1]).count();
        let poch: f64 = (1..200).map(|k| 1.0 - q.powi(k)).product();
        let p = q * poch;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - p).abs() < 4.0 * se);
    }
}
