//! Reproducible random-variate generation.
//!
//! Every sampler draws from a [`RandomStream`], a ChaCha8 generator keyed by
//! `(seed, stream_id)`. Bulk draws are cut into fixed-size chunks, each fed
//! by its own child stream, so results do not depend on the number of
//! worker threads.

use rand::distr::weighted::WeightedIndex;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lincomb::{GammaMixture, Law, LawSampler, LinearCombinationModel, MixtureRepresentation};

/// Number of variates produced by one child stream.
const CHUNK: usize = 1 << 14;

/// A seeded, reproducible stream of random bits.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Child stream `index` of a fresh key drawn from this stream.
    pub fn child(&mut self, index: u64) -> RandomStream {
        RandomStream::new(self.next_u64(), index)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// `n` values of `draw`, generated chunk by chunk in parallel.
///
/// Chunk `c` uses stream `c` of a key taken from `rng`, so the output depends
/// only on `rng` and `n`.
pub fn par_fill<T, F>(n: usize, rng: &mut RandomStream, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RandomStream) -> T + Sync,
{
    let key = rng.next_u64();
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            let mut r = RandomStream::new(key, c as u64);
            (0..len).map(|_| draw(&mut r)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Sample mean and its standard error.
///
/// Partial sums run over fixed chunks in parallel and are combined in order,
/// so the result does not depend on the number of threads.
pub fn mean_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let chunked = |f: &(dyn Fn(f64) -> f64 + Sync)| -> f64 {
        let parts: Vec<f64> = values.par_chunks(CHUNK).map(|c| c.iter().map(|&v| f(v)).sum()).collect();
        parts.iter().sum()
    };
    let mean = chunked(&|v| v) / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = chunked(&|v| (v - mean) * (v - mean)) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Draws of any [`Law`] as a sum of independent weighted gamma variates.
pub fn sample_law<L: Law>(law: &L, n: usize, rng: &mut RandomStream) -> Result<Vec<f64>> {
    let sampler = law.sampler()?;
    Ok(par_fill(n, rng, |r| sampler.draw(r)))
}

/// Draws of `T_n` straight from its definition, `2n` gamma variates each.
pub fn sample_tn_direct(model: &LinearCombinationModel, n: usize, rng: &mut RandomStream) -> Result<Vec<f64>> {
    sample_law(model, n, rng)
}

/// Sampler of `Ga(η, p + L)` with `L` from the truncated pmf of a mixture.
///
/// The mass missing from the truncated pmf is added to its last support point.
#[derive(Debug, Clone)]
pub struct MixtureSampler {
    index: WeightedIndex<f64>,
    gammas: Vec<Gamma<f64>>,
}

impl MixtureSampler {
    pub fn new(mix: &GammaMixture) -> Result<Self> {
        let mut weights = mix.pmf().to_vec();
        let residual = 1.0 - weights.iter().sum::<f64>();
        if residual > 0.0 {
            *weights.last_mut().expect("pmf is nonempty") += residual;
        }
        let index = WeightedIndex::new(&weights).map_err(|e| Error::Domain(format!("mixture pmf: {e}")))?;
        let gammas = (0..weights.len())
            .map(|k| {
                Gamma::new(mix.shape_total() + k as f64, 1.0 / mix.rate())
                    .map_err(|e| Error::Domain(format!("gamma sampler: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { index, gammas })
    }

    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let k = self.index.sample(rng);
        self.gammas[k].sample(rng)
    }
}

/// Draws of `T_n` through its mixture representation: `L`, then
/// `Ga(η, p+L)`, minus `M`, then `Ga(ξ, q+M)`.
pub fn sample_tn_mixture(rep: &MixtureRepresentation, n: usize, rng: &mut RandomStream) -> Result<Vec<f64>> {
    let pos = MixtureSampler::new(rep.positive())?;
    let neg = MixtureSampler::new(rep.negative())?;
    Ok(par_fill(n, rng, |r| pos.draw(r) - neg.draw(r)))
}

/// Draws of the compound Poisson law `Z_m = Σ_{i ≤ N} J_i`, `N ~ Poisson(m)`,
/// with jumps `J_i` distributed as `T_n` with all shapes divided by `m`.
pub fn sample_compound_poisson(
    model: &LinearCombinationModel,
    m: u32,
    n: usize,
    rng: &mut RandomStream,
) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::Domain("compound Poisson index m must be at least 1".into()));
    }
    let jump = model.time_scaled(1.0 / m as f64)?.sampler()?;
    let count = Poisson::new(m as f64).map_err(|e| Error::Domain(format!("Poisson sampler: {e}")))?;
    Ok(par_fill(n, rng, |r| {
        let jumps = count.sample(r) as u64;
        (0..jumps).map(|_| jump.draw(r)).sum::<f64>()
    }))
}

/// Exact increment samplers for a time grid starting at 0.
fn increment_samplers<L: Law>(law: &L, t_grid: &[f64]) -> Result<Vec<LawSampler>> {
    if t_grid.is_empty() || t_grid[0] != 0.0 {
        return Err(Error::Grid("time grid must start at 0".into()));
    }
    for w in t_grid.windows(2) {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::Grid(format!("time grid must be strictly increasing ({} then {})", w[0], w[1])));
        }
    }
    t_grid.windows(2).map(|w| law.time_scaled(w[1] - w[0])?.sampler()).collect()
}

/// One path of the Lévy process with `T(1) ~ law`, observed on `t_grid`.
///
/// Each increment over `Δ` is drawn exactly from the law with shapes times `Δ`.
pub fn sample_process_path<L: Law>(law: &L, t_grid: &[f64], rng: &mut RandomStream) -> Result<Vec<f64>> {
    let samplers = increment_samplers(law, t_grid)?;
    Ok(path_from(&samplers, rng))
}

/// `n_paths` independent paths on `t_grid`, generated in parallel chunks.
pub fn sample_paths<L: Law>(
    law: &L,
    t_grid: &[f64],
    n_paths: usize,
    rng: &mut RandomStream,
) -> Result<Vec<Vec<f64>>> {
    let samplers = increment_samplers(law, t_grid)?;
    Ok(par_fill(n_paths, rng, |r| path_from(&samplers, r)))
}

fn path_from(samplers: &[LawSampler], rng: &mut RandomStream) -> Vec<f64> {
    let mut path = Vec::with_capacity(samplers.len() + 1);
    let mut x = 0.0;
    path.push(x);
    for s in samplers {
        x += s.draw(rng);
        path.push(x);
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_standard_error() {
        let (m, se) = mean_std_error(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(mean_std_error(&[]).0.is_nan());
    }
    use crate::bg::BgParams;
    use crate::lincomb::{Component, DEFAULT_K_MAX, DEFAULT_TAIL_TOL};

    fn two_component() -> LinearCombinationModel {
        LinearCombinationModel::new(vec![
            Component::new(1.0, 1.0, 3.0, 0.7, 1.0, 1.0),
            Component::new(2.0, 1.0, 2.5, 1.3, 1.0, 0.8),
        ])
        .unwrap()
    }

    fn mean_se(x: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = RandomStream::new(5, 0);
        let mut b = RandomStream::new(5, 0);
        let mut c = RandomStream::new(5, 1);
        let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert_eq!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn par_fill_is_independent_of_thread_count() {
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                sample_tn_direct(&two_component(), 3 * CHUNK + 17, &mut RandomStream::new(3, 9)).unwrap()
            })
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn direct_sampler_moments() {
        let model = two_component();
        let x = sample_tn_direct(&model, 1_000_000, &mut RandomStream::new(11, 0)).unwrap();
        let (m, se) = mean_se(&x);
        assert!((m - model.mean()).abs() < 4.0 * se);
        let sq: Vec<f64> = x.iter().map(|v| (v - model.mean()).powi(2)).collect();
        let (v, se_v) = mean_se(&sq);
        assert!((v - model.variance()).abs() < 4.0 * se_v);
    }

    #[test]
    fn mixture_sampler_mean() {
        let model = two_component();
        let rep = model.mixture(DEFAULT_TAIL_TOL, DEFAULT_K_MAX).unwrap();
        let x = sample_tn_mixture(&rep, 1_000_000, &mut RandomStream::new(12, 0)).unwrap();
        let (m, se) = mean_se(&x);
        assert!((m - model.mean()).abs() < 4.0 * se);
    }

    #[test]
    fn degenerate_mixture_is_a_bg_law() {
        let bg = BgParams::new(2.0, 1.5, 3.0, 0.7).unwrap();
        let model = LinearCombinationModel::single(bg, 1.0, 1.0).unwrap();
        let rep = model.mixture(DEFAULT_TAIL_TOL, DEFAULT_K_MAX).unwrap();
        assert_eq!(rep.pmf_l(), &[1.0]);
        assert_eq!(rep.pmf_m(), &[1.0]);
        let x = sample_tn_mixture(&rep, 200_000, &mut RandomStream::new(1, 1)).unwrap();
        let (m, se) = mean_se(&x);
        assert!((m - bg.mean()).abs() < 4.0 * se);
    }

    #[test]
    fn compound_poisson_wald_identity_and_atom() {
        let model = two_component();
        let x = sample_compound_poisson(&model, 1, 400_000, &mut RandomStream::new(4, 0)).unwrap();
        let (m, se) = mean_se(&x);
        assert!((m - model.mean()).abs() < 4.0 * se);
        let zeros = x.iter().filter(|&&v| v == 0.0).count() as f64 / x.len() as f64;
        let p0 = (-1.0f64).exp();
        assert!((zeros - p0).abs() < 4.0 * (p0 * (1.0 - p0) / x.len() as f64).sqrt());
    }

    #[test]
    fn compound_poisson_cf() {
        // φ_m(z) = exp(m (φ^{1/m}(z) - 1))
        let model = two_component();
        let m = 4;
        let x = sample_compound_poisson(&model, m, 1_000_000, &mut RandomStream::new(21, 0)).unwrap();
        let jump_cf = model.time_scaled(1.0 / m as f64).unwrap().cf(1.0);
        let exact = ((jump_cf - 1.0) * m as f64).exp();
        let cos: Vec<f64> = x.iter().map(|v| v.cos()).collect();
        let sin: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let (c, se_c) = mean_se(&cos);
        let (s, se_s) = mean_se(&sin);
        assert!((c - exact.re).abs() < 4.0 * se_c);
        assert!((s - exact.im).abs() < 4.0 * se_s);
    }

    #[test]
    fn paths_add_up_and_start_at_zero() {
        let model = two_component();
        let grid = [0.0, 0.5, 1.0];
        let path = sample_process_path(&model, &grid, &mut RandomStream::new(8, 0)).unwrap();
        assert_eq!(path.len(), 3);
        assert_eq!(path[0], 0.0);
        let again = sample_process_path(&model, &grid, &mut RandomStream::new(8, 0)).unwrap();
        assert_eq!(path, again);
        let paths = sample_paths(&model, &grid, 200_000, &mut RandomStream::new(9, 0)).unwrap();
        let end: Vec<f64> = paths.iter().map(|p| p[2]).collect();
        let (m, se) = mean_se(&end);
        assert!((m - model.mean()).abs() < 4.0 * se);
    }

    #[test]
    fn bad_grids_are_rejected() {
        let model = two_component();
        for grid in [vec![], vec![0.1, 1.0], vec![0.0, 1.0, 1.0], vec![0.0, 0.5, 0.2]] {
            assert!(matches!(
                sample_process_path(&model, &grid, &mut RandomStream::new(1, 0)),
                Err(Error::Grid(_))
            ));
        }
    }
}
