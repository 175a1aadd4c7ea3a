use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Deterministic direction stream: the basis vectors, then `e_i + e_j` and
/// `e_i - e_j` for `i < j`, then seeded uniform points of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionSampler {
    pub dim: usize,
    pub seed: u64,
}

impl DirectionSampler {
    pub fn new(dim: usize, seed: u64) -> Self {
        DirectionSampler { dim, seed }
    }

    /// Basis vectors and pairwise sums/differences, in stream order.
    pub fn structured(&self) -> Vec<Vec<f64>> {
        let m = self.dim;
        let mut out = Vec::with_capacity(m * m);
        for i in 0..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            out.push(e);
        }
        for i in 0..m {
            for j in i + 1..m {
                for sign in [1.0, -1.0] {
                    let mut e = vec![0.0; m];
                    e[i] = 1.0;
                    e[j] = sign;
                    out.push(e);
                }
            }
        }
        out
    }

    /// Unbounded iterator over seeded Euclidean-unit random directions.
    pub fn random(&self) -> impl Iterator<Item = Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let m = self.dim;
        std::iter::repeat_with(move || loop {
            let v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-8 {
                break v.into_iter().map(|x| x / n).collect();
            }
        })
    }

    /// First `n` directions of the stream.
    pub fn take(&self, n: usize) -> Vec<Vec<f64>> {
        self.structured()
            .into_iter()
            .chain(self.random())
            .take(n)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_starts_with_basis_and_is_reproducible() {
        let s = DirectionSampler::new(3, 9);
        let a = s.take(20);
        assert_eq!(a[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(a[3], vec![1.0, 1.0, 0.0]);
        assert_eq!(a[4], vec![1.0, -1.0, 0.0]);
        assert_eq!(a, s.take(20));
        for v in &a[9..] {
            let n: f64 = v.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert_ne!(a[10], DirectionSampler::new(3, 10).take(20)[10]);
    }
}
