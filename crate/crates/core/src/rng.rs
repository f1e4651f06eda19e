//! Counter-based randomness.
//!
//! Every random word is a pure function of `(seed, trial, stream, index, slot)`,
//! computed by chaining the SplitMix64 finalizer. There is no generator state
//! to advance, so windows can be sampled in any order, extended at either end
//! and split across threads without changing a single draw.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn absorb(key: u64, word: u64) -> u64 {
    mix64(key.wrapping_add(GOLDEN) ^ mix64(word.wrapping_add(GOLDEN)))
}

/// Stream identifiers; each consumer of randomness owns one.
pub mod stream {
    /// Per-index increments or innovations.
    pub const INCREMENTS: u64 = 0;
    /// Initial state of a Markov chain.
    pub const MARKOV_START: u64 = 1;
    /// Rotation phase.
    pub const ROTATION_PHASE: u64 = 2;
    /// Mixture component label.
    pub const MIXTURE_LABEL: u64 = 3;
}

/// Derives an independent seed, e.g. for the two sides of a paired estimate.
pub fn derive_seed(seed: u64, purpose: u64) -> u64 {
    absorb(mix64(seed), purpose ^ 0x5eed)
}

/// Random source for one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialRng {
    key: u64,
}

impl TrialRng {
    pub fn new(seed: u64, trial: u64) -> Self {
        TrialRng {
            key: absorb(mix64(seed ^ 0x6d61_7373), trial),
        }
    }

    /// Key for one stream; hoist this out of per-index loops.
    #[inline]
    pub fn stream(&self, stream: u64) -> StreamRng {
        StreamRng {
            key: absorb(self.key, stream),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamRng {
    key: u64,
}

impl StreamRng {
    #[inline]
    pub fn word(&self, index: i64, slot: u64) -> u64 {
        mix64(absorb(self.key, index as u64) ^ slot.wrapping_mul(GOLDEN))
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&self, index: i64, slot: u64) -> f64 {
        (self.word(index, slot) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal at `index`. Indices `2k` and `2k+1` share one
    /// Box-Muller pair, so each normal still depends on its index alone.
    #[inline]
    pub fn normal(&self, index: i64) -> f64 {
        let (c, s) = self.normal_pair(index.div_euclid(2));
        if index.rem_euclid(2) == 0 {
            c
        } else {
            s
        }
    }

    /// Appends `normal(k)` for `k` in `first..=last`, evaluating each pair once.
    pub fn normals_into(&self, first: i64, last: i64, out: &mut Vec<f64>) {
        if first > last {
            return;
        }
        let mut k = first;
        if k.rem_euclid(2) == 1 {
            out.push(self.normal(k));
            k += 1;
        }
        while k < last {
            let (c, s) = self.normal_pair(k.div_euclid(2));
            out.push(c);
            out.push(s);
            k += 2;
        }
        if k == last {
            out.push(self.normal(k));
        }
    }

    #[inline]
    fn normal_pair(&self, pair: i64) -> (f64, f64) {
        let u1 = 1.0 - self.uniform(pair, 0);
        let u2 = self.uniform(pair, 1);
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        (radius * angle.cos(), radius * angle.sin())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_pure_functions_of_their_coordinates() {
        let a = TrialRng::new(7, 3).stream(stream::INCREMENTS);
        let b = TrialRng::new(7, 3).stream(stream::INCREMENTS);
        for i in -50..50 {
            assert_eq!(a.word(i, 0), b.word(i, 0));
        }
        assert_ne!(a.word(0, 0), a.word(1, 0));
        assert_ne!(a.word(0, 0), a.word(0, 1));
        assert_ne!(a.word(0, 0), TrialRng::new(7, 4).stream(0).word(0, 0));
        assert_ne!(a.word(0, 0), TrialRng::new(8, 3).stream(0).word(0, 0));
        assert_ne!(a.word(0, 0), TrialRng::new(7, 3).stream(1).word(0, 0));
    }

    #[test]
    fn uniform_moments() {
        let s = TrialRng::new(1, 0).stream(0);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|i| s.uniform(i, 0)).collect();
        assert!(xs.iter().all(|&x| (0.0..1.0).contains(&x)));
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        // se of the mean is sqrt(1/12/n) ~ 6.5e-4
        assert!((mean - 0.5).abs() < 4.0 * 6.5e-4, "{mean}");
        assert!((var - 1.0 / 12.0).abs() < 2e-3, "{var}");
    }

    #[test]
    fn bulk_normals_match_single_draws() {
        let s = TrialRng::new(5, 1).stream(0);
        for (first, last) in [(-7, 6), (-6, 7), (0, 0), (3, 3), (-3, 4), (2, 1)] {
            let mut bulk = Vec::new();
            s.normals_into(first, last, &mut bulk);
            let single: Vec<f64> = (first..=last).map(|k| s.normal(k)).collect();
            assert_eq!(bulk, single, "{first}..={last}");
        }
    }

    #[test]
    fn normal_moments() {
        let s = TrialRng::new(2, 0).stream(0);
        let n = 200_000i64;
        let xs: Vec<f64> = (-n / 2..n / 2).map(|i| s.normal(i)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "{mean}");
        assert!((var - 1.0).abs() < 0.02, "{var}");
        let lag1 = xs.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / n as f64;
        assert!(lag1.abs() < 0.015, "{lag1}");
    }
}
