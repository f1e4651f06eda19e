//! Test-only reference evaluations that share no code with the library.

use masstransport::{PathWindow, Rational};

/// Integer path with its own partial sums; shares no code with the library.
#[derive(Debug, Clone)]
pub struct IntPath {
    pub lo: i64,
    pub xs: Vec<i64>,
}

impl IntPath {
    pub fn hi(&self) -> i64 {
        self.lo + self.xs.len() as i64
    }

    pub fn x(&self, k: i64) -> i64 {
        self.xs[(k - self.lo - 1) as usize]
    }

    pub fn s(&self, k: i64) -> i64 {
        if k >= 0 {
            (1..=k).map(|j| self.x(j)).sum()
        } else {
            -(k + 1..=0).map(|j| self.x(j)).sum::<i64>()
        }
    }

    pub fn is_record(&self, n: i64, m: i64) -> bool {
        m > n && self.s(m) == (n + 1..=m).map(|k| self.s(k)).min().unwrap()
    }

    /// `M(n, m)` from the definition.
    pub fn mass(&self, n: i64, m: i64) -> i64 {
        if self.x(n + 1) <= 0 || m <= n + 1 || !self.is_record(n, m) {
            return 0;
        }
        let prev = (n + 1..m).rev().find(|&r| self.is_record(n, r)).unwrap();
        self.s(prev).max(self.s(n)) - self.s(m).max(self.s(n))
    }

    pub fn is_ladder(&self, m: i64) -> bool {
        m == -1 || (m < -1 && (m + 1..=-1).all(|k| self.s(m) < self.s(k)))
    }

    pub fn exact(&self) -> PathWindow<Rational> {
        PathWindow::from_increments(self.lo, self.xs.iter().map(|&v| Rational::from_integer(v.into())).collect())
            .unwrap()
    }

    pub fn float(&self) -> PathWindow<f64> {
        PathWindow::from_increments(self.lo, self.xs.iter().map(|&v| v as f64).collect()).unwrap()
    }
}

/// All `len`-step paths of an i.i.d. law on integers, by counting in base
/// `support.len()`, with their probabilities.
pub fn iid_paths(support: &[(i64, Rational)], len: usize) -> Vec<(Vec<i64>, Rational)> {
    let k = support.len();
    (0..k.pow(len as u32))
        .map(|mut code| {
            let mut xs = Vec::with_capacity(len);
            let mut p = Rational::from_integer(1.into());
            for _ in 0..len {
                let (v, q) = &support[code % k];
                xs.push(*v);
                p *= q;
                code /= k;
            }
            (xs, p)
        })
        .collect()
}

/// All `len`-step paths of a stationary two-or-more-state chain with integer
/// payoffs, given its stationary law, by walking state sequences.
pub fn chain_paths(
    transition: &[Vec<Rational>],
    stationary: &[Rational],
    payoffs: &[i64],
    len: usize,
) -> Vec<(Vec<i64>, Rational)> {
    let k = payoffs.len();
    (0..k.pow(len as u32))
        .map(|mut code| {
            let mut states = Vec::with_capacity(len);
            for _ in 0..len {
                states.push(code % k);
                code /= k;
            }
            let mut p = stationary[states[0]].clone();
            for pair in states.windows(2) {
                p *= &transition[pair[0]][pair[1]];
            }
            (states.iter().map(|&s| payoffs[s]).collect(), p)
        })
        .collect()
}
