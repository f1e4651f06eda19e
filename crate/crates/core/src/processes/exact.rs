use std::collections::BTreeMap;

use num_traits::Zero;

use super::process::{Process, DEFAULT_ATOM_CAP};
use crate::error::{Error, Result};
use crate::window::PathWindow;
use crate::Rational;

/// The exact law of a window `[lo, hi]` as a finite list of weighted paths.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    pub lo: i64,
    pub hi: i64,
    pub atoms: Vec<(PathWindow<Rational>, Rational)>,
}

impl ExactDistribution {
    /// `E[f(window)]`.
    pub fn expectation(&self, f: impl Fn(&PathWindow<Rational>) -> Rational) -> Rational {
        self.atoms
            .iter()
            .fold(Rational::zero(), |acc, (w, p)| acc + f(w) * p)
    }

    pub fn total_probability(&self) -> Rational {
        self.atoms.iter().fold(Rational::zero(), |acc, (_, p)| acc + p)
    }

    /// Law of `(X_{first}, ..., X_{first+len-1})`, with atoms that agree on
    /// this block merged.
    pub fn block_law(&self, first: i64, len: usize) -> BTreeMap<Vec<Rational>, Rational> {
        assert!(
            first > self.lo && first + len as i64 - 1 <= self.hi,
            "block outside window"
        );
        let mut law = BTreeMap::new();
        for (w, p) in &self.atoms {
            let key: Vec<Rational> = (0..len as i64).map(|i| w.x(first + i).clone()).collect();
            *law.entry(key).or_insert_with(Rational::zero) += p;
        }
        law
    }
}

impl Process {
    /// Enumerates every path on `[lo, hi]` with its exact probability, using
    /// the default atom cap.
    pub fn exact_window_distribution(&self, lo: i64, hi: i64) -> Result<ExactDistribution> {
        self.exact_window_distribution_capped(lo, hi, DEFAULT_ATOM_CAP)
    }

    pub fn exact_window_distribution_capped(&self, lo: i64, hi: i64, cap: u128) -> Result<ExactDistribution> {
        if lo > 0 || hi < 0 || hi - lo < 1 {
            return Err(Error::InvalidWindow(format!(
                "need lo <= 0 <= hi and hi - lo >= 1, got [{lo}, {hi}]"
            )));
        }
        let atoms = self
            .enumerate_paths((hi - lo) as usize, cap)?
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(values, p)| Ok((PathWindow::from_increments(lo, values)?, p)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactDistribution { lo, hi, atoms })
    }
}
