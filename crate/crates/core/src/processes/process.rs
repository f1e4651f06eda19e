use num_traits::{One, Signed, ToPrimitive, Zero};

use super::spec::ProcessSpec;
use super::stationary::stationary_distribution;
use crate::error::{Error, Result};
use crate::rng::{stream, StreamRng, TrialRng};
use crate::window::PathWindow;
use crate::Rational;

/// `(sqrt(5) - 1) / 2` rounded to the nearest `f64`. The rotation angle is
/// only modeled as irrational.
pub const DEFAULT_ROTATION_ALPHA: f64 = 0.618_033_988_749_894_9;

/// Default ceiling on the number of atoms an exact enumeration may produce.
pub const DEFAULT_ATOM_CAP: u128 = 1 << 20;

/// A validated stationary-process generator.
///
/// Immutable after construction; sampling takes all randomness as explicit
/// `(seed, trial)` arguments, so a `Process` can be shared across threads.
#[derive(Clone, Debug)]
pub struct Process {
    spec: ProcessSpec,
    kernel: Kernel,
    negated: bool,
}

#[derive(Clone, Debug)]
enum Kernel {
    Discrete(Discrete),
    Gaussian { mean: f64, stddev: f64 },
    Markov(Markov),
    MovingAverage(MovingAverage),
    Rotation(Rotation),
    Mixture(Mixture),
}

#[derive(Clone, Debug)]
struct Discrete {
    values: Vec<Rational>,
    probs: Vec<Rational>,
    values_f64: Vec<f64>,
    cdf: Cdf,
}

#[derive(Clone, Debug)]
struct Markov {
    transition: Vec<Vec<Rational>>,
    stationary: Vec<Rational>,
    payoffs: Vec<Rational>,
    payoffs_f64: Vec<f64>,
    start_cdf: Cdf,
    row_cdfs: Vec<Cdf>,
}

#[derive(Clone, Debug)]
struct MovingAverage {
    coefficients: Vec<Rational>,
    coefficients_f64: Vec<f64>,
    innovation: Box<Kernel>,
}

#[derive(Clone, Debug)]
struct Rotation {
    alpha: f64,
    starts: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Clone, Debug)]
struct Mixture {
    weights: Vec<Rational>,
    cdf: Cdf,
    components: Vec<Kernel>,
}

/// Float CDF over a finite index set, built from exact probabilities.
/// Zero-probability indices are unreachable.
#[derive(Clone, Debug)]
struct Cdf {
    bounds: Vec<f64>,
}

impl Cdf {
    fn new(probs: &[Rational]) -> Self {
        let mut acc = Rational::zero();
        let mut bounds: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc.to_f64().unwrap_or(1.0)
            })
            .collect();
        if let Some(last) = probs.iter().rposition(|p| !p.is_zero()) {
            for b in &mut bounds[last..] {
                *b = f64::INFINITY;
            }
        }
        Cdf { bounds }
    }

    #[inline]
    fn draw(&self, u: f64) -> usize {
        self.bounds.partition_point(|&b| b <= u)
    }
}

/// Mean of one ergodic component of a process.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentMean {
    pub weight: Rational,
    pub mean: f64,
    /// Present for finite-support components.
    pub exact: Option<Rational>,
}

fn join(path: &str, field: &str) -> String {
    if path.is_empty() {
        field.to_string()
    } else if field.starts_with('[') {
        format!("{path}{field}")
    } else {
        format!("{path}.{field}")
    }
}

fn check_probability_vector(probs: &[Rational], path: &str, what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::spec(path, format!("{what} is empty")));
    }
    if let Some(i) = probs.iter().position(Signed::is_negative) {
        return Err(Error::spec(join(path, &format!("[{i}]")), format!("negative {what} entry")));
    }
    let total = probs.iter().fold(Rational::zero(), |a, b| a + b);
    if !total.is_one() {
        return Err(Error::spec(
            path,
            format!("{what} sums to {}, not 1", crate::rational::format_rational(&total)),
        ));
    }
    Ok(())
}

fn build(spec: &ProcessSpec, path: &str, inside_mixture: bool) -> Result<Kernel> {
    match spec {
        ProcessSpec::IidDiscrete { support } => {
            let probs: Vec<Rational> = support.iter().map(|p| p.prob.0.clone()).collect();
            check_probability_vector(&probs, &join(path, "support"), "probabilities")?;
            let (values, probs): (Vec<_>, Vec<_>) = support
                .iter()
                .filter(|p| !p.prob.0.is_zero())
                .map(|p| (p.value.0.clone(), p.prob.0.clone()))
                .unzip();
            Ok(Kernel::Discrete(Discrete {
                values_f64: values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
                cdf: Cdf::new(&probs),
                values,
                probs,
            }))
        }
        ProcessSpec::IidGaussian { mean, stddev } => {
            if !mean.is_finite() {
                return Err(Error::spec(join(path, "mean"), "mean must be finite"));
            }
            if !stddev.is_finite() || *stddev < 0.0 {
                return Err(Error::spec(join(path, "stddev"), "stddev must be finite and >= 0"));
            }
            Ok(Kernel::Gaussian {
                mean: *mean,
                stddev: *stddev,
            })
        }
        ProcessSpec::MarkovChain {
            transition,
            payoffs,
        } => {
            let tpath = join(path, "transition");
            let k = transition.len();
            if k == 0 {
                return Err(Error::spec(tpath, "transition matrix is empty"));
            }
            if payoffs.len() != k {
                return Err(Error::spec(
                    join(path, "payoffs"),
                    format!("{} payoffs for {k} states", payoffs.len()),
                ));
            }
            let matrix: Vec<Vec<Rational>> = transition
                .iter()
                .map(|row| row.iter().map(|p| p.0.clone()).collect())
                .collect();
            for (i, row) in matrix.iter().enumerate() {
                let rpath = join(&tpath, &format!("[{i}]"));
                if row.len() != k {
                    return Err(Error::spec(rpath, format!("row has {} entries, expected {k}", row.len())));
                }
                check_probability_vector(row, &rpath, "transition row")?;
            }
            let stationary = stationary_distribution(&matrix)?;
            if stationary.iter().any(Zero::is_zero) {
                return Err(Error::NoStationaryDistribution(
                    "stationary distribution vanishes on a declared state".into(),
                ));
            }
            let payoffs: Vec<Rational> = payoffs.iter().map(|v| v.0.clone()).collect();
            Ok(Kernel::Markov(Markov {
                payoffs_f64: payoffs.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
                start_cdf: Cdf::new(&stationary),
                row_cdfs: matrix.iter().map(|row| Cdf::new(row)).collect(),
                transition: matrix,
                stationary,
                payoffs,
            }))
        }
        ProcessSpec::MovingAverage {
            coefficients,
            innovation,
        } => {
            if coefficients.is_empty() {
                return Err(Error::spec(join(path, "coefficients"), "no coefficients"));
            }
            let ipath = join(path, "innovation");
            let innovation = match innovation.as_ref() {
                s @ (ProcessSpec::IidDiscrete { .. } | ProcessSpec::IidGaussian { .. }) => {
                    build(s, &ipath, inside_mixture)?
                }
                other => {
                    return Err(Error::spec(
                        join(&ipath, "kind"),
                        format!("innovations must be IidDiscrete or IidGaussian, got {}", other.kind_name()),
                    ))
                }
            };
            let coefficients: Vec<Rational> = coefficients.iter().map(|v| v.0.clone()).collect();
            Ok(Kernel::MovingAverage(MovingAverage {
                coefficients_f64: coefficients.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
                coefficients,
                innovation: Box::new(innovation),
            }))
        }
        ProcessSpec::Rotation { alpha, pieces } => {
            let alpha = alpha.unwrap_or(DEFAULT_ROTATION_ALPHA);
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::spec(join(path, "alpha"), "alpha must lie in (0, 1)"));
            }
            let ppath = join(path, "pieces");
            if pieces.is_empty() {
                return Err(Error::spec(ppath, "no pieces"));
            }
            for (i, piece) in pieces.iter().enumerate() {
                let here = join(&ppath, &format!("[{i}]"));
                if !(0.0..1.0).contains(&piece.start) {
                    return Err(Error::spec(join(&here, "start"), "start must lie in [0, 1)"));
                }
                if i > 0 && piece.start <= pieces[i - 1].start {
                    return Err(Error::spec(join(&here, "start"), "starts must be strictly increasing"));
                }
                if !piece.value.is_finite() {
                    return Err(Error::spec(join(&here, "value"), "value must be finite"));
                }
            }
            Ok(Kernel::Rotation(Rotation {
                alpha,
                starts: pieces.iter().map(|p| p.start).collect(),
                values: pieces.iter().map(|p| p.value).collect(),
            }))
        }
        ProcessSpec::Mixture { components } => {
            let cpath = join(path, "components");
            if inside_mixture {
                return Err(Error::spec(path, "nested mixtures are not supported"));
            }
            let weights: Vec<Rational> = components.iter().map(|c| c.weight.0.clone()).collect();
            check_probability_vector(&weights, &cpath, "weights")?;
            let kernels = components
                .iter()
                .enumerate()
                .map(|(i, c)| build(&c.process, &join(&cpath, &format!("[{i}].process")), true))
                .collect::<Result<Vec<_>>>()?;
            Ok(Kernel::Mixture(Mixture {
                cdf: Cdf::new(&weights),
                weights,
                components: kernels,
            }))
        }
    }
}

/// Validates a spec and builds its generator.
pub fn make_process(spec: ProcessSpec) -> Result<Process> {
    Process::new(spec)
}

impl Process {
    pub fn new(spec: ProcessSpec) -> Result<Self> {
        let kernel = build(&spec, "", false)?;
        Ok(Process {
            spec,
            kernel,
            negated: false,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(ProcessSpec::from_json(text)?)
    }

    /// The process spec it was built from. A negated process reports the
    /// spec of the original.
    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    /// The pathwise negation `X -> -X`, sharing every random draw with `self`.
    pub fn negated(&self) -> Process {
        Process {
            negated: !self.negated,
            ..self.clone()
        }
    }

    /// Stationary distribution of a Markov-chain process.
    pub fn stationary(&self) -> Option<&[Rational]> {
        match &self.kernel {
            Kernel::Markov(m) => Some(&m.stationary),
            _ => None,
        }
    }

    pub fn is_finite_support(&self) -> bool {
        self.kernel.is_finite_support()
    }

    pub fn is_mixture(&self) -> bool {
        matches!(self.kernel, Kernel::Mixture(_))
    }

    /// `E[X_1]`.
    pub fn mean(&self) -> f64 {
        self.sign_f64(self.kernel.mean())
    }

    /// `E[X_1]` in exact arithmetic, for finite-support processes.
    pub fn exact_mean(&self) -> Result<Rational> {
        self.kernel
            .exact_mean()
            .map(|m| self.sign_exact(m))
            .ok_or_else(|| self.unsupported())
    }

    /// One entry per ergodic component. A mixture yields one per element,
    /// every other kind exactly one with weight 1.
    pub fn component_means(&self) -> Vec<ComponentMean> {
        let one = |k: &Kernel, w: Rational| ComponentMean {
            weight: w,
            mean: self.sign_f64(k.mean()),
            exact: k.exact_mean().map(|m| self.sign_exact(m)),
        };
        match &self.kernel {
            Kernel::Mixture(m) => m
                .components
                .iter()
                .zip(&m.weights)
                .map(|(k, w)| one(k, w.clone()))
                .collect(),
            k => vec![one(k, Rational::one())],
        }
    }

    /// Samples `X_{lo+1}..X_hi` of one trial.
    ///
    /// The result is a pure function of `(spec, lo, hi, seed, trial)`, and
    /// growing `hi` leaves the shared prefix unchanged.
    pub fn sample_window(&self, lo: i64, hi: i64, seed: u64, trial: u64) -> Result<PathWindow<f64>> {
        self.sample_labeled(lo, hi, seed, trial).map(|(_, w)| w)
    }

    /// Like [`Process::sample_window`], also returning the mixture component
    /// drawn for this trial (always 0 for non-mixtures).
    pub fn sample_labeled(
        &self,
        lo: i64,
        hi: i64,
        seed: u64,
        trial: u64,
    ) -> Result<(usize, PathWindow<f64>)> {
        if lo > 0 || hi < 0 || hi - lo < 1 {
            return Err(Error::InvalidWindow(format!(
                "need lo <= 0 <= hi and hi - lo >= 1, got [{lo}, {hi}]"
            )));
        }
        let mut values = Vec::with_capacity((hi - lo) as usize);
        let label = self.fill_increments(lo, hi, seed, trial, &mut values);
        Ok((label, PathWindow::from_increments(lo, values)?))
    }

    /// Appends `X_{lo+1}..X_hi` to `out` without building a window.
    pub fn fill_increments(&self, lo: i64, hi: i64, seed: u64, trial: u64, out: &mut Vec<f64>) -> usize {
        let rng = TrialRng::new(seed, trial);
        let start = out.len();
        let label = self.kernel.fill(&rng, lo, hi, out);
        if self.negated {
            for v in &mut out[start..] {
                *v = -*v;
            }
        }
        label
    }

    /// Number of atoms an exact enumeration of `len` increments would produce,
    /// or `None` for continuous processes.
    pub fn atom_count(&self, len: usize) -> Option<u128> {
        self.kernel.atom_count(len)
    }

    /// All `len`-step paths with their exact probabilities. Paths that differ
    /// only in hidden state (Markov states, mixture labels) are listed
    /// separately.
    pub(crate) fn enumerate_paths(&self, len: usize, cap: u128) -> Result<Vec<(Vec<Rational>, Rational)>> {
        let atoms = self.atom_count(len).ok_or_else(|| self.unsupported())?;
        if atoms > cap {
            return Err(Error::ExplosionCap { atoms, cap });
        }
        let mut paths = self.kernel.enumerate(len);
        if self.negated {
            for (path, _) in &mut paths {
                for v in path.iter_mut() {
                    *v = -v.clone();
                }
            }
        }
        Ok(paths)
    }

    fn unsupported(&self) -> Error {
        Error::UnsupportedProcess(format!(
            "{} has continuous support",
            self.spec.kind_name()
        ))
    }

    fn sign_f64(&self, v: f64) -> f64 {
        if self.negated {
            -v
        } else {
            v
        }
    }

    fn sign_exact(&self, v: Rational) -> Rational {
        if self.negated {
            -v
        } else {
            v
        }
    }
}

impl Discrete {
    #[inline]
    fn draw(&self, s: &StreamRng, index: i64) -> f64 {
        self.values_f64[self.cdf.draw(s.uniform(index, 0))]
    }

    fn mean(&self) -> Rational {
        self.values
            .iter()
            .zip(&self.probs)
            .fold(Rational::zero(), |acc, (v, p)| acc + v * p)
    }
}

impl Rotation {
    fn payoff(&self, phase: f64) -> f64 {
        match self.starts.partition_point(|&s| s <= phase) {
            0 => *self.values.last().expect("non-empty"),
            i => self.values[i - 1],
        }
    }

    fn mean(&self) -> f64 {
        let n = self.starts.len();
        (0..n)
            .map(|i| {
                let end = if i + 1 < n { self.starts[i + 1] } else { 1.0 + self.starts[0] };
                (end - self.starts[i]) * self.values[i]
            })
            .sum()
    }
}

fn product(values: &[Rational], probs: &[Rational], len: usize) -> Vec<(Vec<Rational>, Rational)> {
    let mut paths = vec![(Vec::with_capacity(len), Rational::one())];
    for _ in 0..len {
        paths = paths
            .into_iter()
            .flat_map(|(path, p)| {
                values.iter().zip(probs).map(move |(v, q)| {
                    let mut next = path.clone();
                    next.push(v.clone());
                    (next, p.clone() * q)
                })
            })
            .collect();
    }
    paths
}

impl Kernel {
    fn is_finite_support(&self) -> bool {
        match self {
            Kernel::Discrete(_) | Kernel::Markov(_) => true,
            Kernel::Gaussian { .. } | Kernel::Rotation(_) => false,
            Kernel::MovingAverage(ma) => ma.innovation.is_finite_support(),
            Kernel::Mixture(m) => m.components.iter().all(Kernel::is_finite_support),
        }
    }

    fn mean(&self) -> f64 {
        match self {
            Kernel::Gaussian { mean, .. } => *mean,
            Kernel::Rotation(r) => r.mean(),
            Kernel::MovingAverage(ma) => ma.coefficients_f64.iter().sum::<f64>() * ma.innovation.mean(),
            Kernel::Mixture(m) => m
                .components
                .iter()
                .zip(&m.weights)
                .map(|(k, w)| w.to_f64().unwrap_or(0.0) * k.mean())
                .sum(),
            Kernel::Discrete(_) | Kernel::Markov(_) => {
                self.exact_mean().and_then(|m| m.to_f64()).unwrap_or(f64::NAN)
            }
        }
    }

    fn exact_mean(&self) -> Option<Rational> {
        match self {
            Kernel::Discrete(d) => Some(d.mean()),
            Kernel::Markov(m) => Some(
                m.stationary
                    .iter()
                    .zip(&m.payoffs)
                    .fold(Rational::zero(), |acc, (p, f)| acc + p * f),
            ),
            Kernel::MovingAverage(ma) => {
                let inner = ma.innovation.exact_mean()?;
                Some(ma.coefficients.iter().fold(Rational::zero(), |a, c| a + c) * inner)
            }
            Kernel::Mixture(m) => m
                .components
                .iter()
                .zip(&m.weights)
                .try_fold(Rational::zero(), |acc, (k, w)| Some(acc + w * k.exact_mean()?)),
            Kernel::Gaussian { .. } | Kernel::Rotation(_) => None,
        }
    }

    /// Draw of an i.i.d. kernel at `index`; only Discrete and Gaussian.
    #[inline]
    fn draw_iid(&self, s: &StreamRng, index: i64) -> f64 {
        match self {
            Kernel::Discrete(d) => d.draw(s, index),
            Kernel::Gaussian { mean, stddev } => mean + stddev * s.normal(index),
            _ => unreachable!("innovations are validated to be i.i.d."),
        }
    }

    /// Appends draws for indices `first..=last` of an i.i.d. kernel.
    fn fill_iid(&self, s: &StreamRng, first: i64, last: i64, out: &mut Vec<f64>) {
        match self {
            Kernel::Gaussian { mean, stddev } => {
                let start = out.len();
                s.normals_into(first, last, out);
                for v in &mut out[start..] {
                    *v = mean + stddev * *v;
                }
            }
            _ => out.extend((first..=last).map(|k| self.draw_iid(s, k))),
        }
    }

    fn fill(&self, rng: &TrialRng, lo: i64, hi: i64, out: &mut Vec<f64>) -> usize {
        match self {
            Kernel::Discrete(_) | Kernel::Gaussian { .. } => {
                self.fill_iid(&rng.stream(stream::INCREMENTS), lo + 1, hi, out);
                0
            }
            Kernel::Markov(m) => {
                let steps = rng.stream(stream::INCREMENTS);
                let mut state = m.start_cdf.draw(rng.stream(stream::MARKOV_START).uniform(lo + 1, 0));
                out.push(m.payoffs_f64[state]);
                for k in lo + 2..=hi {
                    state = m.row_cdfs[state].draw(steps.uniform(k, 0));
                    out.push(m.payoffs_f64[state]);
                }
                0
            }
            Kernel::MovingAverage(ma) => {
                let s = rng.stream(stream::INCREMENTS);
                let q = ma.coefficients_f64.len() as i64 - 1;
                let first = lo + 1 - q;
                let mut eps = Vec::with_capacity((hi - first + 1) as usize);
                ma.innovation.fill_iid(&s, first, hi, &mut eps);
                for k in lo + 1..=hi {
                    let at = (k - first) as usize;
                    let x = ma
                        .coefficients_f64
                        .iter()
                        .enumerate()
                        .map(|(i, c)| c * eps[at - i])
                        .sum();
                    out.push(x);
                }
                0
            }
            Kernel::Rotation(r) => {
                let theta = rng.stream(stream::ROTATION_PHASE).uniform(0, 0);
                out.extend((lo + 1..=hi).map(|k| {
                    let phase = (theta + (k as f64 * r.alpha).fract()).rem_euclid(1.0);
                    r.payoff(phase)
                }));
                0
            }
            Kernel::Mixture(m) => {
                let label = m.cdf.draw(rng.stream(stream::MIXTURE_LABEL).uniform(0, 0));
                m.components[label].fill(rng, lo, hi, out);
                label
            }
        }
    }

    fn atom_count(&self, len: usize) -> Option<u128> {
        let pow = |base: usize, exp: usize| -> u128 {
            (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
        };
        match self {
            Kernel::Discrete(d) => Some(pow(d.values.len(), len)),
            Kernel::Markov(m) => Some(pow(m.payoffs.len(), len)),
            Kernel::MovingAverage(ma) => match ma.innovation.as_ref() {
                Kernel::Discrete(d) => Some(pow(d.values.len(), len + ma.coefficients.len() - 1)),
                _ => None,
            },
            Kernel::Mixture(m) => m
                .components
                .iter()
                .try_fold(0u128, |acc, k| Some(acc.saturating_add(k.atom_count(len)?))),
            Kernel::Gaussian { .. } | Kernel::Rotation(_) => None,
        }
    }

    fn enumerate(&self, len: usize) -> Vec<(Vec<Rational>, Rational)> {
        match self {
            Kernel::Discrete(d) => product(&d.values, &d.probs, len),
            Kernel::Markov(m) => {
                if len == 0 {
                    return vec![(Vec::new(), Rational::one())];
                }
                let mut paths: Vec<(Vec<Rational>, Rational, usize)> = m
                    .stationary
                    .iter()
                    .enumerate()
                    .map(|(s, p)| (vec![m.payoffs[s].clone()], p.clone(), s))
                    .collect();
                for _ in 1..len {
                    paths = paths
                        .into_iter()
                        .flat_map(|(path, p, s)| {
                            m.transition[s]
                                .iter()
                                .enumerate()
                                .filter(|(_, q)| !q.is_zero())
                                .map(move |(t, q)| {
                                    let mut next = path.clone();
                                    next.push(m.payoffs[t].clone());
                                    (next, p.clone() * q, t)
                                })
                                .collect::<Vec<_>>()
                        })
                        .collect();
                }
                paths.into_iter().map(|(path, p, _)| (path, p)).collect()
            }
            Kernel::MovingAverage(ma) => {
                let Kernel::Discrete(d) = ma.innovation.as_ref() else {
                    unreachable!("checked by atom_count")
                };
                let q = ma.coefficients.len() - 1;
                product(&d.values, &d.probs, len + q)
                    .into_iter()
                    .map(|(eps, p)| {
                        let xs = (0..len)
                            .map(|k| {
                                ma.coefficients
                                    .iter()
                                    .enumerate()
                                    .fold(Rational::zero(), |acc, (i, c)| acc + c * &eps[k + q - i])
                            })
                            .collect();
                        (xs, p)
                    })
                    .collect()
            }
            Kernel::Mixture(m) => m
                .components
                .iter()
                .zip(&m.weights)
                .flat_map(|(k, w)| {
                    k.enumerate(len)
                        .into_iter()
                        .map(move |(path, p)| (path, p * w))
                })
                .collect(),
            Kernel::Gaussian { .. } | Kernel::Rotation(_) => unreachable!("checked by atom_count"),
        }
    }
}
