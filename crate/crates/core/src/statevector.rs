//! Dense statevector over the `4^n` path basis states.
//!
//! Only the path register is stored as amplitudes. The fitness register is
//! carried by [`FitnessTable`], which is exact because the fitness map is a
//! basis-state relabeling.
//!
//! Oracle and diffusion are data-parallel passes over the amplitude array.
//! Reductions use fixed-size chunks summed in order so results are
//! bit-reproducible regardless of the thread pool size.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fitness::{check_length, FitnessTable, FitnessValue, DEFAULT_LENGTH_CAP};
use crate::path::{state_count, PathIndex};

const CHUNK: usize = 1 << 12;

/// Threshold oracle: marks every index whose fitness is strictly above `cutoff`.
#[derive(Debug, Clone, Copy)]
pub struct OracleSpec<'a> {
    pub table: &'a FitnessTable,
    pub cutoff: FitnessValue,
}

impl<'a> OracleSpec<'a> {
    pub fn new(table: &'a FitnessTable, cutoff: FitnessValue) -> Self {
        OracleSpec { table, cutoff }
    }

    #[inline]
    pub fn is_marked(&self, idx: usize) -> bool {
        self.table.value(idx) > self.cutoff
    }

    pub fn marked_count(&self) -> usize {
        marked_count(self.table, self.cutoff)
    }
}

pub fn marked_count(table: &FitnessTable, cutoff: FitnessValue) -> usize {
    table
        .values()
        .par_iter()
        .filter(|&&v| v > cutoff)
        .count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    len: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Equal superposition over all paths of length `len`, every amplitude `2^-len`.
    pub fn uniform(len: usize) -> Result<StateVector> {
        Self::uniform_with_cap(len, DEFAULT_LENGTH_CAP)
    }

    pub fn uniform_with_cap(len: usize, cap: usize) -> Result<StateVector> {
        check_length(len, cap)?;
        let amp = Complex64::new((-(len as f64)).exp2(), 0.0);
        Ok(StateVector {
            len,
            amps: vec![amp; state_count(len)],
        })
    }

    /// A single basis state with unit amplitude.
    pub fn basis(index: PathIndex) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); state_count(index.len())];
        amps[index.as_usize()] = Complex64::new(1.0, 0.0);
        StateVector {
            len: index.len(),
            amps,
        }
    }

    /// Wraps raw amplitudes; the count must be a power of four.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<StateVector> {
        let n = amps.len();
        if n == 0 || !n.is_power_of_two() || n.trailing_zeros() % 2 != 0 {
            return Err(Error::TableSizeMismatch {
                expected: n.next_power_of_two(),
                actual: n,
            });
        }
        Ok(StateVector {
            len: (n.trailing_zeros() / 2) as usize,
            amps,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn state_count(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        chunked_sum(&self.amps, |a| a.norm_sqr())
    }

    pub fn probability(&self, idx: usize) -> f64 {
        self.amps[idx].norm_sqr()
    }

    /// Total probability of the indices selected by `pred`.
    pub fn probability_where<F>(&self, pred: F) -> f64
    where
        F: Fn(usize) -> bool + Sync,
    {
        self.amps
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                let base = c * CHUNK;
                chunk
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| pred(base + k))
                    .map(|(_, a)| a.norm_sqr())
                    .sum::<f64>()
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum()
    }

    pub fn marked_probability(&self, oracle: &OracleSpec<'_>) -> f64 {
        self.probability_where(|idx| oracle.is_marked(idx))
    }

    /// Negates every amplitude selected by `pred`.
    pub fn phase_flip<F>(&mut self, pred: F)
    where
        F: Fn(usize) -> bool + Sync,
    {
        self.amps
            .par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| {
                let base = c * CHUNK;
                for (k, a) in chunk.iter_mut().enumerate() {
                    if pred(base + k) {
                        *a = -*a;
                    }
                }
            });
    }

    pub fn apply_oracle(&mut self, oracle: &OracleSpec<'_>) -> Result<()> {
        self.check_table(oracle.table)?;
        self.phase_flip(|idx| oracle.is_marked(idx));
        Ok(())
    }

    /// Reflection about the uniform state: `a_k ← 2·mean(a) − a_k`.
    pub fn apply_diffusion(&mut self) {
        let total = chunked_sum(&self.amps, |a| *a);
        let twice_mean = total * (2.0 / self.amps.len() as f64);
        self.amps.par_iter_mut().for_each(|a| *a = twice_mean - *a);
    }

    /// Applies `rounds` Grover iterations (oracle, then diffusion).
    pub fn grover_iterate(&mut self, oracle: &OracleSpec<'_>, rounds: usize) -> Result<()> {
        self.check_table(oracle.table)?;
        for _ in 0..rounds {
            self.phase_flip(|idx| oracle.is_marked(idx));
            self.apply_diffusion();
        }
        Ok(())
    }

    /// Samples a basis index with probability `|a_idx|²`. The state is left untouched.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> PathIndex {
        let total = self.norm_sqr();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (idx, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = idx;
                acc += p;
                if target < acc {
                    return self.index(idx);
                }
            }
        }
        self.index(last_nonzero)
    }

    fn index(&self, idx: usize) -> PathIndex {
        PathIndex::new(idx as u64, self.len).expect("index within register")
    }

    fn check_table(&self, table: &FitnessTable) -> Result<()> {
        if table.len() != self.len {
            return Err(Error::LengthMismatch {
                state: self.len,
                table: table.len(),
            });
        }
        Ok(())
    }
}

/// Neumaier-compensated sum, chunked in parallel and combined in order.
///
/// The diffusion mean feeds straight back into the norm, so its rounding
/// error has to stay near one ulp over long iteration sequences.
fn chunked_sum<T, F>(amps: &[Complex64], f: F) -> T
where
    T: Compensated,
    F: Fn(&Complex64) -> T + Sync,
{
    let partials: Vec<(T, T)> = amps
        .par_chunks(CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .fold((T::zero(), T::zero()), |acc, a| T::add_compensated(acc, f(a)))
        })
        .collect();
    let (sum, comp) = partials.into_iter().fold((T::zero(), T::zero()), |acc, (s, c)| {
        T::add_compensated(T::add_compensated(acc, s), c)
    });
    sum.plus(comp)
}

trait Compensated: Copy + Send {
    fn zero() -> Self;
    fn plus(self, other: Self) -> Self;
    fn add_compensated(acc: (Self, Self), x: Self) -> (Self, Self);
}

impl Compensated for f64 {
    fn zero() -> Self {
        0.0
    }

    fn plus(self, other: Self) -> Self {
        self + other
    }

    #[inline]
    fn add_compensated((sum, comp): (f64, f64), x: f64) -> (f64, f64) {
        let t = sum + x;
        let lost = if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        (t, comp + lost)
    }
}

impl Compensated for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn plus(self, other: Self) -> Self {
        self + other
    }

    #[inline]
    fn add_compensated((sum, comp): (Complex64, Complex64), x: Complex64) -> (Complex64, Complex64) {
        let (re, re_c) = f64::add_compensated((sum.re, comp.re), x.re);
        let (im, im_c) = f64::add_compensated((sum.im, comp.im), x.im);
        (Complex64::new(re, im), Complex64::new(re_c, im_c))
    }
}
