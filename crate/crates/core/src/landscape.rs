//! NK fitness landscapes over length-N bit strings.
//!
//! A landscape assigns each of the N string components a random contribution
//! table over the 2^(K+1) joint states of the component and its K cyclic
//! right neighbors. String fitness is the mean of the N contributions. K
//! tunes ruggedness: K=0 is additive with a single maximum, K=N-1 is an
//! uncorrelated random landscape.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

/// Hard cap on string length; the global optimum is found by exhaustive
/// scan of all 2^n strings, and strings pack into a u32.
pub const MAX_N: u32 = 24;
/// Exhaustive local-maxima enumeration bound.
pub const MAX_N_ENUMERATION: u32 = 20;

/// Fixed-length binary string, the candidate solution of one agent.
///
/// Bit i (0-based, i < n) is stored at position n-1-i of the packed word,
/// so the packed integer order equals lexicographic order of the bit
/// sequence read left to right.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct BitString {
    n: u32,
    bits: u32,
}

impl BitString {
    /// All-zero string of length n.
    pub fn zero(n: u32) -> Result<Self> {
        check_n(n)?;
        Ok(BitString { n, bits: 0 })
    }

    /// Builds from explicit 0/1 values, first element = bit 0.
    pub fn from_bits(values: &[u8]) -> Result<Self> {
        let n = values.len() as u32;
        check_n(n)?;
        let mut bits = 0u32;
        for (i, &v) in values.iter().enumerate() {
            if v > 1 {
                return Err(Error::Parameter(format!(
                    "bit value must be 0 or 1, got {v} at index {i}"
                )));
            }
            bits |= u32::from(v) << (n - 1 - i as u32);
        }
        Ok(BitString { n, bits })
    }

    /// Reinterprets the low n bits of a packed word (lexicographic order).
    pub fn from_packed(n: u32, packed: u32) -> Result<Self> {
        check_n(n)?;
        if n < 32 && packed >= 1u32 << n {
            return Err(Error::Parameter(format!(
                "packed value {packed} does not fit in {n} bits"
            )));
        }
        Ok(BitString { n, bits: packed })
    }

    /// Uniform random string of length n.
    pub fn random<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<Self> {
        check_n(n)?;
        Ok(BitString { n, bits: rng.gen_range(0..1u32 << n) })
    }

    pub fn len(&self) -> u32 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Packed representation; lexicographically smaller string = smaller value.
    pub fn packed(&self) -> u32 {
        self.bits
    }

    pub fn bit(&self, i: u32) -> u8 {
        assert!(i < self.n, "bit index {i} out of range for length {}", self.n);
        ((self.bits >> (self.n - 1 - i)) & 1) as u8
    }

    pub fn flip(&mut self, i: u32) {
        assert!(i < self.n, "bit index {i} out of range for length {}", self.n);
        self.bits ^= 1 << (self.n - 1 - i);
    }

    pub fn hamming_distance(&self, other: &BitString) -> u32 {
        assert_eq!(self.n, other.n, "length mismatch");
        (self.bits ^ other.bits).count_ones()
    }

    pub fn to_vec(&self) -> Vec<u8> {
        (0..self.n).map(|i| self.bit(i)).collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

fn check_n(n: u32) -> Result<()> {
    if n < 1 || n > MAX_N {
        return Err(Error::Parameter(format!(
            "string length must be in 1..={MAX_N}, got {n}"
        )));
    }
    Ok(())
}

fn check_nk(n: u32, k: u32) -> Result<()> {
    check_n(n)?;
    if k >= n {
        return Err(Error::Parameter(format!(
            "epistasis parameter must satisfy k <= n-1, got k={k} for n={n}"
        )));
    }
    Ok(())
}

/// NK fitness landscape: the full contribution table plus the cached global
/// optimum. Immutable after construction; concurrent reads are safe.
#[derive(Clone, Debug)]
pub struct Landscape<S: Scalar> {
    n: u32,
    k: u32,
    seed: u64,
    /// Row i holds the 2^(k+1) contributions of component i; the pattern
    /// index packs (x_i, x_{i+1}, ..., x_{i+k}) with x_i as the most
    /// significant bit.
    contributions: Vec<S>,
    optimum: BitString,
    optimum_fitness: S,
}

impl<S: Scalar> Landscape<S> {
    /// Draws a landscape with i.i.d. uniform [0,1) contributions and caches
    /// the global optimum found by exhaustive scan. Deterministic in
    /// (n, k, seed); the table consumes a dedicated stream so it never
    /// depends on how many search replicas ran.
    pub fn generate(n: u32, k: u32, seed: u64) -> Result<Self> {
        check_nk(n, k)?;
        let mut rng = rng_from_seed(seed);
        let contributions = draw_table(n, k, &mut rng);
        Ok(Self::with_table(n, k, seed, contributions))
    }

    /// Builds from an explicit contribution table (row-major by component,
    /// 2^(k+1) entries per row, each in [0,1)).
    pub fn from_table(n: u32, k: u32, table: Vec<S>) -> Result<Self> {
        check_nk(n, k)?;
        let expected = n as usize * (1usize << (k + 1));
        if table.len() != expected {
            return Err(Error::Parameter(format!(
                "contribution table must have n*2^(k+1) = {expected} entries, got {}",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&v| v < S::zero() || v >= S::one()) {
            return Err(Error::Parameter(format!(
                "contribution {bad} outside [0,1)"
            )));
        }
        Ok(Self::with_table(n, k, 0, table))
    }

    fn with_table(n: u32, k: u32, seed: u64, contributions: Vec<S>) -> Self {
        let mut ls = Landscape {
            n,
            k,
            seed,
            contributions,
            optimum: BitString { n, bits: 0 },
            optimum_fitness: S::zero(),
        };
        let (best, best_fit) = ls.scan_optimum();
        ls.optimum = BitString { n, bits: best };
        ls.optimum_fitness = best_fit;
        ls
    }

    /// Exhaustive argmax; ascending packed order with strict improvement
    /// keeps the lexicographically smallest string on an exact fitness tie.
    fn scan_optimum(&self) -> (u32, S) {
        let mut best = 0u32;
        let mut best_fit = self.fitness_packed(0);
        for s in 1..(1u32 << self.n) {
            let f = self.fitness_packed(s);
            if f > best_fit {
                best_fit = f;
                best = s;
            }
        }
        (best, best_fit)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Contribution of component i for a packed neighborhood pattern.
    pub fn contribution(&self, i: u32, pattern: u32) -> S {
        self.contributions[(i as usize) << (self.k + 1) | pattern as usize]
    }

    pub fn global_optimum(&self) -> &BitString {
        &self.optimum
    }

    pub fn global_optimum_fitness(&self) -> S {
        self.optimum_fitness
    }

    /// Mean of the N component contributions, each indexed by the component
    /// bit and its K cyclic right neighbors.
    pub fn fitness(&self, s: &BitString) -> Result<S> {
        if s.len() != self.n {
            return Err(Error::Parameter(format!(
                "string length {} does not match landscape n={}",
                s.len(),
                self.n
            )));
        }
        Ok(self.fitness_packed(s.packed()))
    }

    /// Fitness of a packed string; the caller guarantees the value fits in
    /// n bits. This is the hot path of the search loop.
    #[inline]
    pub fn fitness_packed(&self, bits: u32) -> S {
        let n = self.n;
        let width = self.k + 1;
        let n_mask = (1u32 << n) - 1;
        // Bits are packed most significant first, so the pattern of
        // component i is a contiguous cyclic window: rotate x_i to the MSB
        // and take the top k+1 bits. width <= n holds by construction.
        let mut sum = S::zero();
        for i in 0..n {
            let rotated = if i == 0 {
                bits
            } else {
                ((bits << i) | (bits >> (n - i))) & n_mask
            };
            let pattern = rotated >> (n - width);
            sum = sum + self.contributions[(i as usize) << width | pattern as usize];
        }
        sum / S::from_u32(n).unwrap()
    }

    /// Exhaustive count of strings strictly fitter than all n one-bit-flip
    /// neighbors.
    pub fn local_maxima_count(&self) -> Result<u64> {
        if self.n > MAX_N_ENUMERATION {
            return Err(Error::Parameter(format!(
                "exhaustive enumeration requires n <= {MAX_N_ENUMERATION}, got {}",
                self.n
            )));
        }
        let size = 1usize << self.n;
        let mut fits = Vec::with_capacity(size);
        for s in 0..size as u32 {
            fits.push(self.fitness_packed(s));
        }
        let mut count = 0u64;
        for s in 0..size {
            let f = fits[s];
            let is_max = (0..self.n).all(|b| f > fits[s ^ (1usize << b)]);
            if is_max {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Writes the dump format: header `NK n k seed`, then one line
    /// `i pattern value` per table entry, in row-major order.
    pub fn dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "NK {} {} {}", self.n, self.k, self.seed)?;
        let row = 1u32 << (self.k + 1);
        for i in 0..self.n {
            for pattern in 0..row {
                writeln!(w, "{} {} {}", i, pattern, self.contribution(i, pattern))?;
            }
        }
        Ok(())
    }

    pub fn dump_to_path(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut w = BufWriter::new(file);
        self.dump(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path.display().to_string(), e))
    }
}

fn draw_table<S: Scalar>(n: u32, k: u32, rng: &mut ChaCha8Rng) -> Vec<S> {
    let len = n as usize * (1usize << (k + 1));
    let mut table = Vec::with_capacity(len);
    for _ in 0..len {
        table.push(S::sample_unit(rng));
    }
    table
}

/// Monte Carlo estimate of the Pearson correlation between the fitnesses of
/// one-bit-flip neighbor pairs, sampling a fresh landscape table and a fresh
/// random string per pair. The population value is 1 - (k+1)/n.
pub fn neighbor_fitness_correlation<S: Scalar>(
    n: u32,
    k: u32,
    samples: u64,
    seed: u64,
) -> Result<f64> {
    check_nk(n, k)?;
    if samples < 1_000 {
        return Err(Error::Parameter(format!(
            "correlation estimate needs at least 1000 samples, got {samples}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    // Accumulate in f64 regardless of S; this is a summary statistic.
    let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0f64, 0.0, 0.0, 0.0, 0.0);
    let len = n as usize * (1usize << (k + 1));
    let mut table: Vec<S> = Vec::with_capacity(len);
    for _ in 0..samples {
        table.clear();
        for _ in 0..len {
            table.push(S::sample_unit(&mut rng));
        }
        let probe = Landscape {
            n,
            k,
            seed: 0,
            contributions: std::mem::take(&mut table),
            optimum: BitString { n, bits: 0 },
            optimum_fitness: S::zero(),
        };
        let s = rng.gen_range(0..1u32 << n);
        let flip = rng.gen_range(0..n);
        let a = probe.fitness_packed(s).to_f64().unwrap();
        let b = probe.fitness_packed(s ^ (1 << flip)).to_f64().unwrap();
        sa += a;
        sb += b;
        saa += a * a;
        sbb += b * b;
        sab += a * b;
        table = probe.contributions;
    }
    let m = samples as f64;
    let cov = sab / m - (sa / m) * (sb / m);
    let va = saa / m - (sa / m) * (sa / m);
    let vb = sbb / m - (sb / m) * (sb / m);
    if va <= 0.0 || vb <= 0.0 {
        return Err(Error::Numerical(
            "degenerate fitness variance in correlation estimate".into(),
        ));
    }
    Ok(cov / (va * vb).sqrt())
}
