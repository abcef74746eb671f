//! Monte Carlo estimation of a measure over a bounded box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::logic::ir::CFormula;

/// Samples drawn per independent stream.
pub const CHUNK: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub enum SampleDim {
    Uniform { slot: usize, lo: f64, hi: f64 },
    Pick { slot: usize, values: Vec<f64> },
}

impl SampleDim {
    fn size(&self) -> f64 {
        match self {
            SampleDim::Uniform { lo, hi, .. } => hi - lo,
            SampleDim::Pick { values, .. } => values.len() as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
    /// Measure of the sampled box.
    pub volume: f64,
}

/// Estimates the measure of `{x in box : f(x)}`.
///
/// Chunk `k` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `k`, so
/// the result depends only on `seed` and `samples`, not on the thread count.
pub fn estimate(f: &CFormula<f64>, dims: &[SampleDim], nslots: usize, samples: u64, seed: u64) -> Estimate {
    let volume: f64 = dims.iter().map(SampleDim::size).product();
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let n = CHUNK.min(samples - k * CHUNK);
            let mut vals: Vec<Option<f64>> = vec![None; nslots];
            let mut hits = 0u64;
            for _ in 0..n {
                for d in dims {
                    match d {
                        SampleDim::Uniform { slot, lo, hi } => {
                            vals[*slot] = Some(lo + (hi - lo) * rng.gen::<f64>());
                        }
                        SampleDim::Pick { slot, values } => {
                            vals[*slot] = Some(values[rng.gen_range(0..values.len())]);
                        }
                    }
                }
                if f.eval3(&vals) == Some(true) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let (value, std_error) = if samples == 0 {
        (0.0, f64::INFINITY)
    } else {
        let p = hits as f64 / samples as f64;
        (volume * p, volume * (p * (1.0 - p) / samples as f64).sqrt())
    };
    Estimate {
        value,
        std_error,
        samples,
        hits,
        volume,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::ir::CTerm;
    use crate::logic::CmpOp;

    #[test]
    fn quarter_disc() {
        let r2 = CTerm::Add(vec![
            CTerm::Mul(vec![CTerm::Var(0), CTerm::Var(0)]),
            CTerm::Mul(vec![CTerm::Var(1), CTerm::Var(1)]),
        ]);
        let f = CFormula::Cmp(r2, CmpOp::Le, CTerm::Const(1.0));
        let dims = [
            SampleDim::Uniform { slot: 0, lo: 0.0, hi: 1.0 },
            SampleDim::Uniform { slot: 1, lo: 0.0, hi: 1.0 },
        ];
        let e = estimate(&f, &dims, 2, 200_000, 7);
        assert!((e.value - std::f64::consts::FRAC_PI_4).abs() < 4.0 * e.std_error);
        assert_eq!(e, estimate(&f, &dims, 2, 200_000, 7));
    }
}
