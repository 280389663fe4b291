//! Reductions whose result does not depend on the rayon thread count.
//!
//! Inputs are split into fixed-size chunks, each chunk is summed
//! sequentially, and the partial sums are combined in chunk order.

use rayon::prelude::*;

pub(crate) const CHUNK: usize = 1 << 14;

pub(crate) fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum::<f64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_is_thread_count_independent() {
        let values: Vec<f64> = (0..100_000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let zeros = vec![0.0; values.len()];
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| l1_distance(&values, &zeros))
        };
        assert_eq!(run(1).to_bits(), run(3).to_bits());
        assert_eq!(run(1).to_bits(), run(8).to_bits());
    }
}
