//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) the elementwise loops run on rayon;
//! without it they fall back to plain sequential iteration. Only embarrassingly
//! parallel maps go through here: reductions stay sequential so that results
//! are bit-identical regardless of thread count or scheduling.

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to each contiguous row of `chunk` elements, with its row index.
pub(crate) fn for_each_row<F>(data: &mut [Complex64], chunk: usize, f: F)
where
    F: Fn(usize, &mut [Complex64]) + Sync + Send,
{
    debug_assert!(chunk > 0 && data.len() % chunk == 0);
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk).enumerate().for_each(|(i, row)| f(i, row));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk).enumerate().for_each(|(i, row)| f(i, row));
}

/// Fill each row of an output buffer from its row index.
pub(crate) fn fill_rows<F>(out: &mut [Complex64], chunk: usize, f: F)
where
    F: Fn(usize, &mut [Complex64]) + Sync + Send,
{
    for_each_row(out, chunk, f);
}
