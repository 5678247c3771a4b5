//! Data-parallel helpers with a sequential fallback.
//!
//! Each helper evaluates its closure once per index and writes the result
//! into a fixed slot, so output never depends on scheduling.

/// Below this many elements the rayon split overhead dominates.
#[cfg(feature = "parallel")]
const MIN_PAR_LEN: usize = 8192;

/// Fills `out[i] = f(i)`.
pub(crate) fn fill_indexed<F>(out: &mut [f64], f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if out.len() >= MIN_PAR_LEN {
            out.par_iter_mut()
                .with_min_len(MIN_PAR_LEN / 4)
                .enumerate()
                .for_each(|(i, v)| *v = f(i));
            return;
        }
    }
    for (i, v) in out.iter_mut().enumerate() {
        *v = f(i);
    }
}

/// Maps `f` over `items`, preserving order.
pub(crate) fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
