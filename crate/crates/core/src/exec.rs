//! Data-parallel sweeps with a sequential fallback.
//!
//! Every sweep in the crate (over seeds, over valuation inputs, over ring
//! degrees) goes through [`map`]. Results always come back in input order, so
//! reports are identical whichever mode produced them. Without the `parallel`
//! feature both modes run sequentially.

/// How a sweep is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `Parallel` when the crate was built with rayon, otherwise `Sequential`.
    pub fn best() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Applies `f` to every item, preserving order.
pub fn map<I, T, F>(mode: Execution, items: Vec<I>, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
        _ => items.into_iter().map(f).collect(),
    }
}

/// [`map`] over a fallible function; the first error in input order wins.
pub fn try_map<I, T, E, F>(mode: Execution, items: Vec<I>, f: F) -> Result<Vec<T>, E>
where
    I: Send,
    T: Send,
    E: Send,
    F: Fn(I) -> Result<T, E> + Sync + Send,
{
    map(mode, items, f).into_iter().collect()
}
