//! Ordered map over independent work items, parallel when the `parallel`
//! feature is enabled and the caller asks for it.

/// How independent work items are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses the rayon global pool. Without the `parallel` feature this runs
    /// sequentially.
    #[default]
    Parallel,
}

impl Execution {
    /// True when work will really be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `items`; the output is in input order either way.
pub fn map_ordered<T, R, F>(items: &[T], execution: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if execution == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = execution;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u32> = (0..1000).collect();
        let par = map_ordered(&items, Execution::Parallel, |x| x * 3);
        let seq = map_ordered(&items, Execution::Sequential, |x| x * 3);
        assert_eq!(par, seq);
        assert_eq!(par[999], 2997);
    }
}
