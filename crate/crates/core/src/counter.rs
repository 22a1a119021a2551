//! Group-operation counters.
//!
//! Every modular squaring, multiplication, and canonicalizing reduction
//! performed by [`crate::group`] is tallied into a thread-local counter.
//! Benchmarks and budget assertions wrap a region in [`measure`] and read the
//! difference; each thread (and therefore each measurement region in a
//! single-threaded test) owns a private counter. Integer-level arithmetic
//! such as primality testing is deliberately not counted.

use std::cell::Cell;

thread_local! {
    static SQUARINGS: Cell<u64> = const { Cell::new(0) };
    static MULTIPLICATIONS: Cell<u64> = const { Cell::new(0) };
    static REDUCTIONS: Cell<u64> = const { Cell::new(0) };
}

/// A snapshot of the per-thread operation tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub squarings: u64,
    pub multiplications: u64,
    pub reductions: u64,
}

impl OpCounter {
    pub fn snapshot() -> Self {
        OpCounter {
            squarings: SQUARINGS.with(Cell::get),
            multiplications: MULTIPLICATIONS.with(Cell::get),
            reductions: REDUCTIONS.with(Cell::get),
        }
    }

    /// Zero the current thread's tallies. Measurement regions normally use
    /// [`measure`] instead, which is reset-free.
    pub fn reset() {
        SQUARINGS.with(|c| c.set(0));
        MULTIPLICATIONS.with(|c| c.set(0));
        REDUCTIONS.with(|c| c.set(0));
    }

    /// Squarings plus multiplications: the "group operations" column.
    pub fn group_ops(&self) -> u64 {
        self.squarings + self.multiplications
    }

    fn delta(&self, later: &OpCounter) -> OpCounter {
        OpCounter {
            squarings: later.squarings - self.squarings,
            multiplications: later.multiplications - self.multiplications,
            reductions: later.reductions - self.reductions,
        }
    }
}

/// Run `f` and return its result together with the operations it performed
/// on this thread.
pub fn measure<R>(f: impl FnOnce() -> R) -> (R, OpCounter) {
    let before = OpCounter::snapshot();
    let out = f();
    let after = OpCounter::snapshot();
    (out, before.delta(&after))
}

pub(crate) fn count_squaring() {
    SQUARINGS.with(|c| c.set(c.get() + 1));
}

pub(crate) fn count_multiplication() {
    MULTIPLICATIONS.with(|c| c.set(c.get() + 1));
}

pub(crate) fn count_reduction() {
    REDUCTIONS.with(|c| c.set(c.get() + 1));
}
