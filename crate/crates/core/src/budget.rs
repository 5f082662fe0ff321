//! Process-wide cap on brute-force enumeration sizes.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

static BUDGET: AtomicU64 = AtomicU64::new(DEFAULT_BUDGET);

pub fn budget() -> u64 {
    BUDGET.load(Ordering::Relaxed)
}

pub fn set_budget(cap: u64) {
    BUDGET.store(cap, Ordering::Relaxed);
}

/// Fails with `BudgetExceeded` when `needed` is above the current cap.
pub fn check(needed: u128) -> Result<()> {
    let cap = budget();
    if needed > cap as u128 {
        Err(Error::BudgetExceeded { needed, cap })
    } else {
        Ok(())
    }
}
