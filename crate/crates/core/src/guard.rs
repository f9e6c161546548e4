//! Process-wide size guards. Exceeding a guard is an error, never a silent
//! truncation.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

/// Default bound on the size of any enumerated set.
pub const DEFAULT_MAX_ELEMENTS: usize = 1_000_000;
/// Default bound on the carrier size accepted by subcoalgebra enumeration.
pub const DEFAULT_MAX_SUBCOALGEBRA_CARRIER: usize = 20;
/// Default level budget of the measuring tensor.
pub const DEFAULT_TENSOR_BUDGET: usize = 6;

static MAX_ELEMENTS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_ELEMENTS);
static MAX_SUBCOALGEBRA_CARRIER: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_SUBCOALGEBRA_CARRIER);

pub fn max_elements() -> usize {
    MAX_ELEMENTS.load(Ordering::Relaxed)
}

pub fn set_max_elements(bound: usize) {
    MAX_ELEMENTS.store(bound, Ordering::Relaxed);
}

pub fn max_subcoalgebra_carrier() -> usize {
    MAX_SUBCOALGEBRA_CARRIER.load(Ordering::Relaxed)
}

pub fn set_max_subcoalgebra_carrier(bound: usize) {
    MAX_SUBCOALGEBRA_CARRIER.store(bound, Ordering::Relaxed);
}

/// Fails when `size` exceeds the element guard.
pub fn check_size(what: &str, size: u128) -> Result<usize> {
    let bound = max_elements();
    if size > bound as u128 {
        Err(Error::SizeGuard { what: what.to_string(), size, bound })
    } else {
        Ok(size as usize)
    }
}

/// Fails with a hom-set error when `size` exceeds the element guard.
pub fn check_hom_set(what: &str, size: u128) -> Result<usize> {
    let bound = max_elements();
    if size > bound as u128 {
        Err(Error::HomSetTooLarge { what: what.to_string(), size, bound })
    } else {
        Ok(size as usize)
    }
}

/// `base^exp` saturating at `u128::MAX`.
pub fn pow_sat(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
        if acc == 0 {
            return 0;
        }
    }
    acc
}
