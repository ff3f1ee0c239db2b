//! Member counting and enumeration for feature-subset ensembles.

use crate::data::FeatureSubset;
use crate::error::{Error, Result};

fn check(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "need 0 < n_avail <= n, got n = {n}, n_avail = {k}"
        )));
    }
    Ok(())
}

/// Number of ensemble members, C(n, k), via the multiplicative form.
///
/// Each partial product `C(n - k + i, i)` is an integer, so the running
/// division is exact. Fails if the value does not fit in a `u64`.
pub fn count_networks(n: usize, k: usize) -> Result<u64> {
    check(n, k)?;
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::invalid(format!("C({n}, {k}) overflows")));
        }
    }
    Ok(acc as u64)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn enumerate_subsets(n: usize, k: usize) -> Result<Vec<FeatureSubset>> {
    let total = count_networks(n, k)?;
    let mut out = Vec::with_capacity(total.min(1 << 20) as usize);
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(FeatureSubset::new(current.clone(), n)?);
        // rightmost index that can still advance
        let Some(pos) = (0..k).rev().find(|&i| current[i] < n - k + i) else {
            break;
        };
        current[pos] += 1;
        for i in pos + 1..k {
            current[i] = current[i - 1] + 1;
        }
    }
    Ok(out)
}
