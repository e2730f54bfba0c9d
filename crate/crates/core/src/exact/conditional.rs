use super::table::ExactTable;
use crate::{Error, Result};

/// Packs the bits of `state` at positions `free` into a dense code.
#[inline]
pub fn compress(state: u32, free: &[usize]) -> u32 {
    free.iter()
        .enumerate()
        .fold(0, |acc, (k, &i)| acc | (state >> i & 1) << k)
}

fn conditional(
    table: &ExactTable,
    fixed_mask: u32,
    fixed_bits: u32,
    free: &[usize],
    who: &'static str,
) -> Result<ExactTable> {
    let mut pairs: Vec<(u32, f64)> = table
        .states()
        .iter()
        .zip(table.probs())
        .filter(|(&s, _)| s & fixed_mask == fixed_bits)
        .map(|(&s, &p)| (compress(s, free), p))
        .collect();
    let mass: f64 = pairs.iter().map(|e| e.1).sum();
    if !(mass > 0.0) {
        return Err(Error::ZeroMassPinning(who));
    }
    pairs.sort_by_key(|e| e.0);
    let (states, probs): (Vec<u32>, Vec<f64>) = pairs.into_iter().map(|(s, p)| (s, p / mass)).unzip();
    ExactTable::new(free.len(), table.kind(), states, probs)
}

/// Conditional tables `ν(· | x_S = a)` and `π(· | x_S = a)` over the free
/// coordinates (in increasing order, re-indexed from 0). `assignment[k]` is
/// the bit of coordinate `pinned[k]`.
pub fn conditional_restriction(
    nu: &ExactTable,
    pi: &ExactTable,
    pinned: &[usize],
    assignment: &[bool],
) -> Result<(ExactTable, ExactTable)> {
    pi.check_same_support(nu)?;
    if pinned.len() != assignment.len() {
        return Err(Error::Mismatch("pinned set and assignment lengths differ".into()));
    }
    let n = pi.n();
    let mut fixed_mask = 0u32;
    let mut fixed_bits = 0u32;
    for (&i, &b) in pinned.iter().zip(assignment) {
        if i >= n {
            return Err(Error::InvalidParameter(format!("pinned coordinate {i} out of range")));
        }
        fixed_mask |= 1 << i;
        fixed_bits |= (b as u32) << i;
    }
    let free: Vec<usize> = (0..n).filter(|i| fixed_mask >> i & 1 == 0).collect();
    let nu_c = conditional(nu, fixed_mask, fixed_bits, &free, "nu")?;
    let pi_c = conditional(pi, fixed_mask, fixed_bits, &free, "pi")?;
    // both share the support of π's conditional
    let nu_c = realign(&nu_c, &pi_c)?;
    Ok((nu_c, pi_c))
}

/// Re-expresses `nu` on the support of `pi` (zeros where `nu` is absent).
fn realign(nu: &ExactTable, pi: &ExactTable) -> Result<ExactTable> {
    if nu.states() == pi.states() {
        return Ok(nu.clone());
    }
    let mut probs = vec![0.0; pi.len()];
    for (&s, &p) in nu.states().iter().zip(nu.probs()) {
        match pi.index_of(s) {
            Some(k) => probs[k] = p,
            None if p > 0.0 => return Err(Error::Mismatch("nu charges a state outside the support of pi".into())),
            None => {}
        }
    }
    pi.with_probs(probs)
}
