//! Decoding-region formulas, kept separate from the decoder so the two can be
//! cross-checked.

use semiadv::Family;

/// Guaranteed radius as the fraction `num / den`.
fn radius_fraction(family: Family, n: usize, k: usize, s: usize, l: usize) -> Option<(u128, u128)> {
    let (n, k, s, l) = (n as u128, k as u128, s as u128, l as u128);
    match family {
        Family::Rs | Family::Irs => Some((s * n.checked_sub(k)?, s + 1)),
        Family::Frs | Family::Mult => {
            let w = (s + 1).checked_sub(l).filter(|&w| w >= 1 && l >= 1)?;
            let usable = if family == Family::Mult { n.checked_sub(1)? } else { n };
            Some((l * (usable * w).checked_sub(k)?, (l + 1) * w))
        }
    }
}

/// Evaluation points per symbol used by the decoder.
pub fn points_per_symbol(family: Family, s: usize, l: usize) -> usize {
    match family {
        Family::Rs | Family::Irs => 1,
        Family::Frs | Family::Mult => s + 1 - l,
    }
}

pub fn max_radius(family: Family, n: usize, k: usize, s: usize, l: usize) -> Option<usize> {
    radius_fraction(family, n, k, s, l).map(|(num, den)| (num / den) as usize)
}

/// Whether `(e0, e)` lies in the region where decoding succeeds with high probability.
pub fn in_region(family: Family, n: usize, k: usize, s: usize, l: usize, e0: usize, e: usize) -> bool {
    let Some(radius) = max_radius(family, n, k, s, l) else {
        return false;
    };
    let w = points_per_symbol(family, s, l);
    // adversarial symbols may not exceed the redundancy left after the errors
    e0 <= e && e <= radius && e0 * w + k + e * w <= n * w
}

/// Upper bound on the failure probability for `e` errors over a field of order `q`.
pub fn failure_bound(family: Family, s: usize, l: usize, e: usize, q: u64) -> f64 {
    ((e * points_per_symbol(family, s, l)) as f64 / q as f64).min(1.0)
}
