//! Counter-based deterministic random streams.
//!
//! Every random quantity in this crate is drawn from an indexed stream so
//! that runs are reproducible bit for bit from a 64-bit seed, independent of
//! evaluation order, platform or thread count. The generator is the
//! splitmix64 finalizer applied to a per-value counter:
//!
//! ```text
//! PHI  = 0x9E3779B97F4A7C15                      (2^64 / golden ratio)
//! i    = domain * 2^48 + k                       (global counter)
//! z    = seed + (i + 1) * PHI                    (wrapping arithmetic)
//! z    = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z    = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! out  = z ^ (z >> 31)
//! ```
//!
//! `domain` separates independent streams drawn from one seed (target-side
//! phase noise, zero-side phase noise, target selection, gaussian draws) and
//! `k` indexes values within a stream. Floating-point outputs take the top
//! 53 bits, so any implementation of the recurrence above reproduces the
//! exact same doubles.

const PHI: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream of phase perturbations applied around target-side inversions.
pub const DOMAIN_TARGET_NOISE: u64 = 0;
/// Stream of phase perturbations applied around zero-side inversions.
pub const DOMAIN_ZERO_NOISE: u64 = 1;
/// Stream used to derive target indices from an experiment seed.
pub const DOMAIN_TARGET_SELECT: u64 = 2;
/// Stream of gaussian draws used to build random unitaries.
pub const DOMAIN_GAUSSIAN: u64 = 3;
/// Entries of randomly drawn matrices.
pub const DOMAIN_MATRIX: u64 = 4;

/// splitmix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Value `k` of the stream identified by `(seed, domain)`.
pub fn stream_value(seed: u64, domain: u64, k: u64) -> u64 {
    debug_assert!(k < 1 << 48, "stream index exceeds the domain partition");
    let counter = (domain << 48).wrapping_add(k);
    mix64(seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(PHI)))
}

/// Map a raw 64-bit value to [0, 1) using its top 53 bits.
pub fn unit_f64(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in [-bound, bound).
pub fn uniform_symmetric(seed: u64, domain: u64, k: u64, bound: f64) -> f64 {
    bound * (2.0 * unit_f64(stream_value(seed, domain, k)) - 1.0)
}

/// Standard gaussian draw (Box-Muller over two consecutive stream values).
///
/// Value `k` of the gaussian stream consumes raw values `2k` and `2k + 1`.
pub fn gaussian(seed: u64, domain: u64, k: u64) -> f64 {
    let u1 = unit_f64(stream_value(seed, domain, 2 * k)).max(f64::MIN_POSITIVE);
    let u2 = unit_f64(stream_value(seed, domain, 2 * k + 1));
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Derive `count` distinct indices below `dim` from a seed.
///
/// Rejection sampling over the target-selection stream; the result is sorted
/// so it does not depend on draw order beyond the stream itself.
pub fn derive_indices(seed: u64, dim: usize, count: usize) -> Vec<usize> {
    assert!(count <= dim, "cannot draw {count} distinct indices below {dim}");
    let mut out: Vec<usize> = Vec::with_capacity(count);
    let mut k = 0u64;
    while out.len() < count {
        let candidate = (stream_value(seed, DOMAIN_TARGET_SELECT, k) % dim as u64) as usize;
        k += 1;
        if !out.contains(&candidate) {
            out.push(candidate);
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic() {
        let a: Vec<u64> = (0..32).map(|k| stream_value(42, DOMAIN_TARGET_NOISE, k)).collect();
        let b: Vec<u64> = (0..32).map(|k| stream_value(42, DOMAIN_TARGET_NOISE, k)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn domains_do_not_collide() {
        let a = stream_value(42, DOMAIN_TARGET_NOISE, 7);
        let b = stream_value(42, DOMAIN_ZERO_NOISE, 7);
        assert_ne!(a, b);
    }

    #[test]
    fn known_values_pin_the_recurrence() {
        // frozen reference values; any change here breaks every recorded run
        assert_eq!(stream_value(0, 0, 0), mix64(PHI));
        assert_eq!(stream_value(1, 0, 0), mix64(1u64.wrapping_add(PHI)));
        let z = 2u64.wrapping_add(PHI).wrapping_add(PHI);
        assert_eq!(stream_value(2, 0, 1), mix64(z));
    }

    #[test]
    fn unit_f64_stays_in_range() {
        for k in 0..1000 {
            let u = unit_f64(stream_value(9, DOMAIN_GAUSSIAN, k));
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn uniform_symmetric_respects_bound_and_mean() {
        let n = 1 << 10;
        let bound = 0.2;
        let vals: Vec<f64> =
            (0..n).map(|k| uniform_symmetric(5, DOMAIN_TARGET_NOISE, k, bound)).collect();
        let max_abs = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mean_abs = vals.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
        assert!(max_abs <= bound, "draw escaped the bound: {max_abs}");
        assert!((mean_abs - bound / 2.0).abs() < 0.02, "mean |eps| = {mean_abs}");
    }

    #[test]
    fn gaussian_moments_are_sane() {
        let n = 4096;
        let vals: Vec<f64> = (0..n).map(|k| gaussian(11, DOMAIN_GAUSSIAN, k)).collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.08, "mean = {mean}");
        assert!((var - 1.0).abs() < 0.1, "var = {var}");
    }

    #[test]
    fn derive_indices_is_sorted_and_distinct() {
        let idx = derive_indices(3, 64, 5);
        assert_eq!(idx.len(), 5);
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        assert!(idx.iter().all(|&i| i < 64));
    }
}
