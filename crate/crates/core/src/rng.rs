//! Minimal seeded PRNG (splitmix64). Self-contained so that seeded runs stay
//! byte-identical across toolchain and dependency upgrades.

pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw from [-magnitude, magnitude].
pub(crate) fn draw_int(state: &mut u64, magnitude: i64) -> i64 {
    if magnitude <= 0 {
        return 0;
    }
    let span = 2 * magnitude as u64 + 1;
    (splitmix64(state) % span) as i64 - magnitude
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_sequence() {
        let mut a = 42;
        let mut b = 42;
        let xs: Vec<u64> = (0..8).map(|_| splitmix64(&mut a)).collect();
        let ys: Vec<u64> = (0..8).map(|_| splitmix64(&mut b)).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn draws_stay_in_range() {
        let mut s = 7;
        for _ in 0..1000 {
            let v = draw_int(&mut s, 10);
            assert!((-10..=10).contains(&v));
        }
        assert_eq!(draw_int(&mut s, 0), 0);
    }
}
