use super::engine::VerifyError;
use crate::counters::is_square;
use num_integer::Roots;

/// `PD_k(n) mod 2` for `n = 0..=n_max` from
///
/// `PD_k(n) + sum_{l >= 1, 3 ∤ l} PD_k(n - l^2) ≡ [n = 0 or n = k m^2, 3 ∤ m] (mod 2)`,
///
/// using `O(n_max^{3/2})` bit operations and no series arithmetic.
pub fn recurrence_pdk_mod2(k: u64, n_max: usize) -> Result<Vec<u8>, VerifyError> {
    if k < 2 {
        return Err(VerifyError::Parameter(format!(
            "k must be at least 2, got {k}"
        )));
    }
    let squares: Vec<usize> = (1..)
        .map(|l: usize| (l, l * l))
        .take_while(|&(_, s)| s <= n_max)
        .filter(|&(l, _)| l % 3 != 0)
        .map(|(_, s)| s)
        .collect();
    let mut bits = vec![0u8; n_max + 1];
    for n in 0..=n_max {
        let mut acc = source_bit(k, n as u64);
        for &s in &squares {
            if s > n {
                break;
            }
            acc ^= bits[n - s];
        }
        bits[n] = acc;
    }
    Ok(bits)
}

fn source_bit(k: u64, n: u64) -> u8 {
    if n == 0 {
        return 1;
    }
    if !n.is_multiple_of(k) || !is_square(n / k) {
        return 0;
    }
    !(n / k).sqrt().is_multiple_of(3) as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counters::oracle_pdk;

    #[test]
    fn k2_is_square_indicator() {
        let bits = recurrence_pdk_mod2(2, 5000).unwrap();
        for (n, b) in bits.iter().enumerate() {
            let expected = n == 0 || (is_square(n as u64) && !(n as u64).sqrt().is_multiple_of(3));
            assert_eq!(*b == 1, expected, "n = {n}");
        }
    }

    #[test]
    fn small_values_match_oracle() {
        for k in [3, 4, 5, 7] {
            let bits = recurrence_pdk_mod2(k, 40).unwrap();
            for (n, &bit) in bits.iter().enumerate() {
                let parity = (oracle_pdk(k, n as u64).unwrap() % 2u8) == 1u8.into();
                assert_eq!(bit == 1, parity, "k = {k}, n = {n}");
            }
        }
        assert_eq!(recurrence_pdk_mod2(4, 6).unwrap()[6], 1);
        assert_eq!(recurrence_pdk_mod2(3, 2).unwrap()[2], 1);
        assert!(recurrence_pdk_mod2(1, 10).is_err());
    }
}
