//! Number formatting for terminal tables.

/// Rounds to two decimals, half away from zero, working on the shortest
/// decimal representation of `v` so that `0.125` becomes `0.13`. Trailing
/// zeros are dropped: `1.0` prints as `1`, `0.5` as `0.5`.
pub fn round2(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let text = v.abs().to_string();
    let (int_part, frac_part) = text.split_once('.').unwrap_or((&text, ""));
    let mut digits: Vec<u8> = int_part.bytes().map(|b| b - b'0').collect();
    let int_len = digits.len();
    let frac: Vec<u8> = frac_part.bytes().map(|b| b - b'0').collect();
    digits.extend((0..2).map(|i| frac.get(i).copied().unwrap_or(0)));
    if frac.get(2).is_some_and(|&d| d >= 5) {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, 1);
                break;
            }
            i -= 1;
            if digits[i] == 9 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let split = digits.len() - 2;
    debug_assert!(split >= int_len);
    let int_str: String = digits[..split].iter().map(|d| char::from(b'0' + d)).collect();
    let frac_str: String = digits[split..].iter().map(|d| char::from(b'0' + d)).collect();
    let frac_str = frac_str.trim_end_matches('0');
    let body = if frac_str.is_empty() {
        int_str
    } else {
        format!("{int_str}.{frac_str}")
    };
    if v < 0.0 && !body.trim_start_matches(['0', '.']).is_empty() {
        format!("-{body}")
    } else {
        body
    }
}

/// Formats a p-value: two decimals, or `<0.001` for tiny values.
pub fn p_value(p: f64) -> String {
    if p < 0.001 {
        "<0.001".to_string()
    } else if p < 0.01 {
        format!("{p:.3}")
    } else {
        round2(p)
    }
}
