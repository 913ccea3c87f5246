//! Hexadecimal floating-point text encoding (`0x1.8p-1` style), exact for every
//! finite `f64`.

pub fn format(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if exp == 0 && mant == 0 {
        return Some(format!("{sign}0x0p+0"));
    }
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let frac = format!("{mant:013x}");
    let frac = frac.trim_end_matches('0');
    let es = if e >= 0 { format!("+{e}") } else { e.to_string() };
    Some(if frac.is_empty() {
        format!("{sign}0x{lead}p{es}")
    } else {
        format!("{sign}0x{lead}.{frac}p{es}")
    })
}

fn scale_pow2(mut x: f64, mut e: i64) -> f64 {
    let big = f64::from_bits(((1023 + 1000) as u64) << 52); // 2^1000
    let small = f64::from_bits(((1023 - 1000) as u64) << 52); // 2^-1000
    while e > 1000 {
        x *= big;
        e -= 1000;
    }
    while e < -1000 {
        x *= small;
        e += 1000;
    }
    x * f64::from_bits(((1023 + e) as u64) << 52)
}

pub fn parse(s: &str) -> Option<f64> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let body = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X"))?;
    let (mant_str, exp_str) = body.split_once(['p', 'P'])?;
    let (int_part, frac_part) = mant_str.split_once('.').unwrap_or((mant_str, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = digits.trim_start_matches('0');
    if digits.len() > 28 {
        return None;
    }
    let m = if digits.is_empty() {
        0u128
    } else {
        u128::from_str_radix(digits, 16).ok()?
    };
    let exp: i64 = exp_str.parse().ok()?;
    let value = scale_pow2(m as f64, exp - 4 * frac_part.len() as i64);
    Some(if neg { -value } else { value })
}
