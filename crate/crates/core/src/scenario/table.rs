//! Comma-separated tables with 12 significant digits.

use crate::stochastic::OpinionVector;

const SIG_DIGITS: usize = 12;

/// Formats `v` like C's `%.12g`: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros trimmed.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn push_row(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let row: Vec<String> = cells.into_iter().collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

/// `time,x1,...,xn`.
pub(crate) fn trajectory_csv(traj: &[OpinionVector], start: usize) -> String {
    let n = traj.first().map_or(0, OpinionVector::len);
    let mut out = String::new();
    push_row(
        &mut out,
        std::iter::once("time".to_string()).chain((1..=n).map(|i| format!("x{i}"))),
    );
    for (k, x) in traj.iter().enumerate() {
        push_row(
            &mut out,
            std::iter::once((start + k).to_string()).chain(x.as_slice().iter().map(|&v| format_sig(v))),
        );
    }
    out
}

/// `time,<name1>,<name2>,...` with one series per column.
pub(crate) fn series_csv(names: &[&str], series: &[&[f64]], start: usize) -> String {
    let len = series.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut out = String::new();
    push_row(
        &mut out,
        std::iter::once("time".to_string()).chain(names.iter().map(|s| s.to_string())),
    );
    for k in 0..len {
        push_row(
            &mut out,
            std::iter::once((start + k).to_string()).chain(
                series
                    .iter()
                    .map(|s| s.get(k).map_or_else(String::new, |&v| format_sig(v))),
            ),
        );
    }
    out
}

/// Arbitrary rows under a header.
pub(crate) fn rows_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    push_row(&mut out, header.iter().map(|s| s.to_string()));
    for r in rows {
        push_row(&mut out, r.iter().cloned());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(0.5), "0.5");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_sig(-123.456), "-123.456");
        assert_eq!(format_sig(1e-7), "1e-7");
        assert_eq!(format_sig(-2.5e-5), "-2.5e-5");
        assert_eq!(format_sig(1.5e-5), "1.5e-5");
        assert_eq!(format_sig(0.0001234), "0.0001234");
        assert_eq!(format_sig(123456789012345.0), "1.23456789012e14");
    }

    #[test]
    fn formatted_values_round_trip_to_twelve_digits() {
        for &v in &[0.123456789012345, 9.87654321e-3, 0.999999999999, 1e-300] {
            let back: f64 = format_sig(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 1e-11, "{v} -> {back}");
        }
    }

    #[test]
    fn trajectory_header_and_rows() {
        let traj = vec![
            OpinionVector::new(vec![0.0, 1.0]).unwrap(),
            OpinionVector::new(vec![0.25, 0.5]).unwrap(),
        ];
        assert_eq!(trajectory_csv(&traj, 0), "time,x1,x2\n0,0,1\n1,0.25,0.5\n");
        let csv = series_csv(&["a", "b"], &[&[1.0, 0.5], &[2.0]], 3);
        assert_eq!(csv, "time,a,b\n3,1,2\n4,0.5,\n");
    }
}
