//! Human-readable quantities. Byte multiples are binary (1 KB = 1024 B).

pub fn bytes(n: u64) -> String {
    const UNITS: [&str; 4] = ["KB", "MB", "GB", "TB"];
    if n < 1024 {
        return format!("{n} B");
    }
    let mut v = n as f64;
    let mut unit = "B";
    for u in UNITS {
        if v < 1024.0 {
            break;
        }
        v /= 1024.0;
        unit = u;
    }
    format!("{n} B ({v:.2} {unit})")
}

/// Count with an SI-style suffix, e.g. `1248424 (1.25M)`.
pub fn count(n: u64, suffix: &str) -> String {
    let scaled = match n {
        0..=9_999 => return format!("{n} {suffix}"),
        10_000..=999_999 => format!("{:.2}K", n as f64 / 1e3),
        1_000_000..=999_999_999 => format!("{:.2}M", n as f64 / 1e6),
        _ => format!("{:.2}G", n as f64 / 1e9),
    };
    format!("{n} {suffix} ({scaled})")
}

pub fn joules(j: f64) -> String {
    let (v, unit) = if j == 0.0 {
        (0.0, "J")
    } else if j < 1e-6 {
        (j * 1e9, "nJ")
    } else if j < 1e-3 {
        (j * 1e6, "uJ")
    } else if j < 1.0 {
        (j * 1e3, "mJ")
    } else {
        (j, "J")
    };
    format!("{v:.3} {unit}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(bytes(512), "512 B");
        assert_eq!(bytes(4_993_696), "4993696 B (4.76 MB)");
        assert_eq!(count(64, "MACs"), "64 MACs");
        assert_eq!(count(1_248_424, "params"), "1248424 params (1.25M)");
        assert_eq!(joules(2e-4), "200.000 uJ");
    }
}
