//! Engineering-unit parsing for CLI values.
//!
//! Suffixes are case-insensitive and optional; bare numbers are SI
//! (henries, farads, hertz, ohms, radians). `2.3nH`, `0.47pF`, `2.4GHz`,
//! `-80deg`, `377ohm` all parse; so do `2.3e-9` and `1.5707rad`.

/// Physical dimension a flag value is parsed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Inductance,
    Capacitance,
    Frequency,
    Resistance,
    Angle,
    Dimensionless,
}

impl Dimension {
    fn name(&self) -> &'static str {
        match self {
            Dimension::Inductance => "inductance",
            Dimension::Capacitance => "capacitance",
            Dimension::Frequency => "frequency",
            Dimension::Resistance => "resistance",
            Dimension::Angle => "angle",
            Dimension::Dimensionless => "dimensionless value",
        }
    }

    /// Accepted suffixes, longest first, with their SI scale. Angle scales
    /// of 0.0 mark the degree suffix (converted separately).
    fn suffixes(&self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Inductance => &[
                ("ph", 1e-12),
                ("nh", 1e-9),
                ("uh", 1e-6),
                ("mh", 1e-3),
                ("h", 1.0),
            ],
            Dimension::Capacitance => &[
                ("ff", 1e-15),
                ("pf", 1e-12),
                ("nf", 1e-9),
                ("uf", 1e-6),
                ("mf", 1e-3),
                ("f", 1.0),
            ],
            Dimension::Frequency => &[
                ("thz", 1e12),
                ("ghz", 1e9),
                ("mhz", 1e6),
                ("khz", 1e3),
                ("hz", 1.0),
            ],
            Dimension::Resistance => &[("ohms", 1.0), ("ohm", 1.0)],
            Dimension::Angle => &[("rad", 1.0), ("deg", 0.0)],
            Dimension::Dimensionless => &[],
        }
    }
}

/// Parse `input` as a quantity of dimension `dim`, returning the SI value.
pub fn parse_quantity(input: &str, dim: Dimension) -> Result<f64, String> {
    let trimmed = input.trim();
    let lower = trimmed.to_ascii_lowercase();

    let (number_part, scale, degrees) = match dim
        .suffixes()
        .iter()
        .find(|(suffix, _)| lower.ends_with(suffix))
    {
        Some((suffix, scale)) => {
            let cut = lower.len() - suffix.len();
            (
                &lower[..cut],
                if *scale == 0.0 { 1.0 } else { *scale },
                *scale == 0.0,
            )
        }
        None => (lower.as_str(), 1.0, false),
    };

    let value: f64 = number_part
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse {} '{}'", dim.name(), trimmed))?;
    if !value.is_finite() {
        return Err(format!("{} '{}' is not finite", dim.name(), trimmed));
    }
    Ok(if degrees {
        value.to_radians()
    } else {
        value * scale
    })
}

/// Parse `lo:hi` into an inclusive interval of dimension `dim`.
pub fn parse_interval(input: &str, dim: Dimension) -> Result<(f64, f64), String> {
    let (lo, hi) = input
        .split_once(':')
        .ok_or_else(|| format!("expected 'lo:hi', got '{input}'"))?;
    Ok((parse_quantity(lo, dim)?, parse_quantity(hi, dim)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Suffix scaling multiplies, so allow an ulp against decimal literals.
    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 4.0 * f64::EPSILON * b.abs()
    }

    #[test]
    fn suffixes_scale_to_si() {
        assert!(close(
            parse_quantity("2.3nH", Dimension::Inductance).unwrap(),
            2.3e-9
        ));
        assert!(close(
            parse_quantity("0.47pF", Dimension::Capacitance).unwrap(),
            0.47e-12
        ));
        assert!(close(
            parse_quantity("2.4GHz", Dimension::Frequency).unwrap(),
            2.4e9
        ));
        assert_eq!(
            parse_quantity("377ohm", Dimension::Resistance).unwrap(),
            377.0
        );
        assert_eq!(
            parse_quantity("377 OHMS", Dimension::Resistance).unwrap(),
            377.0
        );
        let eighty = parse_quantity("-80deg", Dimension::Angle).unwrap();
        assert!((eighty + 80.0f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn bare_numbers_are_si() {
        assert_eq!(
            parse_quantity("2.3e-9", Dimension::Inductance).unwrap(),
            2.3e-9
        );
        assert_eq!(parse_quantity("1.5", Dimension::Angle).unwrap(), 1.5);
        assert_eq!(
            parse_quantity("0.8", Dimension::Dimensionless).unwrap(),
            0.8
        );
    }

    #[test]
    fn case_insensitive_and_spaced() {
        assert!(close(
            parse_quantity("2.4ghz", Dimension::Frequency).unwrap(),
            2.4e9
        ));
        assert!(close(
            parse_quantity(" 1.55 pF ", Dimension::Capacitance).unwrap(),
            1.55e-12
        ));
        assert!(close(
            parse_quantity("1.6E0pf", Dimension::Capacitance).unwrap(),
            1.6e-12
        ));
    }

    #[test]
    fn trailing_f_is_the_farad_suffix() {
        assert_eq!(parse_quantity("1.5f", Dimension::Capacitance).unwrap(), 1.5);
        assert_eq!(
            parse_quantity("2e-12", Dimension::Capacitance).unwrap(),
            2e-12
        );
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(parse_quantity("fast", Dimension::Frequency).is_err());
        assert!(parse_quantity("", Dimension::Capacitance).is_err());
        assert!(parse_quantity("nan", Dimension::Resistance).is_err());
        assert!(parse_quantity("inf", Dimension::Frequency).is_err());
        assert!(parse_quantity("1.2.3pF", Dimension::Capacitance).is_err());
    }

    #[test]
    fn intervals() {
        let (lo, hi) = parse_interval("2.3nH:2.5nH", Dimension::Inductance).unwrap();
        assert!(close(lo, 2.3e-9) && close(hi, 2.5e-9));
        assert!(parse_interval("2.3nH", Dimension::Inductance).is_err());
    }
}
