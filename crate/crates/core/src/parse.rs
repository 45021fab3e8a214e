//! Shorthand and JSON function specifications.
//!
//! ```text
//! power:3/2            logpower:1,1          const:2
//! monomial:4           series:1,0.5i,-1/3    lacunary:ones | lacunary:1 | lacunary:1,2
//! kernel:0.5,0,1,2     (2+0i)*power:1        {"family": "power", "params": {"gamma": "3/2"}}
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::{AnalyticFunction, Lacunary};
use crate::rational::{int, parse_rational, to_f64};

/// Parses a function from shorthand, or from JSON when the input starts with `{`.
pub fn parse_function(input: &str) -> Result<AnalyticFunction> {
    let s = input.trim();
    if s.starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::Parse(format!("function JSON: {e}")))?;
        return AnalyticFunction::from_json(&v);
    }
    let f = parse_shorthand(s)?;
    f.validate()?;
    Ok(f)
}

fn parse_shorthand(s: &str) -> Result<AnalyticFunction> {
    if let Some(rest) = s.strip_prefix('(') {
        let (factor, inner) = rest
            .split_once(")*")
            .ok_or_else(|| Error::Parse(format!("'{s}': expected '(factor)*function'")))?;
        return Ok(parse_shorthand(inner)?.scaled(parse_complex(factor)?));
    }
    let (family, args) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("'{s}': expected 'family:arguments', e.g. power:3/2")))?;
    let args: Vec<&str> = args.split(',').map(str::trim).collect();
    let arity = |n: &[usize]| -> Result<()> {
        if n.contains(&args.len()) {
            Ok(())
        } else {
            Err(Error::Parse(format!("'{family}' takes {n:?} arguments, got {}", args.len())))
        }
    };
    match family.trim() {
        "power" => {
            arity(&[1])?;
            Ok(AnalyticFunction::power(parse_rational(args[0])?))
        }
        "logpower" => {
            arity(&[2])?;
            Ok(AnalyticFunction::log_power(parse_rational(args[0])?, parse_rational(args[1])?))
        }
        "const" => {
            arity(&[1])?;
            Ok(AnalyticFunction::Series { coeffs: vec![parse_complex(args[0])?] })
        }
        "monomial" => {
            arity(&[1])?;
            let k = args[0].parse::<u32>().map_err(|_| Error::Parse(format!("'{}' is not a monomial degree", args[0])))?;
            Ok(AnalyticFunction::monomial(k))
        }
        "series" => {
            let coeffs = args.iter().map(|a| parse_complex(a)).collect::<Result<Vec<_>>>()?;
            Ok(AnalyticFunction::Series { coeffs })
        }
        "lacunary" => {
            arity(&[1, 2])?;
            let lac = match args.as_slice() {
                ["ones"] => Lacunary::ones(),
                [beta] => Lacunary::geometric(parse_rational(beta)?, int(0)),
                [beta, kappa] => Lacunary::geometric(parse_rational(beta)?, parse_rational(kappa)?),
                _ => unreachable!(),
            };
            Ok(AnalyticFunction::Lacunary(lac))
        }
        "kernel" => {
            arity(&[4])?;
            let center = Complex64::new(parse_real(args[0])?, parse_real(args[1])?);
            AnalyticFunction::kernel(center, parse_rational(args[2])?, parse_rational(args[3])?)
        }
        other => Err(Error::Parse(format!(
            "unknown family '{other}' (expected power, logpower, const, monomial, series, lacunary or kernel)"
        ))),
    }
}

/// A real number given as a decimal or an exact fraction.
fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.contains('/') {
        return Ok(to_f64(&parse_rational(s)?));
    }
    let x: f64 = s.parse().map_err(|_| Error::Parse(format!("'{s}' is not a number")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Parse(format!("'{s}' is not finite")))
    }
}

/// `a`, `bi`, `a+bi` or `a-bi`.
fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(s)?, 0.0));
    };
    // split at the last sign that is not part of an exponent or the leading sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            t => parse_real(t),
        }
    };
    match split {
        Some(i) => Ok(Complex64::new(parse_real(&body[..i])?, imag(&body[i..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::standard_battery;
    use crate::rational::ratio;

    #[test]
    fn shorthand_families() {
        assert_eq!(parse_function("power:3/2").unwrap(), AnalyticFunction::power(ratio(3, 2)));
        assert_eq!(parse_function(" logpower:1,1 ").unwrap(), AnalyticFunction::log_power(int(1), int(1)));
        assert_eq!(parse_function("const:2").unwrap(), AnalyticFunction::constant(2.0));
        assert_eq!(parse_function("monomial:4").unwrap(), AnalyticFunction::monomial(4));
        assert_eq!(
            parse_function("series:1,0.5i,-1/3").unwrap(),
            AnalyticFunction::Series {
                coeffs: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5), Complex64::new(-1.0 / 3.0, 0.0)]
            }
        );
        assert_eq!(parse_function("lacunary:ones").unwrap(), AnalyticFunction::Lacunary(Lacunary::ones()));
        assert_eq!(
            parse_function("lacunary:1,2").unwrap(),
            AnalyticFunction::Lacunary(Lacunary::geometric(int(1), int(2)))
        );
        assert_eq!(
            parse_function("kernel:0.5,0,1,2").unwrap(),
            AnalyticFunction::kernel(Complex64::new(0.5, 0.0), int(1), int(2)).unwrap()
        );
        assert_eq!(
            parse_function("(2-1i)*power:1").unwrap(),
            AnalyticFunction::power(int(1)).scaled(Complex64::new(2.0, -1.0))
        );
    }

    #[test]
    fn complex_tokens() {
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3-2e+1i").unwrap(), Complex64::new(1e-3, -20.0));
        assert_eq!(parse_complex("-0.5+i").unwrap(), Complex64::new(-0.5, 1.0));
    }

    #[test]
    fn labels_round_trip() {
        for f in standard_battery() {
            assert_eq!(parse_function(&f.label()).unwrap(), f, "{}", f.label());
        }
    }

    #[test]
    fn json_input() {
        let f = AnalyticFunction::log_power(ratio(3, 2), int(2));
        let text = f.to_json().unwrap().to_string();
        assert_eq!(parse_function(&text).unwrap(), f);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "", "power", "power:", "power:1.5", "monomial:-1", "kernel:1,0,1,2", "lacunary:1,2,3",
            "wave:1", "const:nan", "(2*power:1", "{\"family\":1}", "series:",
        ] {
            assert!(parse_function(bad).is_err(), "{bad}");
        }
    }
}
