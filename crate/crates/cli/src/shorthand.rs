//! Compact command-line spellings of surfaces, families and annuli.

use crate::config::{AmbientBlock, FamilyBlock, SurfaceBlock};

fn numbers(text: &str, what: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number `{t}` in {what}"))
        })
        .collect()
}

fn split(spec: &str) -> (&str, Option<&str>) {
    match spec.split_once(':') {
        Some((k, rest)) => (k, Some(rest)),
        None => (spec, None),
    }
}

fn arity(values: &[f64], n: usize, spec: &str) -> Result<(), String> {
    if values.len() == n {
        Ok(())
    } else {
        Err(format!("`{spec}` needs {n} parameter(s), got {}", values.len()))
    }
}

/// Ambient and surface blocks for `round-sphere:R`, `ellipsoid:a,b,c`, `flat-torus[:p0,p1,p2]`,
/// `torus-of-revolution:R,r` or `dumbbell:neck`.
pub fn parse_surface(spec: &str, resolution: usize) -> Result<(AmbientBlock, SurfaceBlock), String> {
    let (kind, rest) = split(spec);
    let values = rest.map(|r| numbers(r, spec)).transpose()?.unwrap_or_default();
    let euclidean = AmbientBlock {
        kind: "euclidean".into(),
        dim: 3,
        periods: None,
        radius: None,
    };
    let mut block = SurfaceBlock {
        family: kind.into(),
        resolution,
        ..SurfaceBlock::default()
    };
    let ambient = match kind {
        "round-sphere" => {
            arity(&values, 1, spec)?;
            block.radius = Some(values[0]);
            euclidean
        }
        "ellipsoid" => {
            arity(&values, 3, spec)?;
            block.axes = Some([values[0], values[1], values[2]]);
            euclidean
        }
        "torus-of-revolution" => {
            arity(&values, 2, spec)?;
            block.major = Some(values[0]);
            block.minor = Some(values[1]);
            euclidean
        }
        "dumbbell" => {
            arity(&values, 1, spec)?;
            block.neck = Some(values[0]);
            euclidean
        }
        "flat-torus" => {
            let periods = if values.is_empty() { vec![1.0; 3] } else { values };
            arity(&periods, 3, spec)?;
            AmbientBlock {
                kind: "flat-torus".into(),
                dim: 3,
                periods: Some(periods),
                radius: None,
            }
        }
        other => return Err(format!("unknown surface `{other}`")),
    };
    Ok((ambient, block))
}

/// `dumbbell:0.2,0.1,0.05` or `round-sphere:1,1,1`.
pub fn parse_family(spec: &str, resolution: usize, samples: usize) -> Result<FamilyBlock, String> {
    let (kind, rest) = split(spec);
    let rest = rest.ok_or_else(|| format!("`{spec}` lists no parameters"))?;
    Ok(FamilyBlock {
        kind: kind.into(),
        parameters: numbers(rest, spec)?,
        resolution,
        samples,
    })
}

/// A parsed `--annulus` value.
#[derive(Debug, Clone, PartialEq)]
pub enum AnnulusSpec {
    Right { height: f64, circumference: f64 },
    Round { outer: f64, inner: f64 },
    Mesh(String),
}

/// `right:H,W`, `round:r,rho`, or anything else as an OFF path.
pub fn parse_annulus(spec: &str) -> Result<AnnulusSpec, String> {
    match split(spec) {
        ("right", Some(rest)) => {
            let v = numbers(rest, spec)?;
            arity(&v, 2, spec)?;
            Ok(AnnulusSpec::Right {
                height: v[0],
                circumference: v[1],
            })
        }
        ("round", Some(rest)) => {
            let v = numbers(rest, spec)?;
            arity(&v, 2, spec)?;
            Ok(AnnulusSpec::Round {
                outer: v[0],
                inner: v[1],
            })
        }
        _ => Ok(AnnulusSpec::Mesh(spec.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surfaces_parse() {
        let (a, s) = parse_surface("round-sphere:1.5", 32).unwrap();
        assert_eq!(a.kind, "euclidean");
        assert_eq!(s.radius, Some(1.5));
        let (a, _) = parse_surface("flat-torus", 32).unwrap();
        assert_eq!(a.periods, Some(vec![1.0; 3]));
        assert!(parse_surface("ellipsoid:1,2", 32).is_err());
        assert!(parse_surface("cube:1", 32).is_err());
    }

    #[test]
    fn annuli_parse() {
        assert_eq!(
            parse_annulus("right:2,1").unwrap(),
            AnnulusSpec::Right {
                height: 2.0,
                circumference: 1.0
            }
        );
        assert_eq!(parse_annulus("a.off").unwrap(), AnnulusSpec::Mesh("a.off".into()));
    }

    #[test]
    fn families_parse() {
        let f = parse_family("dumbbell:0.2,0.1,0.05", 64, 10).unwrap();
        assert_eq!(f.parameters, vec![0.2, 0.1, 0.05]);
        assert!(parse_family("dumbbell", 64, 10).is_err());
    }
}
