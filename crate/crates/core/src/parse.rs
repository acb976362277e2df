//! Text specs for distributions: `exp:<lambda>`, `zeta:<q>`, `det:<tau0>`,
//! `custom:<path>` where the path names a two-column CSV `tau,prob` with an
//! optional final `tail,<prob>` row.

use std::path::Path;

use crate::dist::TrappingDistribution;
use crate::error::{Error, Result};

/// Parses a distribution spec string.
pub fn parse_spec(text: &str) -> Result<TrappingDistribution> {
    let (kind, rest) = match text.split_once(':') {
        Some(parts) => parts,
        None => {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("expected `<kind>:<arg>`, got `{text}`"),
            })
        }
    };
    let arg_pos = kind.len() + 1;
    match kind {
        "exp" => {
            let lambda = parse_f64(rest, arg_pos)?;
            TrappingDistribution::exponential(lambda)
        }
        "zeta" => {
            let q = parse_f64(rest, arg_pos)?;
            TrappingDistribution::power_law_zeta(q)
        }
        "det" => {
            let tau0: u64 = rest.parse().map_err(|_| Error::Parse {
                pos: arg_pos,
                msg: format!("expected a non-negative integer, got `{rest}`"),
            })?;
            Ok(TrappingDistribution::deterministic(tau0))
        }
        "custom" => load_custom_csv(Path::new(rest)),
        other => Err(Error::Parse {
            pos: 0,
            msg: format!("unknown distribution kind `{other}` (expected exp|zeta|det|custom)"),
        }),
    }
}

fn parse_f64(text: &str, pos: usize) -> Result<f64> {
    text.parse().map_err(|_| Error::Parse {
        pos,
        msg: format!("expected a number, got `{text}`"),
    })
}

/// Loads a custom pmf CSV (`tau,prob` header, rows sorted by tau, optional
/// final `tail,<prob>` row holding the unlisted mass).
pub fn load_custom_csv(path: &Path) -> Result<TrappingDistribution> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        pos: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_custom_csv(&text)
}

/// Parses custom pmf CSV text; `pos` in errors is the 1-based line number.
pub fn parse_custom_csv(text: &str) -> Result<TrappingDistribution> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "tau,prob" => {}
        Some((_, header)) => {
            return Err(Error::Parse {
                pos: 1,
                msg: format!("expected header `tau,prob`, got `{}`", header.trim()),
            })
        }
        None => {
            return Err(Error::Parse {
                pos: 1,
                msg: "empty pmf file".into(),
            })
        }
    }
    let mut entries: Vec<(u64, f64)> = Vec::new();
    let mut tail_atom: Option<f64> = None;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if tail_atom.is_some() {
            return Err(Error::Parse {
                pos: line_no,
                msg: "the `tail` row must be the last row".into(),
            });
        }
        let (tau_txt, prob_txt) = line.split_once(',').ok_or_else(|| Error::Parse {
            pos: line_no,
            msg: format!("expected `tau,prob`, got `{line}`"),
        })?;
        let prob: f64 = prob_txt.trim().parse().map_err(|_| Error::Parse {
            pos: line_no,
            msg: format!("bad probability `{}`", prob_txt.trim()),
        })?;
        if tau_txt.trim() == "tail" {
            tail_atom = Some(prob);
        } else {
            let tau: u64 = tau_txt.trim().parse().map_err(|_| Error::Parse {
                pos: line_no,
                msg: format!("bad tau `{}`", tau_txt.trim()),
            })?;
            entries.push((tau, prob));
        }
    }
    TrappingDistribution::custom(&entries, tail_atom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_specs() {
        assert_eq!(
            parse_spec("exp:0.5").unwrap(),
            TrappingDistribution::Exponential { lambda: 0.5 }
        );
        assert_eq!(
            parse_spec("zeta:2.01").unwrap(),
            TrappingDistribution::PowerLawZeta { q: 2.01 }
        );
        assert_eq!(
            parse_spec("det:3").unwrap(),
            TrappingDistribution::Deterministic { tau0: 3 }
        );
    }

    #[test]
    fn rejects_invalid_parameters_as_validation() {
        assert!(matches!(parse_spec("exp:1.5"), Err(Error::Validation(_))));
        assert!(matches!(parse_spec("zeta:1.0"), Err(Error::Validation(_))));
    }

    #[test]
    fn reports_parse_position() {
        match parse_spec("gauss:1") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 0),
            other => panic!("unexpected {other:?}"),
        }
        match parse_spec("exp:abc") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_spec("exp").is_err());
    }

    #[test]
    fn custom_csv_round_trip() {
        let d = parse_custom_csv("tau,prob\n0,0.25\n2,0.5\ntail,0.25\n").unwrap();
        assert_eq!(d.pmf(0), 0.25);
        assert_eq!(d.pmf(1), 0.0);
        assert_eq!(d.pmf(2), 0.5);
        assert_eq!(d.pmf(3), 0.25);
        assert!(parse_custom_csv("tau,prob\n0,0.25\n").is_err());
        assert!(parse_custom_csv("t,prob\n0,1\n").is_err());
        assert!(parse_custom_csv("tau,prob\ntail,0.5\n0,0.5\n").is_err());
    }
}
