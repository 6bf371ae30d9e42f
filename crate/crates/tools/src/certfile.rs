//! Line-oriented certificate files.
//!
//! ```text
//! FIELD prime 101
//! NVARS 2
//! AXIOM x1 + x2 - 3
//! BOOLEAN on
//! LINEARITY lin_yz
//! PROOF (+ ...)
//! ```
//!
//! `PROOF` comes last; a roABP proof continues over the following lines.

use std::fmt::Write as _;

use ips_core::ips::{AxiomSystem, IpsCertificate, Linearity};
use ips_core::{Error, FieldSpec, Result, VarLayout};

use crate::text::{parse_poly, parse_proof, poly_to_text, proof_to_text};

pub fn parse_field(s: &str) -> Result<FieldSpec> {
    let s = s.trim();
    if s == "rational" {
        return Ok(FieldSpec::Rational);
    }
    let p = s
        .strip_prefix("p=")
        .or_else(|| s.strip_prefix("prime "))
        .ok_or_else(|| Error::Parse(format!("field must be 'rational' or 'p=<prime>', got '{s}'")))?;
    let p: u64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad prime '{p}'")))?;
    FieldSpec::prime(p)
}

fn field_line(spec: FieldSpec) -> String {
    match spec {
        FieldSpec::Prime(p) => format!("FIELD prime {p}"),
        FieldSpec::Rational => "FIELD rational".into(),
    }
}

pub fn write_certificate(cert: &IpsCertificate) -> Result<String> {
    let sys = &cert.system;
    let plain = VarLayout::plain(sys.nvars);
    let mut out = String::new();
    let _ = writeln!(out, "{}", field_line(sys.spec));
    let _ = writeln!(out, "NVARS {}", sys.nvars);
    for a in &sys.axioms {
        let _ = writeln!(out, "AXIOM {}", poly_to_text(a, &plain));
    }
    let _ = writeln!(out, "BOOLEAN {}", if sys.include_boolean { "on" } else { "off" });
    let _ = writeln!(out, "LINEARITY {}", cert.linearity.name());
    let _ = writeln!(out, "PROOF {}", proof_to_text(&cert.proof, &cert.layout())?.trim_end());
    Ok(out)
}

pub fn parse_certificate(src: &str) -> Result<IpsCertificate> {
    let mut spec = None;
    let mut nvars = None;
    let mut axioms_text: Vec<&str> = Vec::new();
    let mut boolean = None;
    let mut linearity = None;
    let mut proof: Option<String> = None;
    for (no, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(p) = proof.as_mut() {
            p.push('\n');
            p.push_str(line);
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let dup = || Error::Parse(format!("line {}: duplicate {key}", no + 1));
        match key {
            "FIELD" => {
                if spec.replace(parse_field(rest)?).is_some() {
                    return Err(dup());
                }
            }
            "NVARS" => {
                let n: usize = rest.parse().map_err(|_| Error::Parse(format!("line {}: bad NVARS '{rest}'", no + 1)))?;
                if nvars.replace(n).is_some() {
                    return Err(dup());
                }
            }
            "AXIOM" => axioms_text.push(rest),
            "BOOLEAN" => {
                let b = match rest {
                    "on" => true,
                    "off" => false,
                    _ => return Err(Error::Parse(format!("line {}: BOOLEAN must be on or off", no + 1))),
                };
                if boolean.replace(b).is_some() {
                    return Err(dup());
                }
            }
            "LINEARITY" => {
                if linearity.replace(Linearity::parse(rest)?).is_some() {
                    return Err(dup());
                }
            }
            "PROOF" => proof = Some(rest.to_string()),
            _ => return Err(Error::Parse(format!("line {}: unknown section '{key}'", no + 1))),
        }
    }
    let missing = |what: &str| Error::Parse(format!("certificate lacks {what}"));
    let spec = spec.ok_or_else(|| missing("FIELD"))?;
    let n = nvars.ok_or_else(|| missing("NVARS"))?;
    let proof = proof.ok_or_else(|| missing("PROOF"))?;
    let plain = VarLayout::plain(n);
    let axioms = axioms_text.iter().map(|a| parse_poly(spec, n, &plain, a)).collect::<Result<Vec<_>>>()?;
    let system = AxiomSystem::new(spec, n, axioms, boolean.ok_or_else(|| missing("BOOLEAN"))?)?;
    let layout = system.layout();
    let circuit = parse_proof(spec, layout.total(), &layout, &proof)?;
    IpsCertificate::new(system, circuit, linearity.ok_or_else(|| missing("LINEARITY"))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ips_core::ips::{build_mlformula_refutation, build_roabp_refutation};
    use ips_core::poly::Budget;

    fn ones(spec: FieldSpec, n: usize) -> Vec<ips_core::FieldElement> {
        vec![spec.one(); n]
    }

    #[test]
    fn field_syntax() {
        assert_eq!(parse_field("p=101").unwrap(), FieldSpec::Prime(101));
        assert_eq!(parse_field("prime 7").unwrap(), FieldSpec::Prime(7));
        assert_eq!(parse_field("rational").unwrap(), FieldSpec::Rational);
        assert!(parse_field("p=100").is_err());
        assert!(parse_field("reals").is_err());
    }

    #[test]
    fn round_trips_verify_identically() {
        let f = FieldSpec::Prime(10007);
        let r = build_roabp_refutation(&ones(f, 3), &f.int(4), &[0, 1, 2]).unwrap();
        let m = build_mlformula_refutation(&ones(FieldSpec::Rational, 3), &FieldSpec::Rational.int(4)).unwrap();
        for cert in [r.cert, m] {
            let text = write_certificate(&cert).unwrap();
            let back = parse_certificate(&text).unwrap();
            let mut b = Budget::new(1 << 26);
            assert_eq!(back.verify_exact(&mut b).unwrap(), cert.verify_exact(&mut b).unwrap());
            assert_eq!(back.system, cert.system);
            assert_eq!(back.linearity, cert.linearity);
            assert_eq!(write_certificate(&back).unwrap(), text);
        }
    }

    #[test]
    fn malformed_files() {
        let good = "FIELD rational\nNVARS 1\nAXIOM x1 - 1/2\nBOOLEAN on\nLINEARITY lin_yz\nPROOF (+ (scale 2 y1))\n";
        assert!(parse_certificate(good).is_ok());
        for bad in [
            good.replace("NVARS 1\n", ""),
            good.replace("FIELD rational", "FIELD reals"),
            good.replace("BOOLEAN on", "BOOLEAN maybe"),
            good.replace("LINEARITY lin_yz", "LINEARITY cubic"),
            good.replace("(scale 2 y1)", "(scale 2 y2)"),
            good.replace("AXIOM x1", "AXIOM x2"),
            format!("{good}EXTRA"),
            format!("COLOR red\n{good}"),
        ] {
            assert!(parse_certificate(&bad).is_err(), "{bad}");
        }
    }
}
