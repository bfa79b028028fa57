//! `tag[:key=value,...]` descriptors.

use super::{Family, Geometry};
use crate::error::{Error, Result};

const TAGS: [&str; 8] = [
    "radon",
    "funk",
    "hgeodesic",
    "equidistant",
    "ellipse",
    "hyperbola",
    "parabola",
    "cormack",
];

fn allowed(tag: &str) -> &'static [&'static str] {
    match tag {
        "ellipse" => &["support", "e1", "e2"],
        "hyperbola" => &["support", "eps"],
        "cormack" => &["support", "k"],
        _ => &["support"],
    }
}

pub(super) fn parse(s: &str) -> Result<Geometry> {
    let (tag, rest, rest_at) = match s.find(':') {
        Some(i) => (&s[..i], Some(&s[i + 1..]), i + 1),
        None => (s, None, s.len()),
    };
    if !TAGS.contains(&tag) {
        return Err(Error::parse(
            0,
            format!(
                "unknown geometry tag '{tag}' (expected one of {})",
                TAGS.join(", ")
            ),
        ));
    }
    let keys = allowed(tag);
    let mut values: Vec<(&str, f64, usize)> = Vec::new();
    if let Some(rest) = rest {
        let mut at = rest_at;
        for item in rest.split(',') {
            let pos = at;
            at += item.len() + 1;
            let Some((k, v)) = item.split_once('=') else {
                return Err(Error::parse(pos, format!("expected key=value, got '{item}'")));
            };
            if !keys.contains(&k) {
                return Err(Error::parse(
                    pos,
                    format!("unknown parameter '{k}' for {tag} (allowed: {})", keys.join(", ")),
                ));
            }
            if values.iter().any(|(seen, _, _)| *seen == k) {
                return Err(Error::parse(pos, format!("parameter '{k}' given twice")));
            }
            let x: f64 = v.parse().map_err(|_| {
                Error::parse(pos + k.len() + 1, format!("'{v}' is not a number"))
            })?;
            if !x.is_finite() {
                return Err(Error::parse(pos + k.len() + 1, format!("'{v}' is not finite")));
            }
            values.push((k, x, pos));
        }
    }
    let get = |k: &str| values.iter().find(|(n, _, _)| *n == k).map(|(_, v, p)| (*v, *p));
    let need = |k: &str| {
        get(k).ok_or_else(|| Error::parse(s.len(), format!("{tag} requires parameter '{k}'")))
    };
    let family = match tag {
        "radon" => Family::Radon,
        "funk" => Family::Funk,
        "hgeodesic" => Family::HGeodesic,
        "equidistant" => Family::Equidistant,
        "parabola" => Family::Parabola,
        "ellipse" => Family::Ellipse {
            e1: need("e1")?.0,
            e2: need("e2")?.0,
        },
        "hyperbola" => Family::Hyperbola { eps: need("eps")?.0 },
        "cormack" => {
            let (k, pos) = need("k")?;
            if k.fract() != 0.0 || k < 1.0 || k > u32::MAX as f64 {
                return Err(Error::parse(pos, format!("k must be a positive integer, got {k}")));
            }
            Family::Cormack { k: k as u32 }
        }
        _ => unreachable!(),
    };
    let support = get("support").map(|(v, _)| v).unwrap_or(match family {
        Family::HGeodesic | Family::Equidistant => 0.5,
        _ => 1.0,
    });
    Geometry::new(family, support)
}
