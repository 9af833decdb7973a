use thiserror::Error;

use super::{parse_definition, CurveDefinition, ParseError};

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 7] = [
    "polya",
    "trapezoid",
    "hilbert",
    "peano",
    "zorder",
    "gosper",
    "gosper-innerflip",
];

const SOURCES: [(&str, &str); 7] = [
    ("polya", include_str!("../../catalogue/polya.pfc")),
    ("trapezoid", include_str!("../../catalogue/trapezoid.pfc")),
    ("hilbert", include_str!("../../catalogue/hilbert.pfc")),
    ("peano", include_str!("../../catalogue/peano.pfc")),
    ("zorder", include_str!("../../catalogue/zorder.pfc")),
    ("gosper", include_str!("../../catalogue/gosper.pfc")),
    ("gosper-innerflip", include_str!("../../catalogue/gosper-innerflip.pfc")),
];

#[derive(Debug, Error)]
pub enum CatalogueError {
    #[error("unknown builtin curve `{0}` (known: {known})", known = BUILTIN_NAMES.join(", "))]
    UnknownName(String),
    #[error("catalogue entry `{0}` is malformed: {1}")]
    Malformed(String, ParseError),
}

/// Source text of a catalogue entry.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn builtin(name: &str) -> Result<CurveDefinition, CatalogueError> {
    let src = builtin_source(name).ok_or_else(|| CatalogueError::UnknownName(name.into()))?;
    parse_definition(src).map_err(|e| CatalogueError::Malformed(name.into(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_entries_parse() {
        for name in BUILTIN_NAMES {
            let def = builtin(name).unwrap();
            assert_eq!(def.name, name);
        }
    }

    #[test]
    fn trapezoid_is_restricted_polya() {
        let t = builtin("trapezoid").unwrap();
        let p = builtin("polya").unwrap();
        assert_eq!(t.restriction, Some((0.0, 0.75)));
        assert_eq!(t.generators, p.generators);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(
            builtin("nonexistent"),
            Err(CatalogueError::UnknownName(n)) if n == "nonexistent"
        ));
    }
}
