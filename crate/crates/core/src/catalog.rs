//! Named identity sets shipped as DSL sources.

use crate::eval::CheckError;
use crate::identity_dsl::{parse, IdentityChain};

/// `(name, source)` for every catalog entry.
pub const SETS: &[(&str, &str)] = &[
    ("ASSOCIATIVE", include_str!("../catalog/associative.ids")),
    ("LEFT_SYMMETRIC", include_str!("../catalog/left_symmetric.ids")),
    ("ATS1", include_str!("../catalog/ats1.ids")),
    ("ATS2", include_str!("../catalog/ats2.ids")),
    ("DIALGEBRA", include_str!("../catalog/dialgebra.ids")),
    ("LEFT_SYMMETRIC_DI", include_str!("../catalog/left_symmetric_di.ids")),
    ("ATT1", include_str!("../catalog/att1.ids")),
    ("ATT2", include_str!("../catalog/att2.ids")),
    ("JTD", include_str!("../catalog/jtd.ids")),
    ("LEIBTS", include_str!("../catalog/leibts.ids")),
    ("LEIBNIZ", include_str!("../catalog/leibniz.ids")),
];

pub fn source(name: &str) -> Option<&'static str> {
    let upper = name.to_ascii_uppercase();
    SETS.iter().find(|(n, _)| *n == upper).map(|(_, s)| *s)
}

/// Parsed chains of a catalog set; names are case-insensitive.
pub fn set(name: &str) -> Result<Vec<IdentityChain>, CheckError> {
    let src = source(name).ok_or_else(|| CheckError::UnknownSet(name.to_string()))?;
    Ok(parse(src).unwrap_or_else(|e| panic!("catalog {name} does not parse: {e}")))
}

pub fn names() -> impl Iterator<Item = &'static str> {
    SETS.iter().map(|(n, _)| *n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_set_parses_with_expected_size() {
        let sizes: Vec<(&str, usize)> = names().map(|n| (n, set(n).unwrap().len())).collect();
        assert_eq!(
            sizes,
            vec![
                ("ASSOCIATIVE", 1),
                ("LEFT_SYMMETRIC", 1),
                ("ATS1", 1),
                ("ATS2", 1),
                ("DIALGEBRA", 5),
                ("LEFT_SYMMETRIC_DI", 5),
                ("ATT1", 11),
                ("ATT2", 11),
                ("JTD", 8),
                ("LEIBTS", 2),
                ("LEIBNIZ", 1),
            ]
        );
    }

    #[test]
    fn lookup_is_case_insensitive() {
        assert!(set("att1").is_ok());
        assert!(matches!(set("nope"), Err(CheckError::UnknownSet(_))));
    }
}
