//! Statement registry and named suites.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatementClass {
    Identity,
    Inequality,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StatementInfo {
    pub id: &'static str,
    pub class: StatementClass,
    pub summary: &'static str,
}

const fn info(id: &'static str, class: StatementClass, summary: &'static str) -> StatementInfo {
    StatementInfo { id, class, summary }
}

use StatementClass::{Identity as Id, Inequality as Ineq, Sweep};

pub const STATEMENTS: &[StatementInfo] = &[
    info("sob-3.1", Ineq, "critical L^p inequality ‖f/w‖ ≤ p‖L·Ef/w‖ on cylinders"),
    info("id-3.2", Id, "remainder identity for sob-3.1 with the C_p term"),
    info("hardy-3.6", Ineq, "critical Hardy inequality with the first-block gradient"),
    info("badiale-3.8", Ineq, "case p = N with the full gradient"),
    info("stability-3.9", Ineq, "case p = N: gradient energy bounds the norm plus the C_N remainder"),
    info("strat-id-3.5", Id, "remainder identity on H¹ through x·X + y·Y"),
    info("hom-id-3.8", Id, "remainder identity on homogeneous groups via the radial derivative"),
    info("higher-4.1", Id, "order-k L² identity with O(k,m)/a_k weighted squares"),
    info("higher-ineq-4.5", Ineq, "order-k L² inequality with constant 2^k/(2k−1)!!"),
    info("ckn-5.1", Ineq, "logarithmic CKN inequality with remainder on cylinders"),
    info("uncert-5.4", Ineq, "critical uncertainty principle on cylinders, N ≥ 2"),
    info("hpw-5.5", Ineq, "critical Heisenberg–Pauli–Weyl form on R², directional and full gradient"),
    info("nash-5.7", Ineq, "Nash-type inequality, N = 2n/(n−2)"),
    info("ckn-strat-5.6", Ineq, "logarithmic CKN inequality on H¹"),
    info("uncert-strat-5.12", Ineq, "critical uncertainty principle on H¹"),
    info("ckn-hom-5.9", Ineq, "logarithmic CKN inequality on homogeneous groups"),
    info("uncert-hom-5.17", Ineq, "critical uncertainty principle on homogeneous groups"),
    info("sharp-sweep", Sweep, "Rayleigh quotients along ψ_δ(log r)^A as A → −1/p"),
    info("consistency-p2", Id, "p = 2: ∫C_2 against ‖f/w + 2L·Ef/w‖²"),
    info("higher-ckn", Ineq, "order-k CKN inequality, p = 2"),
    info("higher-uncert", Ineq, "order-k uncertainty principle, N = 2k"),
];

pub fn lookup(id: &str) -> Result<&'static StatementInfo> {
    STATEMENTS
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownStatement(id.to_string()))
}

pub const SUITES: &[&str] = &["default", "identities", "inequalities", "sharpness", "full", "quick"];

/// Statement ids of a named suite.
pub fn suite_statements(name: &str) -> Result<Vec<&'static str>> {
    let of = |class: StatementClass| STATEMENTS.iter().filter(|s| s.class == class).map(|s| s.id).collect();
    match name {
        "default" | "identities" => Ok(of(Id)),
        "inequalities" => Ok(of(Ineq)),
        "sharpness" => Ok(of(Sweep)),
        "full" | "quick" => Ok(STATEMENTS.iter().map(|s| s.id).collect()),
        _ => Err(Error::Config(format!("unknown suite `{name}`; known: {}", SUITES.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_known() {
        for (i, a) in STATEMENTS.iter().enumerate() {
            assert!(STATEMENTS[i + 1..].iter().all(|b| b.id != a.id));
            assert_eq!(lookup(a.id).unwrap(), a);
        }
        assert!(matches!(lookup("sob-9.9"), Err(Error::UnknownStatement(_))));
    }

    #[test]
    fn suites_cover_everything() {
        let full = suite_statements("full").unwrap();
        assert_eq!(full.len(), STATEMENTS.len());
        let parts: usize = ["identities", "inequalities", "sharpness"]
            .iter()
            .map(|s| suite_statements(s).unwrap().len())
            .sum();
        assert_eq!(parts, full.len());
        assert!(suite_statements("nope").is_err());
    }
}
