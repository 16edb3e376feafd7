//! Separation certificates and their independent verifier.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::actions::{order_of, ActionDefect, ActionTables};
use crate::word::{Factor, FreeProduct, Word};

/// Which construction produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Gamma0,
    TowerStage(usize),
    PPower,
    Random,
    FactorQuotient,
    /// A witness found by exhaustive enumeration.
    Oracle,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Gamma0 => f.write_str("gamma0"),
            Provenance::TowerStage(n) => write!(f, "tower-stage-{n}"),
            Provenance::PPower => f.write_str("p-power"),
            Provenance::Random => f.write_str("random"),
            Provenance::FactorQuotient => f.write_str("factor-quotient"),
            Provenance::Oracle => f.write_str("oracle"),
        }
    }
}

impl FromStr for Provenance {
    type Err = CertificateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gamma0" => Ok(Provenance::Gamma0),
            "p-power" => Ok(Provenance::PPower),
            "random" => Ok(Provenance::Random),
            "factor-quotient" => Ok(Provenance::FactorQuotient),
            "oracle" => Ok(Provenance::Oracle),
            _ => s
                .strip_prefix("tower-stage-")
                .and_then(|n| n.parse().ok())
                .map(Provenance::TowerStage)
                .ok_or_else(|| CertificateError::Parse(format!("unknown provenance {s:?}"))),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Parse(String),
}

/// A homomorphism A∗B → Sym(degree), given by the two factor actions,
/// together with the orders of the images of u and v.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub tables: ActionTables,
    pub u_order: u64,
    pub v_order: u64,
    pub provenance: Provenance,
}

impl Certificate {
    /// Fills in the orders of u and v from the tables.
    pub fn from_tables(tables: ActionTables, u: &Word, v: &Word, provenance: Provenance) -> Self {
        let u_order = tables.image_order(u);
        let v_order = tables.image_order(v);
        Certificate { tables, u_order, v_order, provenance }
    }

    pub fn degree(&self) -> usize {
        self.tables.degree
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "DEGREE {}\nORDERS {} {}\nPROVENANCE {}\nACTION_A\n",
            self.tables.degree, self.u_order, self.v_order, self.provenance
        );
        self.tables.write_rows(&mut out, Factor::A);
        out.push_str("ACTION_B\n");
        self.tables.write_rows(&mut out, Factor::B);
        out
    }

    /// Parses the text format. Row counts come from the section markers, so
    /// the shape is checked against the groups only by the verifier.
    pub fn from_text(text: &str) -> Result<Self, CertificateError> {
        let bad = |s: String| CertificateError::Parse(s);
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty()).peekable();
        let mut field = |key: &str| -> Result<Vec<String>, CertificateError> {
            let line = lines.next().ok_or_else(|| bad(format!("missing {key} line")))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(bad(format!("expected {key}, found {line:?}")));
            }
            Ok(parts.map(str::to_string).collect())
        };
        let int = |s: &str| s.parse::<u64>().map_err(|_| bad(format!("bad integer {s:?}")));
        let degree = match field("DEGREE")?.as_slice() {
            [d] => int(d)? as usize,
            _ => return Err(bad("DEGREE takes one value".into())),
        };
        let (u_order, v_order) = match field("ORDERS")?.as_slice() {
            [u, v] => (int(u)?, int(v)?),
            _ => return Err(bad("ORDERS takes two values".into())),
        };
        let provenance = match field("PROVENANCE")?.as_slice() {
            [p] => p.parse()?,
            _ => return Err(bad("PROVENANCE takes one value".into())),
        };
        if !field("ACTION_A")?.is_empty() {
            return Err(bad("ACTION_A takes no values".into()));
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut in_b = false;
        for line in lines {
            if line == "ACTION_B" {
                if in_b {
                    return Err(bad("duplicate ACTION_B".into()));
                }
                in_b = true;
                continue;
            }
            let row = line.split_whitespace().map(|t| int(t).map(|x| x as usize)).collect::<Result<Vec<_>, _>>()?;
            if in_b { &mut b } else { &mut a }.push(row);
        }
        if !in_b {
            return Err(bad("missing ACTION_B".into()));
        }
        Ok(Certificate { tables: ActionTables { degree, a, b }, u_order, v_order, provenance })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerificationFailure {
    Action(ActionDefect),
    OrderMismatch { word: char, stored: u64, recomputed: u64 },
    OrdersEqual(u64),
}

impl fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerificationFailure::Action(d) => d.fmt(f),
            VerificationFailure::OrderMismatch { word, stored, recomputed } => {
                write!(f, "stored order of {word} is {stored} but recomputed {recomputed}")
            }
            VerificationFailure::OrdersEqual(o) => write!(f, "u and v both have order {o}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub failures: Vec<VerificationFailure>,
    pub u_order: Option<u64>,
    pub v_order: Option<u64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-checks a certificate from its tables alone: every element acts as a
/// permutation, the action law holds within each factor, the identities act
/// trivially, and the recomputed orders of u and v match the stored ones and
/// differ from each other.
pub fn verify_certificate(fp: &FreeProduct, u: &Word, v: &Word, cert: &Certificate) -> VerificationReport {
    let mut failures: Vec<VerificationFailure> =
        cert.tables.defects(fp, false).into_iter().map(VerificationFailure::Action).collect();
    if !failures.is_empty() {
        return VerificationReport { failures, u_order: None, v_order: None };
    }
    let fold = |w: &Word| -> u64 {
        let mut perm: Vec<usize> = (0..cert.tables.degree).collect();
        for s in w.syllables() {
            let row = &cert.tables.table(s.factor)[s.element];
            perm.iter_mut().for_each(|x| *x = row[*x]);
        }
        order_of(&perm)
    };
    let (uo, vo) = (fold(u), fold(v));
    if uo != cert.u_order {
        failures.push(VerificationFailure::OrderMismatch { word: 'u', stored: cert.u_order, recomputed: uo });
    }
    if vo != cert.v_order {
        failures.push(VerificationFailure::OrderMismatch { word: 'v', stored: cert.v_order, recomputed: vo });
    }
    if uo == vo {
        failures.push(VerificationFailure::OrdersEqual(uo));
    }
    VerificationReport { failures, u_order: Some(uo), v_order: Some(vo) }
}
