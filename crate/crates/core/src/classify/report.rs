use crate::algebra::Signature;
use crate::error::Result;

use super::{decompose, membership, Class, Membership};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Fpras,
    BisEquivalent,
    PmHard,
    SatEquivalent,
    Open,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Fpras => "FPRAS",
            Verdict::BisEquivalent => "BIS_EQUIVALENT",
            Verdict::PmHard => "PM_HARD",
            Verdict::SatEquivalent => "SAT_EQUIVALENT",
            Verdict::Open => "OPEN",
        }
    }
}

/// Which dichotomy produced the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecisionTable {
    /// Relations, degree at most 2, arbitrary variable weights.
    Relations,
    /// Weighted signatures, degree at most 2, arbitrary variable weights.
    Signatures,
}

impl DecisionTable {
    pub fn description(&self) -> &'static str {
        match self {
            DecisionTable::Relations => "degree-2 relation dichotomy (variable weights)",
            DecisionTable::Signatures => "degree-2 signature trichotomy (variable weights)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureReport {
    pub arity: usize,
    pub memberships: Vec<Membership>,
}

impl SignatureReport {
    pub fn get(&self, class: Class) -> Option<&Membership> {
        self.memberships.iter().find(|m| m.class == class)
    }

    /// Panics if the class was not evaluated for this report.
    pub fn member(&self, class: Class) -> bool {
        self.get(class)
            .unwrap_or_else(|| panic!("{class} not evaluated"))
            .member
    }
}

/// Status of the three conditions under which bounded weights might not
/// suffice for hardness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteWeightConditions {
    /// The language is neither all basically binary, all Weighted-NEQ-conj,
    /// nor all terraced.
    pub premise: bool,
    pub all_im_terraced: bool,
    /// All supports meet-closed, or all supports join-closed.
    pub lattice_closed: bool,
    pub no_eq2_pinning: bool,
}

impl FiniteWeightConditions {
    /// `Some(true)` when hardness already holds with weights
    /// `{(1,1),(1,2),(2,1)}`; `Some(false)` when all three conditions hold and
    /// the question is not settled; `None` when the premise fails.
    pub fn finite_weights_suffice(&self) -> Option<bool> {
        self.premise
            .then_some(!(self.all_im_terraced && self.lattice_closed && self.no_eq2_pinning))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub signatures: Vec<SignatureReport>,
    pub verdict: Verdict,
    pub table: DecisionTable,
    pub finite_weights: Option<FiniteWeightConditions>,
    /// Some support is not degenerate, so for unbounded degree the problem is
    /// as hard as the degree-3 problem with finite weights.
    pub nondegenerate_support: bool,
}

const RELATION_CLASSES: [Class; 6] = [
    Class::NeqConj,
    Class::BasicallyBinary,
    Class::ImConj,
    Class::DeltaMatroid,
    Class::Terraced,
    Class::Degenerate,
];

const SIGNATURE_CLASSES: [Class; 10] = [
    Class::BasicallyBinary,
    Class::WeightedNeqConj,
    Class::Terraced,
    Class::BasicallyBinarySupport,
    Class::Logsupermodular,
    Class::ImTerraced,
    Class::MeetClosed,
    Class::JoinClosed,
    Class::NoEq2Pinning,
    Class::Degenerate,
];

fn report(f: &Signature, classes: &[Class]) -> Result<SignatureReport> {
    Ok(SignatureReport {
        arity: f.arity(),
        memberships: classes
            .iter()
            .map(|&c| membership(c, f))
            .collect::<Result<_>>()?,
    })
}

fn all(reports: &[SignatureReport], class: Class) -> bool {
    reports.iter().all(|r| r.member(class))
}

pub fn decide_relations(reports: &[SignatureReport]) -> Verdict {
    if all(reports, Class::NeqConj) || all(reports, Class::BasicallyBinary) {
        Verdict::Fpras
    } else if all(reports, Class::ImConj) {
        Verdict::BisEquivalent
    } else if all(reports, Class::DeltaMatroid) {
        Verdict::PmHard
    } else {
        Verdict::SatEquivalent
    }
}

pub fn decide_signatures(reports: &[SignatureReport]) -> Verdict {
    if all(reports, Class::BasicallyBinary) || all(reports, Class::WeightedNeqConj) {
        Verdict::Fpras
    } else if reports
        .iter()
        .all(|r| r.member(Class::Terraced) && r.member(Class::BasicallyBinarySupport))
    {
        Verdict::Open
    } else if all(reports, Class::Logsupermodular) {
        Verdict::BisEquivalent
    } else if all(reports, Class::Terraced) {
        Verdict::PmHard
    } else {
        Verdict::SatEquivalent
    }
}

fn nondegenerate_support(fs: &[Signature]) -> bool {
    fs.iter().any(|f| {
        decompose(&f.support_relation()).is_ok_and(|d| !d.is_degenerate())
    })
}

/// Relation dichotomy; every input must be 0/1-valued.
pub fn classify_relations(gamma: &[Signature]) -> Result<ClassificationReport> {
    let signatures = gamma
        .iter()
        .map(|r| {
            r.require_relation()?;
            report(r, &RELATION_CLASSES)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassificationReport {
        verdict: decide_relations(&signatures),
        signatures,
        table: DecisionTable::Relations,
        finite_weights: None,
        nondegenerate_support: nondegenerate_support(gamma),
    })
}

pub fn classify_signatures(fs: &[Signature]) -> ClassificationReport {
    let signatures: Vec<SignatureReport> = fs
        .iter()
        .map(|f| report(f, &SIGNATURE_CLASSES).expect("signature classes apply to every signature"))
        .collect();
    let conditions = FiniteWeightConditions {
        premise: !all(&signatures, Class::WeightedNeqConj)
            && !all(&signatures, Class::BasicallyBinary)
            && !all(&signatures, Class::Terraced),
        all_im_terraced: all(&signatures, Class::ImTerraced),
        lattice_closed: all(&signatures, Class::MeetClosed) || all(&signatures, Class::JoinClosed),
        no_eq2_pinning: all(&signatures, Class::NoEq2Pinning),
    };
    ClassificationReport {
        verdict: decide_signatures(&signatures),
        signatures,
        table: DecisionTable::Signatures,
        finite_weights: Some(conditions),
        nondegenerate_support: nondegenerate_support(fs),
    }
}

/// Relation table when every input is 0/1-valued, signature table otherwise.
pub fn classify(fs: &[Signature]) -> ClassificationReport {
    if fs.iter().all(Signature::is_relation) {
        classify_relations(fs).expect("inputs are relations")
    } else {
        classify_signatures(fs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::library;
    use crate::algebra::num::int;

    #[test]
    fn relation_verdicts() {
        assert_eq!(classify_relations(&[library::nand()]).unwrap().verdict, Verdict::Fpras);
        assert_eq!(classify_relations(&[library::pm(3)]).unwrap().verdict, Verdict::PmHard);
        let fork = Signature::relation_from_bitstrings(3, &["000", "001", "010", "100", "011"]).unwrap();
        assert_eq!(classify_relations(&[fork]).unwrap().verdict, Verdict::SatEquivalent);
        assert!(classify_relations(&[Signature::numbered(vec![int(3); 2]).unwrap()]).is_err());
    }

    #[test]
    fn signature_verdicts() {
        let scaled_neq = library::neq().scale(&int(3)).unwrap();
        assert_eq!(classify_signatures(&[scaled_neq]).verdict, Verdict::Fpras);
        assert_eq!(classify_signatures(&[library::pm(3)]).verdict, Verdict::PmHard);
        // strictly positive and indecomposable: terraced with full support
        let g = Signature::numbered([2, 3, 3, 5, 3, 5, 5, 9].map(int).to_vec()).unwrap();
        assert_eq!(classify_signatures(&[g]).verdict, Verdict::Open);
        let product = Signature::numbered([2, 4, 6, 12, 5, 10, 15, 30].map(int).to_vec()).unwrap();
        assert_eq!(classify_signatures(&[product]).verdict, Verdict::Fpras);
    }

    #[test]
    fn verdict_reproducible_from_memberships() {
        let r = classify_signatures(&[library::pm(3), library::nand()]);
        assert_eq!(decide_signatures(&r.signatures), r.verdict);
    }
}
