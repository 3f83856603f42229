use qpd_core::identities::{builtin_ledger, check_ledger, IdentityStatus};
use qpd_core::Parallelism;

#[test]
fn every_stated_or_imported_identity_holds() {
    let claims = builtin_ledger();
    assert!(claims.len() >= 40);
    let reports = check_ledger(&claims, 500, 1000, Parallelism::Parallel);
    let mut failed = Vec::new();
    for (claim, report) in claims.iter().zip(reports) {
        let report = report.unwrap();
        if claim.status != IdentityStatus::Conjectural && !report.passed {
            failed.push(format!("{}: {:?}", claim.id, report.mismatch));
        }
    }
    assert!(failed.is_empty(), "{failed:#?}");
}
