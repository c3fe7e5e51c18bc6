use symshadow::oracle::selftest;

#[test]
fn exhaustive_two_mode_checks_pass() {
    let checks = selftest();
    assert!(checks.len() > 20);
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    assert!(failed.is_empty(), "{failed:#?}");
}
