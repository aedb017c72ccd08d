//! Acceptance suite: runs every criterion at its stated tolerance and
//! prints one pass/fail line per criterion.

#[test]
fn acceptance_criteria() {
    let outcomes = lsg_core::selftest::run_all(0);
    let mut all_pass = true;
    for o in &outcomes {
        println!(
            "criterion {}: {} ... {} ({:.1}s)",
            o.id,
            o.name,
            if o.pass { "PASS" } else { "FAIL" },
            o.seconds
        );
        println!("  {}", o.detail);
        all_pass &= o.pass;
    }
    assert!(all_pass, "at least one acceptance criterion failed");
}
