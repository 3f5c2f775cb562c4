//! Golden-file check: the full traced report for the fixture script is
//! byte-stable (timestamp excluded).

use divforge_core::script::evaluate;

#[test]
fn mini_report_matches_golden() {
    let text = include_str!("golden/mini.srf");
    let golden = include_str!("golden/mini.report.json");
    let (report, _) = evaluate("mini.srf", text, true).unwrap();
    assert!(report.clean());
    assert_eq!(report.to_json_stable(), golden.trim_end_matches('\n'));
}
