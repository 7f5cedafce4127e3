//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Tolerances live in `cylfocus::validation` as named
//! constants. Optional arguments select criterion ids.

use std::process::ExitCode;

use cylfocus::validation;

fn main() -> ExitCode {
    let selected: Vec<u8> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for &(id, _, _) in validation::CRITERIA.iter() {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let outcome = validation::run(id).expect("known criterion");
        println!("{}", outcome.line());
        failed += usize::from(!outcome.passed);
    }
    if failed == 0 {
        println!("acceptance: all criteria met");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria not met");
        ExitCode::FAILURE
    }
}
