use std::process::ExitCode;

use coulomblab::acceptance;

fn main() -> ExitCode {
    let criteria = [
        acceptance::criterion_1,
        acceptance::criterion_2,
        acceptance::criterion_3,
        acceptance::criterion_4,
        acceptance::criterion_5,
        acceptance::criterion_6,
        acceptance::criterion_7,
        acceptance::criterion_8,
        acceptance::criterion_9,
        acceptance::criterion_10,
    ];
    let mut failed = 0;
    for criterion in criteria {
        let r = criterion();
        println!("{}", r.line());
        failed += usize::from(!r.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
