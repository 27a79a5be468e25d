use sheafbm::cli::run_cli;

fn code(args: &[&str]) -> i32 {
    run_cli(std::iter::once("sheafbm").chain(args.iter().copied()), &mut Vec::new(), &mut Vec::new())
}

/// Sole test in this binary: it mutates the process environment.
#[test]
fn thread_variable_is_validated() {
    let mut seen = Vec::new();
    for v in ["0", "-1", "many", "2"] {
        std::env::set_var("SHEAFBM_THREADS", v);
        seen.push(code(&["kl", "table", "--type", "A1"]));
    }
    std::env::remove_var("SHEAFBM_THREADS");
    seen.push(code(&["kl", "table", "--type", "A1"]));
    assert_eq!(seen, [3, 3, 3, 0, 0]);
}
