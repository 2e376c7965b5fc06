//! Runs the ten acceptance criteria and prints one line per criterion.

fn main() {
    let outcomes = ncover::cli::selftest::run(&ncover::cli::data_dir(), None);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
