fn main() {
    std::process::exit(ncover::cli::run(std::env::args_os()));
}
