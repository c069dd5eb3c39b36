fn main() {
    std::process::exit(workbench::cli::run_from(std::env::args_os()));
}
