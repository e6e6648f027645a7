fn main() {
    std::process::exit(alp_cli::run(std::env::args_os()));
}
