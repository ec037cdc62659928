fn main() {
    std::process::exit(cmv_cli::run(std::env::args_os()));
}
