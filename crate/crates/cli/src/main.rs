fn main() {
    std::process::exit(exfl_cli::run(std::env::args_os()));
}
