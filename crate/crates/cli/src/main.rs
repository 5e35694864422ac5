fn main() {
    std::process::exit(chernoff_cli::run(std::env::args_os()));
}
