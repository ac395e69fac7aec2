fn main() {
    std::process::exit(helgason_cli::run(std::env::args_os()));
}
