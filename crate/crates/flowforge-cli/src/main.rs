fn main() {
    std::process::exit(flowforge_cli::run(std::env::args_os()));
}
