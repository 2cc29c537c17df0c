fn main() {
    std::process::exit(hilmod_cli::run(std::env::args_os()));
}
