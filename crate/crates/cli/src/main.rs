fn main() {
    std::process::exit(ndhelix_cli::run(std::env::args_os()));
}
