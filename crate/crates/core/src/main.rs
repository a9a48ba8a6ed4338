fn main() {
    std::process::exit(occrisk::cli::run(std::env::args_os()));
}
