fn main() {
    std::process::exit(abcforge::cli::run(std::env::args_os()));
}
