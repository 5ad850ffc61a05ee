fn main() {
    std::process::exit(frailhaz::cli::run(std::env::args_os()));
}
