fn main() {
    std::process::exit(uryson::cli::run(std::env::args_os()));
}
