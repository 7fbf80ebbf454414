fn main() {
    std::process::exit(stegonet::cli::run(std::env::args_os()));
}
