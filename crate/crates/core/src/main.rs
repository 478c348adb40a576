fn main() {
    std::process::exit(lpgraph::cli::execute(std::env::args_os()));
}
