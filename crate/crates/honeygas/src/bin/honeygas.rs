fn main() {
    std::process::exit(honeygas::cli::run());
}
