fn main() {
    std::process::exit(slipflow::cli::run());
}
