fn main() {
    std::process::exit(aconc::cli::run());
}
