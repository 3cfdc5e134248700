fn main() {
    std::process::exit(halfint::run_from_env());
}
