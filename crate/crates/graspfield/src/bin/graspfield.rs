fn main() {
    std::process::exit(graspfield::cli::run());
}
