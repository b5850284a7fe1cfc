fn main() {
    std::process::exit(qwre::cli::main_with_std());
}
