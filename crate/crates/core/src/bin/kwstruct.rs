fn main() {
    std::process::exit(kwstruct::cli::main());
}
