fn main() {
    std::process::exit(multimatch::harness::cli(std::env::args_os()));
}
