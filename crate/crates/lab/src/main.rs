fn main() {
    std::process::exit(barrierlab::main_with_args(std::env::args_os()));
}
