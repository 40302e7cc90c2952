fn main() {
    std::process::exit(testscope::run(std::env::args_os()));
}
