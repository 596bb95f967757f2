fn main() {
    std::process::exit(metric_zero_one::cli::main_exit());
}
