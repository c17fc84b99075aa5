fn main() -> std::process::ExitCode {
    cassinian::cli::main()
}
