fn main() -> std::process::ExitCode {
    scratch_creativity::cli::main()
}
