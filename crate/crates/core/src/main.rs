fn main() -> std::process::ExitCode {
    basketmit::cli::main()
}
