fn main() {
    // Die quietly when the reader closes the pipe, like cat does.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(icek_cli::run());
}
