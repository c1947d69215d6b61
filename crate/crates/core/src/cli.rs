//! Command-line entry point. Subcommands land here as modules are built.

use std::ffi::OsString;

pub fn dispatch<I, T>(_args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    2
}
