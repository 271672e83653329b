use std::fmt;
use std::io;
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(svhe_core::Error),
    Io(PathBuf, io::Error),
}

impl CliError {
    /// 2 for usage and domain errors, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Io(..) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

impl From<svhe_core::Error> for CliError {
    fn from(e: svhe_core::Error) -> Self {
        CliError::Core(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let domain = svhe_core::Error::Domain {
            param: "m",
            value: 2.0,
            expected: "0 < m <= 1",
        };
        let diverged = svhe_core::Error::Unstable { dt: 1e-3, t: 0.1 };
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::from(domain).exit_code(), 2);
        assert_eq!(CliError::from(diverged).exit_code(), 3);
        let io = io::Error::new(io::ErrorKind::PermissionDenied, "no");
        assert_eq!(CliError::Io(PathBuf::from("x"), io).exit_code(), 1);
    }
}
