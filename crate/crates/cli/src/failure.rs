use std::fmt;

/// A command failure: one stderr line `error[<category>]: <message>` and an
/// exit code (1 validation, 2 usage).
#[derive(Debug)]
pub struct Failure {
    category: &'static str,
    message: String,
    usage: bool,
}

impl Failure {
    pub fn invalid(category: &'static str, message: impl fmt::Display) -> Self {
        Failure {
            category,
            message: message.to_string(),
            usage: false,
        }
    }

    pub fn usage(category: &'static str, message: impl fmt::Display) -> Self {
        Failure {
            category,
            message: message.to_string(),
            usage: true,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.usage {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let message = self.message.replace('\n', " ");
        write!(f, "error[{}]: {message}", self.category)
    }
}

pub trait ResultExt<T> {
    fn invalid(self, category: &'static str) -> Result<T, Failure>;
    fn usage(self, category: &'static str) -> Result<T, Failure>;
}

impl<T, E: fmt::Display> ResultExt<T> for Result<T, E> {
    fn invalid(self, category: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure::invalid(category, e))
    }

    fn usage(self, category: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure::usage(category, e))
    }
}
