use qmark_core::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for C {
    fn from(z: Complex64) -> Self {
        C { re: z.re, im: z.im }
    }
}

/// Pretty JSON with a trailing newline. Field order follows the struct.
pub fn render<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
