//! Minimal deterministic JSON emission.
//!
//! Output must be byte-stable across runs and platforms: keys appear in the
//! order they are written and every float is printed with 17 significant
//! digits (enough to round-trip an `f64` exactly). That formatting contract
//! is the whole reason this module exists instead of a serde derive.

/// Formats a float with 17 significant digits, normalizing `-0.0` to `0.0`.
pub(crate) fn fmt_f64(x: f64) -> String {
    debug_assert!(
        x.is_finite(),
        "JSON output requires finite numbers, got {x}"
    );
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Renders a complex number as a two-element `[re, im]` array.
pub(crate) fn fmt_complex(re: f64, im: f64) -> String {
    format!("[{},{}]", fmt_f64(re), fmt_f64(im))
}

/// Joins pre-rendered JSON values into an array.
pub(crate) fn fmt_array<I>(items: I) -> String
where
    I: IntoIterator<Item = String>,
{
    let mut buf = String::from("[");
    for (i, item) in items.into_iter().enumerate() {
        if i > 0 {
            buf.push(',');
        }
        buf.push_str(&item);
    }
    buf.push(']');
    buf
}

fn push_escaped(buf: &mut String, s: &str) {
    buf.push('"');
    for c in s.chars() {
        match c {
            '"' => buf.push_str("\\\""),
            '\\' => buf.push_str("\\\\"),
            '\n' => buf.push_str("\\n"),
            '\r' => buf.push_str("\\r"),
            '\t' => buf.push_str("\\t"),
            c if (c as u32) < 0x20 => buf.push_str(&format!("\\u{:04x}", c as u32)),
            c => buf.push(c),
        }
    }
    buf.push('"');
}

/// Builds a JSON object with keys emitted in insertion order.
pub(crate) struct JsonObject {
    buf: String,
    first: bool,
}

impl JsonObject {
    pub(crate) fn new() -> Self {
        JsonObject {
            buf: String::from("{"),
            first: true,
        }
    }

    fn key(&mut self, key: &str) {
        if !self.first {
            self.buf.push(',');
        }
        self.first = false;
        push_escaped(&mut self.buf, key);
        self.buf.push(':');
    }

    /// Appends a pre-rendered JSON value (array, object, or literal).
    pub(crate) fn raw(mut self, key: &str, value: &str) -> Self {
        self.key(key);
        self.buf.push_str(value);
        self
    }

    pub(crate) fn f64(self, key: &str, value: f64) -> Self {
        let rendered = fmt_f64(value);
        self.raw(key, &rendered)
    }

    pub(crate) fn usize(self, key: &str, value: usize) -> Self {
        let rendered = value.to_string();
        self.raw(key, &rendered)
    }

    pub(crate) fn str(mut self, key: &str, value: &str) -> Self {
        self.key(key);
        push_escaped(&mut self.buf, value);
        self
    }

    pub(crate) fn bool(self, key: &str, value: bool) -> Self {
        self.raw(key, if value { "true" } else { "false" })
    }

    pub(crate) fn finish(mut self) -> String {
        self.buf.push('}');
        self.buf
    }
}
