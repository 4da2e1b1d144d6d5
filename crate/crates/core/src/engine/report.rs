//! Text rendering of checked results.

use std::time::Duration;

use super::{CheckedResult, Status};
use crate::interp::Binding;
use crate::pog::ProofObligation;

/// Seconds rounded to milliseconds, printed like a double: `0.013`, `0.0`,
/// `6.232`.
pub fn format_elapsed(d: Duration) -> String {
    let ms = (d.as_nanos() + 500_000) / 1_000_000;
    let (secs, frac) = (ms / 1000, ms % 1000);
    if frac == 0 {
        format!("{secs}.0")
    } else {
        let f = format!("{frac:03}");
        format!("{secs}.{}", f.trim_end_matches('0'))
    }
}

/// `a = 1, b = []` in name order.
pub fn render_binding(b: &Binding) -> String {
    b.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", ")
}

/// The result line for `r`, followed for failures by the obligation it
/// refutes. `po` is the obligation `r` was computed for.
pub fn render_result(r: &CheckedResult, po: &ProofObligation) -> String {
    let n = r.number;
    let t = format_elapsed(r.elapsed);
    match &r.status {
        Status::Unchecked => format!("PO #{n}, UNCHECKED\n"),
        Status::Maybe => format!("PO #{n}, MAYBE in {t}s\n"),
        Status::Timeout => format!("PO #{n}, TIMEOUT in {t}s\n"),
        Status::Provable(reason) => format!("PO #{n}, PROVABLE by {reason} in {t}s\n"),
        Status::Failed => {
            let mut out = format!("PO #{n}, FAILED in {t}s: ");
            match &r.counterexample {
                Some(cex) if !cex.is_empty() => {
                    out.push_str("Counterexample: ");
                    out.push_str(&render_binding(cex));
                }
                _ => out.push_str(r.message.as_deref().unwrap_or("Obligation is false")),
            }
            if !r.type_args.is_empty() {
                let args: Vec<String> = r
                    .type_args
                    .iter()
                    .map(|(p, t)| format!("{} = {}", p.trim_start_matches('@'), t.explicit()))
                    .collect();
                out.push_str(",\n  ");
                out.push_str(&args.join(", "));
            }
            out.push_str("\n----\n");
            out.push_str(&po.locator());
            out.push('\n');
            out.push_str(&po.text);
            out.push_str("\n\n");
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::values::Value;

    #[test]
    fn elapsed_times_print_like_doubles() {
        assert_eq!(format_elapsed(Duration::from_micros(13_200)), "0.013");
        assert_eq!(format_elapsed(Duration::from_micros(200)), "0.0");
        assert_eq!(format_elapsed(Duration::from_millis(6232)), "6.232");
        assert_eq!(format_elapsed(Duration::from_millis(100)), "0.1");
        assert_eq!(format_elapsed(Duration::from_millis(2000)), "2.0");
        assert_eq!(format_elapsed(Duration::from_micros(1_999_600)), "2.0");
    }

    #[test]
    fn bindings_are_sorted() {
        let b: Binding = [("r".to_string(), Value::int(0)), ("c".to_string(), Value::int(0))].into();
        assert_eq!(render_binding(&b), "c = 0, r = 0");
    }
}
