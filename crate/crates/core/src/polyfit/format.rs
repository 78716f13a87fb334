use super::equation::SymbolicEquation;
use crate::dataset::FeatureEntry;

/// How coefficients are rendered.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NumberStyle {
    /// `%g`-style: this many significant digits, trailing zeros trimmed.
    Significant(usize),
    /// Fixed `decimals` places, switching to scientific notation with
    /// `mantissa_decimals` places when `|c| < sci_below`. This is the layout
    /// of published coefficient tables (`0.7513`, `5.40e-4`).
    Tabulated { decimals: usize, sci_below: f64, mantissa_decimals: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormatOptions {
    pub style: NumberStyle,
    /// Drop terms whose coefficient is exactly zero.
    pub elide_zero: bool,
    /// Use `-`, `*` and `^n` instead of `−`, `·` and superscripts.
    pub ascii: bool,
}

impl Default for FormatOptions {
    fn default() -> Self {
        FormatOptions { style: NumberStyle::Significant(6), elide_zero: false, ascii: false }
    }
}

impl FormatOptions {
    pub fn significant(digits: usize) -> Self {
        FormatOptions { style: NumberStyle::Significant(digits.max(1)), ..Default::default() }
    }

    pub fn tabulated() -> Self {
        FormatOptions {
            style: NumberStyle::Tabulated { decimals: 4, sci_below: 1e-3, mantissa_decimals: 2 },
            ..Default::default()
        }
    }
}

/// Formats a non-negative magnitude.
pub fn format_number(v: f64, style: NumberStyle) -> String {
    match style {
        NumberStyle::Significant(digits) => format_significant(v, digits),
        NumberStyle::Tabulated { decimals, sci_below, mantissa_decimals } => {
            if v != 0.0 && v.abs() < sci_below {
                format!("{:.*e}", mantissa_decimals, v)
            } else {
                format!("{:.*}", decimals, v)
            }
        }
    }
}

fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn superscript(n: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}

/// Symbol for a base feature: `P`, `log V`, or the raw name if it does not
/// parse as a dataset input.
pub fn feature_symbol(name: &str) -> String {
    name.parse::<FeatureEntry>().map(|e| e.symbol()).unwrap_or_else(|_| name.to_string())
}

/// Human-readable monomial label such as `P²·V` or `(log V)²`.
pub fn monomial_label(symbols: &[String], exponents: &[u32], ascii: bool) -> String {
    let mul = if ascii { "*" } else { "·" };
    let parts: Vec<String> = symbols
        .iter()
        .zip(exponents)
        .filter(|(_, &e)| e > 0)
        .map(|(s, &e)| {
            let base = if s.contains(' ') && e > 1 { format!("({s})") } else { s.clone() };
            match (e, ascii) {
                (1, _) => base,
                (_, true) => format!("{base}^{e}"),
                (_, false) => format!("{base}{}", superscript(e)),
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(mul)
    }
}

/// Signed-term rendering in graded-lex order, e.g. `1 − 2·P`.
pub fn equation_to_string(eq: &SymbolicEquation, opts: &FormatOptions) -> String {
    let symbols: Vec<String> = eq.base_features().iter().map(|n| feature_symbol(n)).collect();
    let (minus, mul) = if opts.ascii { ("-", "*") } else { ("−", "·") };
    let mut out = String::new();
    for t in eq.terms() {
        if opts.elide_zero && t.coefficient == 0.0 {
            continue;
        }
        let negative = t.coefficient.is_sign_negative() && t.coefficient != 0.0;
        let mag = format_number(t.coefficient.abs(), opts.style);
        if out.is_empty() {
            if negative {
                out.push_str(minus);
            }
        } else {
            out.push_str(if negative { " " } else { " + " });
            if negative {
                out.push_str(minus);
                out.push(' ');
            }
        }
        out.push_str(&mag);
        if !t.is_intercept() {
            out.push_str(mul);
            out.push_str(&monomial_label(&symbols, &t.exponents, opts.ascii));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
