//! Command-line mini-grammar for rate functions and gauges.
//!
//! A rate is a product of powers of `n`, a geometric factor and at most one
//! logarithmic factor:
//!
//! ```text
//! 1/n   (1+ln n)/n   n^-0.5   1/n^2   2^-n   exp(-n/2)   3/(n+1)^1.5   1/ln(n+1)^2
//! ```
//!
//! Anything else has to be passed as `@file.json`, a serialized rate function
//! carrying its own certificate.

use std::fs;

use bernstein_core::rates::{ClosedForm, Gauge, RateExpr, RateFn, Role};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok {
    Num(f64),
    N,
    E,
    Ln,
    Exp,
    Sqrt,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < b.len() && ((b[i] as char).is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            // scientific notation, but not the constant e
            if i + 1 < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'-' || b[j] == b'+') {
                    j += 1;
                }
                if j < b.len() && (b[j] as char).is_ascii_digit() {
                    while j < b.len() && (b[j] as char).is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &s[start..i];
            out.push(Tok::Num(text.parse().map_err(|_| format!("bad number {text:?}"))?));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < b.len() && (b[i] as char).is_ascii_alphabetic() {
                i += 1;
            }
            out.push(match &s[start..i] {
                "n" => Tok::N,
                "e" => Tok::E,
                "ln" | "log" => Tok::Ln,
                "exp" => Tok::Exp,
                "sqrt" => Tok::Sqrt,
                w => return Err(format!("unknown word {w:?}")),
            });
            continue;
        }
        out.push(match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::Open,
            ')' => Tok::Close,
            _ => return Err(format!("unexpected character {c:?}")),
        });
        i += 1;
    }
    Ok(out)
}

/// `(log_shift + ln(n + arg_shift))^exp`
#[derive(Clone, Copy, Debug, PartialEq)]
struct LogFactor {
    shift: f64,
    arg_shift: f64,
    exp: f64,
}

/// `coef · ratio^n · (n + shift)^n_pow · log`
#[derive(Clone, Copy, Debug, PartialEq)]
struct Mono {
    coef: f64,
    ratio: f64,
    n_pow: f64,
    shift: f64,
    log: Option<LogFactor>,
}

impl Mono {
    fn constant(c: f64) -> Mono {
        Mono { coef: c, ratio: 1.0, n_pow: 0.0, shift: 0.0, log: None }
    }

    fn as_const(&self) -> Option<f64> {
        (self.ratio == 1.0 && self.n_pow == 0.0 && self.log.is_none()).then_some(self.coef)
    }

    /// `k` when the value is `k·n`.
    fn as_linear(&self) -> Option<f64> {
        (self.ratio == 1.0 && self.n_pow == 1.0 && self.shift == 0.0 && self.log.is_none()).then_some(self.coef)
    }

    /// `s` when the value is `n + s`.
    fn as_shifted_n(&self) -> Option<f64> {
        (self.coef == 1.0 && self.ratio == 1.0 && self.n_pow == 1.0 && self.log.is_none()).then_some(self.shift)
    }

    fn as_bare_log(&self) -> Option<LogFactor> {
        match self.log {
            Some(l) if self.coef == 1.0 && self.ratio == 1.0 && self.n_pow == 0.0 && l.exp == 1.0 => Some(l),
            _ => None,
        }
    }

    fn mul(self, o: Mono) -> Result<Mono, String> {
        let (n_pow, shift) = match (self.n_pow != 0.0, o.n_pow != 0.0) {
            (true, true) if self.shift != o.shift => return Err("factors (n + a) with different shifts".into()),
            (true, _) => (self.n_pow + o.n_pow, self.shift),
            (false, _) => (o.n_pow, o.shift),
        };
        let log = match (self.log, o.log) {
            (Some(a), Some(b)) => {
                if a.shift != b.shift || a.arg_shift != b.arg_shift {
                    return Err("more than one distinct logarithmic factor".into());
                }
                Some(LogFactor { exp: a.exp + b.exp, ..a })
            }
            (a, b) => a.or(b),
        };
        let log = log.filter(|l| l.exp != 0.0);
        let shift = if n_pow == 0.0 { 0.0 } else { shift };
        Ok(Mono { coef: self.coef * o.coef, ratio: self.ratio * o.ratio, n_pow, shift, log })
    }

    fn pow(self, p: f64) -> Result<Mono, String> {
        if self.coef < 0.0 && p.fract() != 0.0 {
            return Err("fractional power of a negative quantity".into());
        }
        Ok(Mono {
            coef: self.coef.powf(p),
            ratio: self.ratio.powf(p),
            n_pow: self.n_pow * p,
            shift: self.shift,
            log: self.log.map(|l| LogFactor { exp: l.exp * p, ..l }),
        })
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<(), String> {
        match self.next() {
            Some(x) if x == t => Ok(()),
            other => Err(format!("expected {t:?}, found {other:?}")),
        }
    }

    fn sum(&mut self) -> Result<Mono, String> {
        let mut acc = self.product()?;
        while let Some(op @ (Tok::Plus | Tok::Minus)) = self.peek() {
            self.pos += 1;
            let mut rhs = self.product()?;
            if op == Tok::Minus {
                rhs = rhs.mul(Mono::constant(-1.0))?;
            }
            acc = add(acc, rhs)?;
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Mono, String> {
        let mut acc = self.unary()?;
        while let Some(op @ (Tok::Star | Tok::Slash)) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == Tok::Star { acc.mul(rhs)? } else { acc.mul(rhs.pow(-1.0)?)? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Mono, String> {
        if self.peek() == Some(Tok::Minus) {
            self.pos += 1;
            return self.unary()?.mul(Mono::constant(-1.0));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Mono, String> {
        let base = self.atom()?;
        if self.peek() != Some(Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let exponent = self.unary()?;
        if let Some(p) = exponent.as_const() {
            return base.pow(p);
        }
        match (base.as_const(), exponent.as_linear()) {
            (Some(c), Some(k)) if c > 0.0 => Ok(Mono { ratio: c.powf(k), ..Mono::constant(1.0) }),
            _ => Err("exponents must be constants, or k·n over a positive constant base".into()),
        }
    }

    fn atom(&mut self) -> Result<Mono, String> {
        match self.next() {
            Some(Tok::Num(x)) => Ok(Mono::constant(x)),
            Some(Tok::E) => Ok(Mono::constant(std::f64::consts::E)),
            Some(Tok::N) => Ok(Mono { n_pow: 1.0, ..Mono::constant(1.0) }),
            Some(Tok::Open) => {
                let v = self.sum()?;
                self.expect(Tok::Close)?;
                Ok(v)
            }
            Some(Tok::Ln) => {
                let arg = self.atom()?;
                if let Some(c) = arg.as_const() {
                    if c <= 0.0 {
                        return Err("logarithm of a nonpositive constant".into());
                    }
                    return Ok(Mono::constant(c.ln()));
                }
                let a = arg.as_shifted_n().ok_or("ln accepts only n + a")?;
                Ok(Mono { log: Some(LogFactor { shift: 0.0, arg_shift: a, exp: 1.0 }), ..Mono::constant(1.0) })
            }
            Some(Tok::Exp) => {
                let arg = self.atom()?;
                if let Some(c) = arg.as_const() {
                    return Ok(Mono::constant(c.exp()));
                }
                let k = arg.as_linear().ok_or("exp accepts only k·n")?;
                Ok(Mono { ratio: k.exp(), ..Mono::constant(1.0) })
            }
            Some(Tok::Sqrt) => self.atom()?.pow(0.5),
            other => Err(format!("unexpected {other:?}")),
        }
    }
}

fn add(a: Mono, b: Mono) -> Result<Mono, String> {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => return Ok(Mono::constant(x + y)),
        (Some(c), None) => return add_const(b, c),
        (None, Some(c)) => return add_const(a, c),
        _ => {}
    }
    Err("sums are limited to n + c and c + ln(n + a)".into())
}

fn add_const(m: Mono, c: f64) -> Result<Mono, String> {
    if let Some(s) = m.as_shifted_n() {
        return Ok(Mono { shift: s + c, ..m });
    }
    if let Some(l) = m.as_bare_log() {
        return Ok(Mono { log: Some(LogFactor { shift: l.shift + c, ..l }), ..m });
    }
    Err("sums are limited to n + c and c + ln(n + a)".into())
}

/// Parses the grammar into a rate expression.
pub fn parse_expr(s: &str) -> Result<RateExpr, String> {
    let mut p = Parser { toks: lex(s)?, pos: 0 };
    let m = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input after token {}", p.pos));
    }
    if !(m.coef > 0.0 && m.coef.is_finite() && m.ratio > 0.0 && m.ratio.is_finite()) {
        return Err("rate must have a positive finite coefficient and ratio".into());
    }
    if m.as_const().is_some() {
        return Err("rate must depend on n".into());
    }
    let power = -m.n_pow;
    Ok(match m.log {
        None if m.shift == 0.0 && m.ratio == 1.0 => RateExpr::power(m.coef, power),
        None if m.n_pow == 0.0 => RateExpr::exponential(m.coef, m.ratio),
        log => {
            let l = log.unwrap_or(LogFactor { shift: 0.0, arg_shift: 0.0, exp: 0.0 });
            RateExpr::closed(ClosedForm {
                coef: m.coef,
                ratio: m.ratio,
                power,
                shift: m.shift,
                log_power: -l.exp,
                log_shift: l.shift,
                log_arg_shift: l.arg_shift,
            })
        }
    })
}

/// A rate from the grammar, or from `@path` holding a serialized rate function.
pub fn parse_rate(s: &str, role: Role) -> Result<RateFn, String> {
    if let Some(path) = s.strip_prefix('@') {
        let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        let f: RateFn = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
        if f.role() != role {
            return Err(format!("{path}: expected a {role:?} function, found {:?}", f.role()));
        }
        return Ok(f);
    }
    let expr = parse_expr(s)?;
    RateFn::new(expr, role).map_err(|e| e.to_string())
}

/// `power:α`, `log:k` or `double-log:s,ε`.
pub fn parse_gauge(s: &str) -> Result<Gauge, String> {
    let (kind, params) = s.split_once(':').ok_or("gauge must look like kind:params")?;
    let nums = params
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad gauge parameter {p:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let g = match (kind.trim(), nums.as_slice()) {
        ("power", [a]) => Gauge::power(*a),
        ("log", [k]) => Gauge::log(*k),
        ("double-log", [s, e]) => Gauge::double_log(*s, *e),
        _ => return Err(format!("unknown gauge {s:?}; use power:α, log:k or double-log:s,ε")),
    };
    g.map_err(|e| e.to_string())
}
