//! The fixed typeside: base types, constants and the built-in library of
//! functions and predicates available to attributes, constraints and queries.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

/// A base (data) type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseType {
    String,
    Int,
    Double,
    Bool,
}

impl BaseType {
    pub const ALL: [BaseType; 4] = [
        BaseType::String,
        BaseType::Int,
        BaseType::Double,
        BaseType::Bool,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseType::String => "String",
            BaseType::Int => "Int",
            BaseType::Double => "Double",
            BaseType::Bool => "Bool",
        }
    }
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseType::ALL.into_iter().find(|t| t.name() == s).ok_or(())
    }
}

/// A base-type constant.
///
/// Doubles compare by bit pattern. Every double entering the engine goes
/// through [`normalize_double`], so decimal literals that denote the same
/// number always share one bit pattern.
#[derive(Clone, Debug)]
pub enum Value {
    Str(String),
    Int(i64),
    Double(f64),
    Bool(bool),
}

/// Rounds to six decimals and folds `-0.0` into `0.0`.
pub fn normalize_double(x: f64) -> f64 {
    let y = if x.is_finite() && x.abs() < 1e9 {
        (x * 1e6).round() / 1e6
    } else {
        x
    };
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

impl Value {
    pub fn double(x: f64) -> Value {
        Value::Double(normalize_double(x))
    }

    pub fn base_type(&self) -> BaseType {
        match self {
            Value::Str(_) => BaseType::String,
            Value::Int(_) => BaseType::Int,
            Value::Double(_) => BaseType::Double,
            Value::Bool(_) => BaseType::Bool,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Str(_) => 0,
            Value::Int(_) => 1,
            Value::Double(_) => 2,
            Value::Bool(_) => 3,
        }
    }

    /// Renders the value the way result tables and CSV cells show it.
    ///
    /// Doubles use the shortest round-tripping decimal form with at least one
    /// fractional digit (`18.68`, `26.0`).
    pub fn render(&self) -> String {
        match self {
            Value::Str(s) => s.clone(),
            Value::Int(i) => i.to_string(),
            Value::Double(x) => render_double(*x),
            Value::Bool(b) => b.to_string(),
        }
    }

    /// Renders the value as a DSL literal.
    pub fn to_literal(&self) -> String {
        match self {
            Value::Str(s) => quote_string(s),
            other => other.render(),
        }
    }
}

pub fn render_double(x: f64) -> String {
    let s = format!("{x}");
    if x.is_finite() && !s.contains('.') {
        format!("{s}.0")
    } else {
        s
    }
}

pub fn quote_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Str(a), Value::Str(b)) => a.cmp(b),
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Double(a), Value::Double(b)) => a.total_cmp(b),
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Str(s) => s.hash(state),
            Value::Int(i) => i.hash(state),
            Value::Double(x) => x.to_bits().hash(state),
            Value::Bool(b) => b.hash(state),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

/// Built-in functions of the typeside. Each name has exactly one signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Function {
    Levenshtein,
    Concat,
    AddInt,
    SubInt,
    MulInt,
    AddDouble,
    SubDouble,
    MulDouble,
}

impl Function {
    pub const ALL: [Function; 8] = [
        Function::Levenshtein,
        Function::Concat,
        Function::AddInt,
        Function::SubInt,
        Function::MulInt,
        Function::AddDouble,
        Function::SubDouble,
        Function::MulDouble,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Levenshtein => "levenshtein",
            Function::Concat => "concat",
            Function::AddInt => "add_int",
            Function::SubInt => "sub_int",
            Function::MulInt => "mul_int",
            Function::AddDouble => "add_double",
            Function::SubDouble => "sub_double",
            Function::MulDouble => "mul_double",
        }
    }

    pub fn lookup(name: &str) -> Option<Function> {
        Function::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arguments(self) -> [BaseType; 2] {
        use BaseType::*;
        match self {
            Function::Levenshtein | Function::Concat => [String, String],
            Function::AddInt | Function::SubInt | Function::MulInt => [Int, Int],
            Function::AddDouble | Function::SubDouble | Function::MulDouble => [Double, Double],
        }
    }

    pub fn result(self) -> BaseType {
        match self {
            Function::Levenshtein => BaseType::Int,
            Function::Concat => BaseType::String,
            Function::AddInt | Function::SubInt | Function::MulInt => BaseType::Int,
            Function::AddDouble | Function::SubDouble | Function::MulDouble => BaseType::Double,
        }
    }

    /// Applies the function to constants. Returns `None` on an argument type
    /// mismatch, which type-checked terms never produce.
    pub fn apply(self, args: &[Value]) -> Option<Value> {
        let out = match (self, args) {
            (Function::Levenshtein, [Value::Str(a), Value::Str(b)]) => {
                Value::Int(levenshtein(a, b) as i64)
            }
            (Function::Concat, [Value::Str(a), Value::Str(b)]) => Value::Str(format!("{a}{b}")),
            (Function::AddInt, [Value::Int(a), Value::Int(b)]) => Value::Int(a.wrapping_add(*b)),
            (Function::SubInt, [Value::Int(a), Value::Int(b)]) => Value::Int(a.wrapping_sub(*b)),
            (Function::MulInt, [Value::Int(a), Value::Int(b)]) => Value::Int(a.wrapping_mul(*b)),
            (Function::AddDouble, [Value::Double(a), Value::Double(b)]) => Value::double(a + b),
            (Function::SubDouble, [Value::Double(a), Value::Double(b)]) => Value::double(a - b),
            (Function::MulDouble, [Value::Double(a), Value::Double(b)]) => Value::double(a * b),
            _ => return None,
        };
        Some(out)
    }
}

/// Built-in binary predicates. Only `=` is defined on strings and booleans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Predicate {
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

impl Predicate {
    pub fn symbol(self) -> &'static str {
        match self {
            Predicate::Eq => "=",
            Predicate::Lt => "<",
            Predicate::Gt => ">",
            Predicate::Le => "<=",
            Predicate::Ge => ">=",
        }
    }

    pub fn accepts(self, ty: BaseType) -> bool {
        match self {
            Predicate::Eq => true,
            _ => matches!(ty, BaseType::Int | BaseType::Double),
        }
    }

    pub fn holds(self, a: &Value, b: &Value) -> bool {
        let ord = match (a, b) {
            (Value::Int(x), Value::Int(y)) => x.cmp(y),
            (Value::Double(x), Value::Double(y)) => match x.partial_cmp(y) {
                Some(o) => o,
                None => return false,
            },
            _ => return self == Predicate::Eq && a == b,
        };
        match self {
            Predicate::Eq => ord == Ordering::Equal,
            Predicate::Lt => ord == Ordering::Less,
            Predicate::Gt => ord == Ordering::Greater,
            Predicate::Le => ord != Ordering::Greater,
            Predicate::Ge => ord != Ordering::Less,
        }
    }
}

/// Edit distance over Unicode scalar values (insert, delete, substitute).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let up = row[j + 1];
            let cost = usize::from(ca != *cb);
            row[j + 1] = (diag + cost).min(row[j] + 1).min(up + 1);
            diag = up;
        }
    }
    row[b.len()]
}
