use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sqrt => "sqrt",
        }
    }

    pub fn from_function_name(name: &str) -> Option<UnaryOp> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "exp" => UnaryOp::Exp,
            "ln" => UnaryOp::Ln,
            "sqrt" => UnaryOp::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Immutable expression tree over named real variables.
///
/// Children are reference counted, so cloning is cheap and trees can be
/// shared across threads. Equality is structural.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Arc<str>),
    Unary(UnaryOp, Arc<Expr>),
    Binary(BinaryOp, Arc<Expr>, Arc<Expr>),
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        // -0.0 and 0.0 must print and compare alike
        if value == 0.0 {
            Expr::Const(0.0)
        } else {
            Expr::Const(value)
        }
    }

    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn one() -> Expr {
        Expr::Const(1.0)
    }

    pub fn var(name: impl AsRef<str>) -> Expr {
        Expr::Var(Arc::from(name.as_ref()))
    }

    pub fn unary(op: UnaryOp, arg: Expr) -> Expr {
        Expr::Unary(op, Arc::new(arg))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Arc::new(lhs), Arc::new(rhs))
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::unary(UnaryOp::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::unary(UnaryOp::Cos, arg)
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::unary(UnaryOp::Exp, arg)
    }

    pub fn ln(arg: Expr) -> Expr {
        Expr::unary(UnaryOp::Ln, arg)
    }

    pub fn sqrt(arg: Expr) -> Expr {
        Expr::unary(UnaryOp::Sqrt, arg)
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        Expr::binary(BinaryOp::Pow, base, exponent)
    }

    pub fn powi(base: Expr, exponent: i32) -> Expr {
        Expr::pow(base, Expr::constant(f64::from(exponent)))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_const(&self, value: f64) -> bool {
        matches!(self, Expr::Const(c) if *c == value)
    }

    pub fn is_zero(&self) -> bool {
        self.is_const(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.is_const(1.0)
    }

    pub fn depends_on(&self, name: &str) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => &**v == name,
            Expr::Unary(_, a) => a.depends_on(name),
            Expr::Binary(_, a, b) => a.depends_on(name) || b.depends_on(name),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v.to_string());
            }
            Expr::Unary(_, a) => a.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Unary(_, a) => 1 + a.size(),
            Expr::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Replaces variables by expressions. The result is not simplified.
    pub fn substitute(&self, bindings: &HashMap<String, Expr>) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(v) => bindings.get(&**v).cloned().unwrap_or_else(|| self.clone()),
            Expr::Unary(op, a) => Expr::unary(*op, a.substitute(bindings)),
            Expr::Binary(op, a, b) => Expr::binary(*op, a.substitute(bindings), b.substitute(bindings)),
        }
    }
}

impl From<f64> for Expr {
    fn from(value: f64) -> Self {
        Expr::constant(value)
    }
}

macro_rules! impl_binary_operator {
    ($trait:ident, $method:ident, $op:expr) => {
        impl std::ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::binary($op, self, rhs)
            }
        }

        impl std::ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::binary($op, self.clone(), rhs.clone())
            }
        }
    };
}

impl_binary_operator!(Add, add, BinaryOp::Add);
impl_binary_operator!(Sub, sub, BinaryOp::Sub);
impl_binary_operator!(Mul, mul, BinaryOp::Mul);
impl_binary_operator!(Div, div, BinaryOp::Div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::unary(UnaryOp::Neg, self)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::unary(UnaryOp::Neg, self.clone())
    }
}
