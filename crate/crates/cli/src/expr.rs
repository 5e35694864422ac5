//! Real-valued expressions from the config, evaluated with `evalexpr`.
//!
//! Functions may be written bare (`sqrt(x)`) or with evalexpr's namespace
//! (`math::sqrt(x)`).

use evalexpr::{build_operator_tree, Context, DefaultNumericTypes, EvalexprError, EvalexprResult, Node, Value};

use crate::error::CliError;

type Num = DefaultNumericTypes;

/// A parsed expression over a fixed list of variable names.
#[derive(Debug)]
pub struct Expr {
    source: String,
    tree: Node<Num>,
    vars: Vec<String>,
}

struct Bindings<'a> {
    names: &'a [String],
    values: Vec<Value<Num>>,
}

impl Context for Bindings<'_> {
    type NumericTypes = Num;

    fn get_value(&self, identifier: &str) -> Option<&Value<Num>> {
        self.names.iter().position(|n| n == identifier).map(|i| &self.values[i])
    }

    fn call_function(&self, identifier: &str, argument: &Value<Num>) -> EvalexprResult<Value<Num>, Num> {
        let unary: Option<fn(f64) -> f64> = match identifier {
            "sqrt" => Some(f64::sqrt),
            "exp" => Some(f64::exp),
            "ln" => Some(f64::ln),
            "abs" => Some(f64::abs),
            "sin" => Some(f64::sin),
            "cos" => Some(f64::cos),
            "tan" => Some(f64::tan),
            "asin" => Some(f64::asin),
            "acos" => Some(f64::acos),
            "atan" | "arctan" => Some(f64::atan),
            "sinh" => Some(f64::sinh),
            "cosh" => Some(f64::cosh),
            "tanh" => Some(f64::tanh),
            "asinh" => Some(f64::asinh),
            "erf" => Some(libm::erf),
            _ => None,
        };
        match unary {
            Some(f) => Ok(Value::Float(f(argument.as_number()?))),
            None => Err(EvalexprError::FunctionIdentifierNotFound(identifier.to_string())),
        }
    }

    fn are_builtin_functions_disabled(&self) -> bool {
        false
    }

    fn set_builtin_functions_disabled(&mut self, disabled: bool) -> EvalexprResult<(), Num> {
        if disabled {
            Err(EvalexprError::BuiltinFunctionsCannotBeDisabled)
        } else {
            Ok(())
        }
    }
}

impl Expr {
    /// `field` names the config key in error messages.
    pub fn parse(field: &str, source: &str, vars: &[&str]) -> Result<Self, CliError> {
        let tree = build_operator_tree::<Num>(source)
            .map_err(|e| CliError::Usage(format!("config field `{field}`: cannot parse `{source}`: {e}")))?;
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let expr = Self { source: source.to_string(), tree, vars };
        for ident in expr.tree.iter_variable_identifiers() {
            if !expr.vars.iter().any(|v| v == ident) {
                return Err(CliError::Usage(format!(
                    "config field `{field}`: unknown variable `{ident}` (allowed: {})",
                    expr.vars.join(", ")
                )));
            }
        }
        Ok(expr)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// NaN when evaluation fails, so the caller's finiteness checks report it.
    pub fn eval(&self, values: &[f64]) -> f64 {
        let ctx = Bindings { names: &self.vars, values: values.iter().map(|&v| Value::Float(v)).collect() };
        self.tree.eval_number_with_context(&ctx).unwrap_or(f64::NAN)
    }
}
