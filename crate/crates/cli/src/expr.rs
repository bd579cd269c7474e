//! User expressions such as `x^2 - y^3` or `math::cos(r)`.

use evalexpr::error::EvalexprResultValue;
use evalexpr::{build_operator_tree, Context, DefaultNumericTypes, EvalexprError, EvalexprResult, Node, Value};

use crate::CliError;

/// A parsed expression of up to two variables.
#[derive(Debug, Clone)]
pub struct Expr {
    tree: Node<DefaultNumericTypes>,
    names: [&'static str; 2],
}

struct Vars {
    names: [&'static str; 2],
    values: [Value<DefaultNumericTypes>; 3],
}

impl Context for Vars {
    type NumericTypes = DefaultNumericTypes;

    fn get_value(&self, identifier: &str) -> Option<&Value<DefaultNumericTypes>> {
        match identifier {
            i if i == self.names[0] => Some(&self.values[0]),
            i if i == self.names[1] => Some(&self.values[1]),
            "pi" => Some(&self.values[2]),
            _ => None,
        }
    }

    fn call_function(
        &self,
        identifier: &str,
        _argument: &Value<DefaultNumericTypes>,
    ) -> EvalexprResultValue<DefaultNumericTypes> {
        Err(EvalexprError::FunctionIdentifierNotFound(identifier.to_string()))
    }

    fn are_builtin_functions_disabled(&self) -> bool {
        false
    }

    fn set_builtin_functions_disabled(&mut self, _disabled: bool) -> EvalexprResult<(), DefaultNumericTypes> {
        Err(EvalexprError::BuiltinFunctionsCannotBeDisabled)
    }
}

impl Expr {
    /// Parses `text` with variables `names`; a name may be `""` when unused.
    /// Checks that the expression evaluates to a number at the origin.
    pub fn parse(text: &str, names: [&'static str; 2]) -> Result<Self, CliError> {
        let tree = build_operator_tree(text).map_err(|e| CliError::Config(format!("expression `{text}`: {e}")))?;
        let e = Self { tree, names };
        e.try_eval(0.5, 0.25).map_err(|m| CliError::Config(format!("expression `{text}`: {m}")))?;
        Ok(e)
    }

    fn try_eval(&self, a: f64, b: f64) -> Result<f64, String> {
        let vars = Vars {
            names: self.names,
            values: [Value::Float(a), Value::Float(b), Value::Float(std::f64::consts::PI)],
        };
        match self.tree.eval_with_context(&vars).map_err(|e| e.to_string())? {
            Value::Float(v) => Ok(v),
            Value::Int(v) => Ok(v as f64),
            other => Err(format!("not a number: {other:?}")),
        }
    }

    /// Evaluates; parse-time checks make failures here unexpected, so they
    /// give NaN, which the solvers reject downstream.
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        self.try_eval(a, b).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_polynomials_and_functions() {
        let e = Expr::parse("x^2 - y^3 + 1", ["x", "y"]).unwrap();
        assert_eq!(e.eval(2.0, 1.0), 4.0);
        let e = Expr::parse("math::cos(pi * r)", ["r", ""]).unwrap();
        assert!((e.eval(1.0, 0.0) + 1.0).abs() < 1e-15);
        assert_eq!(Expr::parse("3", ["x", ""]).unwrap().eval(7.0, 0.0), 3.0);
        assert!(Expr::parse("x +", ["x", ""]).is_err());
        assert!(Expr::parse("z", ["x", "y"]).is_err());
    }
}
