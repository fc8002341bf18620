//! Compile-time constant folding and symbolic angle evaluation.

use std::collections::HashMap;

use super::symbols::{ConstValue, SymbolKind, SymbolTable};
use super::SemaError;
use crate::frontend::ast::{BinaryOp, Expr, ExprKind};
use crate::kir::{Angle, ParamRef};

/// Names bound while expanding a user gate body.
#[derive(Debug, Default)]
pub(crate) struct GateEnv {
    pub params: HashMap<String, Angle>,
    pub qubits: HashMap<String, usize>,
}

/// Folds `expr` to a number. Integer arithmetic stays exact (with `/`
/// truncating); any float operand promotes the result to a double.
pub fn const_eval(expr: &Expr, symbols: &SymbolTable) -> Result<ConstValue, SemaError> {
    const_eval_in(expr, symbols, None)
}

pub(crate) fn const_eval_in(
    expr: &Expr,
    symbols: &SymbolTable,
    env: Option<&GateEnv>,
) -> Result<ConstValue, SemaError> {
    let span = expr.span;
    match &expr.kind {
        ExprKind::IntLit(v) => {
            i64::try_from(*v).map(ConstValue::Int).map_err(|_| SemaError::IntegerOverflow { span })
        }
        ExprKind::FloatLit(v) => Ok(ConstValue::Float(*v)),
        ExprKind::Pi => Ok(ConstValue::Float(std::f64::consts::PI)),
        ExprKind::NamedRef { name, index } => {
            if let Some(angle) = env.and_then(|e| e.params.get(name)) {
                return match (angle, index) {
                    (Angle::Literal(v), None) => Ok(ConstValue::Float(*v)),
                    (_, Some(_)) => Err(SemaError::TypeMismatch {
                        message: format!("gate parameter `{name}` cannot be indexed"),
                        span,
                    }),
                    (Angle::Param(_), None) => Err(SemaError::NotConst { name: name.clone(), span }),
                };
            }
            let entry = symbols
                .lookup(name)
                .ok_or_else(|| SemaError::UndefinedName { name: name.clone(), span })?;
            match entry.kind {
                SymbolKind::CompileTimeConst => {
                    if index.is_some() {
                        return Err(SemaError::TypeMismatch {
                            message: format!("constant `{name}` cannot be indexed"),
                            span,
                        });
                    }
                    Ok(entry.const_value.expect("constants always carry a value"))
                }
                _ => Err(SemaError::NotConst { name: name.clone(), span }),
            }
        }
        ExprKind::Neg(inner) => match const_eval_in(inner, symbols, env)? {
            ConstValue::Int(v) => {
                v.checked_neg().map(ConstValue::Int).ok_or(SemaError::IntegerOverflow { span })
            }
            ConstValue::Float(v) => Ok(ConstValue::Float(-v)),
        },
        ExprKind::Binary { op, lhs, rhs } => {
            let a = const_eval_in(lhs, symbols, env)?;
            let b = const_eval_in(rhs, symbols, env)?;
            fold(*op, a, b, span)
        }
        ExprKind::Comparison { .. } => Err(SemaError::TypeMismatch {
            message: "comparison is only allowed as an `if` condition".into(),
            span,
        }),
    }
}

fn fold(op: BinaryOp, a: ConstValue, b: ConstValue, span: crate::frontend::ast::Span) -> Result<ConstValue, SemaError> {
    match (a, b) {
        (ConstValue::Int(x), ConstValue::Int(y)) => {
            let r = match op {
                BinaryOp::Add => x.checked_add(y),
                BinaryOp::Sub => x.checked_sub(y),
                BinaryOp::Mul => x.checked_mul(y),
                BinaryOp::Div => {
                    if y == 0 {
                        return Err(SemaError::DivByZero { span });
                    }
                    x.checked_div(y)
                }
            };
            r.map(ConstValue::Int).ok_or(SemaError::IntegerOverflow { span })
        }
        _ => {
            let (x, y) = (a.as_f64(), b.as_f64());
            let r = match op {
                BinaryOp::Add => x + y,
                BinaryOp::Sub => x - y,
                BinaryOp::Mul => x * y,
                BinaryOp::Div => {
                    if y == 0.0 {
                        return Err(SemaError::DivByZero { span });
                    }
                    x / y
                }
            };
            Ok(ConstValue::Float(r))
        }
    }
}

/// Evaluates a gate angle. Constant sub-expressions fold to literals; runtime
/// inputs stay symbolic as long as the result is affine in a single slot.
pub(crate) fn eval_angle(
    expr: &Expr,
    symbols: &SymbolTable,
    env: Option<&GateEnv>,
) -> Result<Angle, SemaError> {
    match const_eval_in(expr, symbols, env) {
        Ok(v) => return Ok(Angle::Literal(v.as_f64())),
        Err(SemaError::NotConst { .. }) => {}
        Err(e) => return Err(e),
    }
    let span = expr.span;
    let unsupported = || SemaError::UnsupportedParamExpr { span };
    match &expr.kind {
        ExprKind::NamedRef { name, index } => {
            if let Some(angle) = env.and_then(|e| e.params.get(name)) {
                return Ok(*angle);
            }
            let entry = symbols
                .lookup(name)
                .ok_or_else(|| SemaError::UndefinedName { name: name.clone(), span })?;
            if entry.kind != SymbolKind::RuntimeInput {
                return Err(SemaError::TypeMismatch {
                    message: format!("`{name}` is not a numeric value"),
                    span,
                });
            }
            if env.is_some() {
                return Err(SemaError::TypeMismatch {
                    message: format!("gate bodies cannot reference runtime input `{name}`"),
                    span,
                });
            }
            let element = match (entry.indexed, index) {
                (true, Some(i)) => {
                    let i = const_eval_in(i, symbols, env)?.as_int().ok_or_else(|| SemaError::TypeMismatch {
                        message: "array index must be an integer".into(),
                        span,
                    })?;
                    if i < 0 || i as usize >= entry.size {
                        return Err(SemaError::IndexOutOfRange { name: name.clone(), index: i, size: entry.size, span });
                    }
                    i as usize
                }
                (true, None) => {
                    return Err(SemaError::TypeMismatch {
                        message: format!("input array `{name}` must be indexed"),
                        span,
                    })
                }
                (false, Some(_)) => {
                    return Err(SemaError::TypeMismatch {
                        message: format!("scalar input `{name}` cannot be indexed"),
                        span,
                    })
                }
                (false, None) => 0,
            };
            Ok(Angle::Param(ParamRef::new(entry.offset + element)))
        }
        ExprKind::Neg(inner) => Ok(eval_angle(inner, symbols, env)?.negated()),
        ExprKind::Binary { op, lhs, rhs } => {
            let a = eval_angle(lhs, symbols, env)?;
            let b = eval_angle(rhs, symbols, env)?;
            combine(*op, a, b).ok_or_else(unsupported)
        }
        _ => Err(unsupported()),
    }
}

fn combine(op: BinaryOp, a: Angle, b: Angle) -> Option<Angle> {
    use Angle::{Literal, Param};
    let affine = |slot, scale: f64, offset: f64| {
        if scale == 0.0 {
            Literal(offset)
        } else {
            Param(ParamRef { slot, scale, offset })
        }
    };
    Some(match (op, a, b) {
        (BinaryOp::Add, Param(p), Literal(c)) | (BinaryOp::Add, Literal(c), Param(p)) => {
            affine(p.slot, p.scale, p.offset + c)
        }
        (BinaryOp::Sub, Param(p), Literal(c)) => affine(p.slot, p.scale, p.offset - c),
        (BinaryOp::Sub, Literal(c), Param(p)) => affine(p.slot, -p.scale, c - p.offset),
        (BinaryOp::Add, Param(p), Param(q)) if p.slot == q.slot => {
            affine(p.slot, p.scale + q.scale, p.offset + q.offset)
        }
        (BinaryOp::Sub, Param(p), Param(q)) if p.slot == q.slot => {
            affine(p.slot, p.scale - q.scale, p.offset - q.offset)
        }
        (BinaryOp::Mul, Param(p), Literal(c)) | (BinaryOp::Mul, Literal(c), Param(p)) => {
            affine(p.slot, p.scale * c, p.offset * c)
        }
        (BinaryOp::Div, Param(p), Literal(c)) if c != 0.0 => affine(p.slot, p.scale / c, p.offset / c),
        (op, Literal(x), Literal(y)) => Literal(match op {
            BinaryOp::Add => x + y,
            BinaryOp::Sub => x - y,
            BinaryOp::Mul => x * y,
            BinaryOp::Div if y != 0.0 => x / y,
            BinaryOp::Div => return None,
        }),
        _ => return None,
    })
}
