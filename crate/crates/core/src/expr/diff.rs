use super::{Expr, Func};

/// ∂e/∂x_{var}, `var` zero-based.
pub(super) fn derivative(e: &Expr, var: usize) -> Expr {
    match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var(i) => Expr::Const(if *i == var { 1.0 } else { 0.0 }),
        Expr::Neg(a) => Expr::neg(derivative(a, var)),
        Expr::Add(a, b) => Expr::add(derivative(a, var), derivative(b, var)),
        Expr::Sub(a, b) => Expr::sub(derivative(a, var), derivative(b, var)),
        Expr::Mul(a, b) => Expr::add(
            Expr::mul(derivative(a, var), (**b).clone()),
            Expr::mul((**a).clone(), derivative(b, var)),
        ),
        Expr::Div(a, b) => {
            let da = derivative(a, var);
            let db = derivative(b, var);
            if db.is_zero() {
                return Expr::div(da, (**b).clone());
            }
            // (a'b - ab') / b²
            Expr::div(
                Expr::sub(Expr::mul(da, (**b).clone()), Expr::mul((**a).clone(), db)),
                Expr::pow((**b).clone(), Expr::Const(2.0)),
            )
        }
        Expr::Pow(u, v) => pow_derivative(u, v, var),
        Expr::Call(f, a) => {
            let da = derivative(a, var);
            if da.is_zero() {
                return Expr::Const(0.0);
            }
            let a = (**a).clone();
            let outer = match f {
                Func::Sqrt => {
                    return Expr::div(da, Expr::mul(Expr::Const(2.0), Expr::call(Func::Sqrt, a)))
                }
                Func::Ln => return Expr::div(da, a),
                Func::Exp => Expr::call(Func::Exp, a),
                Func::Sin => Expr::call(Func::Cos, a),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, a)),
                Func::Abs => Expr::call(Func::Sign, a),
                Func::Sign => return Expr::Const(0.0),
            };
            Expr::mul(outer, da)
        }
    }
}

fn pow_derivative(u: &Expr, v: &Expr, var: usize) -> Expr {
    let du = derivative(u, var);
    if v.is_closed() {
        if du.is_zero() {
            return Expr::Const(0.0);
        }
        // v·u^(v-1)·u'
        let reduced = Expr::pow(u.clone(), Expr::sub(v.clone(), Expr::Const(1.0)));
        return Expr::mul(Expr::mul(v.clone(), reduced), du);
    }
    let dv = derivative(v, var);
    let whole = Expr::pow(u.clone(), v.clone());
    if u.is_closed() {
        // u^v·ln(u)·v'
        return Expr::mul(Expr::mul(whole, Expr::call(Func::Ln, u.clone())), dv);
    }
    // u^v·(v'·ln u + v·u'/u)
    Expr::mul(
        whole,
        Expr::add(
            Expr::mul(dv, Expr::call(Func::Ln, u.clone())),
            Expr::div(Expr::mul(v.clone(), du), u.clone()),
        ),
    )
}
