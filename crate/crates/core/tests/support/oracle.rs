//! A naive query evaluator: the full cross product of the from-bindings,
//! filtered atom by atom.
#![allow(dead_code)]

use catamerge_core::constraint::Term;
use catamerge_core::instance::{eval_path, AttrValue, Elem, Instance, PathValue};
use catamerge_core::query::QuerySpec;
use catamerge_core::typeside::Value;

#[derive(Clone, Debug, PartialEq)]
enum V {
    Elem(Elem),
    Const(Value),
    Null(AttrValue),
    Undefined,
}

fn eval(inst: &Instance, q: &QuerySpec, row: &[Elem], t: &Term) -> V {
    match t {
        Term::Path { var, path } => {
            let slot = q.from.iter().position(|b| &b.name == var).expect("bound variable");
            match eval_path(inst, row[slot], path).expect("well-typed path") {
                PathValue::Element(e) => V::Elem(inst.find(e)),
                PathValue::Value(AttrValue::Const(c)) => V::Const(c),
                PathValue::Value(n) => V::Null(n),
                PathValue::Undefined => V::Undefined,
            }
        }
        Term::Lit(v) => V::Const(v.clone()),
        Term::App { func, args } => {
            let mut vals = Vec::new();
            for a in args {
                match eval(inst, q, row, a) {
                    V::Const(c) => vals.push(c),
                    _ => return V::Undefined,
                }
            }
            func.apply(&vals).map(V::Const).unwrap_or(V::Undefined)
        }
    }
}

fn render(inst: &Instance, v: &V) -> Option<String> {
    match v {
        V::Elem(e) => Some(inst.display(*e)),
        V::Const(c) => Some(c.render()),
        V::Null(_) => Some("-".to_string()),
        V::Undefined => None,
    }
}

/// Rows of `q` over `inst`, or `None` if some kept row has an undefined column.
pub fn naive(q: &QuerySpec, inst: &Instance) -> Option<Vec<Vec<String>>> {
    let domains: Vec<Vec<Elem>> = q.from.iter().map(|b| inst.members(&b.entity)).collect();
    let mut rows = Vec::new();
    let mut row = Vec::new();
    product(&domains, &mut row, &mut |row| {
        let keep = q.atoms.iter().all(|a| match (eval(inst, q, row, &a.lhs), eval(inst, q, row, &a.rhs)) {
            (V::Elem(x), V::Elem(y)) => x == y,
            (V::Const(x), V::Const(y)) => a.pred.holds(&x, &y),
            _ => false,
        });
        if keep {
            rows.push(q.attributes.iter().map(|(_, t)| render(inst, &eval(inst, q, row, t))).collect::<Option<Vec<_>>>());
        }
    });
    rows.into_iter().collect()
}

fn product(domains: &[Vec<Elem>], row: &mut Vec<Elem>, f: &mut dyn FnMut(&[Elem])) {
    if row.len() == domains.len() {
        f(row);
        return;
    }
    for &e in &domains[row.len()] {
        row.push(e);
        product(domains, row, f);
        row.pop();
    }
}
