//! Negation normal form, miniscoping, Skolemization and distribution to CNF.

use super::{ClausifyError, Formula, Role, SourceFormula};
use crate::logic::{Clause, Literal, Problem, Signature, SymbolOrigin, Term, Var};
use std::collections::BTreeSet;

#[derive(Clone, Debug)]
pub struct ClausifyOptions {
    /// Negate conjectures (refutation reading). When false they are asserted as-is.
    pub negate_conjectures: bool,
    pub clause_limit: usize,
}

impl Default for ClausifyOptions {
    fn default() -> Self {
        ClausifyOptions { negate_conjectures: true, clause_limit: 100_000 }
    }
}

/// Formula in negation normal form.
#[derive(Clone, Debug)]
enum Nnf {
    True,
    False,
    Lit(Literal),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    Forall(Var, Box<Nnf>),
    Exists(Var, Box<Nnf>),
}

fn nnf(f: &Formula, positive: bool) -> Nnf {
    match f {
        Formula::True => if positive { Nnf::True } else { Nnf::False },
        Formula::False => if positive { Nnf::False } else { Nnf::True },
        Formula::Atom(a) => Nnf::Lit(Literal::new(positive, a.clone())),
        Formula::Not(g) => nnf(g, !positive),
        Formula::And(fs) => {
            let parts = fs.iter().map(|g| nnf(g, positive)).collect();
            if positive { Nnf::And(parts) } else { Nnf::Or(parts) }
        }
        Formula::Or(fs) => {
            let parts = fs.iter().map(|g| nnf(g, positive)).collect();
            if positive { Nnf::Or(parts) } else { Nnf::And(parts) }
        }
        Formula::Implies(a, b) => {
            if positive {
                Nnf::Or(vec![nnf(a, false), nnf(b, true)])
            } else {
                Nnf::And(vec![nnf(a, true), nnf(b, false)])
            }
        }
        Formula::Iff(a, b) => {
            if positive {
                Nnf::And(vec![
                    Nnf::Or(vec![nnf(a, false), nnf(b, true)]),
                    Nnf::Or(vec![nnf(a, true), nnf(b, false)]),
                ])
            } else {
                Nnf::And(vec![
                    Nnf::Or(vec![nnf(a, true), nnf(b, true)]),
                    Nnf::Or(vec![nnf(a, false), nnf(b, false)]),
                ])
            }
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let universal = matches!(f, Formula::Forall(..)) == positive;
            let mut body = nnf(g, positive);
            for v in vs.iter().rev() {
                body = if universal { Nnf::Forall(*v, Box::new(body)) } else { Nnf::Exists(*v, Box::new(body)) };
            }
            body
        }
    }
}

fn free_in(f: &Nnf, v: Var) -> bool {
    match f {
        Nnf::True | Nnf::False => false,
        Nnf::Lit(l) => l.atom.terms().iter().any(|t| t.contains_var(v)),
        Nnf::And(fs) | Nnf::Or(fs) => fs.iter().any(|g| free_in(g, v)),
        Nnf::Forall(w, g) | Nnf::Exists(w, g) => *w != v && free_in(g, v),
    }
}

fn free_vars(f: &Nnf, out: &mut BTreeSet<Var>) {
    match f {
        Nnf::True | Nnf::False => {}
        Nnf::Lit(l) => l.collect_vars(out),
        Nnf::And(fs) | Nnf::Or(fs) => fs.iter().for_each(|g| free_vars(g, out)),
        Nnf::Forall(w, g) | Nnf::Exists(w, g) => {
            let mut inner = BTreeSet::new();
            free_vars(g, &mut inner);
            inner.remove(w);
            out.extend(inner);
        }
    }
}

/// Pushes quantifiers as far inward as they go.
fn miniscope(f: Nnf) -> Nnf {
    match f {
        Nnf::And(fs) => Nnf::And(fs.into_iter().map(miniscope).collect()),
        Nnf::Or(fs) => Nnf::Or(fs.into_iter().map(miniscope).collect()),
        Nnf::Forall(v, g) => quantify(true, v, miniscope(*g)),
        Nnf::Exists(v, g) => quantify(false, v, miniscope(*g)),
        other => other,
    }
}

fn quantify(universal: bool, v: Var, body: Nnf) -> Nnf {
    if !free_in(&body, v) {
        return body;
    }
    match body {
        // forall distributes over and, exists over or
        Nnf::And(fs) if universal => Nnf::And(fs.into_iter().map(|g| quantify(true, v, g)).collect()),
        Nnf::Or(fs) if !universal => Nnf::Or(fs.into_iter().map(|g| quantify(false, v, g)).collect()),
        Nnf::And(fs) | Nnf::Or(fs) => {
            let is_and = !universal;
            let (with, without): (Vec<Nnf>, Vec<Nnf>) = fs.into_iter().partition(|g| free_in(g, v));
            if without.is_empty() {
                let inner = if is_and { Nnf::And(with) } else { Nnf::Or(with) };
                return wrap(universal, v, inner);
            }
            let scoped = if with.len() == 1 {
                quantify(universal, v, with.into_iter().next().unwrap())
            } else {
                wrap(universal, v, if is_and { Nnf::And(with) } else { Nnf::Or(with) })
            };
            let mut parts = without;
            parts.push(scoped);
            if is_and { Nnf::And(parts) } else { Nnf::Or(parts) }
        }
        other => wrap(universal, v, other),
    }
}

fn wrap(universal: bool, v: Var, body: Nnf) -> Nnf {
    if universal { Nnf::Forall(v, Box::new(body)) } else { Nnf::Exists(v, Box::new(body)) }
}

struct Skolemizer<'a> {
    sig: &'a mut Signature,
    counter: usize,
}

impl Skolemizer<'_> {
    fn run(&mut self, f: Nnf) -> Nnf {
        match f {
            Nnf::And(fs) => Nnf::And(fs.into_iter().map(|g| self.run(g)).collect()),
            Nnf::Or(fs) => Nnf::Or(fs.into_iter().map(|g| self.run(g)).collect()),
            Nnf::Forall(v, g) => Nnf::Forall(v, Box::new(self.run(*g))),
            Nnf::Exists(v, g) => {
                let mut deps = BTreeSet::new();
                free_vars(&g, &mut deps);
                deps.remove(&v);
                let name = self.sig.fresh_name("sK", &mut self.counter);
                let args: Vec<Var> = deps.into_iter().collect();
                let f = self.sig.add_function(name, args.iter().map(|a| a.sort).collect(), v.sort, SymbolOrigin::Skolem);
                let witness = Term::app(f, args.into_iter().map(Term::Var).collect());
                self.run(substitute(*g, v, &witness))
            }
            other => other,
        }
    }
}

fn substitute(f: Nnf, v: Var, t: &Term) -> Nnf {
    match f {
        Nnf::Lit(l) => Nnf::Lit(l.replace_var(v, t)),
        Nnf::And(fs) => Nnf::And(fs.into_iter().map(|g| substitute(g, v, t)).collect()),
        Nnf::Or(fs) => Nnf::Or(fs.into_iter().map(|g| substitute(g, v, t)).collect()),
        Nnf::Forall(w, g) if w != v => Nnf::Forall(w, Box::new(substitute(*g, v, t))),
        Nnf::Exists(w, g) if w != v => Nnf::Exists(w, Box::new(substitute(*g, v, t))),
        other => other,
    }
}

/// Distributes to a list of literal sets; quantifiers are dropped (all remaining
/// variables are universal and unique).
fn cnf(f: &Nnf, limit: usize) -> Result<Vec<Vec<Literal>>, ClausifyError> {
    let too_many = || ClausifyError::TooManyClauses { limit };
    match f {
        Nnf::True => Ok(Vec::new()),
        Nnf::False => Ok(vec![Vec::new()]),
        Nnf::Lit(l) => Ok(vec![vec![l.clone()]]),
        Nnf::Forall(_, g) => cnf(g, limit),
        Nnf::Exists(..) => unreachable!("skolemized before distribution"),
        Nnf::And(fs) => {
            let mut out = Vec::new();
            for g in fs {
                out.extend(cnf(g, limit)?);
                if out.len() > limit {
                    return Err(too_many());
                }
            }
            Ok(out)
        }
        Nnf::Or(fs) => {
            let mut acc: Vec<Vec<Literal>> = vec![Vec::new()];
            for g in fs {
                let part = cnf(g, limit)?;
                if acc.len().saturating_mul(part.len()) > limit {
                    return Err(too_many());
                }
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for b in &part {
                        let mut c = a.clone();
                        c.extend(b.iter().cloned());
                        next.push(c);
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
    }
}

/// Turns formulas into an equisatisfiable clause set. Skolem functions are
/// appended to the signature under fresh names.
pub fn clausify(
    signature: &Signature,
    formulas: &[SourceFormula],
    options: &ClausifyOptions,
) -> Result<Problem, ClausifyError> {
    let mut sig = signature.clone();
    let mut clauses: Vec<(Clause, String)> = Vec::new();
    let mut counter = 0usize;
    for sf in formulas {
        let positive = !(sf.role == Role::Conjecture && options.negate_conjectures);
        let f = miniscope(nnf(&sf.body, positive));
        let f = Skolemizer { sig: &mut sig, counter }.run_counted(f, &mut counter);
        for lits in cnf(&f, options.clause_limit)? {
            let clause = Clause::new(lits).without_trivially_false();
            if clause.is_tautology() {
                continue;
            }
            clauses.push((clause.normalized(), sf.name.clone()));
            if clauses.len() > options.clause_limit {
                return Err(ClausifyError::TooManyClauses { limit: options.clause_limit });
            }
        }
    }
    let mut problem = Problem::new(sig);
    for (c, origin) in clauses {
        if !problem.clauses.contains(&c) {
            problem.push(c, origin);
        }
    }
    Ok(problem)
}

impl Skolemizer<'_> {
    fn run_counted(mut self, f: Nnf, counter: &mut usize) -> Nnf {
        let out = self.run(f);
        *counter = self.counter;
        out
    }
}
