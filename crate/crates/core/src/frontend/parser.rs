use super::lexer::{tokenize, Spanned, Tok};
use super::{Dialect, Formula, ParseError, Role, SourceFormula};
use crate::logic::{Atom, FunId, PredId, Signature, SortId, SymbolOrigin, Term, Var};

const DEFAULT_SORT: &str = "$i";

#[derive(Clone, Copy, PartialEq, Eq)]
enum Lang {
    Cnf,
    Fof,
    Tff,
}

/// A term before we know whether its head is a predicate or a function.
#[derive(Clone, Debug)]
enum Raw {
    Var(Var),
    App { name: String, args: Vec<Raw>, line: usize, col: usize },
}

pub(super) struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    dialect: Dialect,
    sig: Signature,
    formulas: Vec<SourceFormula>,
    next_var: u32,
    scope: Vec<(String, Var)>,
    /// Free variables collected while reading a cnf clause.
    free: Vec<(String, Var)>,
    lang: Lang,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub(super) fn new(text: &str, dialect: Dialect) -> PResult<Parser> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            dialect,
            sig: Signature::default(),
            formulas: Vec::new(),
            next_var: 0,
            scope: Vec::new(),
            free: Vec::new(),
            lang: Lang::Fof,
        })
    }

    pub(super) fn run(mut self) -> PResult<(Signature, Vec<SourceFormula>)> {
        while self.peek() != &Tok::Eof {
            self.annotated()?;
        }
        Ok((self.sig, self.formulas))
    }

    // ----- token helpers -----

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> PResult<T> {
        let (line, col) = self.here();
        Err(ParseError::Syntax { line, col, message: message.into() })
    }

    fn unsupported<T>(&self, construct: impl Into<String>) -> PResult<T> {
        let (line, col) = self.here();
        Err(ParseError::Unsupported { line, col, construct: construct.into() })
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            self.syntax(format!("expected {}, found {}", describe(&want), describe(self.peek())))
        }
    }

    fn lower_word(&mut self) -> PResult<String> {
        match self.next() {
            Tok::Lower(w) => Ok(w),
            Tok::Number(n) => Ok(n),
            other => {
                self.pos -= 1;
                self.syntax(format!("expected a name, found {}", describe(&other)))
            }
        }
    }

    // ----- top level -----

    fn annotated(&mut self) -> PResult<()> {
        let (line, col) = self.here();
        let kind = match self.next() {
            Tok::Lower(k) => k,
            other => {
                self.pos -= 1;
                return self.syntax(format!("expected cnf, fof or tff, found {}", describe(&other)));
            }
        };
        self.lang = match kind.as_str() {
            "cnf" => Lang::Cnf,
            "fof" => Lang::Fof,
            "tff" => {
                if self.dialect == Dialect::Untyped {
                    return Err(ParseError::Unsupported { line, col, construct: "tff in untyped dialect".into() });
                }
                Lang::Tff
            }
            "include" => return Err(ParseError::Unsupported { line, col, construct: "include".into() }),
            "thf" | "tcf" | "tpi" => {
                return Err(ParseError::Unsupported { line, col, construct: kind })
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    message: format!("expected cnf, fof or tff, found '{other}'"),
                })
            }
        };
        self.expect(Tok::LParen)?;
        let name = self.lower_word()?;
        self.expect(Tok::Comma)?;
        let role_word = self.lower_word()?;
        self.expect(Tok::Comma)?;
        if role_word == "type" {
            if self.lang != Lang::Tff {
                return self.unsupported("type declaration outside tff");
            }
            self.type_decl()?;
        } else {
            let role = match role_word.as_str() {
                "conjecture" => Role::Conjecture,
                "axiom" | "hypothesis" | "definition" | "assumption" | "lemma" | "theorem"
                | "corollary" | "negated_conjecture" => Role::Axiom,
                _ => Role::Other,
            };
            self.scope.clear();
            self.free.clear();
            let body = if self.lang == Lang::Cnf { self.cnf_body()? } else { self.formula()? };
            let body = if self.free.is_empty() {
                body
            } else {
                let vars = self.free.drain(..).map(|(_, v)| v).collect();
                Formula::Forall(vars, Box::new(body))
            };
            self.formulas.push(SourceFormula { name, role, body });
        }
        if *self.peek() == Tok::Comma {
            return self.unsupported("annotations");
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)
    }

    fn type_decl(&mut self) -> PResult<()> {
        let parens = *self.peek() == Tok::LParen;
        if parens {
            self.next();
        }
        let (line, col) = self.here();
        let name = self.lower_word()?;
        self.expect(Tok::Colon)?;
        if *self.peek() == Tok::Dollar("$tType".into()) {
            self.next();
            if self.sig.sort_by_name(&name).is_some() {
                return Err(ParseError::Declaration { line, col, message: format!("sort {name} declared twice") });
            }
            if self.sig.name_in_use(&name) {
                return Err(ParseError::Declaration { line, col, message: format!("{name} is already a symbol") });
            }
            self.sig.add_sort(name);
        } else {
            let (args, ret) = self.type_expr()?;
            if self.sig.name_in_use(&name) {
                return Err(ParseError::Declaration { line, col, message: format!("{name} declared twice") });
            }
            match ret {
                None => {
                    self.sig.add_predicate(name, args, SymbolOrigin::Input);
                }
                Some(ret) => {
                    self.sig.add_function(name, args, ret, SymbolOrigin::Input);
                }
            }
        }
        if parens {
            self.expect(Tok::RParen)?;
        }
        Ok(())
    }

    /// Returns argument sorts and the result sort (`None` for `$o`).
    fn type_expr(&mut self) -> PResult<(Vec<SortId>, Option<SortId>)> {
        if *self.peek() == Tok::Other("!>".into()) {
            return self.unsupported("polymorphic type");
        }
        let args = if *self.peek() == Tok::LParen {
            self.next();
            let mut args = vec![self.atomic_sort()?];
            while *self.peek() == Tok::Star {
                self.next();
                args.push(self.atomic_sort()?);
            }
            self.expect(Tok::RParen)?;
            self.expect(Tok::Arrow)?;
            args
        } else {
            let first = self.atomic_type()?;
            if *self.peek() != Tok::Arrow {
                return Ok((Vec::new(), first));
            }
            self.next();
            match first {
                Some(s) => vec![s],
                None => return self.unsupported("$o as an argument type"),
            }
        };
        let ret = self.atomic_type()?;
        Ok((args, ret))
    }

    fn atomic_sort(&mut self) -> PResult<SortId> {
        match self.atomic_type()? {
            Some(s) => Ok(s),
            None => self.unsupported("$o as an argument type"),
        }
    }

    fn atomic_type(&mut self) -> PResult<Option<SortId>> {
        let (line, col) = self.here();
        match self.next() {
            Tok::Dollar(d) if d == "$o" => Ok(None),
            Tok::Dollar(d) if d == "$i" => Ok(Some(self.default_sort())),
            Tok::Dollar(d) => Err(ParseError::Unsupported { line, col, construct: format!("type {d}") }),
            Tok::Lower(name) => match self.sig.sort_by_name(&name) {
                Some(s) => Ok(Some(s)),
                None => Err(ParseError::Declaration { line, col, message: format!("undeclared sort {name}") }),
            },
            other => {
                self.pos -= 1;
                self.syntax(format!("expected a type, found {}", describe(&other)))
            }
        }
    }

    fn default_sort(&mut self) -> SortId {
        match self.sig.sort_by_name(DEFAULT_SORT) {
            Some(s) => s,
            None => self.sig.add_sort(DEFAULT_SORT),
        }
    }

    // ----- formulas -----

    fn cnf_body(&mut self) -> PResult<Formula> {
        let parens = *self.peek() == Tok::LParen;
        if parens {
            self.next();
        }
        let mut lits = vec![self.cnf_literal()?];
        while *self.peek() == Tok::Or {
            self.next();
            lits.push(self.cnf_literal()?);
        }
        if parens {
            self.expect(Tok::RParen)?;
        }
        Ok(if lits.len() == 1 { lits.pop().unwrap() } else { Formula::Or(lits) })
    }

    fn cnf_literal(&mut self) -> PResult<Formula> {
        if *self.peek() == Tok::Tilde {
            self.next();
            return Ok(Formula::Not(Box::new(self.atomic_formula()?)));
        }
        self.atomic_formula()
    }

    fn formula(&mut self) -> PResult<Formula> {
        let first = self.unitary()?;
        let op = self.peek().clone();
        match op {
            Tok::And | Tok::Or => {
                let mut parts = vec![first];
                while *self.peek() == op {
                    self.next();
                    parts.push(self.unitary()?);
                }
                if matches!(self.peek(), Tok::And | Tok::Or | Tok::Implies | Tok::Iff | Tok::RevImplies | Tok::Xor | Tok::Nor | Tok::Nand) {
                    return self.syntax("mixed connectives need parentheses");
                }
                Ok(if op == Tok::And { Formula::And(parts) } else { Formula::Or(parts) })
            }
            Tok::Implies | Tok::RevImplies | Tok::Iff | Tok::Xor | Tok::Nor | Tok::Nand => {
                self.next();
                let second = self.unitary()?;
                let (a, b) = (Box::new(first), Box::new(second));
                Ok(match op {
                    Tok::Implies => Formula::Implies(a, b),
                    Tok::RevImplies => Formula::Implies(b, a),
                    Tok::Iff => Formula::Iff(a, b),
                    Tok::Xor => Formula::Not(Box::new(Formula::Iff(a, b))),
                    Tok::Nor => Formula::Not(Box::new(Formula::Or(vec![*a, *b]))),
                    _ => Formula::Not(Box::new(Formula::And(vec![*a, *b]))),
                })
            }
            _ => Ok(first),
        }
    }

    fn unitary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Tilde => {
                self.next();
                Ok(Formula::Not(Box::new(self.unitary()?)))
            }
            Tok::Bang | Tok::Question => {
                let universal = self.next() == Tok::Bang;
                self.expect(Tok::LBrack)?;
                let depth = self.scope.len();
                let mut vars = vec![self.binder()?];
                while *self.peek() == Tok::Comma {
                    self.next();
                    vars.push(self.binder()?);
                }
                self.expect(Tok::RBrack)?;
                self.expect(Tok::Colon)?;
                let body = self.unitary()?;
                self.scope.truncate(depth);
                Ok(if universal {
                    Formula::Forall(vars, Box::new(body))
                } else {
                    Formula::Exists(vars, Box::new(body))
                })
            }
            Tok::Other(o) => self.unsupported(o),
            _ => self.atomic_formula(),
        }
    }

    fn binder(&mut self) -> PResult<Var> {
        let name = match self.next() {
            Tok::Upper(n) => n,
            other => {
                self.pos -= 1;
                return self.syntax(format!("expected a variable, found {}", describe(&other)));
            }
        };
        let sort = if *self.peek() == Tok::Colon {
            self.next();
            if self.lang != Lang::Tff {
                return self.unsupported("typed variable outside tff");
            }
            self.atomic_sort()?
        } else {
            self.default_sort()
        };
        let v = Var { id: self.next_var, sort };
        self.next_var += 1;
        self.scope.push((name, v));
        Ok(v)
    }

    fn atomic_formula(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Dollar(d) if d == "$true" => {
                self.next();
                return Ok(Formula::True);
            }
            Tok::Dollar(d) if d == "$false" => {
                self.next();
                return Ok(Formula::False);
            }
            Tok::Dollar(d) if d == "$distinct" => {
                self.next();
                return self.distinct();
            }
            _ => {}
        }
        let lhs = self.raw_term()?;
        match self.peek() {
            Tok::Eq | Tok::Neq => {
                let positive = self.next() == Tok::Eq;
                let rhs = self.raw_term()?;
                let atom = self.equality(lhs, rhs)?;
                let f = Formula::Atom(atom);
                Ok(if positive { f } else { Formula::Not(Box::new(f)) })
            }
            _ => match lhs {
                Raw::Var(_) => self.syntax("a variable cannot be used as a formula"),
                Raw::App { name, args, line, col } => {
                    let p = self.resolve_predicate(&name, args.len(), line, col)?;
                    let expected = self.sig.predicate(p).args.clone();
                    let args = self.resolve_args(&name, args, &expected, line, col)?;
                    Ok(Formula::Atom(Atom::Pred(p, args)))
                }
            },
        }
    }

    fn distinct(&mut self) -> PResult<Formula> {
        self.expect(Tok::LParen)?;
        let mut raws = vec![self.raw_term()?];
        while *self.peek() == Tok::Comma {
            self.next();
            raws.push(self.raw_term()?);
        }
        self.expect(Tok::RParen)?;
        let mut parts = Vec::new();
        for i in 0..raws.len() {
            for j in i + 1..raws.len() {
                let atom = self.equality(raws[i].clone(), raws[j].clone())?;
                parts.push(Formula::Not(Box::new(Formula::Atom(atom))));
            }
        }
        Ok(match parts.len() {
            0 => Formula::True,
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        })
    }

    fn equality(&mut self, lhs: Raw, rhs: Raw) -> PResult<Atom> {
        let (line, col) = self.here();
        let sort = match (&lhs, &rhs) {
            (Raw::Var(v), _) => v.sort,
            (_, Raw::Var(v)) => v.sort,
            (Raw::App { name, args, line, col }, _) => {
                let f = self.resolve_function(name, args.len(), *line, *col)?;
                self.sig.function(f).ret
            }
        };
        let l = self.resolve_term(lhs)?;
        let r = self.resolve_term(rhs)?;
        let ls = l.sort(&self.sig);
        let rs = r.sort(&self.sig);
        if ls != sort || rs != sort {
            return Err(ParseError::Sort {
                line,
                col,
                message: format!(
                    "equality between sorts {} and {}",
                    self.sig.sort_name(ls),
                    self.sig.sort_name(rs)
                ),
            });
        }
        Ok(Atom::eq(sort, l, r))
    }

    fn raw_term(&mut self) -> PResult<Raw> {
        let (line, col) = self.here();
        match self.next() {
            Tok::Upper(name) => {
                if let Some((_, v)) = self.scope.iter().rev().find(|(n, _)| *n == name) {
                    return Ok(Raw::Var(*v));
                }
                if self.lang == Lang::Cnf {
                    if let Some((_, v)) = self.free.iter().find(|(n, _)| *n == name) {
                        return Ok(Raw::Var(*v));
                    }
                    let v = Var { id: self.next_var, sort: self.default_sort() };
                    self.next_var += 1;
                    self.free.push((name, v));
                    return Ok(Raw::Var(v));
                }
                Err(ParseError::Syntax { line, col, message: format!("free variable {name}") })
            }
            Tok::Lower(name) => {
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.next();
                    args.push(self.raw_term()?);
                    while *self.peek() == Tok::Comma {
                        self.next();
                        args.push(self.raw_term()?);
                    }
                    self.expect(Tok::RParen)?;
                }
                Ok(Raw::App { name, args, line, col })
            }
            Tok::Number(n) => Err(ParseError::Unsupported { line, col, construct: format!("numeral {n}") }),
            Tok::Distinct(s) => Err(ParseError::Unsupported { line, col, construct: format!("distinct object \"{s}\"") }),
            Tok::Dollar(d) => Err(ParseError::Unsupported { line, col, construct: d }),
            Tok::Other(o) => Err(ParseError::Unsupported { line, col, construct: o }),
            other => {
                self.pos -= 1;
                self.syntax(format!("expected a term, found {}", describe(&other)))
            }
        }
    }

    fn resolve_term(&mut self, raw: Raw) -> PResult<Term> {
        match raw {
            Raw::Var(v) => Ok(Term::Var(v)),
            Raw::App { name, args, line, col } => {
                let f = self.resolve_function(&name, args.len(), line, col)?;
                let expected = self.sig.function(f).args.clone();
                let args = self.resolve_args(&name, args, &expected, line, col)?;
                Ok(Term::App(f, args))
            }
        }
    }

    fn resolve_args(
        &mut self,
        name: &str,
        args: Vec<Raw>,
        expected: &[SortId],
        line: usize,
        col: usize,
    ) -> PResult<Vec<Term>> {
        let mut out = Vec::with_capacity(args.len());
        for (i, (raw, want)) in args.into_iter().zip(expected).enumerate() {
            let t = self.resolve_term(raw)?;
            let got = t.sort(&self.sig);
            if got != *want {
                return Err(ParseError::Sort {
                    line,
                    col,
                    message: format!(
                        "argument {} of {name} has sort {}, expected {}",
                        i + 1,
                        self.sig.sort_name(got),
                        self.sig.sort_name(*want)
                    ),
                });
            }
            out.push(t);
        }
        Ok(out)
    }

    fn resolve_function(&mut self, name: &str, arity: usize, line: usize, col: usize) -> PResult<FunId> {
        if let Some(f) = self.sig.function_by_name(name) {
            let have = self.sig.function(f).args.len();
            if have != arity {
                return Err(ParseError::Declaration {
                    line,
                    col,
                    message: format!("{name} used with arity {arity}, declared with {have}"),
                });
            }
            return Ok(f);
        }
        if self.sig.name_in_use(name) {
            return Err(ParseError::Declaration { line, col, message: format!("{name} is not a function") });
        }
        let d = self.default_sort();
        Ok(self.sig.add_function(name, vec![d; arity], d, SymbolOrigin::Input))
    }

    fn resolve_predicate(&mut self, name: &str, arity: usize, line: usize, col: usize) -> PResult<PredId> {
        if let Some(p) = self.sig.predicate_by_name(name) {
            let have = self.sig.predicate(p).args.len();
            if have != arity {
                return Err(ParseError::Declaration {
                    line,
                    col,
                    message: format!("{name} used with arity {arity}, declared with {have}"),
                });
            }
            return Ok(p);
        }
        if self.sig.name_in_use(name) {
            return Err(ParseError::Declaration { line, col, message: format!("{name} is not a predicate") });
        }
        let d = self.default_sort();
        Ok(self.sig.add_predicate(name, vec![d; arity], SymbolOrigin::Input))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Lower(w) | Tok::Upper(w) | Tok::Dollar(w) | Tok::Number(w) => format!("'{w}'"),
        Tok::Distinct(s) => format!("\"{s}\""),
        Tok::Eof => "end of input".into(),
        Tok::Other(o) => format!("'{o}'"),
        other => format!("{other:?}"),
    }
}

/// Chooses the typed dialect when the text contains a `tff` unit.
pub(super) fn looks_typed(text: &str) -> bool {
    tokenize(text)
        .map(|toks| toks.iter().any(|t| t.tok == Tok::Lower("tff".into())))
        .unwrap_or(false)
}
