//! Symbolic message terms and Dolev-Yao knowledge closure.
//!
//! Terms are the free algebra over the constructors below, with one
//! equation: Diffie-Hellman commutativity. [`Term::dh`] canonicalizes so
//! that `dh(a, exp(g, b))` and `dh(b, exp(g, a))` are the same value.
//!
//! A closed knowledge set is kept in two parts: an *analyzed base* that is
//! saturated under the destructor rules (unpairing, decryption with a
//! derivable key, message recovery from signatures) plus the finite
//! exponentiation and DH products of known atoms, and a bounded synthesis
//! check that answers membership for composed terms. Membership in the
//! closure is therefore a query, never an enumeration.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Constructor depth granted to attacker compositions by default.
pub const DEFAULT_DEPTH_BOUND: usize = 6;

/// Nesting limit for the s-expression parser.
const MAX_PARSE_DEPTH: usize = 64;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// A named constant: a fresh secret, a key, an identifier.
    Atom(String),
    /// A public bit string. Always derivable.
    Data(Vec<u8>),
    Pair(Box<Term>, Box<Term>),
    /// `senc(message, key)`
    Senc(Box<Term>, Box<Term>),
    /// `sig(message, signing_key)`
    Sig(Box<Term>, Box<Term>),
    Hash(Box<Term>),
    /// `exp(g, scalar)` for the fixed generator `g`.
    Exp(Box<Term>),
    /// `dh(scalar, share)`; see [`Term::dh`] for the canonical form.
    Dh(Box<Term>, Box<Term>),
    /// `kdf(label, secret, context)`
    Kdf(String, Box<Term>, Box<Term>),
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b':' | b'.' | b'-'))
}

impl Term {
    /// # Panics
    /// If `name` is empty or contains characters outside `[A-Za-z0-9_:.-]`.
    pub fn atom(name: impl Into<String>) -> Term {
        let name = name.into();
        assert!(valid_name(&name), "invalid atom name {name:?}");
        Term::Atom(name)
    }

    pub fn data(bytes: impl Into<Vec<u8>>) -> Term {
        Term::Data(bytes.into())
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn senc(message: Term, key: Term) -> Term {
        Term::Senc(Box::new(message), Box::new(key))
    }

    pub fn sig(message: Term, key: Term) -> Term {
        Term::Sig(Box::new(message), Box::new(key))
    }

    pub fn hash(t: Term) -> Term {
        Term::Hash(Box::new(t))
    }

    pub fn exp(scalar: Term) -> Term {
        Term::Exp(Box::new(scalar))
    }

    /// Builds `dh(scalar, share)`. When both exponents are atoms the result
    /// is normalized to `dh(min, exp(g, max))`.
    pub fn dh(scalar: Term, share: Term) -> Term {
        match (&scalar, &share) {
            (Term::Atom(x), Term::Exp(inner)) => match &**inner {
                Term::Atom(y) if y < x => Term::Dh(Box::new((**inner).clone()), Box::new(Term::exp(scalar))),
                _ => Term::Dh(Box::new(scalar), Box::new(share)),
            },
            _ => Term::Dh(Box::new(scalar), Box::new(share)),
        }
    }

    /// # Panics
    /// If `label` is not a valid name token.
    pub fn kdf(label: impl Into<String>, secret: Term, context: Term) -> Term {
        let label = label.into();
        assert!(valid_name(&label), "invalid kdf label {label:?}");
        Term::Kdf(label, Box::new(secret), Box::new(context))
    }

    /// Constructor depth; atoms and data have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Atom(_) | Term::Data(_) => 0,
            Term::Hash(a) | Term::Exp(a) => 1 + a.depth(),
            Term::Pair(a, b) | Term::Senc(a, b) | Term::Sig(a, b) | Term::Dh(a, b) | Term::Kdf(_, a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Canonical s-expression text.
    pub fn to_sexpr(&self) -> String {
        alloc::format!("{self}")
    }

    pub fn parse_sexpr(text: &str) -> Result<Term, SexprError> {
        let mut p = Parser { src: text.as_bytes(), pos: 0 };
        let t = p.term(0)?;
        if p.pos != p.src.len() {
            return Err(SexprError::Trailing(p.pos));
        }
        Ok(t)
    }

    fn visit_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Atom(n) => out.push(n),
            Term::Data(_) => {}
            Term::Hash(a) | Term::Exp(a) => a.visit_atoms(out),
            Term::Pair(a, b) | Term::Senc(a, b) | Term::Sig(a, b) | Term::Dh(a, b) | Term::Kdf(_, a, b) => {
                a.visit_atoms(out);
                b.visit_atoms(out);
            }
        }
    }

    /// Whether the atom `name` occurs anywhere inside this term.
    pub fn mentions_atom(&self, name: &str) -> bool {
        let mut atoms = Vec::new();
        self.visit_atoms(&mut atoms);
        atoms.contains(&name)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(n) => write!(f, "(atom {n})"),
            Term::Data(b) => {
                f.write_str("(data")?;
                if !b.is_empty() {
                    f.write_str(" ")?;
                    for byte in b {
                        write!(f, "{byte:02x}")?;
                    }
                }
                f.write_str(")")
            }
            Term::Pair(a, b) => write!(f, "(pair {a} {b})"),
            Term::Senc(a, b) => write!(f, "(senc {a} {b})"),
            Term::Sig(a, b) => write!(f, "(sig {a} {b})"),
            Term::Hash(a) => write!(f, "(hash {a})"),
            Term::Exp(a) => write!(f, "(exp {a})"),
            Term::Dh(a, b) => write!(f, "(dh {a} {b})"),
            Term::Kdf(l, a, b) => write!(f, "(kdf {l} {a} {b})"),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SexprError {
    UnexpectedEnd,
    Unexpected(usize),
    UnknownHead(usize),
    BadHex(usize),
    BadName(usize),
    TooDeep,
    Trailing(usize),
}

impl fmt::Display for SexprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SexprError::UnexpectedEnd => f.write_str("unexpected end of input"),
            SexprError::Unexpected(p) => write!(f, "unexpected byte at {p}"),
            SexprError::UnknownHead(p) => write!(f, "unknown constructor at {p}"),
            SexprError::BadHex(p) => write!(f, "bad hex at {p}"),
            SexprError::BadName(p) => write!(f, "bad name at {p}"),
            SexprError::TooDeep => f.write_str("nesting too deep"),
            SexprError::Trailing(p) => write!(f, "trailing input at {p}"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn expect(&mut self, b: u8) -> Result<(), SexprError> {
        match self.src.get(self.pos) {
            Some(&c) if c == b => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(SexprError::Unexpected(self.pos)),
            None => Err(SexprError::UnexpectedEnd),
        }
    }

    fn token(&mut self) -> &str {
        let start = self.pos;
        while let Some(&c) = self.src.get(self.pos) {
            if c == b' ' || c == b'(' || c == b')' {
                break;
            }
            self.pos += 1;
        }
        // Only ASCII bytes can satisfy the later validity checks, and the
        // input came from a &str, so any slice boundary here is on a char
        // boundary or will be rejected as an invalid name.
        core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("\u{0}")
    }

    fn name(&mut self) -> Result<String, SexprError> {
        let at = self.pos;
        let tok = self.token();
        if valid_name(tok) {
            Ok(String::from(tok))
        } else {
            Err(SexprError::BadName(at))
        }
    }

    fn sub(&mut self, depth: usize) -> Result<Box<Term>, SexprError> {
        self.expect(b' ')?;
        Ok(Box::new(self.term(depth + 1)?))
    }

    fn term(&mut self, depth: usize) -> Result<Term, SexprError> {
        if depth > MAX_PARSE_DEPTH {
            return Err(SexprError::TooDeep);
        }
        self.expect(b'(')?;
        let head_at = self.pos;
        let head = self.token();
        let t = match head {
            "atom" => {
                self.expect(b' ')?;
                Term::Atom(self.name()?)
            }
            "data" => {
                let mut bytes = Vec::new();
                if self.src.get(self.pos) == Some(&b' ') {
                    self.pos += 1;
                    let at = self.pos;
                    let hex = self.token().as_bytes();
                    if hex.is_empty() || hex.len() % 2 != 0 {
                        return Err(SexprError::BadHex(at));
                    }
                    for chunk in hex.chunks(2) {
                        let hi = hex_val(chunk[0]).ok_or(SexprError::BadHex(at))?;
                        let lo = hex_val(chunk[1]).ok_or(SexprError::BadHex(at))?;
                        bytes.push(hi << 4 | lo);
                    }
                }
                Term::Data(bytes)
            }
            "pair" => Term::Pair(self.sub(depth)?, self.sub(depth)?),
            "senc" => Term::Senc(self.sub(depth)?, self.sub(depth)?),
            "sig" => Term::Sig(self.sub(depth)?, self.sub(depth)?),
            "hash" => Term::Hash(self.sub(depth)?),
            "exp" => Term::Exp(self.sub(depth)?),
            "dh" => {
                let a = self.sub(depth)?;
                let b = self.sub(depth)?;
                Term::dh(*a, *b)
            }
            "kdf" => {
                self.expect(b' ')?;
                let label = self.name()?;
                Term::Kdf(label, self.sub(depth)?, self.sub(depth)?)
            }
            _ => return Err(SexprError::UnknownHead(head_at)),
        };
        self.expect(b')')?;
        Ok(t)
    }
}

fn hex_val(c: u8) -> Option<u8> {
    match c {
        b'0'..=b'9' => Some(c - b'0'),
        b'a'..=b'f' => Some(c - b'a' + 10),
        _ => None,
    }
}

/// A set of terms known to the adversary.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Knowledge {
    terms: BTreeSet<Term>,
}

impl Knowledge {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, t: Term) -> bool {
        self.terms.insert(t)
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.terms.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_subset(&self, other: &Knowledge) -> bool {
        self.terms.is_subset(&other.terms)
    }
}

impl FromIterator<Term> for Knowledge {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        Knowledge { terms: iter.into_iter().collect() }
    }
}

impl Extend<Term> for Knowledge {
    fn extend<I: IntoIterator<Item = Term>>(&mut self, iter: I) {
        self.terms.extend(iter)
    }
}

/// The closure of a knowledge set: its analyzed base plus the depth bound
/// used for synthesis queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    base: Knowledge,
    depth_bound: usize,
}

impl Closure {
    pub fn base(&self) -> &Knowledge {
        &self.base
    }

    pub fn depth_bound(&self) -> usize {
        self.depth_bound
    }

    /// Membership in the closure.
    pub fn contains(&self, goal: &Term) -> bool {
        synthesize(&self.base, goal, self.depth_bound)
    }

    /// Atoms present in the analyzed base.
    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.base.iter().filter_map(|t| match t {
            Term::Atom(n) => Some(n.as_str()),
            _ => None,
        })
    }
}

/// Saturates `initial` under the deduction rules.
///
/// # Panics
/// If `depth_bound` is zero.
pub fn close_knowledge(initial: &Knowledge, depth_bound: usize) -> Closure {
    assert!(depth_bound >= 1, "depth bound must be at least 1");
    let mut base = initial.clone();
    loop {
        let mut fresh: Vec<Term> = Vec::new();
        for t in base.iter() {
            match t {
                Term::Pair(a, b) => {
                    fresh.push((**a).clone());
                    fresh.push((**b).clone());
                }
                Term::Senc(m, k) if synthesize(&base, k, depth_bound) => fresh.push((**m).clone()),
                Term::Sig(m, _) => fresh.push((**m).clone()),
                _ => {}
            }
        }

        // Exponentiation and DH with known scalar atoms. Both sets are
        // finite, so this stays inside the saturation loop.
        let scalars: Vec<Term> = base.iter().filter(|t| matches!(t, Term::Atom(_))).cloned().collect();
        let mut shares: Vec<Term> = base
            .iter()
            .filter(|t| matches!(t, Term::Exp(inner) if matches!(**inner, Term::Atom(_))))
            .cloned()
            .collect();
        for s in &scalars {
            let e = Term::exp(s.clone());
            fresh.push(e.clone());
            shares.push(e);
        }
        for s in &scalars {
            for e in &shares {
                fresh.push(Term::dh(s.clone(), e.clone()));
            }
        }

        let before = base.len();
        base.extend(fresh);
        if base.len() == before {
            break;
        }
    }
    Closure { base, depth_bound }
}

/// Whether `goal` is in the closure of `k` at the given depth bound.
pub fn derivable(goal: &Term, k: &Knowledge, depth_bound: usize) -> bool {
    close_knowledge(k, depth_bound).contains(goal)
}

fn synthesize(base: &Knowledge, goal: &Term, budget: usize) -> bool {
    if base.contains(goal) {
        return true;
    }
    match goal {
        Term::Data(_) => true,
        Term::Atom(_) => false,
        _ if budget == 0 => false,
        Term::Pair(a, b) | Term::Senc(a, b) | Term::Kdf(_, a, b) => {
            synthesize(base, a, budget - 1) && synthesize(base, b, budget - 1)
        }
        Term::Hash(a) | Term::Exp(a) => synthesize(base, a, budget - 1),
        Term::Sig(m, k) => matches!(**k, Term::Atom(_)) && base.contains(k) && synthesize(base, m, budget - 1),
        Term::Dh(x, e) => {
            let direct = matches!(**x, Term::Atom(_)) && base.contains(x) && synthesize(base, e, budget - 1);
            direct
                || match (&**x, &**e) {
                    // the commuted form: dh(y, exp(g, x)) with y known
                    (Term::Atom(_), Term::Exp(y)) if matches!(**y, Term::Atom(_)) => {
                        base.contains(y) && synthesize(base, &Term::exp((**x).clone()), budget - 1)
                    }
                    _ => false,
                }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn a(n: &str) -> Term {
        Term::atom(n)
    }

    fn k(terms: &[Term]) -> Knowledge {
        terms.iter().cloned().collect()
    }

    const D: usize = DEFAULT_DEPTH_BOUND;

    #[test]
    fn dh_is_canonical() {
        let x = Term::dh(a("a"), Term::exp(a("b")));
        let y = Term::dh(a("b"), Term::exp(a("a")));
        assert_eq!(x, y);
        assert_eq!(x.to_sexpr(), "(dh (atom a) (exp (atom b)))");
    }

    #[test]
    fn sexpr_golden() {
        let t = Term::kdf(
            "sess",
            Term::dh(a("x2"), Term::exp(a("x1"))),
            Term::hash(Term::pair(Term::data(vec![0x0a, 0xff]), Term::data(vec![]))),
        );
        let text = "(kdf sess (dh (atom x1) (exp (atom x2))) (hash (pair (data 0aff) (data))))";
        assert_eq!(t.to_sexpr(), text);
        assert_eq!(Term::parse_sexpr(text).unwrap(), t);
    }

    #[test]
    fn parser_rejects_malformed() {
        for bad in [
            "",
            "(atom)",
            "(atom a b)",
            "(data 0)",
            "(data zz)",
            "(pair (atom a))",
            "(foo (atom a))",
            "(atom a) ",
            "(atom a(b)",
            "(hash  (atom a))",
        ] {
            assert!(Term::parse_sexpr(bad).is_err(), "{bad:?}");
        }
        let mut deep = String::new();
        for _ in 0..100 {
            deep.push_str("(hash ");
        }
        deep.push_str("(atom a)");
        for _ in 0..100 {
            deep.push(')');
        }
        assert_eq!(Term::parse_sexpr(&deep), Err(SexprError::TooDeep));
    }

    #[test]
    fn parser_canonicalizes_dh() {
        let t = Term::parse_sexpr("(dh (atom b) (exp (atom a)))").unwrap();
        assert_eq!(t, Term::dh(a("a"), Term::exp(a("b"))));
    }

    // One positive and one negative case per rule.

    #[test]
    fn rule_membership() {
        assert!(derivable(&a("m"), &k(&[a("m")]), D));
        assert!(!derivable(&a("m"), &k(&[a("n")]), D));
    }

    #[test]
    fn rule_unpairing() {
        let kn = k(&[Term::pair(a("x"), Term::pair(a("y"), a("z")))]);
        assert!(derivable(&a("z"), &kn, D));
        assert!(!derivable(&a("w"), &kn, D));
    }

    #[test]
    fn rule_pairing() {
        let kn = k(&[a("x"), a("y")]);
        assert!(derivable(&Term::pair(a("y"), a("x")), &kn, D));
        assert!(!derivable(&Term::pair(a("x"), a("z")), &kn, D));
    }

    #[test]
    fn rule_decryption() {
        let kn = k(&[a("k"), Term::senc(a("m"), a("k"))]);
        assert!(derivable(&a("m"), &kn, D));
        let without_key = k(&[Term::senc(a("m"), a("k"))]);
        assert!(!derivable(&a("m"), &without_key, D));
    }

    #[test]
    fn rule_decryption_with_composed_key() {
        let key = Term::kdf("k1", a("s"), Term::data(vec![1]));
        let kn = k(&[a("s"), Term::senc(a("m"), key.clone())]);
        assert!(derivable(&a("m"), &kn, D));
        let kn = k(&[Term::senc(a("m"), key)]);
        assert!(!derivable(&a("m"), &kn, D));
    }

    #[test]
    fn rule_encryption() {
        let kn = k(&[a("m"), a("k")]);
        assert!(derivable(&Term::senc(a("m"), a("k")), &kn, D));
        assert!(!derivable(&Term::senc(a("m"), a("j")), &kn, D));
    }

    #[test]
    fn rule_hashing() {
        let kn = k(&[a("m")]);
        assert!(derivable(&Term::hash(a("m")), &kn, D));
        assert!(!derivable(&Term::hash(a("n")), &kn, D));
        // hashes are one-way
        assert!(!derivable(&a("n"), &k(&[Term::hash(a("n"))]), D));
    }

    #[test]
    fn rule_exponentiation() {
        assert!(derivable(&Term::exp(a("x")), &k(&[a("x")]), D));
        assert!(!derivable(&a("x"), &k(&[Term::exp(a("x"))]), D));
    }

    #[test]
    fn rule_dh() {
        let kn = k(&[Term::exp(a("a")), a("b")]);
        assert!(derivable(&Term::dh(a("b"), Term::exp(a("a"))), &kn, D));
        assert!(derivable(&Term::dh(a("a"), Term::exp(a("b"))), &kn, D));
        assert!(close_knowledge(&kn, D).base().contains(&Term::dh(a("b"), Term::exp(a("a")))));
    }

    #[test]
    fn dh_assumption_holds() {
        let kn = k(&[Term::exp(a("a")), Term::exp(a("b"))]);
        let closure = close_knowledge(&kn, D);
        assert!(!closure.contains(&Term::dh(a("a"), Term::exp(a("b")))));
        assert!(!closure.contains(&Term::dh(a("b"), Term::exp(a("a")))));
        assert!(!closure.base().iter().any(|t| matches!(t, Term::Dh(..))));
    }

    #[test]
    fn rule_kdf() {
        let z = Term::dh(a("a"), Term::exp(a("b")));
        let goal = Term::kdf("sess", z.clone(), Term::data(vec![9]));
        assert!(derivable(&goal, &k(&[a("a"), Term::exp(a("b"))]), D));
        assert!(!derivable(&goal, &k(&[Term::exp(a("a")), Term::exp(a("b"))]), D));
    }

    #[test]
    fn rule_signing() {
        let kn = k(&[a("sk_alice"), a("m")]);
        assert!(derivable(&Term::sig(a("m"), a("sk_alice")), &kn, D));
        assert!(!derivable(&Term::sig(a("m"), a("sk_bob")), &kn, D));
        // composite terms never act as signing keys
        let kn = k(&[a("m"), a("x")]);
        assert!(!derivable(&Term::sig(a("m"), Term::hash(a("x"))), &kn, D));
    }

    #[test]
    fn rule_signature_reveals_message() {
        assert!(derivable(&a("m"), &k(&[Term::sig(a("m"), a("sk"))]), D));
        assert!(!derivable(&a("sk"), &k(&[Term::sig(a("m"), a("sk"))]), D));
    }

    #[test]
    fn depth_bound_limits_synthesis() {
        let mut goal = a("x");
        for _ in 0..4 {
            goal = Term::hash(goal);
        }
        let kn = k(&[a("x")]);
        assert!(derivable(&goal, &kn, 4));
        assert!(!derivable(&goal, &kn, 3));
    }

    #[test]
    fn data_is_public() {
        assert!(derivable(&Term::data(vec![1, 2, 3]), &Knowledge::new(), 1));
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["a", "b", "c", "k", "sk"]).prop_map(Term::atom),
            prop::collection::vec(any::<u8>(), 0..3).prop_map(Term::Data),
        ];
        leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::pair(x, y)),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::senc(x, y)),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::sig(x, y)),
                inner.clone().prop_map(Term::hash),
                inner.clone().prop_map(Term::exp),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::dh(x, y)),
                (inner.clone(), inner).prop_map(|(x, y)| Term::kdf("l", x, y)),
            ]
        })
    }

    proptest! {
        #[test]
        fn sexpr_round_trip(t in arb_term()) {
            prop_assert_eq!(Term::parse_sexpr(&t.to_sexpr()).unwrap(), t);
        }

        #[test]
        fn closure_is_monotone(
            small in prop::collection::vec(arb_term(), 0..5),
            extra in prop::collection::vec(arb_term(), 0..4),
            probe in arb_term(),
        ) {
            let k1: Knowledge = small.iter().cloned().collect();
            let k2: Knowledge = small.into_iter().chain(extra).collect();
            let c1 = close_knowledge(&k1, D);
            let c2 = close_knowledge(&k2, D);
            prop_assert!(c1.base().is_subset(c2.base()));
            if c1.contains(&probe) {
                prop_assert!(c2.contains(&probe));
            }
        }

        #[test]
        fn closure_is_idempotent(terms in prop::collection::vec(arb_term(), 0..6), probe in arb_term()) {
            let kn: Knowledge = terms.into_iter().collect();
            let once = close_knowledge(&kn, D);
            let twice = close_knowledge(once.base(), D);
            prop_assert_eq!(once.base(), twice.base());
            prop_assert_eq!(once.contains(&probe), twice.contains(&probe));
        }
    }
}
