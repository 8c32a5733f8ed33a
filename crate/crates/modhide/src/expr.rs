//! Hidden-expression trees: synthesis, nesting, evaluation, and rendering.
//!
//! A literal `c` is hidden as `d*F(B%M,k)` (plus `+F(B'%M',k)` when `c` is
//! odd), where each `F` argument is built by lifting a small target value up
//! the modulus chain: starting from `a_0 = v`, each step adds `t_i·s_i` while
//! keeping `a_i < s_{i+1}`, and finally `B = a_k + u·M` with `M = s_{k+1}`.
//! Reducing `B mod M` back down the chain recovers `v` exactly, so the whole
//! expression evaluates to `c` in Java `int` arithmetic.
//!
//! All arithmetic is checked 32-bit; synthesis never emits an expression that
//! could overflow or produce a negative intermediate.

use rand::rngs::StdRng;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::moduli::{ChainMode, ModulusChain};
use crate::{Error, Result};

/// How lift coefficients are chosen during synthesis.
///
/// `Unit` fixes every `t_i` and `u` to 1 (dropping to 0 where the chain or
/// the 32-bit budget forbids 1), which makes output text a pure function of
/// the depth choices. `Random` draws each coefficient from its full feasible
/// range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftStyle {
    Unit,
    Random,
}

impl std::fmt::Display for LiftStyle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LiftStyle::Unit => write!(f, "unit"),
            LiftStyle::Random => write!(f, "random"),
        }
    }
}

/// Expression fragment spliced into rewritten source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HiddenExpr {
    Lit(i32),
    Add(Box<HiddenExpr>, Box<HiddenExpr>),
    Mul(Box<HiddenExpr>, Box<HiddenExpr>),
    Mod(Box<HiddenExpr>, Box<HiddenExpr>),
    FCall { arg: Box<HiddenExpr>, depth: u32 },
}

/// Synthesized argument for one `F` call: rendered as `B%M` at `depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FArg {
    pub b: i32,
    pub modulus: i32,
    pub depth: u32,
}

impl FArg {
    pub fn into_expr(self) -> HiddenExpr {
        HiddenExpr::FCall {
            arg: Box::new(HiddenExpr::Mod(
                Box::new(HiddenExpr::Lit(self.b)),
                Box::new(HiddenExpr::Lit(self.modulus)),
            )),
            depth: self.depth,
        }
    }
}

/// Depths used when nesting into an existing `F` argument: one for the
/// even-half term, one for the parity term.
#[derive(Debug, Clone, Copy)]
pub struct NestDepths {
    pub two: u32,
    pub one: u32,
}

/// Lifts `v` to depth `k` and wraps it for rendering as `B%M`.
///
/// Requires `0 <= v < s_1` and `1 <= k < chain.len()` (one spare modulus is
/// needed above the reduction depth). Guarantees `reduce(B mod M, k) == v`
/// and `B mod M != B`.
pub fn synthesize_arg(
    chain: &ModulusChain,
    v: i32,
    k: u32,
    style: LiftStyle,
    rng: &mut StdRng,
) -> Result<FArg> {
    let s1 = chain.sum_at(1)?;
    if !(0..s1).contains(&v) {
        return Err(Error::ValueOutOfRange { value: v as i64, what: "lift target must lie below the first modulus" });
    }
    if k == 0 || k >= chain.len() {
        return Err(Error::DepthOutOfRange { k, min: 1, max: chain.len().saturating_sub(1) });
    }
    let modulus = chain.sum_at(k + 1)? as i64;
    // Reserve room for the final u·M step so B stays a Java int.
    let budget = i32::MAX as i64 - modulus;
    let mut a = v as i64;
    for i in 1..=k {
        let s_i = chain.sum_at(i)? as i64;
        let s_next = chain.sum_at(i + 1)? as i64;
        let t_max = ((s_next - 1 - a) / s_i).min((budget - a) / s_i).max(0);
        let t = match style {
            LiftStyle::Unit => t_max.min(1),
            LiftStyle::Random => rng.gen_range(0..=t_max),
        };
        a += t * s_i;
        debug_assert!(a < s_next);
    }
    let u_max = (i32::MAX as i64 - a) / modulus;
    if u_max < 1 {
        return Err(Error::Overflow { what: "lifted argument" });
    }
    let u = match style {
        LiftStyle::Unit => 1,
        LiftStyle::Random => rng.gen_range(1..=u_max.min(3)),
    };
    let b = a + u * modulus;
    let arg = FArg { b: b as i32, modulus: modulus as i32, depth: k };
    debug_assert_eq!(chain.reduce(arg.b % arg.modulus, k).unwrap(), v);
    Ok(arg)
}

/// Hides a non-negative constant `c` as `d*F(..) [+ F(..)]` with both calls
/// at depth `k`. The tree evaluates to `c` and always contains an `F` call.
pub fn hide_constant(
    chain: &ModulusChain,
    c: i32,
    k: u32,
    style: LiftStyle,
    rng: &mut StdRng,
) -> Result<HiddenExpr> {
    if c < 0 {
        return Err(Error::ValueOutOfRange { value: c as i64, what: "only non-negative literals can be hidden" });
    }
    let d = c / 2;
    let two = synthesize_arg(chain, 2, k, style, rng)?.into_expr();
    let half = HiddenExpr::Mul(Box::new(HiddenExpr::Lit(d)), Box::new(two));
    let expr = if c % 2 == 1 {
        let one = synthesize_arg(chain, 1, k, style, rng)?.into_expr();
        HiddenExpr::Add(Box::new(half), Box::new(one))
    } else {
        half
    };
    debug_assert_eq!(eval(chain, &expr).unwrap(), c);
    Ok(expr)
}

/// Fixed hiding of 1 reused for every parity term under the unit style on a
/// doubled chain: `33 % 21 = 12`, which reduces through 11 and 5 to 1.
fn canned_one() -> HiddenExpr {
    HiddenExpr::FCall {
        arg: Box::new(HiddenExpr::Mod(
            Box::new(HiddenExpr::Lit(33)),
            Box::new(HiddenExpr::Lit(21)),
        )),
        depth: 2,
    }
}

/// Replacement for a literal `h` sitting inside an existing `F` argument:
/// `F(..)*d` when `h` is even, `(F(..)*d+F(..))` when odd. Note the factor
/// order is call-first here, unlike the top-level form.
pub fn nest_literal(
    chain: &ModulusChain,
    h: i32,
    depths: NestDepths,
    style: LiftStyle,
    rng: &mut StdRng,
) -> Result<HiddenExpr> {
    if h < 0 {
        return Err(Error::ValueOutOfRange { value: h as i64, what: "only non-negative literals can be nested" });
    }
    let d = h / 2;
    let two = synthesize_arg(chain, 2, depths.two, style, rng)?.into_expr();
    let half = HiddenExpr::Mul(Box::new(two), Box::new(HiddenExpr::Lit(d)));
    let expr = if h % 2 == 1 {
        let one = if style == LiftStyle::Unit && chain.mode() == ChainMode::Doubled {
            canned_one()
        } else {
            synthesize_arg(chain, 1, depths.one, style, rng)?.into_expr()
        };
        HiddenExpr::Add(Box::new(half), Box::new(one))
    } else {
        half
    };
    debug_assert_eq!(eval(chain, &expr).unwrap(), h);
    Ok(expr)
}

/// One nesting pass: in every `F` call whose argument starts (leftmost leaf,
/// treating nested `F` calls as opaque) with a literal, that literal is
/// replaced via [`nest_literal`]. `next` supplies depths and an RNG per
/// rewritten call, in textual order. Returns the new tree and the number of
/// calls rewritten; a tree containing no `F` call comes back unchanged with
/// a count of zero.
pub fn deepen<F>(
    chain: &ModulusChain,
    expr: &HiddenExpr,
    style: LiftStyle,
    next: &mut F,
) -> Result<(HiddenExpr, usize)>
where
    F: FnMut() -> (NestDepths, StdRng),
{
    let mut rewritten = 0usize;
    let out = deepen_node(chain, expr, style, next, &mut rewritten)?;
    Ok((out, rewritten))
}

fn deepen_node<F>(
    chain: &ModulusChain,
    expr: &HiddenExpr,
    style: LiftStyle,
    next: &mut F,
    rewritten: &mut usize,
) -> Result<HiddenExpr>
where
    F: FnMut() -> (NestDepths, StdRng),
{
    Ok(match expr {
        HiddenExpr::Lit(n) => HiddenExpr::Lit(*n),
        HiddenExpr::Add(l, r) => HiddenExpr::Add(
            Box::new(deepen_node(chain, l, style, next, rewritten)?),
            Box::new(deepen_node(chain, r, style, next, rewritten)?),
        ),
        HiddenExpr::Mul(l, r) => HiddenExpr::Mul(
            Box::new(deepen_node(chain, l, style, next, rewritten)?),
            Box::new(deepen_node(chain, r, style, next, rewritten)?),
        ),
        HiddenExpr::Mod(l, r) => HiddenExpr::Mod(
            Box::new(deepen_node(chain, l, style, next, rewritten)?),
            Box::new(deepen_node(chain, r, style, next, rewritten)?),
        ),
        HiddenExpr::FCall { arg, depth } => {
            let new_arg = rewrite_spine(chain, arg, style, next, rewritten)?;
            HiddenExpr::FCall { arg: Box::new(new_arg), depth: *depth }
        }
    })
}

/// Walks the left spine of an `F` argument. The leftmost literal gets hidden
/// (consuming one rewrite event before anything to its right); every subtree
/// off the spine is processed by `deepen_node` so inner calls still nest.
fn rewrite_spine<F>(
    chain: &ModulusChain,
    expr: &HiddenExpr,
    style: LiftStyle,
    next: &mut F,
    rewritten: &mut usize,
) -> Result<HiddenExpr>
where
    F: FnMut() -> (NestDepths, StdRng),
{
    Ok(match expr {
        HiddenExpr::Lit(h) => {
            let (depths, mut rng) = next();
            *rewritten += 1;
            nest_literal(chain, *h, depths, style, &mut rng)?
        }
        HiddenExpr::Add(l, r) => HiddenExpr::Add(
            Box::new(rewrite_spine(chain, l, style, next, rewritten)?),
            Box::new(deepen_node(chain, r, style, next, rewritten)?),
        ),
        HiddenExpr::Mul(l, r) => HiddenExpr::Mul(
            Box::new(rewrite_spine(chain, l, style, next, rewritten)?),
            Box::new(deepen_node(chain, r, style, next, rewritten)?),
        ),
        HiddenExpr::Mod(l, r) => HiddenExpr::Mod(
            Box::new(rewrite_spine(chain, l, style, next, rewritten)?),
            Box::new(deepen_node(chain, r, style, next, rewritten)?),
        ),
        // An F call heading the spine is opaque: the enclosing call has no
        // literal to hide, but the inner call nests on its own.
        HiddenExpr::FCall { .. } => deepen_node(chain, expr, style, next, rewritten)?,
    })
}

/// Evaluates with Java `int` semantics: checked 32-bit ops, non-negative
/// domain, remainder toward zero.
pub fn eval(chain: &ModulusChain, expr: &HiddenExpr) -> Result<i32> {
    match expr {
        HiddenExpr::Lit(n) => {
            if *n < 0 {
                return Err(Error::ValueOutOfRange { value: *n as i64, what: "negative literal in expression" });
            }
            Ok(*n)
        }
        HiddenExpr::Add(l, r) => eval(chain, l)?
            .checked_add(eval(chain, r)?)
            .ok_or(Error::Overflow { what: "addition" }),
        HiddenExpr::Mul(l, r) => eval(chain, l)?
            .checked_mul(eval(chain, r)?)
            .ok_or(Error::Overflow { what: "multiplication" }),
        HiddenExpr::Mod(l, r) => {
            let rv = eval(chain, r)?;
            if rv == 0 {
                return Err(Error::RemainderByZero);
            }
            Ok(eval(chain, l)? % rv)
        }
        HiddenExpr::FCall { arg, depth } => chain.reduce(eval(chain, arg)?, *depth),
    }
}

/// Number of `F` calls in the tree.
pub fn fcall_count(expr: &HiddenExpr) -> usize {
    match expr {
        HiddenExpr::Lit(_) => 0,
        HiddenExpr::Add(l, r) | HiddenExpr::Mul(l, r) | HiddenExpr::Mod(l, r) => {
            fcall_count(l) + fcall_count(r)
        }
        HiddenExpr::FCall { arg, .. } => 1 + fcall_count(arg),
    }
}

// Precedence tiers for rendering and parsing: additive below multiplicative,
// matching Java; `*` and `%` share a tier and associate left.
fn precedence(expr: &HiddenExpr) -> u8 {
    match expr {
        HiddenExpr::Add(..) => 1,
        HiddenExpr::Mul(..) | HiddenExpr::Mod(..) => 2,
        HiddenExpr::Lit(_) | HiddenExpr::FCall { .. } => 3,
    }
}

/// Renders to Java source with minimal interior parentheses; a binary root
/// is wrapped in one outer pair so the text can be spliced anywhere a
/// primary expression is expected.
pub fn render(expr: &HiddenExpr) -> String {
    let mut out = String::new();
    let body = {
        write_expr(expr, &mut out);
        out
    };
    if matches!(expr, HiddenExpr::Lit(_) | HiddenExpr::FCall { .. }) {
        body
    } else {
        format!("({body})")
    }
}

fn write_expr(expr: &HiddenExpr, out: &mut String) {
    match expr {
        HiddenExpr::Lit(n) => out.push_str(&n.to_string()),
        HiddenExpr::FCall { arg, depth } => {
            out.push_str("F(");
            write_expr(arg, out);
            out.push(',');
            out.push_str(&depth.to_string());
            out.push(')');
        }
        HiddenExpr::Add(l, r) => write_binary(l, '+', r, 1, out),
        HiddenExpr::Mul(l, r) => write_binary(l, '*', r, 2, out),
        HiddenExpr::Mod(l, r) => write_binary(l, '%', r, 2, out),
    }
}

fn write_binary(l: &HiddenExpr, op: char, r: &HiddenExpr, prec: u8, out: &mut String) {
    let left_parens = precedence(l) < prec;
    let right_parens = precedence(r) <= prec;
    if left_parens {
        out.push('(');
    }
    write_expr(l, out);
    if left_parens {
        out.push(')');
    }
    out.push(op);
    if right_parens {
        out.push('(');
    }
    write_expr(r, out);
    if right_parens {
        out.push(')');
    }
}

/// Parses rendered expression text back into a tree. Accepts exactly the
/// grammar the renderer emits (plus optional whitespace): `+`, `*`, `%`,
/// decimal literals, parentheses, and `F(expr,depth)` calls.
pub fn parse(text: &str) -> Result<HiddenExpr> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0 };
    let expr = p.parse_add()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.error("trailing characters after expression"));
    }
    Ok(expr)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            path: String::new(),
            line: 1,
            col: self.pos as u32 + 1,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", b as char)))
        }
    }

    fn parse_add(&mut self) -> Result<HiddenExpr> {
        let mut lhs = self.parse_mul()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let rhs = self.parse_mul()?;
            lhs = HiddenExpr::Add(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_mul(&mut self) -> Result<HiddenExpr> {
        let mut lhs = self.parse_primary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.parse_primary()?;
                    lhs = HiddenExpr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(b'%') => {
                    self.pos += 1;
                    let rhs = self.parse_primary()?;
                    lhs = HiddenExpr::Mod(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_primary(&mut self) -> Result<HiddenExpr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_add()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'F') => {
                self.pos += 1;
                self.expect(b'(')?;
                let arg = self.parse_add()?;
                self.expect(b',')?;
                let depth = self.parse_number()?;
                if depth < 1 {
                    return Err(self.error("F depth must be at least 1"));
                }
                self.expect(b')')?;
                Ok(HiddenExpr::FCall { arg: Box::new(arg), depth: depth as u32 })
            }
            Some(b) if b.is_ascii_digit() => {
                let n = self.parse_number()?;
                if n > i32::MAX as i64 {
                    return Err(self.error("literal exceeds 32-bit range"));
                }
                Ok(HiddenExpr::Lit(n as i32))
            }
            Some(b) => Err(self.error(&format!("unexpected character '{}'", b as char))),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn parse_number(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<i64>().ok())
            .ok_or_else(|| self.error("number out of range"))
    }
}

#[cfg(test)]
mod tests {
    //! Golden synthesis values cross-checked by hand against the lifting
    //! definition, an interpreter oracle for rendered text, and round-trip
    //! properties over generated trees.

    use super::*;
    use crate::moduli::{ChainMode, ModulusChain};
    use rand::SeedableRng;

    fn chain13() -> ModulusChain {
        ModulusChain::build(13, ChainMode::Doubled).unwrap()
    }

    fn rng(seed: u64) -> StdRng {
        StdRng::seed_from_u64(seed)
    }

    #[test]
    fn unit_lift_golden_values_for_two() {
        let chain = chain13();
        // (B, modulus) for v=2 at each depth used by the leapyears goldens
        let expected = [
            (2, (41, 23)),
            (5, (374, 191)),
            (6, (757, 383)),
            (7, (1524, 767)),
            (8, (3059, 1535)),
            (10, (12273, 6143)),
            (12, (49135, 24575)),
        ];
        for (k, (b, m)) in expected {
            let arg = synthesize_arg(&chain, 2, k, LiftStyle::Unit, &mut rng(0)).unwrap();
            assert_eq!((arg.b, arg.modulus), (b, m), "k={k}");
            assert_eq!(chain.reduce(arg.b % arg.modulus, k).unwrap(), 2);
        }
    }

    #[test]
    fn unit_lift_golden_value_for_one() {
        let chain = chain13();
        let arg = synthesize_arg(&chain, 1, 2, LiftStyle::Unit, &mut rng(0)).unwrap();
        assert_eq!((arg.b, arg.modulus), (40, 23)); // 1 -> 6 -> 17, +23
    }

    #[test]
    fn zero_lift_with_all_zero_draws_renders_m_mod_m() {
        let chain = chain13();
        // Random draws eventually pick t = (0,0,0), u = 1 for v = 0 at k = 3,
        // which renders as the legal if odd-looking "47%47".
        let found = (0..5000u64).find_map(|seed| {
            let arg = synthesize_arg(&chain, 0, 3, LiftStyle::Random, &mut rng(seed)).unwrap();
            assert_eq!(chain.reduce(arg.b % arg.modulus, 3).unwrap(), 0);
            (arg.b == 47 && arg.modulus == 47).then_some(arg)
        });
        let arg = found.expect("no seed produced the all-zero lift");
        assert_eq!(render(&arg.into_expr()), "F(47%47,3)");
    }

    #[test]
    fn synthesis_is_deterministic_per_seed() {
        let chain = chain13();
        for style in [LiftStyle::Unit, LiftStyle::Random] {
            let a = synthesize_arg(&chain, 2, 9, style, &mut rng(42)).unwrap();
            let b = synthesize_arg(&chain, 2, 9, style, &mut rng(42)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn random_lifts_hit_every_target_value() {
        let chain = chain13();
        for v in 0..5 {
            for k in 1..=12 {
                for seed in 0..50 {
                    let arg = synthesize_arg(&chain, v, k, LiftStyle::Random, &mut rng(seed)).unwrap();
                    assert_eq!(chain.reduce(arg.b % arg.modulus, k).unwrap(), v, "v={v} k={k} seed={seed}");
                    // non-degenerate: B mod M must differ from B
                    assert!(arg.b >= arg.modulus);
                }
            }
        }
    }

    #[test]
    fn prime_sum_lifts_respect_tight_gaps() {
        let chain = ModulusChain::build(12, ChainMode::PrimeSum).unwrap();
        for v in 0..5 {
            for k in 1..=11 {
                for (style, seed) in [(LiftStyle::Unit, 0), (LiftStyle::Random, 7)] {
                    let arg = synthesize_arg(&chain, v, k, style, &mut rng(seed)).unwrap();
                    assert_eq!(chain.reduce(arg.b % arg.modulus, k).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn synthesis_rejects_bad_targets_and_depths() {
        let chain = chain13();
        assert!(synthesize_arg(&chain, 5, 2, LiftStyle::Unit, &mut rng(0)).is_err());
        assert!(synthesize_arg(&chain, -1, 2, LiftStyle::Unit, &mut rng(0)).is_err());
        assert!(synthesize_arg(&chain, 2, 0, LiftStyle::Unit, &mut rng(0)).is_err());
        assert!(synthesize_arg(&chain, 2, 13, LiftStyle::Unit, &mut rng(0)).is_err());
    }

    #[test]
    fn hide_constant_golden_renderings() {
        let chain = chain13();
        let cases = [
            (2006, 10, "(1003*F(12273%6143,10))"),
            (1990, 6, "(995*F(757%383,6))"),
            (4, 12, "(2*F(49135%24575,12))"),
            (0, 5, "(0*F(374%191,5))"),
        ];
        for (c, k, text) in cases {
            let expr = hide_constant(&chain, c, k, LiftStyle::Unit, &mut rng(0)).unwrap();
            assert_eq!(render(&expr), text);
            assert_eq!(eval(&chain, &expr).unwrap(), c);
        }
    }

    #[test]
    fn hide_constant_odd_case_adds_parity_call() {
        let chain = chain13();
        let expr = hide_constant(&chain, 7, 2, LiftStyle::Unit, &mut rng(0)).unwrap();
        assert_eq!(render(&expr), "(3*F(41%23,2)+F(40%23,2))");
        assert_eq!(eval(&chain, &expr).unwrap(), 7);
        assert_eq!(fcall_count(&expr), 2);
    }

    #[test]
    fn hide_constant_covers_extremes() {
        let chain = chain13();
        for c in [0, 1, 2, 3, i32::MAX - 1, i32::MAX] {
            for style in [LiftStyle::Unit, LiftStyle::Random] {
                let expr = hide_constant(&chain, c, 4, style, &mut rng(9)).unwrap();
                assert_eq!(eval(&chain, &expr).unwrap(), c, "c={c}");
                assert!(fcall_count(&expr) >= 1);
            }
        }
        assert!(hide_constant(&chain, -1, 4, LiftStyle::Unit, &mut rng(0)).is_err());
    }

    #[test]
    fn nesting_matches_golden_second_pass() {
        let chain = chain13();
        // first-pass tree for 2006 at depth 10, then one nesting pass with
        // the even-half call at depth 8
        let first = hide_constant(&chain, 2006, 10, LiftStyle::Unit, &mut rng(0)).unwrap();
        let mut supply = vec![(NestDepths { two: 8, one: 2 }, rng(0))].into_iter();
        let (second, n) = deepen(&chain, &first, LiftStyle::Unit, &mut || supply.next().unwrap()).unwrap();
        assert_eq!(n, 1);
        assert_eq!(render(&second), "(1003*F((F(3059%1535,8)*6136+F(33%21,2))%6143,10))");
        assert_eq!(eval(&chain, &second).unwrap(), 2006);
    }

    #[test]
    fn nesting_even_literal_renders_without_extra_parens() {
        let chain = chain13();
        let first = hide_constant(&chain, 0, 5, LiftStyle::Unit, &mut rng(0)).unwrap();
        let mut supply = vec![(NestDepths { two: 7, one: 2 }, rng(0))].into_iter();
        let (second, _) = deepen(&chain, &first, LiftStyle::Unit, &mut || supply.next().unwrap()).unwrap();
        assert_eq!(render(&second), "(0*F(F(1524%767,7)*187%191,5))");
        assert_eq!(eval(&chain, &second).unwrap(), 0);
    }

    #[test]
    fn deepen_preserves_value_and_grows_call_count() {
        let chain = chain13();
        let mut r = rng(1234);
        for c in [0, 1, 5, 99, 2006, 123_456_789] {
            let mut expr = hide_constant(&chain, c, 6, LiftStyle::Random, &mut r).unwrap();
            let mut calls = fcall_count(&expr);
            for round in 0..3 {
                let mut event = 0u64;
                let (next_expr, n) = deepen(&chain, &expr, LiftStyle::Random, &mut || {
                    event += 1;
                    (NestDepths { two: 2 + (event % 10) as u32, one: 2 }, rng(900 + event))
                })
                .unwrap();
                assert!(n >= 1, "round {round} rewrote nothing");
                let next_calls = fcall_count(&next_expr);
                assert!(next_calls > calls);
                assert_eq!(eval(&chain, &next_expr).unwrap(), c);
                expr = next_expr;
                calls = next_calls;
            }
        }
    }

    #[test]
    fn deepen_on_call_free_tree_is_noop() {
        let chain = chain13();
        let expr = HiddenExpr::Lit(42);
        let (out, n) = deepen(&chain, &expr, LiftStyle::Unit, &mut || {
            (NestDepths { two: 2, one: 2 }, rng(0))
        })
        .unwrap();
        assert_eq!(n, 0);
        assert_eq!(out, expr);
    }

    #[test]
    fn render_parse_round_trip_is_exact() {
        let chain = chain13();
        let mut r = rng(77);
        for c in [0, 1, 2, 17, 1990, 2006, 2_147_483_647] {
            for style in [LiftStyle::Unit, LiftStyle::Random] {
                let expr = hide_constant(&chain, c, 5, style, &mut r).unwrap();
                let text = render(&expr);
                let back = parse(&text).unwrap();
                assert_eq!(back, expr);
                assert_eq!(render(&back), text);
                assert_eq!(eval(&chain, &back).unwrap(), c);
            }
        }
    }

    #[test]
    fn parse_accepts_whitespace_and_rejects_junk() {
        assert!(parse(" ( 3 * F ( 41 % 23 , 2 ) ) ").is_ok());
        for bad in ["", "F(", "F(41%23)", "1+", "(1", "1)", "F(2,0)", "x+1", "1 2", "99999999999"] {
            assert!(parse(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn eval_flags_overflow_and_zero_remainder() {
        let chain = chain13();
        let big = HiddenExpr::Mul(
            Box::new(HiddenExpr::Lit(i32::MAX)),
            Box::new(HiddenExpr::Lit(2)),
        );
        assert!(matches!(eval(&chain, &big), Err(Error::Overflow { .. })));
        let div0 = HiddenExpr::Mod(Box::new(HiddenExpr::Lit(5)), Box::new(HiddenExpr::Lit(0)));
        assert!(matches!(eval(&chain, &div0), Err(Error::RemainderByZero)));
    }
}
