//! Ontologies used throughout the tests, the documentation and the CLI
//! acceptance suite.

/// `{a}` is implicitly but not explicitly definable from `{r, A}`.
pub const O1: &str = "\
{a} sub exists r {a}
(A and not {a}) sub forall r (not {a} -> not A)
(not A and not {a}) sub forall r (not {a} -> A)
";

/// `exists r top` is implicitly but not explicitly definable from `{r1, r2}`.
pub const O2: &str = "\
role r sub r1
role r sub r2
(not exists r top and exists r1 A) sub forall r2 not A
(not exists r top and exists r1 not A) sub forall r2 A
";

/// Detectives and spies; `{d2}` is definable from `{Spy, suspects, deceives}`.
pub const SPY: &str = "\
exists suspects top sub Detective
Detective sub forall deceives bot
Detective sub not Spy
Detective sub ({d1} or {d2} or {d3})
({d1} or {d2} or {d3}) sub Detective
{s1} sub not Spy
{s4} sub Spy
{s1} sub exists deceives {s2}
{s2} sub exists deceives {s3}
{s3} sub exists deceives {s4}
{s4} sub forall deceives- Spy
{d1} sub forall suspects {s1}
{d3} sub forall suspects {s4}
{d2} sub (exists suspects {s2} and exists suspects {s3})
";

/// The printed definition of `{d2}` under [`SPY`].
pub const SPY_DEFINITION: &str = "exists suspects (Spy and exists deceives- not Spy)";

/// `A` is definable with inverse roles or `u`, but not in ALCO.
pub const BETH: &str = "\
A sub {a}
({b} and B) sub exists r ({a} and A)
({b} and not B) sub exists r ({a} and not A)
";
