"""Identity verification engine.

Every algebraic identity the package claims is registered here as a
case.  A case expands into instances (one per color tuple, site pair,
level choice and so on), each holding a left and a right expression
tree over cached model operators.  Each instance is then judged twice:

* symbolically: the trees are collapsed with the canonical operator
  arithmetic and the residual must vanish (or, for leading-order
  cases, must drop below a stated derivative degree), and
* by action: the same trees are applied compositionally to a basis of
  monomial-amplitude states, never forming an operator product, and
  the outcome must agree with the symbolic verdict.

The second pass is the double-entry bookkeeping: it exercises only
``apply_to`` on the leaf operators plus state linear algebra, so a bug
in the product, Leibniz or merge code cannot cancel itself.  The two
verdicts are compared on a seeded sample of instances per case and any
disagreement is a hard failure of the whole run.

Why low-degree probe states suffice: write a residual in normal form
as sum_k f_k(x) w_k d^k.  Pick a term whose derivative multi-index k*
has minimal total degree.  Applied to the monomial x^{k*}, every term
with |k| > |k*| kills the monomial, terms with |k| = |k*| but k != k*
kill it too (some exponent exceeds the monomial's), so only the k*
terms survive, each contributing k*! f_{k*,w} times the word action.
Full-support words send a basis state to pairwise distinct states, so
all surviving coefficients must vanish identically.  Hence a nonzero
normal form of derivative degree d cannot annihilate every monomial
amplitude of degree <= d; probing up to one degree beyond the larger
side is therefore complete.  ``_probe_degree`` asserts this bound.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .errors import CapExceededError
from .models import RATIONAL, TRIG, ModelWorkspace
from .operators import OperatorSum, term_budget

DEFAULT_SEED = 20257
DEFAULT_CONTEXTS = ((2, 0, 2), (1, 1, 2), (2, 1, 2), (1, 1, 3))
SEXTUPLE_SAMPLE = 60
ORACLE_INSTANCES = 3
PROBE_CAP = 360

VERDICT_PASS = "pass"
VERDICT_FAIL = "fail"
VERDICT_EMPTY = "empty-quantifier"
VERDICT_TRUNCATED = "truncated"


# -- expression trees ---------------------------------------------------------


class Expr:
    """Tiny two-way expression node: collapses to an operator, or acts
    on a state compositionally without ever multiplying operators."""

    __slots__ = ("_op",)

    def __init__(self):
        self._op = None

    def operator(self) -> OperatorSum:
        if self._op is None:
            self._op = self._build()
        return self._op

    def _build(self):
        raise NotImplementedError

    def par(self) -> int:
        """Word parity, read off the tree so the action path never has
        to collapse a subtree into an operator product."""
        raise NotImplementedError

    def apply(self, state):
        raise NotImplementedError


class Leaf(Expr):
    __slots__ = ()

    def __init__(self, op: OperatorSum):
        super().__init__()
        self._op = op

    def _build(self):
        return self._op

    def par(self):
        return self._op.parity()

    def apply(self, state):
        return self._op.apply_to(state)


class Mul(Expr):
    __slots__ = ("a", "b")

    def __init__(self, a: Expr, b: Expr):
        super().__init__()
        self.a = a
        self.b = b

    def _build(self):
        return self.a.operator().mul(self.b.operator())

    def par(self):
        return (self.a.par() + self.b.par()) % 2

    def apply(self, state):
        return self.a.apply(self.b.apply(state))


class Bracket(Expr):
    """Graded commutator node; the sign is read off the operand parities."""

    __slots__ = ("a", "b")

    def __init__(self, a: Expr, b: Expr):
        super().__init__()
        self.a = a
        self.b = b

    def _sign(self) -> int:
        # coefficient of the reversed product: -(-1)^{p(A) p(B)}
        return 1 if self.a.par() and self.b.par() else -1

    def par(self):
        return (self.a.par() + self.b.par()) % 2

    def _build(self):
        return self.a.operator().bracket(self.b.operator())

    def top(self, min_deriv: int) -> OperatorSum:
        """Terms of the bracket at derivative degree >= min_deriv, computed
        with truncated products (sound: Leibniz only lowers the degree)."""
        a, b = self.a.operator(), self.b.operator()
        ab = a.mul(b, min_deriv=min_deriv)
        ba = b.mul(a, min_deriv=min_deriv)
        out = ab + ba if self._sign() > 0 else ab - ba
        return out.filtered(min_deriv)

    def apply(self, state):
        left = self.a.apply(self.b.apply(state))
        right = self.b.apply(self.a.apply(state))
        return _state_add(left, right, self._sign())


class Add(Expr):
    __slots__ = ("items",)

    def __init__(self, *items: Expr):
        super().__init__()
        self.items = items

    def _build(self):
        op = None
        for it in self.items:
            op = it.operator() if op is None else op + it.operator()
        return op

    def par(self):
        # summands of a well-formed identity share one word parity
        return self.items[0].par()

    def apply(self, state):
        out = {}
        for it in self.items:
            out = _state_add(out, it.apply(state), 1)
        return out


class Scale(Expr):
    __slots__ = ("inner", "coeff")

    def __init__(self, inner: Expr, coeff):
        super().__init__()
        self.inner = inner
        self.coeff = coeff

    def _build(self):
        return self.inner.operator().scale(self.coeff)

    def par(self):
        return self.inner.par()

    def apply(self, state):
        c = self.coeff
        out = {}
        for st, amp in self.inner.apply(state).items():
            v = amp * c
            if v:
                out[st] = v
        return out


def _state_add(s1, s2, sign: int):
    out = dict(s1)
    for st, amp in s2.items():
        cur = out.get(st)
        v = (cur + amp if sign > 0 else cur - amp) if cur is not None \
            else (amp if sign > 0 else -amp)
        if v:
            out[st] = v
        elif cur is not None:
            del out[st]
    return out


def _state_is_zero(state) -> bool:
    return all(not amp for amp in state.values())


def _state_substituted(state, subs):
    if not subs:
        return state
    out = {}
    for st, amp in state.items():
        for slot, val in subs:
            amp = amp.substitute(slot, val)
        if amp:
            out[st] = amp
    return out


# -- instances and cases ------------------------------------------------------


@dataclass
class Instance:
    label: str
    lhs: Expr
    rhs: Expr
    dexp: Optional[int] = None   # None: exact; else leading-order degree
    param_probe: bool = False    # re-check residual under x,y substitutions


@dataclass(frozen=True)
class CaseSpec:
    id: str
    suite: str
    title: str
    min_sites: int
    instances: Callable[[ModelWorkspace, "RunConfig"], Iterable[Instance]]


@dataclass
class RunConfig:
    contexts: tuple = DEFAULT_CONTEXTS
    cases: Optional[tuple] = None          # None: the full catalog
    lam: Optional[Fraction] = None         # None: keep the coupling symbolic
    seed: int = DEFAULT_SEED
    oracle_degree: Optional[int] = None
    max_spin: int = 3
    max_degree: int = 2
    term_budget: Optional[int] = None
    workers: int = 1
    dump_residual: bool = False


@dataclass
class IdentityReport:
    id: str
    suite: str
    n: int
    m: int
    N: int
    verdict: str
    oracle_agrees: bool
    instances: int
    failed: int
    residual_term_count: int
    millis: int
    note: str = ""
    residuals: list = dc_field(default_factory=list)

    def as_dict(self):
        out = {
            "id": self.id,
            "suite": self.suite,
            "n": self.n,
            "m": self.m,
            "N": self.N,
            "verdict": self.verdict,
            "oracle_agrees": self.oracle_agrees,
            "instances": self.instances,
            "failed": self.failed,
            "residual_term_count": self.residual_term_count,
            "millis": self.millis,
        }
        if self.note:
            out["note"] = self.note
        if self.residuals:
            out["residuals"] = self.residuals
        return out


# -- quantifier helpers -------------------------------------------------------


def _pairs(ws):
    return itertools.product(ws.colors(), repeat=2)


def _quads(ws):
    return itertools.product(ws.colors(), repeat=4)


def _sextuples(ws, cfg, case_id):
    d = ws.dim
    total = d ** 6
    if total <= 2 ** 6:
        for tup in itertools.product(ws.colors(), repeat=6):
            yield tup
        return
    rng = random.Random(f"{cfg.seed}|{case_id}|{ws.n},{ws.m},{ws.N}")
    for idx in sorted(rng.sample(range(total), SEXTUPLE_SAMPLE)):
        tup = []
        for _ in range(6):
            tup.append(idx % d + 1)
            idx //= d
        yield tuple(tup)


def _site_pairs(ws):
    return itertools.permutations(range(1, ws.N + 1), 2)


def _eta(ws, a, b, c, d):
    return ((ws.parity(a) + ws.parity(b)) * (ws.parity(c) + ws.parity(d))) % 2


def _zero(ws) -> Expr:
    return Leaf(ws.ctx.zero())


def _loop_rhs(ws, gen, level, a, b, c, d) -> Expr:
    """delta_bc G^{ad} - (-1)^eta delta_da G^{cb} at the given level."""
    items = []
    if b == c:
        items.append(Leaf(gen(level, a, d)))
    if d == a:
        sign = -1 if _eta(ws, a, b, c, d) == 0 else 1
        items.append(Scale(Leaf(gen(level, c, b)), sign))
    return Add(*items) if items else _zero(ws)


def _serre_rhs(ws, tensor, a, b, c, d, e, f) -> Expr:
    """The six-delta combination shared by the mixed Serre identities."""
    p = ws.parity
    eta = ((p(a) + p(b)) * (p(c) + p(d))) % 2
    delta = ((p(c) + p(d)) * (p(e) + p(f))) % 2
    gamma = ((p(a) + p(b)) * (p(c) + p(d) + p(e) + p(f))) % 2
    items = []
    if b == c:
        items.append(Leaf(tensor(a, d, e, f)))
    if d == e:
        items.append(Scale(Leaf(tensor(a, b, c, f)), -1))
    if c == f:
        items.append(Scale(Leaf(tensor(a, b, e, d)), -1 if delta else 1))
    if b == e:
        items.append(Scale(Leaf(tensor(c, d, a, f)), -1 if eta else 1))
    if a == d:
        items.append(Scale(Leaf(tensor(c, b, e, f)), 1 if eta else -1))
    if a == f:
        items.append(Scale(Leaf(tensor(c, d, e, b)), 1 if gamma else -1))
    if not items:
        return _zero(ws)
    return Scale(Add(*items), ws.ctx.field.lam)


def _nested_serre_lhs(base0, base1):
    """[A0^{ab}, [A1^{cd}, A1^{ef}}} - [A1^{ab}, [A0^{cd}, A1^{ef}}}."""

    def make(ab, cd, ef):
        first = Bracket(base0(*ab), Bracket(base1(*cd), base1(*ef)))
        second = Bracket(base1(*ab), Bracket(base0(*cd), base1(*ef)))
        return Add(first, Scale(second, -1))

    return make


# -- the case catalog ---------------------------------------------------------


def _case_unit_bracket(ws, cfg):
    for i in range(1, ws.N + 1):
        for a, b, c, d in _quads(ws):
            lhs = Bracket(Leaf(ws.unit(i, a, b)), Leaf(ws.unit(i, c, d)))
            rhs = _loop_rhs(ws, lambda _lv, x, y: ws.unit(i, x, y), 0, a, b, c, d)
            yield Instance(f"i={i} abcd={a}{b}{c}{d}", lhs, rhs)


def _case_exchange_rules(ws, cfg):
    ident = Leaf(ws.ctx.identity())
    for i, j in itertools.combinations(range(1, ws.N + 1), 2):
        pij = Leaf(ws.ctx.swap(i, j))
        yield Instance(f"sym {i}{j}", pij, Leaf(ws.ctx.swap(j, i)))
        yield Instance(f"inv {i}{j}", Mul(pij, pij), ident)
    for i, j, k in itertools.permutations(range(1, ws.N + 1), 3):
        pij = Leaf(ws.ctx.swap(i, j))
        pjk = Leaf(ws.ctx.swap(j, k))
        pik = Leaf(ws.ctx.swap(i, k))
        yield Instance(f"braid {i}{j}{k}", Mul(pij, pjk), Mul(pik, pij))


def _case_supercommutation(ws, cfg):
    for i, j in _site_pairs(ws):
        if i > j:
            continue
        for a, b, c, d in _quads(ws):
            ei = Leaf(ws.unit(i, a, b))
            ej = Leaf(ws.unit(j, c, d))
            sign = -1 if _eta(ws, a, b, c, d) else 1
            lhs = Add(Mul(ei, ej), Scale(Mul(ej, ei), -sign))
            yield Instance(f"ij={i}{j} abcd={a}{b}{c}{d}", lhs, _zero(ws))


def _case_exchange_conjugation(ws, cfg):
    for i, j in _site_pairs(ws):
        p = Leaf(ws.ctx.swap(i, j))
        for a, b in _pairs(ws):
            lhs = Mul(Mul(p, Leaf(ws.unit(i, a, b))), p)
            yield Instance(f"ij={i}{j} ab={a}{b}", lhs, Leaf(ws.unit(j, a, b)))


def _case_lax_evolution(ws, cfg):
    for kind in (RATIONAL, TRIG):
        h = Leaf(ws.hamiltonian(kind))
        L = ws.lax(kind, "L")
        M = ws.lax(kind, "M")
        for i in range(ws.N):
            for j in range(ws.N):
                lhs = Bracket(h, Leaf(L[i][j]))
                items = []
                for k in range(ws.N):
                    items.append(Mul(Leaf(L[i][k]), Leaf(M[k][j])))
                    items.append(Scale(Mul(Leaf(M[i][k]), Leaf(L[k][j])), -1))
                yield Instance(f"{kind} entry={i + 1}{j + 1}", lhs, Add(*items))


def _case_partner_sum_rule(ws, cfg):
    for kind in (RATIONAL, TRIG):
        M = ws.lax(kind, "M")
        for i in range(ws.N):
            row = Add(*[Leaf(M[i][k]) for k in range(ws.N)])
            col = Add(*[Leaf(M[k][i]) for k in range(ws.N)])
            yield Instance(f"{kind} row={i + 1}", row, _zero(ws))
            yield Instance(f"{kind} col={i + 1}", col, _zero(ws))


def _case_trig_conservation(ws, cfg):
    h = Leaf(ws.hamiltonian(TRIG))
    for level in (0, 1):
        for a, b in _pairs(ws):
            lhs = Bracket(Leaf(ws.yangian_T(level, a, b)), h)
            yield Instance(f"level={level} ab={a}{b}", lhs, _zero(ws))


def _case_rational_conservation(ws, cfg):
    h = Leaf(ws.hamiltonian(RATIONAL))
    for level in (0, 1, 2):
        for a, b in _pairs(ws):
            lhs = Bracket(Leaf(ws.loop_J(level, a, b)), h)
            yield Instance(f"level={level} ab={a}{b}", lhs, _zero(ws))


def _yangian_defining(graded_unit: bool):
    def gen(ws, cfg):
        f = ws.ctx.field

        def T(level, a, b):
            if level < 0:
                return ws.t_minus1(a, b, graded=graded_unit)
            return ws.yangian_T(level, a, b)

        p = ws.parity
        for s in (-1, 0, 1):
            for q in (-1, 0, 1):
                for a, b, c, d in _quads(ws):
                    lhs = Add(
                        Bracket(Leaf(T(s, a, b)), Leaf(T(q + 1, c, d))),
                        Scale(Bracket(Leaf(T(s + 1, a, b)), Leaf(T(q, c, d))), -1),
                    )
                    alpha = (p(c) * p(a) + p(c) * p(b) + p(b) * p(a)) % 2
                    inner = Add(
                        Mul(Leaf(T(q, c, b)), Leaf(T(s, a, d))),
                        Scale(Mul(Leaf(T(s, c, b)), Leaf(T(q, a, d))), -1),
                    )
                    rhs = Scale(inner, f.lam * (-1 if alpha else 1))
                    yield Instance(f"s={s} p={q} abcd={a}{b}{c}{d}", lhs, rhs)

    return gen


def _tower_bracket_case(gen_name, s_level, p_level, out_level):
    def gen(ws, cfg):
        G = getattr(ws, gen_name)
        for a, b, c, d in _quads(ws):
            lhs = Bracket(Leaf(G(s_level, a, b)), Leaf(G(p_level, c, d)))
            rhs = _loop_rhs(ws, G, out_level, a, b, c, d)
            yield Instance(f"abcd={a}{b}{c}{d}", lhs, rhs)

    return gen


def _case_level_one_bracket(ws, cfg):
    f = ws.ctx.field
    p = ws.parity
    for a, b, c, d in _quads(ws):
        lhs = Bracket(Leaf(ws.yangian_T(1, a, b)), Leaf(ws.yangian_T(1, c, d)))
        beta = (p(b) * p(c) + p(c) * p(d) + p(b) * p(d)) % 2
        defect = Add(
            Mul(Leaf(ws.yangian_T(0, a, d)), Leaf(ws.yangian_T(1, c, b))),
            Scale(Mul(Leaf(ws.yangian_T(1, a, d)), Leaf(ws.yangian_T(0, c, b))), -1),
        )
        rhs = Add(
            _loop_rhs(ws, ws.yangian_T, 2, a, b, c, d),
            Scale(defect, f.lam * (1 if beta else -1)),
        )
        yield Instance(f"abcd={a}{b}{c}{d}", lhs, rhs)


def _case_level_two_explicit(ws, cfg):
    for a, b in _pairs(ws):
        yield Instance(f"ab={a}{b}",
                       Leaf(ws.yangian_T(2, a, b)),
                       Leaf(ws.t2_explicit(a, b)))


def _case_yangian_serre(ws, cfg):
    make = _nested_serre_lhs(
        lambda a, b: Leaf(ws.yangian_T(0, a, b)),
        lambda a, b: Leaf(ws.yangian_T(1, a, b)),
    )
    for a, b, c, d, e, f in _sextuples(ws, cfg, "eq3.5"):
        lhs = make((a, b), (c, d), (e, f))
        rhs = _serre_rhs(ws, ws.tensor_O, a, b, c, d, e, f)
        yield Instance(f"abcdef={a}{b}{c}{d}{e}{f}", lhs, rhs)


def _plain_serre_case(gen_name, case_id):
    def gen(ws, cfg):
        G = getattr(ws, gen_name)
        make = _nested_serre_lhs(
            lambda a, b: Leaf(G(0, a, b)),
            lambda a, b: Leaf(G(1, a, b)),
        )
        for a, b, c, d, e, f in _sextuples(ws, cfg, case_id):
            lhs = make((a, b), (c, d), (e, f))
            yield Instance(f"abcdef={a}{b}{c}{d}{e}{f}", lhs, _zero(ws))

    return gen


def _tower_sum_case(gen_name):
    def gen(ws, cfg):
        G = getattr(ws, gen_name)
        for s in range(0, 4):
            for q in range(0, 4 - s):
                for a, b, c, d in _quads(ws):
                    lhs = Bracket(Leaf(G(s, a, b)), Leaf(G(q, c, d)))
                    rhs = _loop_rhs(ws, G, s + q, a, b, c, d)
                    yield Instance(f"s={s} p={q} abcd={a}{b}{c}{d}", lhs, rhs)

    return gen


def _unification_case(with_plain_bracket: bool):
    def gen(ws, cfg):
        f = ws.ctx.field
        for a, b, c, d in _quads(ws):
            parts = [
                Bracket(Leaf(ws.loop_J(1, a, b)), Leaf(ws.loop_K(1, c, d))),
                Bracket(Leaf(ws.loop_K(1, a, b)), Leaf(ws.loop_J(1, c, d))),
                Scale(Bracket(Leaf(ws.loop_J(0, a, b)),
                              Leaf(ws.j0_squared(c, d))), f.lam),
            ]
            if with_plain_bracket:
                parts.append(Scale(Bracket(Leaf(ws.loop_J(0, a, b)),
                                           Leaf(ws.loop_J(0, c, d))), -f.lam))
            rhs = Scale(_loop_rhs(ws, ws.yangian_T, 1, a, b, c, d), 2)
            yield Instance(f"abcd={a}{b}{c}{d}", Add(*parts), rhs)

    return gen


def _mixed_serre_case(gen_name, tensor_name, case_id):
    def gen(ws, cfg):
        G = getattr(ws, gen_name)
        tensor = getattr(ws, tensor_name)

        def shifted(a, b):
            return Add(Leaf(G(1, a, b)), Leaf(ws.yangian_T(1, a, b)))

        make = _nested_serre_lhs(
            lambda a, b: Leaf(ws.loop_J(0, a, b)), shifted)
        for a, b, c, d, e, f in _sextuples(ws, cfg, case_id):
            lhs = make((a, b), (c, d), (e, f))
            rhs = _serre_rhs(ws, tensor, a, b, c, d, e, f)
            yield Instance(f"abcdef={a}{b}{c}{d}{e}{f}", lhs, rhs)

    return gen


def _case_two_parameter_serre(ws, cfg):
    make = _nested_serre_lhs(
        lambda a, b: Leaf(ws.loop_J(0, a, b)),
        lambda a, b: Leaf(ws.q1_family(a, b)),
    )
    for a, b, c, d, e, f in _sextuples(ws, cfg, "eq3.27"):
        lhs = make((a, b), (c, d), (e, f))
        rhs = _serre_rhs(ws, ws.tensor_P, a, b, c, d, e, f)
        yield Instance(f"abcdef={a}{b}{c}{d}{e}{f}", lhs, rhs,
                       param_probe=True)


def _recursion_instances(ws, cfg, prev, closed, leading, tag):
    """One recursion step as an expression tree, plus its leading symbol."""
    x2 = Leaf(ws.x_squared())
    for s in range(1, cfg.max_spin + 1):
        for q in range(0, cfg.max_degree + 1):
            if s == 1:
                yield Instance(f"closed s=1 p={q}{tag}",
                               Leaf(prev(1, q)), Leaf(closed(1, q)))
                yield Instance(f"leading s=1 p={q}{tag}",
                               Leaf(prev(1, q).filtered(q)),
                               Leaf(leading(1, q)))
                continue
            step = Bracket(x2, Leaf(prev(s - 1, q + 2)))
            yield Instance(f"closed s={s} p={q}{tag}",
                           Scale(step, Fraction(1, 2 * (q + s))),
                           Leaf(closed(s, q)))
            yield Instance(f"leading s={s} p={q}{tag}", step,
                           Scale(Leaf(leading(s, q)), 2 * (q + s)),
                           dexp=q + s - 1)


def _case_spin_recursion_scalar(ws, cfg):
    yield from _recursion_instances(
        ws, cfg, ws.w_gen, ws.w_closed, ws.w_leading, "")


def _case_spin_recursion_color(ws, cfg):
    for a, b in _pairs(ws):
        yield from _recursion_instances(
            ws, cfg,
            lambda s, q: ws.q_gen(s, q, a, b),
            lambda s, q: ws.q_closed(s, q, a, b),
            lambda s, q: ws.q_leading(s, q, a, b),
            f" ab={a}{b}")


def _spin_pairs(cfg):
    top = min(cfg.max_spin, 2)
    for s in range(1, top + 1):
        for sp in range(1, top + 1):
            for p in range(0, cfg.max_degree + 1):
                for q in range(0, cfg.max_degree + 1):
                    yield s, sp, p, q


def _case_spin_bracket_scalar(ws, cfg):
    for s, sp, p, q in _spin_pairs(cfg):
        lhs = Bracket(Leaf(ws.w_gen(s, p)), Leaf(ws.w_gen(sp, q)))
        coeff = (s - 1) * q - (sp - 1) * p
        rhs = Scale(Leaf(ws.w_gen(s + sp - 2, p + q)), coeff) if coeff \
            else _zero(ws)
        dexp = (p + s - 1) + (q + sp - 1) - 1
        yield Instance(f"s={s} s'={sp} p={p} q={q}", lhs, rhs, dexp=dexp)


def _case_spin_bracket_mixed(ws, cfg):
    for s, sp, p, q in _spin_pairs(cfg):
        for a, b in _pairs(ws):
            lhs = Bracket(Leaf(ws.w_gen(s, p)), Leaf(ws.q_gen(sp, q, a, b)))
            coeff = (s - 1) * q - (sp - 1) * p
            rhs = Scale(Leaf(ws.q_gen(s + sp - 2, p + q, a, b)), coeff) \
                if coeff else _zero(ws)
            dexp = (p + s - 1) + (q + sp - 1) - 1
            yield Instance(f"s={s} s'={sp} p={p} q={q} ab={a}{b}",
                           lhs, rhs, dexp=dexp)


def _case_spin_bracket_color(ws, cfg):
    for s, sp, p, q in _spin_pairs(cfg):
        for a, b, c, d in _quads(ws):
            lhs = Bracket(Leaf(ws.q_gen(s, p, a, b)),
                          Leaf(ws.q_gen(sp, q, c, d)))
            rhs = _loop_rhs(
                ws, lambda lv, x, y: ws.q_gen(s + sp - 1, p + q, x, y),
                0, a, b, c, d)
            dexp = (p + s - 1) + (q + sp - 1)
            yield Instance(f"s={s} s'={sp} p={p} q={q} abcd={a}{b}{c}{d}",
                           lhs, rhs, dexp=dexp)


def _case_free_spin_algebra(ws, cfg):
    for s in range(1, cfg.max_spin + 1):
        for sp in range(1, cfg.max_spin + 1):
            for p in range(0, cfg.max_degree + 1):
                for q in range(0, cfg.max_degree + 1):
                    for a, b, c, d in _quads(ws):
                        yield _free_spin_instance(ws, s, sp, p, q, a, b, c, d)


def _free_spin_instance(ws, s, sp, p, q, a, b, c, d):
    lhs = Bracket(Leaf(ws.q_free(s, p, a, b)), Leaf(ws.q_free(sp, q, c, d)))
    items = []
    if b == c:
        deg = p + s - 1
        for k in range(0, min(deg, sp - 1) + 1):
            coeff = math.comb(deg, k) * math.perm(sp - 1, k)
            items.append(Scale(
                Leaf(ws.q_free(s + sp - 1 - k, p + q, a, d)), coeff))
    if d == a:
        deg = q + sp - 1
        sign = -1 if _eta(ws, a, b, c, d) == 0 else 1
        for k in range(0, min(deg, s - 1) + 1):
            coeff = sign * math.comb(deg, k) * math.perm(s - 1, k)
            items.append(Scale(
                Leaf(ws.q_free(s + sp - 1 - k, p + q, c, b)), coeff))
    rhs = Add(*items) if items else _zero(ws)
    return Instance(f"s={s} s'={sp} p={p} q={q} abcd={a}{b}{c}{d}", lhs, rhs)


CASES = {}


def _register(case: CaseSpec):
    CASES[case.id] = case


for _spec in [
    CaseSpec("eq2.7", "structural",
             "single-site color unit bracket", 1, _case_unit_bracket),
    CaseSpec("eq2.10", "structural",
             "exchange operators: symmetry, involution, braid", 2,
             _case_exchange_rules),
    CaseSpec("supercommutation", "structural",
             "distinct-site units commute up to the grading sign", 2,
             _case_supercommutation),
    CaseSpec("p-conjugation", "structural",
             "exchange conjugation moves a unit between sites", 2,
             _case_exchange_conjugation),
    CaseSpec("eq2.11", "integrability",
             "Lax evolution equation, both models, every entry", 2,
             _case_lax_evolution),
    CaseSpec("eq2.16", "integrability",
             "row and column sums of the Lax partner vanish", 2,
             _case_partner_sum_rule),
    CaseSpec("eq2.21", "integrability",
             "levels 0 and 1 commute with the trigonometric Hamiltonian", 2,
             _case_trig_conservation),
    CaseSpec("jp-conservation", "integrability",
             "levels 0..2 commute with the rational Hamiltonian", 2,
             _case_rational_conservation),
    CaseSpec("eq2.17", "yangian",
             "defining relation with the graded formal unit at level -1", 2,
             _yangian_defining(True)),
    CaseSpec("eq2.17-plain", "yangian",
             "defining relation with the unsigned formal unit at level -1", 2,
             _yangian_defining(False)),
    CaseSpec("eq3.1", "yangian",
             "level 0 bracket closes on level 0", 2,
             _tower_bracket_case("yangian_T", 0, 0, 0)),
    CaseSpec("eq3.2", "yangian",
             "level 0 with level 1 closes on level 1", 2,
             _tower_bracket_case("yangian_T", 0, 1, 1)),
    CaseSpec("eq3.3", "yangian",
             "level 1 bracket closes on level 2 plus a coupling defect", 2,
             _case_level_one_bracket),
    CaseSpec("eq3.4", "yangian",
             "level 2 generator equals its termwise expansion", 2,
             _case_level_two_explicit),
    CaseSpec("eq3.5", "yangian",
             "nested level-1 bracket measured by the defect tensor", 2,
             _case_yangian_serre),
    CaseSpec("eq3.10", "loop",
             "rational tower: level 0 with level 1", 2,
             _tower_bracket_case("loop_J", 0, 1, 1)),
    CaseSpec("eq3.11", "loop",
             "rational tower: level 1 bracket closes on level 2", 2,
             _tower_bracket_case("loop_J", 1, 1, 2)),
    CaseSpec("eq3.12", "loop",
             "rational tower satisfies the Serre property", 2,
             _plain_serre_case("loop_J", "eq3.12")),
    CaseSpec("eq3.15", "loop",
             "rational tower brackets add levels", 2,
             _tower_sum_case("loop_J")),
    CaseSpec("eq3.17", "loop",
             "coordinate tower brackets add levels", 2,
             _tower_sum_case("loop_K")),
    CaseSpec("eq3.18", "loop",
             "coordinate tower satisfies the Serre property", 2,
             _plain_serre_case("loop_K", "eq3.18")),
    CaseSpec("eq3.21", "loop",
             "mixed towers reproduce the trigonometric level 1", 2,
             _unification_case(True)),
    CaseSpec("eq3.21-alt", "loop",
             "mixed tower identity without the plain level-0 bracket", 2,
             _unification_case(False)),
    CaseSpec("eq3.22", "loop",
             "shifted rational Serre defect matches its tensor", 2,
             _mixed_serre_case("loop_J", "tensor_M", "eq3.22")),
    CaseSpec("eq3.23", "loop",
             "shifted coordinate Serre defect matches its tensor", 2,
             _mixed_serre_case("loop_K", "tensor_N", "eq3.23")),
    CaseSpec("eq3.27", "loop",
             "two-parameter family Serre defect matches its tensor", 2,
             _case_two_parameter_serre),
    CaseSpec("eq3.31", "winf",
             "scalar spin recursion equals the closed form", 2,
             _case_spin_recursion_scalar),
    CaseSpec("eq3.32", "winf",
             "colored spin recursion equals the closed form", 2,
             _case_spin_recursion_color),
    CaseSpec("eq3.34", "winf",
             "scalar spin brackets close to leading order", 2,
             _case_spin_bracket_scalar),
    CaseSpec("eq3.35", "winf",
             "mixed scalar-color spin brackets close to leading order", 2,
             _case_spin_bracket_mixed),
    CaseSpec("eq3.36", "winf",
             "colored spin brackets contract to leading order", 2,
             _case_spin_bracket_color),
    CaseSpec("eq3.38", "winf",
             "decoupled spin brackets close with binomial weights", 1,
             _case_free_spin_algebra),
]:
    _register(_spec)


# -- verdicts ---------------------------------------------------------------


def residual_records(op, max_terms=200):
    """Residual terms in a plain-data form: coefficient numerator and
    denominator strings, the color word as (site, a, b) triples, and the
    derivative exponent vector."""
    from .scalar import poly_str

    field = op.ctx.field
    keys = sorted(op.terms, key=lambda k: (-sum(k[1]), k[1], k[0]))
    out = []
    for key in keys[:max_terms]:
        word, p = key
        f = op.terms[key]
        out.append({
            "num": poly_str(f.num, field),
            "den": poly_str(f.den, field),
            "word": [[s + 1, word[2 * s], word[2 * s + 1]]
                     for s in range(op.ctx.N)],
            "deriv": list(p),
        })
    return out


def _lam_subs(ws, cfg):
    if cfg.lam is None:
        return ()
    return ((ws.ctx.field.slot_lambda, Fraction(cfg.lam)),)


def _op_substituted(op, subs):
    for slot, val in subs:
        out = {}
        for k, fcoef in op.terms.items():
            g = fcoef.substitute(slot, val)
            if g:
                out[k] = g
        op = OperatorSum(op.ctx, out)
    return op


def _exact_residual(inst, subs):
    res = inst.lhs.operator() - inst.rhs.operator()
    return _op_substituted(res, subs)


def _leading_residual(inst, subs):
    if not isinstance(inst.lhs, Bracket):
        raise TypeError("leading-order instance needs a bracket on the left")
    top = inst.lhs.top(inst.dexp) - inst.rhs.operator().filtered(inst.dexp)
    return _op_substituted(top, subs).filtered(inst.dexp)


def _param_probe_points(ws, cfg, case_id):
    f = ws.ctx.field
    rng = random.Random(f"{cfg.seed}|{case_id}|xy")
    for _ in range(3):
        vx = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
        vy = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
        yield ((f.slot_x, vx), (f.slot_y, vy))


def _probe_degree(ws, cfg, lhs_op, rhs_op):
    # one degree past the residual's derivative order is complete; see
    # the module docstring for the argument
    d = max(lhs_op.max_deriv_degree(), rhs_op.max_deriv_degree(), 0) + 1
    if cfg.oracle_degree is not None:
        d = cfg.oracle_degree
    note = ""
    while d > 1 and _probe_count(ws, d) > PROBE_CAP:
        d -= 1
        note = f"probe degree reduced to {d}"
    return d, note


def _probe_count(ws, d):
    return math.comb(d + ws.N, ws.N) * (ws.dim ** ws.N)


def _probe_states(ws, degree):
    f = ws.ctx.field
    exps = []
    for total in range(degree + 1):
        for cut in itertools.combinations_with_replacement(
                range(ws.N), total):
            e = [0] * ws.N
            for slot in cut:
                e[slot] += 1
            exps.append(e)
    for colors in ws.ctx.grading.basis_states():
        for e in exps:
            amp = f.monomial({i: e[i] for i in range(ws.N) if e[i]})
            yield {colors: amp}


def _oracle_instance(ws, cfg, inst, subs, symbolic_verdict_ok):
    """Double-entry check of one instance; returns (agrees, note)."""
    lhs_op = inst.lhs.operator()
    rhs_op = inst.rhs.operator()
    degree, note = _probe_degree(ws, cfg, lhs_op, rhs_op)
    residual = _op_substituted(lhs_op - rhs_op, subs)
    action_zero = True
    for psi in _probe_states(ws, degree):
        via_lhs = inst.lhs.apply(psi)
        via_rhs = inst.rhs.apply(psi)
        composed = _state_substituted(_state_add(via_lhs, via_rhs, -1), subs)
        direct = residual.apply_to(psi)
        if not _state_is_zero(_state_add(composed, direct, -1)):
            return False, "action path disagrees with the product path"
        if not _state_is_zero(composed):
            action_zero = False
    if inst.dexp is None:
        symbolic_zero = residual.is_zero
        # the completeness argument needs the full probe degree
        if not note and action_zero != symbolic_zero:
            return False, "action verdict disagrees with the symbolic verdict"
        if symbolic_zero != symbolic_verdict_ok:
            return False, "oracle residual disagrees with the run verdict"
    else:
        # cross-validate the truncated product path against the full one
        full_top = residual.filtered(inst.dexp)
        trunc = _leading_residual(inst, subs)
        if full_top != trunc:
            return False, "truncated bracket disagrees with the full product"
        if full_top.is_zero != symbolic_verdict_ok:
            return False, "oracle residual disagrees with the run verdict"
    return True, note


def verify_case(ws: ModelWorkspace, case: CaseSpec, cfg: RunConfig) -> IdentityReport:
    t0 = time.perf_counter()
    report = IdentityReport(
        id=case.id, suite=case.suite, n=ws.n, m=ws.m, N=ws.N,
        verdict=VERDICT_PASS, oracle_agrees=True, instances=0, failed=0,
        residual_term_count=0, millis=0)
    subs = _lam_subs(ws, cfg)
    notes = []
    if ws.N < case.min_sites:
        report.verdict = VERDICT_EMPTY
        report.millis = int((time.perf_counter() - t0) * 1000)
        return report
    try:
        with term_budget(cfg.term_budget):
            instances = list(case.instances(ws, cfg))
            results = []
            for inst in instances:
                if inst.dexp is None:
                    residual = _exact_residual(inst, subs)
                    ok = residual.is_zero
                    if ok and inst.param_probe:
                        for points in _param_probe_points(ws, cfg, case.id):
                            if not _op_substituted(residual, points).is_zero:
                                ok = False
                                break
                else:
                    residual = _leading_residual(inst, subs)
                    ok = residual.is_zero
                results.append(ok)
                if not ok:
                    report.failed += 1
                    report.residual_term_count += len(residual)
                    if cfg.dump_residual and len(report.residuals) < 5:
                        report.residuals.append(
                            {"instance": inst.label,
                             "terms": residual_records(residual)})
            report.instances = len(instances)
            if not instances:
                report.verdict = VERDICT_EMPTY
            elif report.failed:
                report.verdict = VERDICT_FAIL
            rng = random.Random(f"{cfg.seed}|{case.id}|oracle|{ws.n},{ws.m},{ws.N}")
            picked = sorted(rng.sample(
                range(len(instances)), min(ORACLE_INSTANCES, len(instances))))
            for idx in picked:
                agrees, note = _oracle_instance(
                    ws, cfg, instances[idx], subs, results[idx])
                if note:
                    notes.append(note)
                if not agrees:
                    report.oracle_agrees = False
                    notes.append(f"oracle mismatch at {instances[idx].label}")
                    break
    except CapExceededError as exc:
        report.verdict = VERDICT_TRUNCATED
        notes.append(str(exc))
    report.note = "; ".join(dict.fromkeys(notes))
    report.millis = int((time.perf_counter() - t0) * 1000)
    return report


# -- suite driver -------------------------------------------------------------


def case_ids():
    return tuple(CASES)


def _selected_cases(cfg):
    if cfg.cases is None:
        return tuple(CASES)
    unknown = [c for c in cfg.cases if c not in CASES]
    if unknown:
        raise KeyError(f"unknown case ids: {', '.join(unknown)}")
    return tuple(cfg.cases)


def _run_one_context(context, ids, cfg):
    n, m, N = context
    ws = ModelWorkspace(n, m, N)
    return [verify_case(ws, CASES[cid], cfg) for cid in ids]


def _job(args):
    context, ids, cfg = args
    return [r.as_dict() for r in _run_one_context(context, ids, cfg)]


def run_suite(cfg: RunConfig):
    """Run the selected cases over the selected contexts.

    Returns reports sorted by (case id, context); the order and content
    are deterministic for a fixed config and seed (timing aside).
    """
    ids = _selected_cases(cfg)
    contexts = [tuple(c) for c in cfg.contexts]
    reports = []
    if cfg.workers > 1 and len(contexts) > 1:
        jobs = [(ctx, ids, cfg) for ctx in contexts]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for chunk in pool.map(_job, jobs):
                for raw in chunk:
                    reports.append(IdentityReport(**{
                        **{k: raw[k] for k in (
                            "id", "suite", "n", "m", "N", "verdict",
                            "oracle_agrees", "instances", "failed",
                            "residual_term_count", "millis")},
                        "note": raw.get("note", ""),
                        "residuals": raw.get("residuals", []),
                    }))
    else:
        for ctx in contexts:
            reports.extend(_run_one_context(ctx, ids, cfg))
    reports.sort(key=lambda r: (r.id, r.n, r.m, r.N))
    return reports


# -- manifest comparison ------------------------------------------------------


def compare_to_manifest(reports, manifest, cfg) -> list:
    """List of human-readable deviations between a run and the manifest."""
    deviations = []
    default = manifest.get("default", VERDICT_PASS)
    overrides = manifest.get("overrides", {})
    pinned_seed = manifest.get("seed")
    for rep in reports:
        ckey = f"{rep.n},{rep.m},{rep.N}"
        entry = overrides.get(rep.id, {}).get(ckey)
        want = entry.get("verdict", default) if entry else default
        if rep.verdict != want:
            deviations.append(
                f"{rep.id} at ({ckey}): verdict {rep.verdict}, expected {want}")
        if entry and "residual_term_count" in entry \
                and pinned_seed == cfg.seed and cfg.lam is None:
            if rep.residual_term_count != entry["residual_term_count"]:
                deviations.append(
                    f"{rep.id} at ({ckey}): residual terms "
                    f"{rep.residual_term_count}, expected "
                    f"{entry['residual_term_count']}")
        if not rep.oracle_agrees:
            deviations.append(
                f"{rep.id} at ({ckey}): double-entry check failed")
    return deviations
