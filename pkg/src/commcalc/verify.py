"""Machine checks of the computational claims, with a JSON report.

Every check returns a verdict in {pass, fail, unstable}.  "unstable" means
the check could not be decided under the configured resources: a cap or
timeout was hit, a parameter was set below what the claim needs, or a
lattice equality did not stabilize between two instantiation bounds.

Configuration is a JSON object; anything missing falls back to
DEFAULT_CONFIG.  Per-check parameters live under "checks" -> id.
"""

from __future__ import annotations

import copy
import itertools
import json
import random
import signal
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field

from . import words as words_mod
from .errors import CommCalcError, Indeterminate, ResourceLimit, SpanNotStabilized
from .hall import generate_basis, witt_count
from .intlattice import hermite_form, lattice_index
from .magnus import expand
from .milnor import (LinkPresentation, check_cyclic_symmetry, check_relations_star,
                     classify_mu, commutator_exponents, count_independent_mu, e_from_mu,
                     mu, mu_from_e)
from .nilpotent import ExponentVector, context
from .sato_levine import (CrossingRecord, HomotopyTrace, beta_jump, beta_tilde,
                          surgery_det, three_component_special_s)
from .subgroups import (GeneratorScheme, build_lattice, compare_lattices, engel_image_span,
                        product_lattice)
from .words import Word, commutator, parse_pattern, parse_word, substitute, verify_identity

DEFAULT_CONFIG = {
    "seed": 20240611,
    "jobs": 1,
    "caps": {
        "max_instances": 500_000,     # candidate generators per lattice build
        "max_basis": 200_000,         # Hall basis elements per context
        "timeout": 900,               # seconds per check, 0 disables
        "max_word_length": 10**6,
    },
    "checks": {
        "witt-orr-count": {"m": 2, "upto": 9},
        "hall-weight3-stratum": {},
        "normal-form-roundtrip": {"q": 6, "samples": 200, "max_length": 12},
        "mu1-three-forms": {"q": 6, "L": 4},
        "mu1-class-bound": {"q": 6, "L": 4},
        "engel2-image": {"box": 2},
        "engel3-index2": {"box": 2},
        "delta1-weight5": {"q": 6, "L": 4},
        "identity-suite": {"random_words": 20, "max_length": 6},
        "mu-bar-engine": {"q": 6, "presentations": 20, "max_length": 10},
        "classify-mu": {},
        "beta-suite": {"grid": 10, "matrices": 100},
        "metabelian-mu-delta": {"q": 6, "L": 4},
    },
}

# smallest parameter values for which a check's claim is visible at all
REQUIREMENTS = {
    "normal-form-roundtrip": {"q": 6},
    "mu1-three-forms": {"q": 6, "L": 4},
    "mu1-class-bound": {"q": 6, "L": 1},
    "engel2-image": {"box": 1},
    "engel3-index2": {"box": 1},
    "delta1-weight5": {"q": 6, "L": 1},
    "mu-bar-engine": {"q": 5},
    "metabelian-mu-delta": {"q": 6, "L": 4},
}


class CheckTimeout(ResourceLimit):
    pass


@dataclass
class CheckResult:
    id: str
    claim: str
    params: dict
    verdict: str
    stable: bool | None
    seconds: float
    details: dict = field(default_factory=dict)


@dataclass
class VerificationReport:
    seed: int
    config: dict
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.verdict == "pass" for c in self.checks)

    def to_json(self) -> str:
        return json.dumps({"seed": self.seed, "passed": self.passed, "config": self.config,
                           "checks": [asdict(c) for c in self.checks]}, indent=2, default=str)


def load_config(path=None, overrides=None) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        with open(path) as fh:
            _merge(cfg, json.load(fh))
    if overrides:
        _merge(cfg, overrides)
    return cfg


def _merge(base: dict, extra: dict) -> None:
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(base.get(k), dict):
            _merge(base[k], v)
        else:
            base[k] = v


class _Run:
    """Per-run state: caps and a cache of lattices shared between checks."""

    def __init__(self, cfg: dict, seed: int):
        self.cfg = cfg
        self.caps = cfg["caps"]
        self.seed = seed
        self._lattices = {}

    def rng(self, check_id: str) -> random.Random:
        return random.Random(f"{self.seed}:{check_id}")

    def context(self, m: int, q: int):
        size = sum(witt_count(m, n) for n in range(1, q))
        if size > self.caps["max_basis"]:
            raise ResourceLimit(f"basis of F_{m}/gamma_{q} has {size} elements (cap {self.caps['max_basis']})")
        return context(m, q, max_q=q)

    def lattice(self, m: int, q: int, scheme: str, L: int):
        key = (m, q, scheme, L)
        if key not in self._lattices:
            ctx = self.context(m, q)
            self._lattices[key] = build_lattice(GeneratorScheme.parse(scheme, length=L), ctx,
                                                self.caps["max_instances"])
        return self._lattices[key]


# -- the checks ------------------------------------------------------------------


def _mobius(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def _necklaces(m: int, n: int) -> int:
    return sum(_mobius(d) * m ** (n // d) for d in range(1, n + 1) if n % d == 0) // n


def check_witt_orr_count(run, p):
    m, upto = p["m"], p["upto"]
    counts = [witt_count(m, n) for n in range(1, upto + 1)]
    oracle = [_necklaces(m, n) for n in range(1, upto + 1)]
    expected = [2, 1, 2, 3, 6, 9, 18, 30, 56][:upto] if m == 2 else oracle
    independent = count_independent_mu(m, upto)
    orr = m * oracle[upto - 2] - oracle[upto - 1]
    ok = counts == oracle == expected and independent == orr
    if m == 2 and upto == 9:
        ok = ok and independent == 4
    return ok, None, {"witt": counts, "oracle": oracle, "independent_mu": independent}


WEIGHT3_M3 = ["[b,a,a]", "[b,a,b]", "[b,a,c]", "[c,a,a]", "[c,a,b]", "[c,a,c]", "[c,b,b]", "[c,b,c]"]


def _tree(text: str):
    # bracketing tree read directly from a left-normed bracket of generator letters
    names = text.strip("[]").split(",")
    key = ord(names[0]) - ord("a") + 1
    for nm in names[1:]:
        key = (key, ord(nm) - ord("a") + 1)
    return key


def check_hall_weight3_stratum(run, p):
    stratum = generate_basis(3, 3).stratum(3)
    got = {c.key for c in stratum}
    want = {_tree(t) for t in WEIGHT3_M3}
    return got == want and len(stratum) == 8, None, {"stratum": [c.format(3) for c in stratum]}


def _random_word(rng, m, max_len):
    letters = [i for i in range(-m, m + 1) if i]
    return Word.from_letters(m, [rng.choice(letters) for _ in range(rng.randint(0, max_len))])


def check_normal_form_roundtrip(run, p):
    q, n, max_len = p["q"], p["samples"], p["max_length"]
    m = 2
    rng = run.rng("normal-form-roundtrip")
    ctx = run.context(m, q)
    bad_series = bad_vectors = 0
    for _ in range(n):
        w = _random_word(rng, m, max_len)
        e = ctx.normal_form(w)
        if expand(w, q) != expand(ctx.evaluate(e), q):
            bad_series += 1
    size = len(ctx.basis)
    for _ in range(n):
        e = ExponentVector(ctx, [rng.randint(-2, 2) for _ in range(size)])
        if ctx.normal_form(ctx.evaluate(e)) != e:
            bad_vectors += 1
    return bad_series == 0 and bad_vectors == 0, None, {
        "series_mismatches": bad_series, "roundtrip_mismatches": bad_vectors}


def _lattice_pair(run, m, q, scheme, L):
    lo = run.lattice(m, q, scheme, L - 1)
    hi = run.lattice(m, q, scheme, L)
    return hi, lo == hi


def check_mu1_three_forms(run, p):
    q, L = p["q"], p["L"]
    details = {}
    lats, stable = {}, True
    for s in ("mu:1", "mu27:1", "mu28:1"):
        lats[s], st = _lattice_pair(run, 2, q, s, L)
        details[f"{s} stable"] = st
        details[f"{s} sections"] = {n: lats[s].section_index(n) for n in range(2, q)}
        stable = stable and st
    verdicts = [compare_lattices(lats["mu:1"], lats["mu27:1"]),
                compare_lattices(lats["mu:1"], lats["mu28:1"])]
    details["comparisons"] = verdicts
    return all(v == "equal" for v in verdicts), stable, details


def check_mu1_class_bound(run, p):
    q, L = p["q"], p["L"]
    lat = run.lattice(2, q, "mu:1", L)
    ctx = lat.ctx
    top = [c.format(2) for c in ctx.stratum(5)]
    inside = {c: lat.contains(parse_word(c, 2)) for c in top}
    heavy = lat.contains(parse_word("[b,a,a,b]", 2))
    ok = len(top) == 6 and all(inside.values()) and not heavy
    return ok, None, {"weight5_members": inside, "[b,a,a,b] member": heavy}


def _index(rows, n):
    return lattice_index(hermite_form(rows, n), n)


def check_engel2_image(run, p):
    box = p["box"]
    details = {}
    try:
        span3 = engel_image_span(3, 2, box)
        span2 = engel_image_span(2, 2, box)
    except SpanNotStabilized as exc:
        return False, False, {"error": str(exc)}
    stratum = generate_basis(3, 3).stratum(3)
    coords = {c.key: j for j, c in enumerate(stratum)}
    N = len(stratum)
    quotient = []
    for c in stratum:
        if sum(1 for d in c.multidegree if d) < 3:
            quotient.append([1 if j == coords[c.key] else 0 for j in range(N)])
    row = [0] * N
    row[coords[_tree("[b,a,c]")]] += 1
    row[coords[_tree("[c,a,b]")]] += 1
    quotient.append(row)
    details["quotient_index"] = _index(quotient, N)
    details["index_m3"] = _index(quotient + span3, N)
    details["hermite_m3"] = hermite_form(quotient + span3, N)
    details["index_m2"] = _index(span2, len(span2[0]) if span2 else 2)
    ok = details["quotient_index"] == 0 and details["index_m3"] == 3 and details["index_m2"] == 1
    return ok, True, details


def check_engel3_index2(run, p):
    try:
        span = engel_image_span(2, 3, p["box"])
    except SpanNotStabilized as exc:
        return False, False, {"error": str(exc)}
    N = witt_count(2, 4)
    idx = _index(span, N)
    return idx == 2, True, {"hermite": span, "index": idx}


def check_delta1_weight5(run, p):
    q, L = p["q"], p["L"]
    lat, stable = _lattice_pair(run, 2, q, "delta:1", L)
    ctx = lat.ctx
    top = {c.format(2): lat.contains(c.as_word(2)) for c in ctx.stratum(5)}
    special = lat.contains(parse_word("[b,a,a,b,b]", 2))
    sections = {n: lat.section_index(n) for n in range(2, q)}
    ok = all(top.values()) and special and len(top) == 6 and sections[5] == 1
    return ok, stable, {"[b,a,a,b,b] member": special, "weight5_members": top, "section_indices": sections}


IDENTITIES = [
    ("hall-witt", "[[x,y^-1],z]^(y)*[[y,z^-1],x]^(z)*[[z,x^-1],y]^(x)", "1"),
    ("double-commutator", "[[g,h],h]", "[h,h^(g)]^([g,h])"),
    ("engel-conjugation", "[h,g,h,h]", "[g,h,h,h]^-([h,[g,h]]^2*[h,g])"),
    ("three-engel-reversal", "[g,h,h,h]", "[h,[h,[h,g]]]^-([g,h]^(h))"),
    ("product-left", "[g*h,x]", "[g,x]^(h)*[h,x]"),
    ("product-right", "[g,h*x]", "[g,x]*[g,h]^(x)"),
    ("inverse-left", "[g^-1,h]", "[g,h]^-(g^-1)"),
    ("conjugate-as-commutator", "g^(h)", "g*[g,h]"),
]

SWAPPED_HALL_WITT = "[[x,y^-1],z]^(y)*[[z,x^-1],y]^(x)*[[y,z^-1],x]^(z)"


def rewrite_identity(k: int):
    """[x, x^(x^(...^(x^g)))] with k+1 nested x's against [x,[x,...,[x,g]]] with k+2 brackets."""
    inner = "g"
    for _ in range(k + 1):
        inner = f"x^({inner})"
    lhs = f"[x,{inner}]"
    rhs = "g"
    for _ in range(k + 2):
        rhs = f"[x,{rhs}]"
    return lhs, rhs


def check_identity_suite(run, p):
    rng = run.rng("identity-suite")
    variables = ("g", "h", "x", "y", "z")
    rank = 3
    failures = []
    total = 0
    gens = [Word.generator(i, rank) for i in range(1, rank + 1)]
    samples = [dict(zip(variables, (gens[0], gens[1], gens[2], gens[0], gens[1])))]
    for _ in range(p["random_words"]):
        samples.append({v: _random_word(rng, rank, p["max_length"]) for v in variables})
    cases = list(IDENTITIES)
    for k in range(5):
        lhs, rhs = rewrite_identity(k)
        cases.append((f"nested-conjugate-rewrite-k{k}", lhs, rhs))
    for name, lhs, rhs in cases:
        pl = parse_pattern(lhs, rank, variables)
        pr = parse_pattern(rhs, rank, variables)
        for b in samples:
            total += 1
            if not verify_identity(substitute(pl, b), substitute(pr, b)):
                failures.append(name)
                break
    # the rewrite for a generator x and a random g, as stated
    for k in range(5):
        lhs, rhs = rewrite_identity(k)
        pl, pr = parse_pattern(lhs, rank, ("x", "g")), parse_pattern(rhs, rank, ("x", "g"))
        for _ in range(5):
            b = {"x": gens[rng.randrange(rank)], "g": _random_word(rng, rank, p["max_length"])}
            total += 1
            if not verify_identity(substitute(pl, b), substitute(pr, b)):
                failures.append(f"rewrite-generator-k{k}")
                break
    # with the last two factors swapped the product is only trivial modulo
    # weight 6 (it differs by a commutator of two weight-3 elements)
    swapped = parse_pattern(SWAPPED_HALL_WITT, rank, variables)
    depth = min(expand(substitute(swapped, b), 7).min_degree() for b in samples[:5])
    if depth < 6:
        failures.append("hall-witt-swapped")
    return not failures, None, {"cases": total, "failures": failures, "swapped_hall_witt_depth": depth}


def check_mu_bar_engine(run, p):
    q = p["q"]
    rng = run.rng("mu-bar-engine")
    hopf = LinkPresentation.from_strings(2, q, ["b", "a"])
    borr = LinkPresentation.from_strings(3, q, ["[b,c]", "[c,a]", "[a,b]"])
    d = {
        "hopf mu(21)": mu(hopf, (2, 1)).residue,
        "borromean mu(231)": mu(borr, (2, 3, 1)).residue,
        "borromean mu(321)": mu(borr, (3, 2, 1)).residue,
    }
    cyc = check_cyclic_symmetry(borr, 3)
    star = check_relations_star(borr, 2)
    d["cyclic"] = cyc.passed
    d["star"] = star.passed
    ok = (d["hopf mu(21)"] == 1 and d["borromean mu(231)"] == 1 and d["borromean mu(321)"] == -1
          and cyc.passed and star.passed)
    mismatches = compared = 0
    for _ in range(p["presentations"]):
        m = rng.choice([2, 3])
        lp = LinkPresentation(m, q, [_random_word(rng, m, p["max_length"]) for _ in range(m)])
        for n in range(1, min(3, q - 2) + 1):
            for I in itertools.combinations_with_replacement(range(1, m + 1), n):
                for i in range(1, m + 1):
                    for sigma, v in mu_from_e(lp, I, i).items():
                        compared += 1
                        if mu(lp, sigma + (i,)).residue != v:
                            mismatches += 1
    round_trips = bad_trips = 0
    for _ in range(p["presentations"]):
        m = rng.choice([2, 3])
        lp = LinkPresentation(m, q, [commutator(_random_word(rng, m, 3), _random_word(rng, m, 3))
                                     for _ in range(m)])
        for n in range(1, min(3, q - 2) + 1):
            for I in itertools.combinations_with_replacement(range(1, m + 1), n):
                for i in range(1, m + 1):
                    try:
                        e = e_from_mu(lp, I, i)
                    except Indeterminate:
                        continue
                    round_trips += 1
                    if e != commutator_exponents(lp, I, i):
                        bad_trips += 1
    d.update(mu_from_e_compared=compared, mu_from_e_mismatches=mismatches,
             e_from_mu_round_trips=round_trips, e_from_mu_failures=bad_trips)
    ok = ok and mismatches == 0 and bad_trips == 0 and round_trips > 0
    return ok, None, d


CLASSIFY_CASES = [("111112122", 3, "invariantOnly"), ("1122", 1, "extractable"),
                  ("11111122", 3, "invariantOnly")]


def check_classify_mu(run, p):
    got = {f"{idx} k={k}": classify_mu(idx, k) for idx, k, _ in CLASSIFY_CASES}
    ok = all(got[f"{idx} k={k}"] == want for idx, k, want in CLASSIFY_CASES)
    return ok, None, got


def check_beta_suite(run, p):
    import sympy

    rng = run.rng("beta-suite")
    d = {}
    lobe = CrossingRecord(1, (0, 2), (0, -1), 0, 1)
    values = [beta_tilde(HomotopyTrace(2, [[0, 1], [1, 0]], [lobe] * n)) for n in range(1, 6)]
    d["beta_tilde_Mn"] = [str(v) for v in values]
    ok = values == [-2 * n for n in range(1, 6)]
    n_, l_, lam = sympy.symbols("n l lam")
    sym = beta_jump((0, 0), [[0, l_], [l_, 0]], CrossingRecord(1, (0, n_), (0, l_ - n_), lam))
    d["symbolic_jump"] = str(sym)
    ok = ok and sympy.expand(sym + n_ * (l_ - n_)) == 0
    grid_bad = 0
    for n in range(p["grid"]):
        for l in range(p["grid"]):
            rec = CrossingRecord(1, (0, n), (0, l - n), rng.randint(-5, 5))
            if beta_jump((0, 0), [[0, l], [l, 0]], rec) != -n * (l - n):
                grid_bad += 1
    d["grid_failures"] = grid_bad
    det_bad = 0
    for _ in range(p["matrices"]):
        a = [rng.choice([v for v in range(-9, 10) if v]) for _ in range(3)]
        A = [[0, a[0], a[1]], [a[0], 0, a[2]], [a[1], a[2], 0]]
        if surgery_det(three_component_special_s(a, 1), A) != 0:
            det_bad += 1
        if surgery_det(three_component_special_s(a, -1), A) == 0:
            det_bad += 1
    d["determinant_failures"] = det_bad
    return ok and grid_bad == 0 and det_bad == 0, None, d


def check_metabelian_mu_delta(run, p):
    q, L = p["q"], p["L"]
    m = 2
    details = {}
    results = {}
    for bound in (L - 1, L):
        d2 = run.lattice(m, q, "derived2", bound)
        mu1 = product_lattice(run.lattice(m, q, "mu:1", bound), d2)
        de1 = product_lattice(run.lattice(m, q, "delta:1", bound), d2)
        results[bound] = (mu1, de1)
        details[f"L={bound}"] = compare_lattices(mu1, de1)
    stable = results[L - 1][0] == results[L][0] and results[L - 1][1] == results[L][1]
    ok = all(v == "equal" for v in details.values())
    details["sections"] = {n: results[L][0].section_index(n) for n in range(2, q)}
    return ok, stable, details


CHECKS = {
    "witt-orr-count": ("Witt counts of F_2 through weight 9 and the count of independent length-9 invariants",
                       check_witt_orr_count),
    "hall-weight3-stratum": ("weight-3 basic commutators of F_3 are the expected eight bracketings",
                             check_hall_weight3_stratum),
    "normal-form-roundtrip": ("normal forms in F_2/gamma_6 are sound and unique", check_normal_form_roundtrip),
    "mu1-three-forms": ("three generating sets of mu_1 give the same subgroup of F_2/gamma_6",
                        check_mu1_three_forms),
    "mu1-class-bound": ("gamma_5 F_2 lies in mu_1 while [b,a,a,b] does not", check_mu1_class_bound),
    "engel2-image": ("2-Engel values give 3Q' in F_3 and all of gamma_3 in F_2", check_engel2_image),
    "engel3-index2": ("3-Engel values span an index-2 sublattice of gamma_4 F_2 / gamma_5 F_2",
                      check_engel3_index2),
    "delta1-weight5": ("delta_1 F_2 contains [b,a,a,b,b] and all of weight 5", check_delta1_weight5),
    "identity-suite": ("exact free-group commutator identities", check_identity_suite),
    "mu-bar-engine": ("mu-bar values, relations, and the exponent correspondence", check_mu_bar_engine),
    "classify-mu": ("extractability classification of mu-bar indices", check_classify_mu),
    "beta-suite": ("crossing-change jumps of beta~ and beta(L, s)", check_beta_suite),
    "metabelian-mu-delta": ("mu_1 and delta_1 agree modulo the second derived subgroup",
                            check_metabelian_mu_delta),
}


# -- orchestration ----------------------------------------------------------------


@contextmanager
def _time_limit(seconds):
    usable = seconds and hasattr(signal, "SIGALRM") and threading.current_thread() is threading.main_thread()
    if not usable:
        yield
        return

    def on_alarm(signum, frame):
        raise CheckTimeout(f"check exceeded {seconds} s")

    old = signal.signal(signal.SIGALRM, on_alarm)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def _below_requirement(check_id: str, params: dict):
    for key, least in REQUIREMENTS.get(check_id, {}).items():
        if key in params and params[key] < least:
            return f"{key}={params[key]} is below the {least} this claim needs"
    return None


def run_check(check_id: str, cfg: dict, run: _Run | None = None) -> CheckResult:
    if check_id not in CHECKS:
        raise KeyError(f"unknown check {check_id!r}; known: {', '.join(CHECKS)}")
    claim, fn = CHECKS[check_id]
    params = dict(cfg["checks"].get(check_id, {}))
    run = run or _Run(cfg, cfg["seed"])
    reason = _below_requirement(check_id, params)
    if reason:
        return CheckResult(check_id, claim, params, "unstable", None, 0.0, {"skipped": reason})
    words_mod.set_max_length(run.caps["max_word_length"])
    start = time.perf_counter()
    try:
        with _time_limit(run.caps.get("timeout", 0)):
            ok, stable, details = fn(run, params)
    except ResourceLimit as exc:
        return CheckResult(check_id, claim, params, "unstable", None,
                           time.perf_counter() - start, {"aborted": str(exc)})
    except CommCalcError as exc:
        return CheckResult(check_id, claim, params, "fail", None,
                           time.perf_counter() - start, {"error": f"{type(exc).__name__}: {exc}"})
    elapsed = time.perf_counter() - start
    if not ok:
        verdict = "fail"
    elif stable is False:
        verdict = "unstable"
    else:
        verdict = "pass"
    return CheckResult(check_id, claim, params, verdict, stable, elapsed, _jsonable(details))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, str, float)) or x is None:
        return x
    try:
        return int(x)
    except (TypeError, ValueError):
        return str(x)


def _worker(args):
    check_id, cfg = args
    return run_check(check_id, cfg)


def verify_suite(cfg: dict | None = None, only=None) -> VerificationReport:
    """Run the selected checks (all by default) and collect a report."""
    cfg = cfg or load_config()
    ids = list(CHECKS) if not only else list(only)
    for i in ids:
        if i not in CHECKS:
            raise KeyError(f"unknown check {i!r}; known: {', '.join(CHECKS)}")
    jobs = int(cfg.get("jobs", 1))
    if jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_worker, [(i, cfg) for i in ids]))
    else:
        run = _Run(cfg, cfg["seed"])
        results = [run_check(i, cfg, run) for i in ids]
    return VerificationReport(cfg["seed"], cfg, results)
