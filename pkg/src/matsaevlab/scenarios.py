"""Scenario files and the pipelines they name.

A scenario file is flat ``key = value`` text; ``#`` starts a comment.  Every
file names a ``pipeline`` and a ``seed``; the remaining keys depend on the
pipeline and unknown keys are rejected.
"""
from __future__ import annotations

import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import grammax, optuple, pnorm, poly, qfock, randpoly, steiner
from .report import Report


class ScenarioError(ValueError):
    pass


def _number(s: str) -> float:
    s = s.strip()
    if s in ("inf", "infinity"):
        return math.inf
    try:
        return float(Fraction(s))
    except (ValueError, ZeroDivisionError):
        raise ScenarioError(f"not a number: {s!r}") from None


def _integer(s: str) -> int:
    try:
        return int(s.strip())
    except ValueError:
        raise ScenarioError(f"not an integer: {s!r}") from None


def _ints(s: str) -> list:
    return [_integer(t) for t in s.split(",") if t.strip()]


def _numbers(s: str) -> list:
    return [_number(t) for t in s.split(",") if t.strip()]


def _text(s: str) -> str:
    return s.strip()


# pipeline -> key -> (parser, default); a default of None means optional
PIPELINES = {
    "mul-lemma": {"P": (_text, "z1+z2"), "p": (_number, "2"), "windows": (_ints, "4,8,16,32"),
                  "restarts": (_integer, "16")},
    "matsaev-check": {"fixture": (_text, "varopoulos-a3"), "P": (_text, None), "p": (_number, "2"),
                      "windows": (_ints, "2,4"), "n": (_integer, "2"), "dim": (_integer, "8"),
                      "restarts": (_integer, "16")},
    "dixon-fano": {"signs": (_numbers, None)},
    "theoremF": {"n": (_integer, "7"), "k": (_integer, "3"), "ps": (_numbers, "1.25,1.5,1.75"),
                 "D": (_number, "8"), "construction": (_text, "fano")},
    "degree2": {"p": (_number, "1.9"), "ks": (_ints, "2,3,10,100,1000,10000"),
                "trials": (_integer, "1000000")},
    "gram": {"matrix": (_text, "a3"), "rank": (_integer, None), "restarts": (_integer, "32")},
    "steiner": {"n": (_integer, "25"), "k": (_integer, "3"), "t": (_integer, None)},
    "ksz": {"construction": (_text, "fano"), "n": (_integer, "7"), "k": (_integer, "3"),
            "draws": (_integer, "100"), "budget": (_integer, "512")},
    "fock-qrel": {"d": (_integer, "3"), "qs": (_numbers, "-1,-0.5,0,0.5"), "N": (_integer, "4")},
    "schur-dilation": {"size": (_integer, "2"), "kmax": (_integer, "3"), "lmax": (_integer, "3")},
    "gaussian-const": {"p": (_number, "4"), "trials": (_integer, "1000000")},
}


def parse_text(text: str, source: str = "<scenario>") -> dict:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"{source}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in raw:
            raise ScenarioError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    if not raw:
        raise ScenarioError(f"{source}: empty scenario")
    if "pipeline" not in raw:
        raise ScenarioError(f"{source}: missing 'pipeline'")
    return raw


def resolve(raw: dict, seed: int | None = None) -> tuple[str, int, dict]:
    """Validate raw key/values; returns ``(pipeline, seed, params)``."""
    raw = dict(raw)
    name = raw.pop("pipeline")
    if name not in PIPELINES:
        raise ScenarioError(f"unknown pipeline {name!r}; known: {', '.join(sorted(PIPELINES))}")
    file_seed = raw.pop("seed", None)
    if seed is None:
        if file_seed is None:
            raise ScenarioError("seed is mandatory (in the file or via --seed)")
        seed = _integer(file_seed)
    if seed < 0:
        raise ScenarioError("seed must be non-negative")
    keys = PIPELINES[name]
    unknown = sorted(set(raw) - set(keys))
    if unknown:
        raise ScenarioError(f"unknown keys for {name}: {', '.join(unknown)}")
    params = {}
    for key, (parse, default) in keys.items():
        if key in raw:
            params[key] = parse(raw[key])
        elif default is not None:
            params[key] = parse(default)
        else:
            params[key] = None
    return name, seed, params


def load(path, seed: int | None = None) -> tuple[str, int, dict]:
    path = Path(path)
    return resolve(parse_text(path.read_text(), str(path)), seed)


def run(name: str, seed: int, params: dict) -> Report:
    rep = Report(name, {k: _echo(v) for k, v in params.items() if v is not None}, seed)
    try:
        _RUNNERS[name](rep, seed, **params)
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"{name}: {exc}") from exc
    return rep


def _echo(v) -> str:
    if isinstance(v, list):
        return ",".join(_echo(x) for x in v)
    if isinstance(v, float):
        return "inf" if v == math.inf else repr(v)
    return str(v)


def _require(cond: bool, msg: str):
    if not cond:
        raise ScenarioError(msg)


def _check_p(p: float):
    _require(1 <= p <= math.inf, f"p = {p} outside [1, inf]")


# -- pipelines -----------------------------------------------------------------------


def _mul_lemma(rep: Report, seed, P, p, windows, restarts):
    P = poly.parse(P)
    _check_p(p)
    _require(len(windows) > 0, "windows must be non-empty")
    _require(min(windows) >= P.degree, f"every window must be >= degree {P.degree}")
    _require(max(windows) ** P.n <= 4096, "window^n must not exceed 4096")
    sup = poly.sup_norm_torus(P, budget=4096, seed=seed)
    rep.bracket("torus_sup", sup.lower, poly.sup_norm_torus_upper(P), sup.method_lower,
                "grid+lipschitz")
    rows, lowers = [], []
    for m in windows:
        S = optuple.apply_polynomial(P, optuple.shift_tuple(P.n, m))
        C = optuple.convolution_operator(P, m, centered=False)
        bs = pnorm.opnorm_bracket(S, p, restarts=restarts, seed=seed)
        bc = pnorm.opnorm_bracket(C, p, restarts=restarts, seed=seed)
        rep.pnorm_bracket(f"shift_norm_w{m}", bs)
        rep.pnorm_bracket(f"convolution_norm_w{m}", bc)
        rows.append([m, bs.lower, bs.upper, bc.lower, bc.upper])
        lowers.append(bs.lower)
    rep.table("mul-lemma", ["window", "shift_lower", "shift_upper", "conv_lower", "conv_upper"], rows)
    rep.plot("mul-lemma", windows, lowers)
    rep.verdict("lower_bounds_nondecreasing",
                all(b >= a - 1e-9 for a, b in zip(lowers, lowers[1:])))
    rep.verdict("below_torus_upper", max(lowers) <= poly.sup_norm_torus_upper(P) + 1e-9
                if p == 2 else "undecided")


def _fixture_tuple(fixture, n, dim, seed):
    if fixture == "isometries":
        return optuple.commuting_isometries(n, dim, seed), None
    if fixture == "shifts":
        return optuple.shift_tuple(n, dim), None
    if fixture == "varopoulos-a3":
        return optuple.varopoulos_tuple(optuple.planar_120()), \
            poly.SparsePolynomial.from_quadratic_form(optuple.a3_matrix())
    if fixture == "fano-dixon-k3n7":
        S = steiner.fano_plane()
        return optuple.dixon_tuple(S), optuple.steiner_polynomial(S)
    raise ScenarioError(f"fixture {fixture!r} is not a commuting contraction tuple "
                        "(use varopoulos-a3, fano-dixon-k3n7, isometries or shifts)")


def _matsaev_check(rep: Report, seed, fixture, P, p, windows, n, dim, restarts):
    _check_p(p)
    tup, default_P = _fixture_tuple(fixture, n, dim, seed)
    if P is None:
        _require(default_P is not None, f"fixture {fixture} needs a polynomial P")
        P = default_P
    else:
        P = poly.parse(P, n=tup.arity)
    _require(P.n == tup.arity, f"P has {P.n} variables, tuple has {tup.arity} operators")
    _require(all(m ** P.n <= 4096 for m in windows), "window^n must not exceed 4096")
    cert = tup.certify(p)
    rep.value("commutation_residual", cert["commutation_residual"], "spectral-norm")
    rep.bracket("max_operator_norm", cert["max_norm_lower"], cert["max_norm_upper"],
                "power-method" if p not in (1, 2, math.inf) else "exact",
                "riesz-thorin" if p not in (1, 2, math.inf) else "exact")
    v = optuple.matsaev_check(tup, P, p, windows=windows, seed=seed, restarts=restarts)
    rep.pnorm_bracket("lhs", v.lhs)
    rep.bracket("rhs", v.rhs_lower, v.rhs_upper, v.rhs_lower_method, "riesz-thorin-multiplier")
    for m, lo in v.window_lowers.items():
        rep.value(f"rhs_window_w{m}", lo, "window-compression")
    rep.verdict("commuting", bool(cert["commuting"]))
    rep.verdict("matsaev", v.verdict)
    if not cert["contractive"]:
        rep.notes.append("tuple not certified contractive in the requested p-norm")


def _dixon_fano(rep: Report, seed, signs):
    S = steiner.fano_plane()
    if signs is not None:
        _require(len(signs) == len(S), f"need {len(S)} signs")
        _require(all(s in (-1.0, 1.0) for s in signs), "signs must be +-1")
    tup = optuple.dixon_tuple(S, signs)
    P = optuple.steiner_polynomial(S, signs)
    cert = tup.certify(2.0)
    M = optuple.apply_polynomial(P, tup)
    e = np.zeros(tup.dim)
    e[0] = 1.0
    image = M @ e
    rep.count("dim", tup.dim)
    rep.count("blocks", len(S))
    rep.value("commutation_residual", cert["commutation_residual"], "spectral-norm")
    rep.value("contraction_margin", cert["contraction_margin"], "exact-svd")
    rep.value("image_norm", np.linalg.norm(image), "direct-product")
    rep.value("image_g_coefficient", image[-1], "direct-product")
    rep.verdict("commuting", bool(cert["commuting"]))
    rep.verdict("contractive", bool(cert["contractive"]))
    rep.verdict("image_equals_block_count", bool(abs(np.linalg.norm(image) - len(S)) < 1e-9))
    rep.table("dixon-fano", ["operator", "norm2"],
              [[lab, pnorm.opnorm_exact(T, 2)] for lab, T in zip(tup.labels, tup.ops)])


def _construct(construction, n, k, seed):
    if construction == "fano":
        return steiner.fano_plane()
    if construction == "greedy":
        return steiner.greedy_construct(n, k, k - 1, seed)
    raise ScenarioError(f"construction must be 'fano' or 'greedy', got {construction!r}")


def _theoremF(rep: Report, seed, n, k, ps, D, construction):
    S = _construct(construction, n, k, seed)
    _require(all(1 < p < 2 for p in ps), "every p must lie in (1, 2)")
    rows = []
    size = len(S)
    m2 = randpoly.ksz_bound(S.n, S.k, size, D)
    for p in ps:
        r = grammax.theoremF_ratio(S, p, D)
        ksm = randpoly.ksm_bound(size, S.n, S.k, p, D)
        rep.value(f"ratio_p{p:g}", r, "closed-form")
        rep.value(f"multiplier_bound_p{p:g}", ksm, "closed-form")
        rows.append([p, r, ksm])
    crossover = (D * math.sqrt(S.n * math.log(S.k))) ** 2
    rep.count("blocks", size)
    rep.value("ksz_m2_bound", m2, "closed-form")
    rep.value("crossover_block_count", crossover, "closed-form")
    rep.verdict("ratio_exceeds_one", any(r > 1 for _, r, _ in rows))
    rep.table("theoremF", ["p", "ratio", "multiplier_bound"], rows)
    rep.plot("theoremF", [r[0] for r in rows], [r[1] for r in rows])


def _degree2(rep: Report, seed, p, ks, trials):
    _require(1 < p < 2, "p must lie in (1, 2)")
    _require(all(k >= 2 for k in ks), "every k must be >= 2")
    rows = []
    last = None
    for k in ks:
        d = grammax.degree2_ratio(p, k, trials=trials, seed=seed)
        rows.append([k, d.ratio])
        last = d
    rep.value("limit", last.limit, "closed-form")
    rep.value("limit_exponent_inverted", last.limit_printed, "closed-form")
    rep.value("net_ratio", last.net_ratio, "closed-form+monte-carlo")
    rep.value("net_ratio_gamma", last.net_ratio_exact, "closed-form")
    rep.value(f"ratio_k{ks[-1]}", last.ratio, "closed-form")
    rep.verdict("net_ratio_above_one", bool(last.net_ratio > 1))
    rep.notes.append(f"limit uses (1/2)*9^(1/p') = {last.limit:.6g}; the variant (1/2)*9^(p') "
                     f"would give {last.limit_printed:.6g}")
    rep.table("degree2", ["k", "ratio"], rows)
    rep.plot("degree2", [r[0] for r in rows], [r[1] for r in rows])


def _gram(rep: Report, seed, matrix, rank, restarts):
    if matrix == "a3":
        A = optuple.a3_matrix()
    else:
        A = pnorm.loads_csv(Path(matrix).read_text())
        _require(not np.iscomplexobj(A), "matrix must be real")
    g = grammax.gram_max(A, rank, restarts=restarts, seed=seed)
    s, pattern = grammax.sign_argmax(A)
    rep.value("gram_max", g.value, f"projected-gradient[rank={g.rank},restarts={g.restarts}]")
    rep.value("sign_max", s, "enumeration")
    rep.value("coefficient_l1", np.abs(A).sum(), "exact")
    rep.verdict("sign_below_gram", bool(s <= g.value + 1e-9))
    rep.table("gram-witness", [f"x{j}" for j in range(g.witness.shape[1])], g.witness.tolist())
    rep.table("sign-witness", ["sign"], [[v] for v in pattern])


def _steiner(rep: Report, seed, n, k, t):
    t = k - 1 if t is None else t
    S = steiner.greedy_construct(n, k, t, seed)
    ok, _ = steiner.validate(S)
    rep.count("blocks", len(S))
    rep.verdict("valid", ok)
    if t == k - 1:
        d = steiner.density_report(S)
        rep.value("ratio", d.ratio, "count/(C(n,k)/k)")
        rep.value("packing_ratio", d.packing_ratio, "count/(C(n,k-1)/k)")
    rep.table("blocks", [f"b{i}" for i in range(k)], [list(b) for b in S.blocks])


def _ksz(rep: Report, seed, construction, n, k, draws, budget):
    S = _construct(construction, n, k, seed)
    support = S.multi_indices()
    fails = 0
    rows = []
    for child in np.random.SeedSequence(seed).spawn(draws):
        s = randpoly.ksz_sample(support, seed=int(child.generate_state(1)[0]), budget=budget)
        fails += s.exceeded_first
        rows.append([s.lower, s.bound])
    freq = fails / draws
    bound = randpoly.ksz_failure_probability(S.k, S.n)
    rep.count("draws", draws)
    rep.value("failure_frequency", freq, "first-draw-exceedance")
    rep.value("failure_probability_bound", bound, "closed-form")
    rep.value("ksz_bound", rows[0][1], "closed-form")
    rep.verdict("frequency_within_bound", bool(freq <= bound + 0.01))
    rep.table("ksz", ["sampled_lower", "bound"], rows)


def _fock_qrel(rep: Report, seed, d, qs, N):
    rng = np.random.default_rng(seed)
    rows = []
    worst_rel = worst_tr = 0.0
    for q in qs:
        F = qfock.build_fock(d, q, N)
        e, f = rng.standard_normal(d), rng.standard_normal(d)
        res = qfock.q_relation_check(F, e, f)
        w = [F.field_operator(F.basis_vector(i)) for i in range(d)]
        tr = max(abs(qfock.vacuum_trace(F, w[i] @ w[j]) - float(i == j))
                 for i in range(d) for j in range(d))
        rep.value(f"q_relation_residual_q{q:g}", res, "spectral-norm")
        rep.value(f"trace_residual_q{q:g}", tr, "vacuum-state")
        rep.count(f"dim_q{q:g}", F.dim, "quotient-dimension")
        rows.append([q, F.dim, res, tr])
        worst_rel, worst_tr = max(worst_rel, res), max(worst_tr, tr)
    rep.verdict("q_relation", bool(worst_rel < 1e-10))
    rep.verdict("vacuum_trace", bool(worst_tr < 1e-12))
    rep.table("fock-qrel", ["q", "dim", "relation_residual", "trace_residual"], rows)


def _random_correlation(rng, n):
    X = rng.standard_normal((n, n))
    A = X @ X.T
    s = np.sqrt(np.diag(A))
    A = A / np.outer(s, s)
    A = (A + A.T) / 2
    np.fill_diagonal(A, 1.0)
    return A


def _schur_dilation(rep: Report, seed, size, kmax, lmax):
    _require(1 <= size <= 6, "size must lie in 1..6")
    _require(0 <= kmax <= 3 and 0 <= lmax <= 3, "kmax and lmax must lie in 0..3")
    rng = np.random.default_rng(seed)
    A, B = _random_correlation(rng, size), _random_correlation(rng, size)
    x = rng.standard_normal((size, size))
    model = qfock.dilation_model(A, B)
    rows, worst, worst_ind = [], 0.0, 0.0
    for k in range(kmax + 1):
        for l in range(lmax + 1):
            c = qfock.schur_dilation_check(A, B, k, l, x, model)
            rows.append([k, l, c.residual, c.closed_form_residual])
            worst = max(worst, c.residual, c.closed_form_residual)
            if k >= l:
                worst_ind = max(worst_ind, qfock.induction_check(A, B, k, l, x, model))
    rep.value("dilation_residual", worst, "max-entrywise")
    rep.value("induction_residual", worst_ind, "max-factorwise")
    rep.verdict("dilation_identity", bool(worst < 1e-10))
    rep.verdict("induction_step", bool(worst_ind < 1e-10))
    rep.table("schur-dilation", ["k", "l", "residual", "closed_form_residual"], rows)


def _gaussian_const(rep: Report, seed, p, trials):
    m = randpoly.gaussian_moment(p, trials=trials, seed=seed)
    rep.bracket("moment", m.monte_carlo - 3 * m.std_error, m.monte_carlo + 3 * m.std_error,
                "monte-carlo-3se", "monte-carlo-3se")
    rep.value("moment_estimate", m.monte_carlo, f"monte-carlo[{trials}]")
    rep.value("moment_gamma", m.closed_form_candidates["gamma"], "closed-form")
    rep.value("moment_alternative", m.closed_form_candidates["printed"], "closed-form")
    rep.verdict("gamma_form_consistent", bool(abs(m.discrepancy["gamma"]) < 4))
    rep.verdict("alternative_form_consistent", bool(abs(m.discrepancy["printed"]) < 4))
    rep.notes.append(
        f"closed form 2^(p/2-1)*Gamma(p/2+1)^(1/p) = {m.closed_form_candidates['printed']:.6g} is "
        f"{m.discrepancy['printed']:.1f} standard errors from the estimate {m.monte_carlo:.6g}")


_RUNNERS = {
    "mul-lemma": _mul_lemma,
    "matsaev-check": _matsaev_check,
    "dixon-fano": _dixon_fano,
    "theoremF": _theoremF,
    "degree2": _degree2,
    "gram": _gram,
    "steiner": _steiner,
    "ksz": _ksz,
    "fock-qrel": _fock_qrel,
    "schur-dilation": _schur_dilation,
    "gaussian-const": _gaussian_const,
}
