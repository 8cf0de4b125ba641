"""Seeded verification suites comparing the substitution oracle with closed forms.

A suite expands into an ordered list of cases (exhaustive monomials first,
then seeded random samples).  Each case regenerates its inputs from a
sub-seed derived from (seed, suite, grid point, counter), so serial and
parallel runs see identical data.  A case yields named checks; a failed
check is stored with its encoded inputs and can be replayed.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import codec
from .algebra import Poly, Ring, TLaurent
from .dilatation import as_member, model_for, oracle_charform
from .errors import RamifError, SchemaError
from .forms import (DiffForm, FormSpace, ResidueForm, charform_omega, diagonal_decomposition,
                    omega_conductor, omega_fas_member, pole_membership, restrict_to_curve, xi)
from .witt import (FDecomposedWitt, WittVector, bk_log_member, charform_witt, decomposed_fsat_bound,
                   fsat_conductor, fsat_member, matsuda_member, restrict_to_curve_witt)

REPORT_SCHEMA = "ramif-report/1"
SUITES = ("fas", "charform", "kernel", "witt", "bk", "topforms", "algebra")
SERIES_PREC = 8
CURVE_PREC = 40

DEFAULTS = {
    "fas": {"p": [2, 3, 5], "d": [1, 2], "j": None, "n": [1, 6], "trials": 200, "max_pole": 6, "sweep_pole": 3},
    "charform": {"p": [2, 3, 5], "d": [1, 2], "j": None, "n": [2, 6], "trials": 200, "max_pole": 6,
                 "sweep_pole": 3},
    "kernel": {"p": [2, 3, 5], "d": [1, 2], "j": None, "n": [2, 6], "trials": 200, "max_pole": 6,
               "sweep_pole": 3},
    "topforms": {"p": [2, 3, 5], "d": [1, 2], "j": None, "n": [1, 6], "trials": 100, "max_pole": 6,
                 "sweep_pole": 3},
    "witt": {"p": [2, 3], "witt_length": [1, 2], "r": [1, 5], "trials": 100, "d": 2},
    "bk": {"p": [2, 3], "trials": 50, "witt_length": 2},
    "algebra": {"p": [2, 3], "trials": 100, "witt_length": 3},
}


class ParamError(ValueError):
    pass


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def normalize_params(suite: str, params: dict | None) -> dict:
    if suite not in SUITES:
        raise ParamError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    out = json.loads(json.dumps(DEFAULTS[suite]))
    for k, v in (params or {}).items():
        if k not in out:
            raise ParamError(f"suite {suite} has no parameter {k!r}")
        out[k] = v
    for k in ("p", "d", "witt_length"):
        if k in out:
            if isinstance(DEFAULTS[suite][k], list):
                out[k] = sorted(set(int(x) for x in _as_list(out[k])))
            else:
                out[k] = max(int(x) for x in _as_list(out[k]))
    if "j" in out and out["j"] is not None:
        out["j"] = sorted(set(int(x) for x in _as_list(out["j"])))
    for p in out["p"]:
        if p not in (2, 3, 5):
            raise ParamError(f"characteristic {p} not supported (use 2, 3 or 5)")
    for d in _as_list(out.get("d", [1])):
        if d not in (1, 2):
            raise ParamError(f"dimension {d} not supported (use 1 or 2)")
    for key in ("n", "r"):
        if key in out:
            bounds = _as_list(out[key])
            if len(bounds) == 1:
                bounds = bounds * 2
            if len(bounds) != 2:
                raise ParamError(f"{key} must be a level or a [low, high] pair")
            lo, hi = (int(x) for x in bounds)
            if not 1 <= lo <= hi <= 6:
                raise ParamError(f"{key} range [{lo}, {hi}] outside [1, 6]")
            out[key] = [lo, hi]
    for w in _as_list(out.get("witt_length", 1)):
        if not 1 <= w <= 3:
            raise ParamError(f"Witt length {w} outside [1, 3]")
    if out.get("max_pole", 6) > 6 or out.get("max_pole", 6) < 0:
        raise ParamError("pole bound must lie in [0, 6]")
    if int(out["trials"]) < 0:
        raise ParamError("trials must be >= 0")
    out["trials"] = int(out["trials"])
    return out


def _rng(seed, *labels) -> random.Random:
    return random.Random("/".join(str(x) for x in (seed,) + labels))


# -- samplers --------------------------------------------------------------------------------

def base_space(p, d) -> FormSpace:
    return FormSpace.base(p, d)


def _coef(rng, p):
    if p == 0:
        return rng.choice((-3, -2, -1, 1, 2, 3))
    return rng.randint(1, p - 1)


def random_series(rng, ring, lo=-6, hi=3, max_terms=4, prec=SERIES_PREC):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        e = rng.randint(lo, hi)
        exps = tuple(rng.randint(0, 3) for _ in range(ring.nvars))
        terms.setdefault(e, {})
        terms[e][exps] = terms[e].get(exps, 0) + _coef(rng, ring.char)
    return TLaurent(ring, {e: Poly(ring, m) for e, m in terms.items()}, prec)


def random_form(rng, space, j, max_pole=6, max_terms=4):
    subsets = list(itertools.combinations(range(space.dim), j))
    acc = DiffForm(space, j)
    ring = space.ring
    for _ in range(rng.randint(1, max_terms)):
        k = rng.choice(subsets)
        e = rng.randint(-max_pole, 3)
        exps = tuple(rng.randint(0, 3) for _ in range(ring.nvars))
        c = TLaurent(ring, {e: Poly(ring, {exps: _coef(rng, ring.char)})}, SERIES_PREC)
        acc = acc + DiffForm(space, j, {k: c})
    return acc


def sweep_forms(space, j, pole):
    """Every basis monomial x^a t^e dz_K with -pole <= e <= 0."""
    ring = space.ring
    p = ring.char
    xexps = sorted({0, 1, 2, p}) if ring.nvars else [0]
    out = []
    for k in itertools.combinations(range(space.dim), j):
        for e in range(-pole, 1):
            for a in itertools.product(xexps, repeat=ring.nvars):
                c = TLaurent(ring, {e: Poly(ring, {a: 1})}, SERIES_PREC)
                out.append(DiffForm(space, j, {k: c}))
    return out


def _non_power_monomial(rng, ring, e_lo, e_hi):
    p = ring.char
    while True:
        e = rng.randint(e_lo, e_hi)
        exps = tuple(rng.randint(0, 2) for _ in range(ring.nvars))
        if e % p or any(x % p for x in exps):
            return e, exps


def random_decomposition(rng, p, wl, ring, pole_cap=6):
    """sum_j F^j(beta_j) with one non-p-th-power monomial per component."""
    parts = {}
    js = [0] + ([1] if rng.random() < 0.5 else [])
    for j in js:
        comps = []
        for i in range(wl):
            weight = p ** (wl - 1 - i)
            cap = min(pole_cap // (weight * p ** j), pole_cap // p ** j)
            if cap < 1 or rng.random() < 0.3:
                comps.append(TLaurent.zero(ring, CURVE_PREC))
                continue
            e, exps = _non_power_monomial(rng, ring, -cap, -1)
            comps.append(TLaurent(ring, {e: Poly(ring, {exps: _coef(rng, p)})}, CURVE_PREC))
        if all(c.is_zero() for c in comps):
            e, exps = _non_power_monomial(rng, ring, -max(1, pole_cap // p ** (j + wl - 1)), -1)
            comps[-1] = TLaurent(ring, {e: Poly(ring, {exps: _coef(rng, p)})}, CURVE_PREC)
        parts[j] = WittVector(p, comps)
    return FDecomposedWitt(parts)


def random_witt(rng, p, wl, ring, lo=-4, hi=2, prec=80):
    return WittVector(p, [random_series(rng, ring, lo, hi, 3, prec) for _ in range(wl)])


def random_curve(rng, p, max_deg=3):
    ring = Ring(p, ())
    terms = {}
    for _ in range(rng.randint(1, 2)):
        terms[rng.randint(1, max_deg)] = _coef(rng, p)
    return TLaurent(ring, terms, CURVE_PREC)


def random_residue(rng, ring, j, max_terms=3):
    subsets = list(itertools.combinations(range(ring.nvars), j))
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        k = rng.choice(subsets)
        exps = tuple(rng.randint(0, 3) for _ in range(ring.nvars))
        terms[k] = terms.get(k, Poly.zero(ring)) + Poly(ring, {exps: _coef(rng, ring.char)})
    return ResidueForm(ring, j, terms)


# -- checks ------------------------------------------------------------------------------------

def _cf_json(cf, ring):
    return codec.encode(cf, ring)["value"]


def _chk_fas(args, inp):
    w = inp["omega"]
    n, p = args["n"], args["p"]
    o = as_member(model_for(w, n), w)
    c = omega_fas_member(w, n, p)
    return o == c, {"oracle": o, "closed": c}


def _chk_charform(args, inp):
    w = inp["omega"]
    n, p = args["n"], args["p"]
    ring = w.space.ring
    o = oracle_charform(model_for(w, n), w)
    c = charform_omega(w, n, p)
    return o == c, {"oracle": _cf_json(o, ring), "closed": _cf_json(c, ring)}


def _chk_kernel_closed(args, inp):
    w = inp["omega"]
    n, p = args["n"], args["p"]
    zero = charform_omega(w, n, p).is_zero()
    lower = omega_fas_member(w, n - 1, p)
    return zero == lower, {"charform_zero": zero, "member_below": lower}


def _chk_kernel_oracle(args, inp):
    w = inp["omega"]
    n = args["n"]
    zero = oracle_charform(model_for(w, n), w).is_zero()
    lower = as_member(model_for(w, n - 1), w)
    return zero == lower, {"charform_zero": zero, "member_below": lower}


def _chk_topforms(args, inp):
    w = inp["omega"]
    n = args["n"]
    plain = pole_membership(w, n, "plain")
    log = pole_membership(w, n, "log")
    o = as_member(model_for(w, n), w)
    return plain == log == o, {"plain": plain, "log": log, "oracle": o}


def _chk_witt_member(args, inp):
    x = inp["decomposition"]
    r = args["r"]
    a = x.recombine()
    o = fsat_member(a, r)
    bound = decomposed_fsat_bound(x)
    c = r >= bound
    return o == c, {"oracle": o, "closed": c, "bound": bound}


def _chk_witt_charform(args, inp):
    x = inp["decomposition"]
    r = args["r"]
    a = x.recombine()
    o = oracle_charform(model_for(a, r), a)
    c = charform_witt(x, r)
    return o == c, {"oracle": _cf_json(o, a.ring), "closed": _cf_json(c, a.ring)}


def _chk_bk_omega(args, inp):
    w, phi, phi2 = inp["omega"], inp["phi"], inp["phi2"]
    p = args["p"]
    v = w.space.coords[1]
    c1 = omega_conductor(restrict_to_curve(w, {v: phi}), p)
    c2 = omega_conductor(restrict_to_curve(w, {v: phi2}), p)
    return c1 == c2, {"conductor_1": c1, "conductor_2": c2}


def _chk_bk_witt(args, inp):
    a, phi, phi2 = inp["witt"], inp["phi"], inp["phi2"]
    v = a.ring.variables[0]
    c1 = fsat_conductor(restrict_to_curve_witt(a, {v: phi}))
    c2 = fsat_conductor(restrict_to_curve_witt(a, {v: phi2}))
    return c1 == c2, {"conductor_1": c1, "conductor_2": c2}


def _chk_ghost(args, inp):
    a, b = inp["a"], inp["b"]
    ga, gb = a.ghost(), b.ghost()
    ok = True
    for op, res in (("add", a + b), ("sub", a - b), ("mul", a * b)):
        gr = res.ghost()
        for x, y, z in zip(ga, gb, gr):
            want = x + y if op == "add" else x - y if op == "sub" else x * y
            ok = ok and want.agrees_with(z)
    return ok, {"ok": ok}


def _chk_fv(args, inp):
    a = inp["a"]
    lhs = a.verschiebung().frobenius()
    rhs = a.times(a.p)
    ok = lhs.agrees_with(rhs)
    return ok, {"ok": ok}


def _chk_vfab(args, inp):
    a, b = inp["a"], inp["b"]
    lhs = (a.frobenius() * b).verschiebung()
    rhs = a * b.verschiebung()
    ok = lhs.agrees_with(rhs)
    return ok, {"ok": ok}


def _chk_witt_laws(args, inp):
    a, b, c = inp["a"], inp["b"], inp["c"]
    z = WittVector.zero(a.p, a.n, a.ring, a.prec)
    ok = ((a + z).agrees_with(a) and (a + b).agrees_with(b + a)
          and ((a + b) + c).agrees_with(a + (b + c)) and (a - a).agrees_with(z))
    return ok, {"ok": ok}


def _chk_ring_axioms(args, inp):
    a, b, c = inp["a"], inp["b"], inp["c"]
    ok = ((a * b).agrees_with(b * a) and ((a * b) * c).agrees_with(a * (b * c))
          and (a * (b + c)).agrees_with(a * b + a * c))
    if a and b:
        ok = ok and (a * b).valuation() == a.valuation() + b.valuation()
    fa = a.frobenius_power(1)
    ok = ok and (a * b).frobenius_power(1).agrees_with(fa * b.frobenius_power(1))
    root = fa.pth_root()
    ok = ok and root is not None and root.agrees_with(a)
    return ok, {"ok": ok}


def _chk_dd(args, inp):
    w = inp["omega"]
    ok = w.d().d().is_zero()
    return ok, {"ok": ok}


def _chk_xi(args, inp):
    beta, alpha = inp["beta"], inp["alpha"]
    h = xi(beta, alpha, beta.degree)
    ok = h.is_zero() == (beta.is_zero() and alpha.is_zero())
    return ok, {"xi_zero": h.is_zero(), "input_zero": beta.is_zero() and alpha.is_zero()}


def diagonal_oracle(beta: ResidueForm):
    """gamma, delta read off q2*beta - q1*beta in k[x, theta] modulo J^2 (J = (theta, dtheta))."""
    ring = beta.ring
    xs = ring.variables
    ths = tuple("th_" + v for v in xs)
    big = Ring(ring.char, xs + ths)
    m = len(xs)
    images = {v: Poly.variable(big, v) + Poly.variable(big, th) for v, th in zip(xs, ths)}
    one_forms = {i: ResidueForm(big, 1, {(i,): 1, (m + i,): 1}) for i in range(m)}
    acc = ResidueForm.zero(big, beta.degree)
    for k, f in beta.terms.items():
        g = Poly.zero(big)
        for exps, c in f.terms().items():
            term = Poly.constant(big, c)
            for v, e in zip(xs, exps):
                term = term * images[v] ** e
            g = g + term
        form = ResidueForm(big, 0, {(): g})
        for i in k:
            form = form.wedge(one_forms[i])
        acc = acc + form
    acc = acc - ResidueForm(big, beta.degree, {k: f.embed(big) for k, f in beta.terms.items()})
    gam = {v: ResidueForm.zero(ring, beta.degree - 1) for v in xs}
    dlt = {v: ResidueForm.zero(ring, beta.degree) for v in xs}
    for k, f in acc.terms.items():
        dth = [i - m for i in k if i >= m]
        rest = tuple(i for i in k if i < m)
        for exps, c in f.terms().items():
            th_deg = exps[m:]
            low = Poly(ring, {exps[:m]: c})
            if len(dth) == 1 and not any(th_deg):
                gam[xs[dth[0]]] = gam[xs[dth[0]]] + ResidueForm(ring, beta.degree - 1, {rest: low})
            elif not dth and sum(th_deg) == 1:
                i = th_deg.index(1)
                dlt[xs[i]] = dlt[xs[i]] + ResidueForm(ring, beta.degree, {rest: low})
    return gam, dlt


def _chk_nonvan(args, inp):
    beta = inp["beta"]
    gam, dlt = diagonal_decomposition(beta)
    og, od = diagonal_oracle(beta)
    ok = gam == og and dlt == od
    ok = ok and (all(g.is_zero() for g in gam.values()) == beta.is_zero())
    return ok, {"ok": ok}


def _chk_sandwich(args, inp):
    a = inp["a"]
    r = args["r"]
    lo = bk_log_member(a, r - 1)
    mid = matsuda_member(a, r)
    hi = bk_log_member(a, r)
    ok = (not lo or mid) and (not mid or hi)
    return ok, {"bk_below": lo, "matsuda": mid, "bk": hi}


def _chk_monotone(args, inp):
    w = inp["omega"]
    seq = [as_member(model_for(w, n), w) for n in range(1, 7)]
    ok = all(not seq[i] or seq[i + 1] for i in range(len(seq) - 1))
    return ok, {"members": seq}


def _chk_precision(args, inp):
    """Same answers at the policy precision and five more."""
    a = inp["value"]
    n = args["n"]
    ring = a.space.ring if isinstance(a, DiffForm) else a.ring
    N = model_for(a, n).precision
    outs = []
    for prec in (N, N + 5):
        model = model_for(a, n, prec)
        mem = as_member(model, a)
        cf = _cf_json(oracle_charform(model, a), ring) if mem and n >= 2 else None
        outs.append({"member": mem, "charform": cf})
    return outs[0] == outs[1], {"N": outs[0], "N+5": outs[1]}


CHECKS = {
    "fas": _chk_fas, "charform": _chk_charform, "kernel-closed": _chk_kernel_closed,
    "kernel-oracle": _chk_kernel_oracle, "topforms": _chk_topforms, "witt-member": _chk_witt_member,
    "witt-charform": _chk_witt_charform, "bk-omega": _chk_bk_omega, "bk-witt": _chk_bk_witt,
    "ghost": _chk_ghost, "fv": _chk_fv, "vfab": _chk_vfab, "witt-laws": _chk_witt_laws,
    "ring-axioms": _chk_ring_axioms, "dd": _chk_dd, "xi": _chk_xi, "nonvan": _chk_nonvan,
    "sandwich": _chk_sandwich, "monotone": _chk_monotone, "precision": _chk_precision,
}


def evaluate(name, args, inputs):
    try:
        return CHECKS[name](args, inputs)
    except (RamifError, ValueError, ArithmeticError, AssertionError) as e:
        return False, {"error": f"{type(e).__name__}: {e}"}


# -- case generation ------------------------------------------------------------------------------

def _form_grid(params, fixed_top=False):
    for p in params["p"]:
        for d in params["d"]:
            js = [d] if fixed_top else (params["j"] or list(range(1, d + 1)))
            if fixed_top and params["j"] and d not in params["j"]:
                continue
            for j in js:
                if 1 <= j <= d:
                    yield p, d, j


def case_list(suite, params):
    """Light descriptors; inputs are rebuilt from them inside the worker."""
    out = []
    if suite in ("fas", "charform", "kernel", "topforms"):
        for p, d, j in _form_grid(params, suite == "topforms"):
            nsweep = len(sweep_forms(base_space(p, d), j, params["sweep_pole"]))
            out += [(p, d, j, "sweep", i) for i in range(nsweep)]
            out += [(p, d, j, "random", i) for i in range(params["trials"])]
    elif suite == "witt":
        for p in params["p"]:
            for wl in params["witt_length"]:
                out += [(p, wl, i) for i in range(params["trials"])]
    else:
        for p in params["p"]:
            out += [(p, i) for i in range(params["trials"])]
    return out


def _enc_inputs(inputs):
    out = {}
    for k, v in inputs.items():
        out[k] = codec.encode(v)
    return out


def _dec_inputs(doc):
    return {k: codec.decode(v) for k, v in doc.items()}


def run_case(suite, params, seed, desc):
    """Run every check of one case; returns [(case id, check, args, ok, outputs, inputs)]."""
    checks = []
    if suite in ("fas", "charform", "kernel", "topforms"):
        p, d, j, kind, i = desc
        sp = base_space(p, d)
        if kind == "sweep":
            w = sweep_forms(sp, j, params["sweep_pole"])[i]
        else:
            w = random_form(_rng(seed, suite, p, d, j, i), sp, j, params["max_pole"])
        lo, hi = params["n"]
        inputs = {"omega": w}
        for n in range(lo, hi + 1):
            args = {"n": n, "p": p}
            if suite == "fas":
                checks.append(("fas", args))
            elif suite == "topforms":
                checks.append(("topforms", args))
            elif n >= 2 and omega_fas_member(w, n, p):
                if suite == "charform":
                    checks.append(("charform", args))
                else:
                    checks.append(("kernel-closed", args))
                    checks.append(("kernel-oracle", args))
        cid = f"{p}/{d}/{j}/{kind}/{i}"
    elif suite == "witt":
        p, wl, i = desc
        ring = Ring(p, tuple(f"x{k}" for k in range(1, params["d"])))
        x = random_decomposition(_rng(seed, suite, p, wl, i), p, wl, ring)
        inputs = {"decomposition": x}
        lo, hi = params["r"]
        bound = decomposed_fsat_bound(x)
        for r in range(lo, hi + 1):
            checks.append(("witt-member", {"r": r}))
            if r >= 2 and r >= bound:
                checks.append(("witt-charform", {"r": r}))
        cid = f"{p}/{wl}/{i}"
    elif suite == "bk":
        p, i = desc
        rng = _rng(seed, suite, p, i)
        phi = random_curve(rng, p)
        pert = _coef(rng, p)
        if i % 2 == 0:
            sp = base_space(p, 2)
            w = random_form(rng, sp, 1, 6)
            c = omega_conductor(w, p)
            m = max(c, 1) + rng.randint(0, 2)
            phi2 = phi + TLaurent(phi.ring, {m: pert}, CURVE_PREC)
            inputs = {"omega": w, "phi": phi, "phi2": phi2}
            checks.append(("bk-omega", {"p": p, "m": m, "conductor": c}))
        else:
            ring = Ring(p, ("x1",))
            wl = rng.randint(1, params["witt_length"])
            a = random_witt(rng, p, wl, ring, -3, 1, CURVE_PREC)
            c = fsat_conductor(a)
            m = max(c, 1) + rng.randint(0, 2)
            phi2 = phi + TLaurent(phi.ring, {m: pert}, CURVE_PREC)
            inputs = {"witt": a, "phi": phi, "phi2": phi2}
            checks.append(("bk-witt", {"p": p, "m": m, "conductor": c}))
        cid = f"{p}/{i}"
    else:
        p, i = desc
        rng = _rng(seed, suite, p, i)
        checks, inputs = [], {}
        results = []
        wl = rng.randint(1, params["witt_length"])
        q = Ring(0, ("x1",))
        groups = [
            ("ghost", {"p": p, "n": wl}, {"a": random_witt(rng, p, wl, q, -2, 2), "b": random_witt(rng, p, wl, q, -2, 2)}),
        ]
        rp = Ring(p, ("x1",))
        groups.append(("fv", {}, {"a": random_witt(rng, p, wl, rp)}))
        groups.append(("vfab", {}, {"a": random_witt(rng, p, wl, rp, -2, 2, 400), "b": random_witt(rng, p, wl, rp, -2, 2, 400)}))
        groups.append(("witt-laws", {}, {k: random_witt(rng, p, wl, rp) for k in "abc"}))
        groups.append(("ring-axioms", {}, {k: random_series(rng, rp, prec=80) for k in "abc"}))
        sp = base_space(p, 2)
        groups.append(("dd", {}, {"omega": random_form(rng, sp, rng.randint(0, 1))}))
        r2 = Ring(p, ("x1", "x2"))
        jj = rng.randint(1, 2)
        groups.append(("xi", {}, {"beta": random_residue(rng, r2, jj), "alpha": random_residue(rng, r2, jj - 1)}))
        groups.append(("nonvan", {}, {"beta": random_residue(rng, r2, jj)}))
        groups.append(("sandwich", {"r": rng.randint(1, 8)}, {"a": random_witt(rng, p, wl, rp)}))
        groups.append(("monotone", {}, {"omega": random_form(rng, sp, rng.randint(1, 2))}))
        for name, args, inp in groups:
            ok, outs = evaluate(name, args, inp)
            results.append((f"{p}/{i}", name, args, ok, outs, None if ok else _enc_inputs(inp)))
        return results
    results = []
    for name, args in checks:
        ok, outs = evaluate(name, args, inputs)
        results.append((cid, name, args, ok, outs, None if ok else _enc_inputs(inputs)))
    return results


# -- reports --------------------------------------------------------------------------------------

@dataclass
class SuiteReport:
    suite: str
    params: dict
    seed: int
    attempted: int = 0
    passed: int = 0
    failures: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    controls: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.attempted == self.passed

    def to_dict(self, include_timing=False) -> dict:
        d = {"schema": REPORT_SCHEMA, "suite": self.suite, "params": self.params, "seed": self.seed,
             "attempted": self.attempted, "passed": self.passed, "failures": self.failures,
             "counts": self.counts, "controls": self.controls}
        if include_timing:
            d["wall_time_ms"] = int(self.wall_time * 1000)
        return d

    def to_json(self, include_timing=False) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SuiteReport":
        d = json.loads(text)
        required = {"schema", "suite", "params", "seed", "attempted", "passed", "failures", "counts", "controls"}
        extra = set(d) - required - {"wall_time_ms"}
        if set(d) & required != required or extra:
            raise SchemaError("report fields do not match the schema")
        if d["schema"] != REPORT_SCHEMA:
            raise SchemaError(f"report schema {d['schema']!r} is not {REPORT_SCHEMA!r}")
        if d["passed"] + len(d["failures"]) != d["attempted"]:
            raise SchemaError("passed + failures != attempted")
        return cls(d["suite"], d["params"], d["seed"], d["attempted"], d["passed"], d["failures"],
                   d["counts"], d["controls"], d.get("wall_time_ms", 0) / 1000)


def precision_spot_checks(seed: int = 0, count: int = 50) -> SuiteReport:
    """Oracle answers at precision N and N+5 on seeded forms and Witt vectors."""
    report = SuiteReport("precision", {"count": count}, seed)
    for i in range(count):
        rng = _rng(seed, "precision", i)
        p = rng.choice((2, 3, 5))
        if i % 2 == 0:
            d = rng.randint(1, 2)
            value = random_form(rng, base_space(p, d), rng.randint(1, d))
            n = rng.randint(1, 6)
        else:
            p = rng.choice((2, 3))
            ring = Ring(p, ("x1",))
            value = random_decomposition(rng, p, rng.randint(1, 2), ring).recombine()
            n = rng.randint(1, 5)
        ok, outs = evaluate("precision", {"n": n}, {"value": value})
        report.attempted += 1
        report.counts["precision"] = report.attempted
        if ok:
            report.passed += 1
        else:
            report.failures.append({"case": str(i), "check": "precision", "args": {"n": n},
                                    "outputs": outs, "inputs": _enc_inputs({"value": value})})
    return report


def _bk_controls(suite, params, seed, cases):
    """Contact order one below the conductor: counted, never asserted."""
    same = differ = 0
    for p, i in cases:
        rng = _rng(seed, "bk-control", p, i)
        phi = random_curve(rng, p)
        sp = base_space(p, 2)
        w = random_form(rng, sp, 1, 6)
        c = omega_conductor(w, p)
        if c < 2:
            continue
        phi2 = phi + TLaurent(phi.ring, {c - 1: _coef(rng, p)}, CURVE_PREC)
        ok, _ = evaluate("bk-omega", {"p": p}, {"omega": w, "phi": phi, "phi2": phi2})
        if ok:
            same += 1
        else:
            differ += 1
    return {"contact_below_conductor": {"equal": same, "different": differ}}


def _worker(job):
    suite, params, seed, desc = job
    return run_case(suite, params, seed, desc)


def run_suite(suite: str, params: dict | None = None, seed: int = 0, workers: int = 1) -> SuiteReport:
    params = normalize_params(suite, params)
    start = time.perf_counter()
    cases = case_list(suite, params)
    jobs = [(suite, params, seed, tuple(c)) for c in cases]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_worker, jobs, chunksize=max(1, len(jobs) // (workers * 8))))
    else:
        chunks = [_worker(j) for j in jobs]
    report = SuiteReport(suite, params, seed)
    for chunk in chunks:
        for cid, name, args, ok, outs, inputs in chunk:
            report.attempted += 1
            report.counts[name] = report.counts.get(name, 0) + 1
            if ok:
                report.passed += 1
            else:
                report.failures.append({"case": cid, "check": name, "args": args,
                                        "outputs": outs, "inputs": inputs})
    if suite == "bk":
        report.controls = _bk_controls(suite, params, seed, [c for c in cases if c[1] % 2 == 0])
    report.wall_time = time.perf_counter() - start
    return report


def replay(report: SuiteReport) -> list:
    """Re-run each recorded failure; True where the recorded outputs reappear."""
    out = []
    for f in report.failures:
        ok, outs = evaluate(f["check"], f["args"], _dec_inputs(f["inputs"]))
        out.append(not ok and json.loads(json.dumps(outs)) == f["outputs"])
    return out
