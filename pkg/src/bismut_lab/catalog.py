"""Named example structures and metrics with the properties expected of them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coordinate import CoordinateMetric
from .structure import LieHermitianStructure, from_keyed

SQRT2 = math.sqrt(2)


class ParamError(ValueError):
    """Unknown parameter or a value of the wrong kind."""


class ConstraintError(ValueError):
    """Parameters of the right kind that violate a family constraint."""


@dataclass(frozen=True)
class Param:
    name: str
    kind: str  # real | complex | sign | int | matrix
    default: object = None
    doc: str = ""

    def coerce(self, value):
        if self.kind == "int":
            if isinstance(value, bool) or int(value) != value:
                raise ParamError(f"{self.name} must be an integer")
            return int(value)
        if self.kind == "sign":
            if value not in (1, -1):
                raise ParamError(f"{self.name} must be +1 or -1")
            return int(value)
        if self.kind == "real":
            z = to_complex(value)
            if z.imag != 0:
                raise ParamError(f"{self.name} must be real")
            return z.real
        if self.kind == "complex":
            return to_complex(value)
        if self.kind == "matrix":
            rows = [[to_complex(x) for x in row] for row in value]
            if not rows or any(len(r) != len(rows[0]) for r in rows):
                raise ParamError(f"{self.name} must be a non-empty rectangular matrix")
            return rows
        raise ParamError(f"unknown parameter kind {self.kind!r}")


def to_complex(value) -> complex:
    """Accepts a number or an [re, im] pair."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ParamError("complex values are encoded as [re, im]")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, bool) or not isinstance(value, (int, float, complex, np.number)):
        raise ParamError(f"not a number: {value!r}")
    return complex(value)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str  # lie_hermitian | coordinate
    description: str
    params: tuple
    builder: object
    manifest: object  # params -> dict of expected flags and values
    metadata: dict = field(default_factory=dict)

    def resolve(self, params):
        known = {p.name: p for p in self.params}
        unknown = set(params) - set(known)
        if unknown:
            raise ParamError(f"unknown parameter(s) for {self.name}: {', '.join(sorted(unknown))}")
        out = {}
        for p in self.params:
            out[p.name] = p.coerce(params[p.name]) if p.name in params else p.default
        return out

    def build(self, **params):
        return self.builder(**self.resolve(params))

    def expected(self, **params):
        return self.manifest(**self.resolve(params))

    def schema(self):
        def encode(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            if isinstance(v, list):
                return [[encode(x) for x in row] for row in v]
            return v

        return {
            "name": self.name,
            "kind": self.kind,
            "description": self.description,
            "params": [{"name": p.name, "kind": p.kind, "default": encode(p.default), "doc": p.doc}
                       for p in self.params],
            **({"metadata": self.metadata} if self.metadata else {}),
        }


def _drop_zeros(d):
    return {i: {k: c for k, c in terms.items() if c != 0} for i, terms in d.items()}


def _keyed(n, d):
    return from_keyed(n, _drop_zeros(d))


# Lie-Hermitian builders


def abelian(n):
    if n < 2:
        raise ConstraintError("n must be at least 2")
    return LieHermitianStructure.from_matrices(np.zeros((n, 2 * n, 2 * n)))


def nilmanifold(Y):
    """dφ_i = 0 for i ≤ r, dφ_α = Σ_i Y_{αi} φ_i∧φ̄_i for α > r; Y has n − r rows and r columns."""
    r = len(Y[0])
    n = r + len(Y)
    d = {r + a + 1: {f"{i + 1}*{i + 1}b": Y[a][i] for i in range(r)} for a in range(len(Y))}
    return _keyed(n, d)


def nil3(a, b):
    return nilmanifold([[a, b]])


def n3():
    return nil3(1, -1)


def so3c():
    return _keyed(3, {1: {"2*3": 1}, 2: {"3*1": 1}, 3: {"1*2": 1}})


def family_A(a, b):
    return _keyed(3, {
        1: {"1*3": a, "1*3b": -a},
        2: {"2*3": b, "2*3b": -b},
        3: {"2*2b": 1j, "1*1b": -1j},
    })


# the coframe change φ' = Uφ taking A_{0,0} to N3
A00_TO_N3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1j))


def family_B_constraint_residual(eps, u, v, w):
    lhs = w - w.conjugate()
    rhs = eps * 1j * (abs(u - v) ** 2 - abs(u + v) ** 2)
    return abs(lhs - rhs)


def family_B(eps, u, v, w):
    res = family_B_constraint_residual(eps, u, v, w)
    if res > 1e-12 * max(1.0, abs(u) ** 2 + abs(v) ** 2 + abs(w)):
        raise ConstraintError(
            f"constraint w - conj(w) = eps*i*(|u-v|^2 - |u+v|^2) violated (residual {res:.3g})"
        )
    return _keyed(3, {
        1: {"1*2": SQRT2 * v, "1*2b": -SQRT2 * v.conjugate(), "1*3": w, "1*3b": -w.conjugate()},
        2: {"2*2b": -SQRT2 * u.conjugate()},
        3: {"2*2b": eps * 1j, "1*1b": -eps * 1j},
    })


def family_C(u, v):
    return _keyed(3, {
        1: {"1*1b": u, "2*2b": u, "2*1b": v, "1*2b": -v},
        2: {"1*1b": -v, "2*2b": -v, "2*1b": u, "1*2b": -u},
        3: {"2*1b": 1, "1*2b": -1},
    })


def family_D(u, rho, eps):
    if abs(abs(rho) - 1) > 1e-12:
        raise ConstraintError(f"|rho| = 1 violated (|rho| = {abs(rho):.6g})")
    e = eps * 1j
    ub, rb = u.conjugate(), rho.conjugate()
    return _keyed(3, {
        1: {"1*2": ub * (1 + rho * e), "1*1b": -u * rb, "2*2b": u * e, "2*1b": -u, "1*2b": u * rb * e},
        2: {"1*2": ub * e * (1 + rho * e), "1*1b": u, "2*2b": u * rb * e, "2*1b": -u * rb, "1*2b": -u * e},
        3: {"2*1b": 1, "1*2b": -1},
    })


# coordinate metrics

WALLACH_PARTS = {
    "alpha": "1 + z1*zb1 + z2*zb2",
    "beta": "1 + z3*zb3 + (z2 + z1*z3)*(zb2 + zb1*zb3)",
    "f": "z2 + z1*z3",
    "sigma": "(v_i conj(v_j))/(alpha*beta) with v = (z3, 1, 0)",
}


def wallach_components():
    """g_{i j̄} = α_{ij̄}/α − α_iα_j̄/α² + β_{ij̄}/β − β_iβ_j̄/β² − σ_{i j̄}, written out."""
    A = f"({WALLACH_PARTS['alpha']})"
    B = f"({WALLACH_PARTS['beta']})"
    f, fb = "(z2 + z1*z3)", "(zb2 + zb1*zb3)"
    a_d = ["zb1", "zb2", "0"]  # ∂_i α
    a_db = ["z1", "z2", "0"]
    f_d = ["z3", "1", "z1"]  # ∂_i f
    b_d = [f"z3*{fb}", fb, f"zb3 + z1*{fb}"]  # ∂_i β
    b_db = [f"zb3*{f}", f, f"z3 + zb1*{f}"]
    v, vb = ["z3", "1", "0"], ["zb3", "1", "0"]
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            a_ij = "1" if i == j and i < 2 else "0"
            b_ij = f"{f_d[i]}*conj({f_d[j]})" + (" + 1" if i == j == 2 else "")
            row.append(
                f"{a_ij}/{A} - ({a_d[i]})*({a_db[j]})/({A}*{A})"
                f" + ({b_ij})/{B} - ({b_d[i]})*({b_db[j]})/({B}*{B})"
                f" - ({v[i]})*({vb[j]})/({A}*{B})"
            )
        rows.append(row)
    return rows


def wallach():
    return CoordinateMetric.from_components(wallach_components(), (0, 0, 0))


def hopf(n, lam):
    if n < 2:
        raise ConstraintError("n must be at least 2")
    if lam == 0 or abs(abs(lam) - 1) < 1e-12:
        raise ConstraintError("the deck transformation needs |lambda| != 0, 1")
    r2 = "(" + " + ".join(f"z{k}*zb{k}" for k in range(1, n + 1)) + ")"
    comps = [[f"1/{r2}" if i == j else "0" for j in range(n)] for i in range(n)]
    return CoordinateMetric.from_components(comps, [1] + [0] * (n - 1))


def fubini_study(n):
    s = "(1 + " + " + ".join(f"z{k}*zb{k}" for k in range(1, n + 1)) + ")"
    comps = [[(f"1/{s} - " if i == j else "0 - ") + f"zb{i + 1}*z{j + 1}/({s}*{s})" for j in range(n)]
             for i in range(n)]
    return CoordinateMetric.from_components(comps)


def euclidean(n):
    return CoordinateMetric.from_components([["1" if i == j else "0" for j in range(n)] for i in range(n)])


# expected properties

_KAHLER_LIE = {"kahler": True, "balanced": True, "gauduchon": True, "pluriclosed": True,
               "btp_direct": True, "btp_theorem": True, "bkl": True}


def _abelian_manifest(n):
    out = dict(_KAHLER_LIE)
    if n == 3:
        out["label"] = "kahler"
    return out


def _nil_manifest(Y):
    flat = [x for row in Y for x in row]
    if all(x == 0 for x in flat):
        return dict(_KAHLER_LIE)
    return {
        "kahler": False,
        "btp_direct": True,
        "btp_theorem": True,
        "balanced": all(abs(sum(row)) < 1e-12 for row in Y),
    }


def _nil3_manifest(a, b):
    out = _nil_manifest([[a, b]])
    if a == 0 and b == 0:
        out["label"] = "kahler"
        return out
    p = a * b.conjugate()
    out["bkl"] = abs(p.real) < 1e-12
    if out["balanced"]:
        out["rank_B"] = 2
        out["label"] = "middle type (rank 2)"
    elif out["bkl"]:
        out["label"] = "BKL"
    elif abs(p.imag) < 1e-12:
        out["label"] = "generalized-vaisman"
        if a == b:
            out["refinement"] = "vaisman"
    else:
        out["label"] = "eigenvalue branch (1)"
    return out


def _middle(x=None, y=None):
    out = {"kahler": False, "balanced": True, "btp_direct": True, "btp_theorem": True,
           "rank_B": 2, "label": "middle type (rank 2)"}
    if x is not None:
        out["middle_type"] = {"x": x, "y": y}
    return out


def _n3_manifest():
    out = _middle(0.0, 0.0)
    out["bkl"] = False
    out["special_a"] = [0.5, 0.5, 0.0]
    return out


def _so3c_manifest():
    return {"kahler": False, "balanced": True, "btp_direct": True, "btp_theorem": True, "bkl": False,
            "chern_flat": True, "rank_B": 3, "label": "chern-flat SO(3,ℂ)-type (rank 3)",
            "special_a": [0.5, 0.5, 0.5]}


def _family_B_manifest(eps, u, v, w):
    if u == 0 and v == 0 and w == 0:
        return _n3_manifest()
    return _middle(0.5 * (abs(v) ** 2 - abs(u) ** 2 - abs(u + v) ** 2), None)


def _family_C_manifest(u, v):
    return _middle(-2 * abs(u) ** 2 - 2 * abs(v) ** 2, 4 * (u * v.conjugate()).imag)


def _family_D_manifest(u, rho, eps):
    return _middle(-2 * abs(u) ** 2 * (1 + eps * rho.imag), None)


ENTRIES = {}


def _register(entry):
    ENTRIES[entry.name] = entry


_register(CatalogEntry("abelian", "lie_hermitian", "flat torus: all structure constants zero",
                       (Param("n", "int", 3, "complex dimension"),), abelian, _abelian_manifest))
_register(CatalogEntry(
    "nilmanifold", "lie_hermitian", "dφ_i = 0 (i ≤ r), dφ_α = Σ_i Y_{αi} φ_i∧φ̄_i (α > r)",
    (Param("Y", "matrix", [[1 + 0j, 1 + 0j]], "(n − r) × r coefficient matrix"),), nilmanifold, _nil_manifest))
_register(CatalogEntry("nil3", "lie_hermitian", "dφ_1 = dφ_2 = 0, dφ_3 = aφ_1∧φ̄_1 + bφ_2∧φ̄_2",
                       (Param("a", "complex", 1 + 0j), Param("b", "complex", 1 + 0j)), nil3, _nil3_manifest))
_register(CatalogEntry("N3", "lie_hermitian", "dφ_1 = dφ_2 = 0, dφ_3 = φ_1∧φ̄_1 − φ_2∧φ̄_2", (), n3, _n3_manifest))
_register(CatalogEntry("so3c", "lie_hermitian", "SO(3,ℂ): dφ_1 = φ_23, dφ_2 = φ_31, dφ_3 = φ_12", (),
                       so3c, _so3c_manifest))
_register(CatalogEntry("family_A", "lie_hermitian", "middle-type family A_{a,b}, a and b real",
                       (Param("a", "real", 0.0), Param("b", "real", 0.0)), family_A,
                       lambda a, b: _middle(0.0, 0.0),
                       metadata={"N3_coframe_change_at_a_b_0": "phi' = diag(1, 1, i) phi"}))
_register(CatalogEntry(
    "family_B", "lie_hermitian",
    "middle-type family B^ε_{u,v,w} with w − w̄ = εi(|u−v|² − |u+v|²)",
    (Param("eps", "sign", 1), Param("u", "complex", 0j), Param("v", "complex", 0j), Param("w", "complex", 0j)),
    family_B, _family_B_manifest))
_register(CatalogEntry("family_C", "lie_hermitian", "middle-type family C_{u,v}",
                       (Param("u", "complex", 1 + 0j), Param("v", "complex", 0j)), family_C, _family_C_manifest))
_register(CatalogEntry("family_D", "lie_hermitian", "middle-type family D^ε_{u,ρ} with |ρ| = 1",
                       (Param("u", "complex", 1 + 0j), Param("rho", "complex", 1 + 0j), Param("eps", "sign", 1)),
                       family_D, _family_D_manifest))
_register(CatalogEntry(
    "hopf", "coordinate", "Hopf metric g_{i j̄} = δ_{ij}/|z|² at (1, 0, ..., 0); λ is the deck transformation",
    (Param("n", "int", 2), Param("lam", "complex", 2 + 0j, "metadata only")), hopf,
    lambda n, lam: {"kahler": False, "balanced": False, "btp": True, "lck_shape": True, "vaisman": True,
                    "label": "vaisman"}))
_register(CatalogEntry(
    "wallach", "coordinate", "Wallach metric ω̃ − σ on the flag threefold, in the chart around the origin",
    (), wallach,
    lambda: {"kahler": False, "balanced": True, "btp": True, "rank_B": 1, "label": "wallach-type (rank 1)"},
    metadata=WALLACH_PARTS))
_register(CatalogEntry("fubini_study", "coordinate", "g_{i j̄} = ∂_i∂_j̄ log(1 + |z|²) at the origin",
                       (Param("n", "int", 2),), fubini_study,
                       lambda n: {"kahler": True, "balanced": True, "btp": True}))
_register(CatalogEntry("euclidean", "coordinate", "constant identity metric", (Param("n", "int", 3),), euclidean,
                       lambda n: {"kahler": True, "balanced": True, "btp": True}))


def get(name) -> CatalogEntry:
    try:
        return ENTRIES[name]
    except KeyError:
        raise ValueError(f"unknown catalog entry {name!r}; known: {', '.join(sorted(ENTRIES))}") from None


def build(name, **params):
    return get(name).build(**params)


def list_entries():
    return [ENTRIES[k].schema() for k in sorted(ENTRIES)]


def observed_properties(obj, tol=None):
    """The quantities a manifest can name, measured on a built structure or metric."""
    from .conditions import check_all, special_frame
    from .coordinate import point_report

    if isinstance(obj, CoordinateMetric):
        rep = point_report(obj, tol)
        out = {k: v["value"] for k, v in rep["flags"].items()}
        out["rank_B"] = rep["rank_B"]
        out["label"] = rep["classification"]["label"]
        return out
    rep = check_all(obj, tol)
    out = {k: v["value"] for k, v in rep.flags.items()}
    out["rank_B"] = rep.rank_B
    cls = rep.classification
    out["label"] = cls.get("label")
    if "refinement" in cls:
        out["refinement"] = cls["refinement"]
    if "middle_type" in cls:
        out["middle_type"] = {"x": cls["middle_type"]["x"], "y": cls["middle_type"]["y"]}
    if "chern_curvature_max" in cls:
        out["chern_flat"] = cls["chern_curvature_max"] < rep.tol
    if obj.n == 3 and rep.flag("balanced"):
        out["special_a"] = list(special_frame(obj, tol).a)
    return out


def verify_manifest(name, tol=None, **params):
    """Compare every expected property with the measured one; returns (ok, details)."""
    entry = get(name)
    expected = entry.expected(**params)
    observed = observed_properties(entry.build(**params), tol)
    details = {}
    for key, want in expected.items():
        got = observed.get(key)
        if isinstance(want, dict):
            ok = got is not None and all(
                v is None or abs(got[k] - v) < 1e-8 for k, v in want.items()
            )
        elif isinstance(want, list):
            ok = got is not None and np.allclose(got, want, atol=1e-8)
        else:
            ok = got == want
        details[key] = {"expected": want, "observed": got, "ok": bool(ok)}
    return all(d["ok"] for d in details.values()), details
