"""Loading, validating and serializing algebra configs (TOML).

Exact integers are written as decimal strings and Gaussian integers as
``[re, im]`` string pairs, so nothing passes through a float.
"""

from __future__ import annotations

import hashlib
import random
from importlib import resources
from itertools import product
from pathlib import Path

import mpmath
import numpy as np
import tomli
import tomli_w

from .algebra import AlgebraSpec, ExtensionField, UnitData
from .errors import ConfigError, InternalConsistencyError
from .gaussian import GaussianInt

SUPPORTED_DEGREES = (2, 3, 4)
DEFAULT_EMBEDDING_TOL = "1e-25"


def shipped_config(name: str) -> Path:
    """Path of a config bundled with the package (``golden`` or ``perfect4``)."""
    return Path(str(resources.files("cdalattice") / "data" / f"{name}.toml"))


def load_spec(name_or_path) -> AlgebraSpec:
    path = Path(name_or_path)
    if not path.exists() and not path.suffix:
        path = shipped_config(str(name_or_path))
    return validate_config(path)


def validate_config(path, *, division_check: bool = True) -> AlgebraSpec:
    """Parse and fully check a config file; raises ConfigError listing every problem."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    return validate_text(text, source=str(path), division_check=division_check)


def validate_text(text: str, *, source: str = "<string>", division_check: bool = True) -> AlgebraSpec:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        # message already carries "(at line L, column C)"
        raise ConfigError(f"parse error in {source}: {exc}") from exc
    return spec_from_dict(data, division_check=division_check)


class _Collector:
    def __init__(self):
        self.diagnostics = []

    def add(self, msg):
        self.diagnostics.append(msg)


def _gauss(value, key, diag):
    if isinstance(value, (list, tuple)) and len(value) == 2:
        try:
            return GaussianInt(int(str(value[0]), 10), int(str(value[1]), 10))
        except ValueError:
            pass
    elif isinstance(value, str):
        try:
            return GaussianInt(int(value, 10), 0)
        except ValueError:
            pass
    diag.add(f"{key}: expected a Gaussian integer as [\"re\", \"im\"] decimal strings, got {value!r}")
    return None


def _get(table, key, path, diag, kind=None):
    if not isinstance(table, dict) or key not in table:
        diag.add(f"{path}: missing required key")
        return None
    value = table[key]
    if kind is not None and not isinstance(value, kind):
        diag.add(f"{path}: expected {kind.__name__}, got {type(value).__name__}")
        return None
    return value


def spec_from_dict(data: dict, *, division_check: bool = True) -> AlgebraSpec:
    diag = _Collector()
    name = data.get("name", "unnamed")
    degree = _get(data, "degree", "degree", diag, int)
    if degree is not None and degree not in SUPPORTED_DEGREES:
        diag.add(f"degree: {degree} not supported (expected one of {SUPPORTED_DEGREES})")
        degree = None
    fld_t = _get(data, "field", "field", diag, dict) or {}
    alg_t = _get(data, "algebra", "algebra", diag, dict) or {}

    min_poly = _get(fld_t, "min_poly", "field.min_poly", diag, list)
    sigma = _get(fld_t, "sigma_matrix", "field.sigma_matrix", diag, list)
    emb = _get(fld_t, "embeddings", "field.embeddings", diag, list)
    tol_str = str(fld_t.get("embedding_tolerance", DEFAULT_EMBEDDING_TOL))
    gamma_raw = _get(alg_t, "gamma", "algebra.gamma", diag)

    gamma = _gauss(gamma_raw, "algebra.gamma", diag) if gamma_raw is not None else None
    if gamma is not None and not gamma:
        diag.add("algebra.gamma: must be nonzero")
    if degree is None:
        raise ConfigError(diag.diagnostics)

    coeffs = None
    if min_poly is not None:
        if len(min_poly) != degree + 1:
            diag.add(f"field.min_poly: expected {degree + 1} coefficients, got {len(min_poly)}")
        else:
            coeffs = [_gauss(c, f"field.min_poly[{k}]", diag) for k, c in enumerate(min_poly)]
            if coeffs[-1] is not None and coeffs[-1] != 1:
                diag.add("field.min_poly: polynomial must be monic (leading coefficient 1)")
    smat = None
    if sigma is not None:
        if len(sigma) != degree or any(not isinstance(r, list) or len(r) != degree for r in sigma):
            diag.add(f"field.sigma_matrix: expected a {degree}x{degree} matrix")
        else:
            smat = [
                [_gauss(v, f"field.sigma_matrix[{i}][{j}]", diag) for j, v in enumerate(row)]
                for i, row in enumerate(sigma)
            ]
    embeddings = None
    if emb is not None:
        if len(emb) != degree:
            diag.add(f"field.embeddings: expected {degree} complex values, got {len(emb)}")
        else:
            embeddings = []
            for k, e in enumerate(emb):
                if isinstance(e, (list, tuple)) and len(e) == 2 and all(isinstance(v, str) for v in e):
                    try:
                        mpmath.mpf(e[0]), mpmath.mpf(e[1])
                        embeddings.append((e[0], e[1]))
                        continue
                    except ValueError:
                        pass
                diag.add(f"field.embeddings[{k}]: expected [\"re\", \"im\"] decimal strings")
    if diag.diagnostics:
        raise ConfigError(diag.diagnostics)

    fld = ExtensionField(coeffs, smat)
    order = fld.sigma_order()
    if order != degree:
        diag.add(
            f"field.sigma_matrix: sigma order is {order or '> 2n'}, expected {degree} "
            "(sigma must generate the Galois group)"
        )
    elif not fld.sigma_is_homomorphism():
        diag.add("field.sigma_matrix: columns are not the powers of sigma(theta) or sigma(theta) is not a root")
    sigma_ok = not diag.diagnostics
    _check_embeddings(fld, embeddings, tol_str, diag)

    unit_data = None
    # relative norms are meaningless without a valid sigma
    if "units" in data and sigma_ok:
        unit_data = _parse_units(data["units"], fld, diag)

    if diag.diagnostics:
        raise ConfigError(diag.diagnostics)

    spec = AlgebraSpec(
        name=str(name),
        field=fld,
        gamma=gamma,
        embeddings=tuple(embeddings),
        unit_data=unit_data,
        metadata={"embedding_tolerance": tol_str},
    )
    if division_check:
        problem = division_check_failure(spec)
        if problem:
            raise ConfigError([f"algebra.gamma: division check failed: {problem}"])
    return spec


def _check_embeddings(fld, embeddings, tol_str, diag):
    with mpmath.workdps(60):
        tol = mpmath.mpf(tol_str)
        vals = [mpmath.mpc(mpmath.mpf(a), mpmath.mpf(b)) for a, b in embeddings]
        coeffs = [mpmath.mpc(c.re, c.im) for c in fld.min_poly]
        for k, v in enumerate(vals):
            res = sum(c * v ** j for j, c in enumerate(coeffs))
            if abs(res) > tol:
                diag.add(
                    f"field.embeddings[{k}]: does not satisfy the minimal polynomial "
                    f"(residual {mpmath.nstr(abs(res), 3)} > {tol_str})"
                )
        # the j-th value must be the image of sigma^j(theta) under the embedding fixed by value 0
        if fld.degree > 1:
            for k in range(1, fld.degree):
                mat = fld.sigma_power_matrix(k)
                image = sum(mpmath.mpc(mat[j][1].re, mat[j][1].im) * vals[0] ** j for j in range(fld.degree))
                if abs(image - vals[k]) > tol * 10 ** 3:
                    diag.add(
                        f"field.embeddings[{k}]: inconsistent with sigma_matrix "
                        f"(expected about {mpmath.nstr(image, 12)})"
                    )


def _parse_units(units, fld, diag):
    if not isinstance(units, dict):
        diag.add("units: expected a table")
        return None
    w = units.get("roots_of_unity")
    if not isinstance(w, int) or w < 2 or w % 2:
        diag.add("units.roots_of_unity: expected an even integer >= 2")
    fund_raw = units.get("fundamental")
    if not isinstance(fund_raw, list):
        diag.add("units.fundamental: missing or not a list")
        return None
    fund = []
    for k, coords in enumerate(fund_raw):
        key = f"units.fundamental[{k}]"
        if not isinstance(coords, list) or len(coords) != fld.degree:
            diag.add(f"{key}: expected {fld.degree} Gaussian coordinates")
            continue
        vals = [_gauss(c, f"{key}[{j}]", diag) for j, c in enumerate(coords)]
        if any(v is None for v in vals):
            continue
        x = fld.element(vals)
        if not x.is_unit():
            diag.add(f"{key}: element is not a unit of O_E")
        fund.append(x)
    if len(fund) != fld.degree - 1 and not diag.diagnostics:
        diag.add(f"units.fundamental: expected {fld.degree - 1} fundamental units (unit rank n-1)")
    return UnitData(tuple(fund), w) if not diag.diagnostics else None


def division_check_failure(spec: AlgebraSpec, *, sample: int = 20000, seed: int = 0) -> str | None:
    """Search small elements for a nonzero one with vanishing reduced norm.

    Returns a description of the first such element, or None. This can only
    falsify the division property, never prove it.
    """
    from .batch import BatchArithmetic

    arith = BatchArithmetic(spec)
    d = spec.lattice_dim
    n = spec.degree
    if 3 ** d <= 200_000:
        cand = np.array(list(product((-1, 0, 1), repeat=d)), dtype=np.int64)
    else:
        scalars = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
        rows = []
        for combo in product(scalars, repeat=n):
            c = np.zeros((n, n, 2), dtype=np.int64)
            for i, (re, im) in enumerate(combo):
                c[i, 0] = (re, im)
            rows.append(c.ravel())
        rng = random.Random(seed)
        for _ in range(sample):
            rows.append(np.array([rng.randint(-1, 1) for _ in range(d)], dtype=np.int64))
        cand = np.array(rows)
    cand = cand[np.any(cand != 0, axis=1)]
    try:
        re, im = arith.reduced_norm(cand)
    except InternalConsistencyError as exc:
        return str(exc)
    zero = np.nonzero((re == 0) & (im == 0))[0]
    if zero.size:
        x = spec.from_coords(cand[zero[0]])
        return f"nonzero element {x!r} has reduced norm 0 (gamma is a norm)"
    return None


def spec_to_dict(spec: AlgebraSpec) -> dict:
    def g(v):
        return [str(v.re), str(v.im)]

    fld = spec.field
    out = {
        "name": spec.name,
        "degree": spec.degree,
        "field": {
            "min_poly": [g(c) for c in fld.min_poly],
            "sigma_matrix": [[g(v) for v in row] for row in fld.sigma_matrix],
            "embeddings": [list(e) for e in spec.embeddings],
            "embedding_tolerance": spec.metadata.get("embedding_tolerance", DEFAULT_EMBEDDING_TOL),
        },
        "algebra": {"gamma": g(spec.gamma)},
    }
    if spec.unit_data is not None:
        out["units"] = {
            "roots_of_unity": spec.unit_data.roots_of_unity,
            "fundamental": [[g(c) for c in u.coords] for u in spec.unit_data.fundamental],
        }
    return out


def dump_spec(spec: AlgebraSpec) -> str:
    return tomli_w.dumps(spec_to_dict(spec))


def config_hash(spec: AlgebraSpec) -> str:
    return hashlib.sha256(dump_spec(spec).encode()).hexdigest()
