"""Line-oriented field description files.

Grammar: `key = value` pairs, one per line, UTF-8 with LF endings; `#`
starts a comment anywhere.  The kind key selects rational, quadratic or
table; table-kind files carry externally computed class data and every
axiom we can check without element arithmetic is checked at load time.
"""

from __future__ import annotations

from pathlib import Path

from .errors import IngestionError
from .exact_algebra import Lattice
from .fields import FieldSpec, TableData, TablePrime, is_prime

SCALAR_KEYS = ("kind", "d", "name", "degree", "narrow_class_group", "prime_bound", "provenance")
LIST_KEYS = ("primes", "p1_relations")


def _parse_int(text: str, line: int, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise IngestionError(f"{key} wants an integer, got {text!r}", line=line) from None


def _split_lines(text: str):
    """Yield (line_number, key, value) for every logical line."""
    for n, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip().rstrip("\r")
        if not line:
            continue
        if "=" not in line:
            raise IngestionError(f"expected 'key = value', got {line!r}", line=n)
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key:
            raise IngestionError("empty key", line=n)
        yield n, key, value


def _parse_group_factors(value: str, line: int) -> tuple[int, ...]:
    if value == "1":
        return ()
    factors = tuple(_parse_int(part.strip(), line, "narrow_class_group") for part in value.split(","))
    for f in factors:
        if f < 2:
            raise IngestionError(
                "invariant factors must be at least 2 (write 1 for the trivial group)",
                line=line,
            )
    for a, b in zip(factors, factors[1:]):
        if b % a != 0:
            raise IngestionError(
                f"invariant factors must form a divisibility chain, got {a} before {b}",
                line=line,
            )
    return factors


def _parse_label(text: str, factors: tuple[int, ...], line: int) -> tuple[int, ...]:
    if not factors:
        if text != "0":
            raise IngestionError(
                f"the trivial group has the single label 0, got {text!r}", line=line
            )
        return ()
    coords = tuple(_parse_int(part, line, "class label") for part in text.split("."))
    if len(coords) != len(factors):
        raise IngestionError(
            f"class label {text!r} has {len(coords)} coordinates, the group has {len(factors)}",
            line=line,
        )
    for c, f in zip(coords, factors):
        if not 0 <= c < f:
            raise IngestionError(f"class label coordinate {c} is not reduced mod {f}", line=line)
    return coords


def _parse_prime_entry(text: str, factors, line: int) -> TablePrime:
    parts = text.split(":")
    if len(parts) != 4:
        raise IngestionError(
            f"prime entries look like p:e:f:class_label, got {text!r}", line=line
        )
    p = _parse_int(parts[0], line, "prime")
    e = _parse_int(parts[1], line, "ramification index")
    f = _parse_int(parts[2], line, "residue degree")
    if not is_prime(p):
        raise IngestionError(f"not a prime: {p}", line=line)
    if e < 1 or f < 1:
        raise IngestionError(f"e and f must be positive in {text!r}", line=line)
    return TablePrime(p, e, f, _parse_label(parts[3], factors, line))


def _parse_relation(text: str, primes: list[TablePrime], line: int):
    """One narrowly-principal assertion: terms p.i^k joined by '*'."""
    by_p: dict[int, list[int]] = {}
    for i, tp in enumerate(primes):
        by_p.setdefault(tp.p, []).append(i)
    terms = []
    for raw in text.split("*"):
        term = raw.strip()
        if not term:
            raise IngestionError(f"empty factor in relation {text!r}", line=line)
        base, _, exp = term.partition("^")
        k = _parse_int(exp, line, "relation exponent") if exp else 1
        if k < 1:
            raise IngestionError(f"relation exponents are positive, got {term!r}", line=line)
        p_text, _, idx_text = base.partition(".")
        if not idx_text:
            raise IngestionError(f"relation terms look like p.i^k, got {term!r}", line=line)
        p = _parse_int(p_text, line, "relation prime")
        idx = _parse_int(idx_text, line, "relation index")
        if p not in by_p or not 0 <= idx < len(by_p[p]):
            raise IngestionError(f"relation names an undeclared prime: {term!r}", line=line)
        terms.append((p, idx, k))
    return tuple(terms)


def _relation_class(relation, primes, by_p) -> tuple[int, ...]:
    total = None
    for p, idx, k in relation:
        label = primes[by_p[p][idx]].label
        if total is None:
            total = [0] * len(label)
        for j, c in enumerate(label):
            total[j] += k * c
    return tuple(total or ())


def _check_labels_generate(factors, primes, line: int):
    r = len(factors)
    if r == 0:
        return
    rows = [tuple(tp.label) for tp in primes]
    rows += [tuple(f if j == i else 0 for j in range(r)) for i, f in enumerate(factors)]
    lat = Lattice.from_generators(r, rows)
    index = 1
    basis = lat.basis.entries
    if len(basis) < r:
        index = 0
    else:
        for i in range(r):
            index *= basis[i][i]
    if index != 1:
        raise IngestionError("class labels do not generate the declared group", line=line)


def parse_field_text(text: str, default_name: str = "table") -> FieldSpec:
    scalars: dict[str, tuple[int, str]] = {}
    lists: dict[str, list[tuple[int, str]]] = {k: [] for k in LIST_KEYS}
    for n, key, value in _split_lines(text):
        if key in SCALAR_KEYS:
            if key in scalars:
                raise IngestionError(f"duplicate key {key!r}", line=n)
            scalars[key] = (n, value)
        elif key in LIST_KEYS:
            for part in value.split(","):
                part = part.strip()
                if part:
                    lists[key].append((n, part))
        else:
            raise IngestionError(f"unknown key {key!r}", line=n)

    if "kind" not in scalars:
        raise IngestionError("missing required key: kind")
    kind_line, kind = scalars.pop("kind")

    if kind == "rational":
        if scalars or any(lists.values()):
            extra = next(iter(scalars), None) or next(k for k, v in lists.items() if v)
            raise IngestionError(f"key {extra!r} does not belong in a rational field file")
        return FieldSpec.rational()

    if kind == "quadratic":
        if "d" not in scalars:
            raise IngestionError("quadratic fields need d")
        d_line, d_text = scalars.pop("d")
        leftovers = set(scalars) | {k for k, v in lists.items() if v}
        if leftovers:
            raise IngestionError(f"key {sorted(leftovers)[0]!r} does not belong in a quadratic field file")
        d = _parse_int(d_text, d_line, "d")
        try:
            return FieldSpec.quadratic(d)
        except ValueError as exc:
            raise IngestionError(str(exc), line=d_line) from None

    if kind != "table":
        raise IngestionError(f"unknown kind {kind!r}", line=kind_line)

    for required in ("degree", "narrow_class_group", "prime_bound", "provenance"):
        if required not in scalars:
            raise IngestionError(f"table fields need {required}")
    if not lists["primes"]:
        raise IngestionError("table fields list at least one prime")

    name = scalars.get("name", (0, default_name))[1]
    deg_line, deg_text = scalars["degree"]
    degree = _parse_int(deg_text, deg_line, "degree")
    if degree < 1:
        raise IngestionError("degree must be positive", line=deg_line)
    group_line, group_text = scalars["narrow_class_group"]
    factors = _parse_group_factors(group_text, group_line)
    bound_line, bound_text = scalars["prime_bound"]
    prime_bound = _parse_int(bound_text, bound_line, "prime_bound")
    if prime_bound < 2:
        raise IngestionError("prime_bound must be at least 2", line=bound_line)
    provenance = scalars["provenance"][1]
    if not provenance:
        raise IngestionError("provenance must not be empty", line=scalars["provenance"][0])

    primes: list[TablePrime] = []
    for n, entry in lists["primes"]:
        tp = _parse_prime_entry(entry, factors, n)
        if tp.p > prime_bound:
            raise IngestionError(
                f"prime {tp.p} exceeds the declared prime_bound {prime_bound}", line=n
            )
        primes.append(tp)

    # the completeness axioms: full splitting per listed p, labels that
    # really present the declared group, relations of trivial class
    by_rational: dict[int, int] = {}
    for tp in primes:
        by_rational[tp.p] = by_rational.get(tp.p, 0) + tp.e * tp.f
    for p, total in sorted(by_rational.items()):
        if total != degree:
            raise IngestionError(f"sum of e*f is {total}, not the degree {degree}, at p={p}")
    _check_labels_generate(factors, primes, group_line)

    by_p: dict[int, list[int]] = {}
    for i, tp in enumerate(primes):
        by_p.setdefault(tp.p, []).append(i)
    relations = []
    for n, entry in lists["p1_relations"]:
        rel = _parse_relation(entry, primes, n)
        cls = _relation_class(rel, primes, by_p)
        if any(c % f for c, f in zip(cls, factors)):
            raise IngestionError(f"relation {entry!r} has nontrivial class", line=n)
        relations.append(rel)

    table = TableData(
        name=name,
        degree=degree,
        group_factors=factors,
        primes=tuple(primes),
        relations=tuple(relations),
        prime_bound=prime_bound,
        provenance=provenance,
    )
    return FieldSpec.from_table(table)


def load_field(path) -> FieldSpec:
    """Parse and validate a field description file."""
    p = Path(path)
    try:
        text = p.read_bytes().decode("utf-8")
    except FileNotFoundError:
        raise IngestionError(f"no such field file: {p}") from None
    except IsADirectoryError:
        raise IngestionError(f"{p} is a directory, not a field file") from None
    except UnicodeDecodeError as exc:
        raise IngestionError(f"field files are UTF-8: {exc}") from None
    return parse_field_text(text, default_name=p.stem)
