"""Mixed-integer model export in LP text format, plus an assignment checker.

The model minimizes total travel time over binary edge variables
x[i,k,w,j,m,l] (leave waypoint i with heading k and speed w toward waypoint j,
entered with heading m and speed l) with in/out-degree rows, flow conservation
per (waypoint, heading, speed), and lifted sequence-variable subtour
elimination u_i - u_j + (n-1) X_ij + (n-3) X_ji <= n-2 for i, j >= 2.
u_1 is fixed to 1 and substituted out; self-loop variables are omitted.
"""

from __future__ import annotations

from dataclasses import dataclass


from .costs import CostTensor
from .solver import TourSolution, tour_edges

_WRAP = 6  # terms per emitted line


@dataclass(frozen=True)
class MilpModel:
    text: str
    num_binaries: int
    num_integers: int
    num_assignment_rows: int
    num_flow_rows: int
    num_subtour_rows: int


def x_name(i: int, k: int, w: int, j: int, m: int, l: int) -> str:
    """Variable name with 1-based indices throughout."""
    return f"x_{i}_{k}_{w}_{j}_{m}_{l}"


def u_name(i: int) -> str:
    return f"u_{i}"


def _emit_terms(lines: list[str], label: str, terms, tail: str) -> None:
    chunks = [f"{label}:"]
    for idx, (coef, name) in enumerate(terms):
        sign = "+" if coef >= 0 else "-"
        mag = abs(coef)
        mag_txt = repr(mag) if isinstance(mag, float) else str(mag)
        chunks.append(f"{sign} {mag_txt} {name}")
        if (idx + 1) % _WRAP == 0 and idx + 1 < len(terms):
            lines.append(" " + " ".join(chunks))
            chunks = [" "]
    chunks.append(tail)
    lines.append(" " + " ".join(chunks))


def _edge_vars(n: int, h: int, s: int):
    for i in range(1, n + 1):
        for k in range(1, h + 1):
            for w in range(1, s + 1):
                for j in range(1, n + 1):
                    if j == i:
                        continue
                    for m in range(1, h + 1):
                        for l in range(1, s + 1):
                            yield (i, k, w, j, m, l)


def export_milp(tensor: CostTensor) -> MilpModel:
    n, h, s = tensor.n, tensor.h, tensor.s
    C = tensor.costs
    lines = [f"\\ tour model: n={n} headings={h} speeds={s} kind={tensor.kind}",
             "\\ u_1 is fixed to 1 and substituted out of the subtour rows",
             "Minimize"]
    obj_terms = [(float(C[i - 1, k - 1, w - 1, j - 1, m - 1, l - 1]),
                  x_name(i, k, w, j, m, l))
                 for (i, k, w, j, m, l) in _edge_vars(n, h, s)]
    _emit_terms(lines, " obj", obj_terms, "")
    lines.append("Subject To")

    num_assignment = 0
    for i in range(1, n + 1):  # leave each waypoint once
        terms = [(1, x_name(i, k, w, j, m, l))
                 for k in range(1, h + 1) for w in range(1, s + 1)
                 for j in range(1, n + 1) if j != i
                 for m in range(1, h + 1) for l in range(1, s + 1)]
        _emit_terms(lines, f" out_{i}", terms, "= 1")
        num_assignment += 1
    for j in range(1, n + 1):  # enter each waypoint once
        terms = [(1, x_name(i, k, w, j, m, l))
                 for i in range(1, n + 1) if i != j
                 for k in range(1, h + 1) for w in range(1, s + 1)
                 for m in range(1, h + 1) for l in range(1, s + 1)]
        _emit_terms(lines, f" in_{j}", terms, "= 1")
        num_assignment += 1

    num_flow = 0
    for j in range(1, n + 1):  # leave with the entering heading and speed
        for m in range(1, h + 1):
            for l in range(1, s + 1):
                terms = [(1, x_name(i, k, w, j, m, l))
                         for i in range(1, n + 1) if i != j
                         for k in range(1, h + 1) for w in range(1, s + 1)]
                terms += [(-1, x_name(j, m, l, o, p, q))
                          for o in range(1, n + 1) if o != j
                          for p in range(1, h + 1) for q in range(1, s + 1)]
                _emit_terms(lines, f" flow_{j}_{m}_{l}", terms, "= 0")
                num_flow += 1

    num_subtour = 0
    for i in range(2, n + 1):
        for j in range(2, n + 1):
            if i == j:
                continue
            terms = [(1, u_name(i)), (-1, u_name(j))]
            if n - 1 != 0:
                terms += [(n - 1, x_name(i, k, w, j, m, l))
                          for k in range(1, h + 1) for w in range(1, s + 1)
                          for m in range(1, h + 1) for l in range(1, s + 1)]
            if n - 3 != 0:
                terms += [(n - 3, x_name(j, m, l, i, k, w))
                          for m in range(1, h + 1) for l in range(1, s + 1)
                          for k in range(1, h + 1) for w in range(1, s + 1)]
            _emit_terms(lines, f" mtz_{i}_{j}", terms, f"<= {n - 2}")
            num_subtour += 1

    lines.append("Bounds")
    for i in range(2, n + 1):
        lines.append(f" 2 <= {u_name(i)} <= {n}")
    lines.append("Binaries")
    names = [x_name(*tup) for tup in _edge_vars(n, h, s)]
    for start in range(0, len(names), _WRAP):
        lines.append(" " + " ".join(names[start:start + _WRAP]))
    lines.append("Generals")
    lines.append(" " + " ".join(u_name(i) for i in range(2, n + 1)))
    lines.append("End")

    return MilpModel("\n".join(lines) + "\n",
                     num_binaries=len(names),
                     num_integers=n - 1,
                     num_assignment_rows=num_assignment,
                     num_flow_rows=num_flow,
                     num_subtour_rows=num_subtour)


def encode_solution(tensor: CostTensor, sol: TourSolution) -> dict[str, float]:
    """Variable assignment (x and u values) representing a closed tour."""
    values: dict[str, float] = {}
    for (i0, ci, j0, cj) in tour_edges(tensor, sol):
        ki, wi = tensor.config_of(ci)
        kj, wj = tensor.config_of(cj)
        values[x_name(i0 + 1, ki + 1, wi + 1, j0 + 1, kj + 1, wj + 1)] = 1.0
    for pos, wp in enumerate(sol.order, start=1):
        if wp != 1:
            values[u_name(wp)] = float(pos)
    return values


# --- LP text evaluation -------------------------------------------------------


def _parse_terms(tokens: list[str]):
    terms = []
    sign = 1.0
    idx = 0
    while idx < len(tokens):
        tok = tokens[idx]
        if tok == "+":
            sign = 1.0
            idx += 1
        elif tok == "-":
            sign = -1.0
            idx += 1
        else:
            coef = sign * float(tok)
            name = tokens[idx + 1]
            terms.append((coef, name))
            sign = 1.0
            idx += 2
    return terms


def check_assignment(text: str, values: dict[str, float]):
    """Evaluate an exported model at a variable assignment.

    Returns (objective_value, violations); missing variables count as zero.
    Understands exactly the subset of the LP format that export_milp emits.
    """
    val = lambda name: values.get(name, 0.0)
    violations: list[str] = []
    objective = 0.0

    section = None
    rows: dict[str, tuple[list, str, float]] = {}
    pending_label = None
    pending_tokens: list[str] = []

    def flush():
        nonlocal pending_label, pending_tokens
        if pending_label is None:
            return
        tokens = pending_tokens
        sense_idx = next((i for i, t in enumerate(tokens) if t in ("<=", ">=", "=")), None)
        if sense_idx is None:
            rows[pending_label] = (_parse_terms(tokens), None, 0.0)
        else:
            rows[pending_label] = (_parse_terms(tokens[:sense_idx]),
                                   tokens[sense_idx], float(tokens[sense_idx + 1]))
        pending_label, pending_tokens = None, []

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        if line in ("Minimize", "Subject To", "Bounds", "Binaries", "Generals", "End"):
            flush()
            section = line
            continue
        if section in ("Minimize", "Subject To"):
            tokens = line.replace("<=", " <= ").replace(">=", " >= ").split()
            # avoid splitting "=" out of "<=" twice: normalize lone '='
            norm = []
            for t in tokens:
                if t == "=" or t in ("<=", ">="):
                    norm.append(t)
                elif t.endswith(":"):
                    norm.append(t)
                else:
                    norm.append(t)
            if norm and norm[0].endswith(":"):
                flush()
                pending_label = norm[0][:-1]
                pending_tokens = norm[1:]
            else:
                pending_tokens.extend(norm)
        elif section == "Bounds":
            lo, _, name, _, hi = line.split()
            v = val(name)
            if not (float(lo) - 1e-9 <= v <= float(hi) + 1e-9):
                violations.append(f"bounds: {name}={v} outside [{lo}, {hi}]")
    flush()

    for label, (terms, sense, rhs) in rows.items():
        lhs = sum(coef * val(name) for coef, name in terms)
        if label == "obj":
            objective = lhs
            continue
        if sense == "=" and abs(lhs - rhs) > 1e-9:
            violations.append(f"{label}: {lhs} != {rhs}")
        elif sense == "<=" and lhs > rhs + 1e-9:
            violations.append(f"{label}: {lhs} > {rhs}")
        elif sense == ">=" and lhs < rhs - 1e-9:
            violations.append(f"{label}: {lhs} < {rhs}")
    return objective, violations
