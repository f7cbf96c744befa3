"""End-to-end certification pipeline and the machine-readable certificate.

The pipeline computes |G'|, builds the conjugation-envelope presentation,
takes its maximal p-quotient K of bounded class, and compares |K'| against
|G'|.  Any epimorphism from the enveloping group A onto K maps derived
subgroup onto derived subgroup, so |A'| >= |K'|; if |K'| > |G'| the two
derived subgroups have different cardinalities, hence A' and G' are not
isomorphic, which certifies a nontrivial symmetric cohomology class.  The
method is one-sided: everything else is INCONCLUSIVE, never "trivial".
"""

from __future__ import annotations

import datetime
import hashlib
import json
from dataclasses import asdict, dataclass, field

from .cocycle import symmetric_h2
from .errors import ParseError, ResourceLimitError
from .groups import FiniteGroup, conjugacy_classes, derived_subgroup
from .pquotient import DEFAULT_COLLECT_CAP, p_quotient, pc_derived_order
from .presentation import envelope_presentation

DECISION_RULE = (
    "verdict is NONTRIVIAL iff quotient_derived_order > derived_order: the "
    "envelope surjects onto the quotient, so the quotient's derived order is "
    "a lower bound for the envelope's; a strict excess over the group's "
    "derived order rules out an isomorphism of derived subgroups, which is "
    "equivalent to a nonzero symmetric second cohomology class"
)

VERDICT_NONTRIVIAL = "NONTRIVIAL"
VERDICT_INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Certificate:
    """Auditable record of one certification run."""

    group_order: int
    class_count: int
    derived_order: int
    envelope_generators: int
    envelope_relators_raw: int
    quotient_prime: int
    quotient_class: int
    quotient_rank: int
    quotient_order: int
    quotient_derived_order: int
    verdict: str
    element_order_histogram: dict[int, int]
    decision_rule: str = DECISION_RULE
    oracle_invariant_factors: list[int] | None = None
    cocycle_path: str | None = None
    tool_version: str = ""
    fixture_checksum: str = ""
    generated_at: str = ""

    def to_json(self) -> str:
        data = asdict(self)
        data["element_order_histogram"] = {
            str(k): v for k, v in sorted(self.element_order_histogram.items())
        }
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        data = json.loads(text)
        data["element_order_histogram"] = {
            int(k): v for k, v in data["element_order_histogram"].items()
        }
        return cls(**data)

    def to_text(self) -> str:
        lines = []
        for key, value in asdict(self).items():
            if key == "element_order_histogram":
                value = " ".join(f"{k}={v}" for k, v in sorted(value.items()))
            elif key == "oracle_invariant_factors":
                value = "-" if value is None else (",".join(map(str, value)) or "trivial")
            elif key == "cocycle_path":
                value = "-" if value is None else value
            lines.append(f"{key}: {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Certificate":
        raw: dict[str, str] = {}
        for ln in text.splitlines():
            if not ln.strip() or ln.startswith("#"):
                continue
            key, _, value = ln.partition(":")
            raw[key.strip()] = value.strip()
        hist = {}
        if raw.get("element_order_histogram"):
            for item in raw["element_order_histogram"].split():
                k, _, v = item.partition("=")
                hist[int(k)] = int(v)
        factors_raw = raw.get("oracle_invariant_factors", "-")
        if factors_raw == "-":
            factors = None
        elif factors_raw == "trivial":
            factors = []
        else:
            factors = [int(t) for t in factors_raw.split(",")]
        path = raw.get("cocycle_path", "-")
        return cls(
            group_order=int(raw["group_order"]),
            class_count=int(raw["class_count"]),
            derived_order=int(raw["derived_order"]),
            envelope_generators=int(raw["envelope_generators"]),
            envelope_relators_raw=int(raw["envelope_relators_raw"]),
            quotient_prime=int(raw["quotient_prime"]),
            quotient_class=int(raw["quotient_class"]),
            quotient_rank=int(raw["quotient_rank"]),
            quotient_order=int(raw["quotient_order"]),
            quotient_derived_order=int(raw["quotient_derived_order"]),
            verdict=raw["verdict"],
            element_order_histogram=hist,
            decision_rule=raw["decision_rule"],
            oracle_invariant_factors=factors,
            cocycle_path=None if path == "-" else path,
            tool_version=raw.get("tool_version", ""),
            fixture_checksum=raw.get("fixture_checksum", ""),
            generated_at=raw.get("generated_at", ""),
        )

    def write(self, path: str) -> None:
        text = self.to_json() if path.endswith(".json") else self.to_text()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)

    @classmethod
    def read(cls, path: str) -> "Certificate":
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        return cls.from_json(text) if path.endswith(".json") else cls.from_text(text)


def file_checksum(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def certify(
    G: FiniteGroup,
    p: int = 2,
    maxclass: int = 3,
    *,
    fixture_checksum: str = "",
    tool_version: str = "",
    collect_cap: int = DEFAULT_COLLECT_CAP,
) -> Certificate:
    """Run the full quotient-route pipeline and assemble the certificate."""
    n = G.order
    part = conjugacy_classes(G)
    dG = derived_subgroup(G)
    try:
        P = envelope_presentation(G)
        K, _ = p_quotient(P, p, maxclass, collect_cap=collect_cap)
        dK = pc_derived_order(K)
    except ResourceLimitError as exc:
        raise ResourceLimitError(f"quotient stage failed: {exc}") from exc
    verdict = VERDICT_NONTRIVIAL if dK > len(dG) else VERDICT_INCONCLUSIVE
    return Certificate(
        group_order=n,
        class_count=part.class_count,
        derived_order=len(dG),
        envelope_generators=P.ngens,
        envelope_relators_raw=n * n,
        quotient_prime=p,
        quotient_class=maxclass,
        quotient_rank=K.ngens,
        quotient_order=K.order,
        quotient_derived_order=dK,
        verdict=verdict,
        element_order_histogram=G.order_histogram(),
        fixture_checksum=fixture_checksum,
        tool_version=tool_version,
        generated_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )


def attach_oracle(cert: Certificate, G: FiniteGroup, *, cap: int = 64) -> Certificate:
    """Run the direct linear-algebra oracle and record its factors.

    Returns the updated certificate; raises ParseError never, ValueError on
    cap violations.  A NONTRIVIAL verdict with a trivial oracle would mean a
    bug in one of the two routes; the caller turns that into a distinct exit
    code.
    """
    try:
        h2 = symmetric_h2(G, cap=cap)
    except ResourceLimitError as exc:
        raise ResourceLimitError(f"oracle stage failed: {exc}") from exc
    cert.oracle_invariant_factors = list(h2.invariant_factors)
    return cert
