"""Worked meadow propositions, each with the simplification a reader would
expect and a rewrite guarded against division by zero."""
from dataclasses import dataclass

from .expr import parse_proposition
from .meadow import GUARDED_STATUS, check_simplification, detect_mvl_creep, render_set, solution_set


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    original: str
    claimed: str
    guarded: str


MEADOW_CATALOG = (
    CatalogEntry("body 1", "0 <= X <= 2 and 0 <= X/(X-1) <= 2",
                 "X in {0, 1, 2}", "0 <= X <= 2 and X != 1 and 0 <= X/(X-1) <= 2"),
    CatalogEntry("body 2", "0 <= X <= 2 and 0 < X/(X-1) < 2",
                 "X = 1", "0 <= X <= 2 and X != 1 and 0 < X/(X-1) < 2"),
    CatalogEntry("body 3", "X/X = 1", "X != 0", "X != 0 and X/X = 1"),
    CatalogEntry("body 4", "X/X != 1", "X = 0", "X != 0 and X/X != 1"),
)


@dataclass(frozen=True)
class CatalogResult:
    entry: CatalogEntry
    solutions: frozenset
    counterexamples: tuple
    creep_status: str
    guarded_status: str

    @property
    def agrees(self) -> bool:
        return not self.counterexamples

    def lines(self) -> list:
        out = [
            f"{self.entry.name}: {self.entry.original}",
            f"  solutions: {render_set(self.solutions)}",
        ]
        if self.agrees:
            out.append(f"  claimed {self.entry.claimed}: agrees")
        else:
            out.append(f"  claimed {self.entry.claimed}: discrepancy, counterexamples {render_set(self.counterexamples)}")
        out.append(f"  creep: {self.creep_status}")
        out.append(f"  rewrite {self.entry.guarded}: {self.guarded_status}")
        return out


def check_entry(entry: CatalogEntry, bound: int) -> CatalogResult:
    original = parse_proposition(entry.original)
    report = check_simplification(original, parse_proposition(entry.claimed), bound)
    return CatalogResult(
        entry=entry,
        solutions=solution_set(original, "X", bound),
        counterexamples=report.counterexamples,
        creep_status=detect_mvl_creep(original, bound).status,
        guarded_status=detect_mvl_creep(parse_proposition(entry.guarded), bound).status,
    )


def catalog_report(bound: int) -> list:
    return [check_entry(entry, bound) for entry in MEADOW_CATALOG]


def all_rewrites_guarded(results) -> bool:
    return all(r.guarded_status == GUARDED_STATUS for r in results)
