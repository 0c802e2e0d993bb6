"""The direction-coloured hypercube has no rainbow cycle, so every closed walk is degenerate."""
from itertools import combinations

from rainbowturan.errors import NoCliqueOfGoodPairs, RoundsExhausted
from rainbowturan.generators import hypercube_coloured
from rainbowturan.graph import bipartition, rainbow_cycles
from rainbowturan.params import desk_params
from rainbowturan.subdivision import find_subdivision
from rainbowturan.walks import count_degenerate_exact


def main() -> None:
    for k in range(2, 6):
        cg = hypercube_coloured(k)
        X = sorted(bipartition(cg.graph).X)
        fractions = set()
        for x, y in combinations(X, 2):
            st = count_degenerate_exact(cg, x, y, 2)
            if st.hom:
                fractions.add(st.fraction)
        try:
            find_subdivision(cg, 3, desk_params(), seed=0)
            outcome = "found (unexpected)"
        except (NoCliqueOfGoodPairs, RoundsExhausted) as exc:
            outcome = type(exc).__name__
        n_cycles = sum(1 for _ in rainbow_cycles(cg)) if k <= 4 else "skipped"
        print(f"Q{k}: rainbow cycles {n_cycles}, degenerate fractions {sorted(fractions)}, search: {outcome}")


if __name__ == "__main__":
    main()
