"""Find and verify a rainbow K_3-subdivision in a properly coloured G(512, 0.3)."""
import argparse
import json

from rainbowturan.generators import greedy_proper_colouring, random_graph
from rainbowturan.params import desk_params
from rainbowturan.subdivision import find_subdivision, verify_subdivision


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--m", type=int, default=3)
    args = ap.parse_args()

    g = greedy_proper_colouring(random_graph(512, 0.3, args.seed), args.seed)
    params = desk_params()
    cert = find_subdivision(g, args.m, params, seed=args.seed)
    print("branch vertices:", cert.branch)
    for ends, path in sorted(cert.paths.items()):
        colours = [g.colour(a, b) for a, b in zip(path, path[1:])]
        print(f"  {ends}: {path}  colours {colours}")
    print("verified:", json.dumps(verify_subdivision(g, cert).as_dict()))


if __name__ == "__main__":
    main()
