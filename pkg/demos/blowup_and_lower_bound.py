"""A 2-blow-up of a K_3-subdivision in a dense graph, next to a sparse C_j[2]-free graph."""
from rainbowturan.blowup import find_blowup_subdivision, verify_blowup
from rainbowturan.generators import crfree_construction, random_graph
from rainbowturan.params import desk_params


def main() -> None:
    g = random_graph(36, 0.9, 0)
    cert = find_blowup_subdivision(g, 2, 3, desk_params(s=2), seed=0)
    print("branch r-sets:", [cert.rsets[v] for v in cert.base.branch])
    print("edges spanned:", len(cert.expanded_edges()), "verified:", verify_blowup(g, cert).ok)

    res = crfree_construction(200, 2, 4, seed=0)
    s = res.summary()
    print(f"C_3[2], C_4[2]-free graph: {s['final_edges']} edges "
          f"(bound {s['lower_bound']:.0f}), {s['removed']} edges removed")


if __name__ == "__main__":
    main()
