"""The small exceptional trees: antidirected paths, out-stars and the double star.

For each, print the avoiding hosts found by exhaustive search and the
smallest order that forces a copy.
"""

from unavoidable.embed import backtrack_embed
from unavoidable.oracle import avoiding_hosts, double_star_fixture, g_bruteforce
from unavoidable.otree import antidirected_path, out_star
from unavoidable.tournament import circulant, paley


def main() -> None:
    for n, host, name in ((3, circulant(3, [1]), "3-cycle"), (5, circulant(5, [1, 2]), "circulant 5"), (7, paley(7), "Paley 7")):
        t = antidirected_path(n)
        classes = avoiding_hosts(t, n)
        print(f"antidirected path on {n}: copy in {name}: {backtrack_embed(t, host) is not None}; avoiding classes on {n} vertices: {len(classes)}")
    for n in (3, 4, 5):
        t = out_star(n)
        print(f"out-star on {n}: copy in regular tournament on {2 * n - 3}: {backtrack_embed(t, circulant(2 * n - 3)) is not None}")
    print(f"out-star on 3: {g_bruteforce(out_star(3))}")
    print(f"antidirected path on 5: {g_bruteforce(antidirected_path(5))}")
    t, g = double_star_fixture(2, 2, 2)
    print(f"double star (2,2,2) on {t.n} vertices: blocked host has {g.n} vertices, copy: {backtrack_embed(t, g) is not None}")


if __name__ == "__main__":
    main()
