"""Run the four community detection algorithms on one projected page graph.

All four operate on the weighted projection: greedy agglomeration and the
multi-level method optimize modularity directly, the random-walk method
clusters by walk-distance and cuts its dendrogram at the best modularity,
and label propagation spreads weighted majority labels.
"""

from echonet import (
    build_bipartite,
    fastgreedy,
    label_propagation,
    louvain,
    modularity,
    project,
    rand_index,
    walktrap,
)
from echonet.graphs import Partition
from echonet.synth import SynthConfig, generate

cfg = SynthConfig(users_per_side=(500, 500), pages_per_side=(20, 14),
                  p_out=0.04, actions_per_user=("fixed", 25), seed=5)
dataset, truth, labels = generate(cfg)
g = project(build_bipartite(dataset, "like"))
planted = Partition.from_labels(g.nodes, [labels[n] for n in g.nodes])

part_fg, dendro = fastgreedy(g)
part_lv = louvain(g, seed=5)
part_wt, _dendro_wt = walktrap(g, steps=4)
part_lp = label_propagation(g, seed=5)

print(f"graph: {g.n_nodes} pages, {g.n_edges} edges")
print(f"greedy dendrogram: {len(dendro.merges)} merges, best cut after "
      f"{dendro.best_step} with Q = {dendro.best_score:.4f}\n")

results = {"fastgreedy": part_fg, "walktrap": part_wt,
           "multilevel": part_lv, "labelprop": part_lp}
print(f"{'algorithm':<12} {'communities':>11} {'sizes':<16} "
      f"{'Q':>7} {'vs planted':>10}")
for name, part in results.items():
    sizes = sorted(part.sizes(), reverse=True)
    print(f"{name:<12} {part.n_communities:>11} {str(sizes[:4]):<16} "
          f"{modularity(g, part):>7.4f} {rand_index(part, planted):>10.4f}")

print("\npairwise agreement (Rand index):")
names = list(results)
print("            " + "  ".join(f"{n[:10]:>10}" for n in names))
for a in names:
    row = "  ".join(f"{rand_index(results[a], results[b]):>10.4f}" for b in names)
    print(f"{a:<12}{row}")
