"""Per-user polarization: how exclusively does each user engage one side?

rho = (x - y) / (x + y) over a user's like counts on the two sides; +-1 means
all activity on a single side. On a corpus with small cross-side leakage the
density is sharply bimodal at the extremes - the echo-chamber signature.
"""

from echonet import polarization_histogram, user_polarization
from echonet.synth import SynthConfig, generate

cfg = SynthConfig(users_per_side=(1500, 1500), pages_per_side=(25, 18),
                  p_out=0.05, actions_per_user=("fixed", 40), seed=8)
dataset, _truth, labels = generate(cfg)

profiles = user_polarization(dataset, labels, action="like", min_actions=10)
hist = polarization_histogram(profiles, bins=21)

print(f"{len(profiles)} users with >= 10 likes")
extreme = sum(abs(p.rho) >= 0.9 for p in profiles) / len(profiles)
print(f"fraction with |rho| >= 0.9: {extreme:.3f}\n")

width = hist.edges[1] - hist.edges[0]
peak = max(hist.densities)
print("rho density over [-1, 1]:")
for i, dens in enumerate(hist.densities):
    bar = "#" * int(round(44 * dens / peak)) if peak else ""
    print(f"  [{hist.edges[i]:+.2f}, {hist.edges[i + 1]:+.2f}) "
          f"{dens * width:6.3f} {bar}")
