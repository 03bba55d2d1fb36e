"""Sample training triplets three ways and run a toy descent loop.

The corpus is a mapping plant -> leaf -> observation times, the same
shape the CLI builds from ground-truth files.  After sampling we attach
random embeddings to every crop and take a few subgradient steps on the
triplet margin loss to watch it fall.
"""

import numpy as np

from frond import (
    CROSS_PLANT_FLEXIBLE,
    INTRA_PLANT_FULL_CYCLE,
    INTRA_PLANT_TEMPORAL_WINDOW,
    SamplingStrategy,
    normalize,
    sample_triplets,
    triplet_margin_loss,
)


def build_corpus(n_plants=4, n_leaves=5, n_times=12):
    return {
        plant: {leaf: list(range(1, n_times + 1)) for leaf in range(1, n_leaves + 1)}
        for plant in range(n_plants)
    }


def summarize(name, triplets):
    same_plant = sum(t.negative.plant_id == t.anchor.plant_id for t in triplets)
    spreads = [abs(t.negative.t - t.anchor.t) for t in triplets]
    print(f"{name:30s} {len(triplets)} triplets, "
          f"{same_plant} same-plant negatives, "
          f"max |t_n - t_a| = {max(spreads)}")


def main():
    corpus = build_corpus()
    for strategy, name in [
        (SamplingStrategy(CROSS_PLANT_FLEXIBLE), "cross_plant_flexible"),
        (SamplingStrategy(INTRA_PLANT_FULL_CYCLE), "intra_plant_full_cycle"),
        (SamplingStrategy(INTRA_PLANT_TEMPORAL_WINDOW, delta_t=2), "temporal_window (dt=2)"),
    ]:
        summarize(name, sample_triplets(corpus, strategy, 500, seed=3))
    print()

    # Toy training: one embedding per (plant, leaf, t) crop, anchored to
    # a shared per-leaf direction plus noise, then refined so that leaf
    # identity separates by at least the margin.
    rng = np.random.default_rng(11)
    dim = 16
    leaf_dirs = {
        (p, l): normalize(rng.normal(size=dim)) for p in corpus for l in corpus[p]
    }
    table = {
        (p, l, t): normalize(leaf_dirs[(p, l)] + 0.6 * rng.normal(size=dim))
        for p in corpus
        for l in corpus[p]
        for t in corpus[p][l]
    }

    strategy = SamplingStrategy(INTRA_PLANT_FULL_CYCLE)
    lr = 0.05
    for epoch in range(6):
        batch = sample_triplets(corpus, strategy, 400, seed=100 + epoch)
        total = 0.0
        active = 0
        for t in batch:
            a_key = (t.anchor.plant_id, t.anchor.leaf_id, t.anchor.t)
            p_key = (t.positive.plant_id, t.positive.leaf_id, t.positive.t)
            n_key = (t.negative.plant_id, t.negative.leaf_id, t.negative.t)
            loss, (g_a, g_p, g_n) = triplet_margin_loss(
                table[a_key], table[p_key], table[n_key]
            )
            total += loss
            if loss > 0.0:
                active += 1
                table[a_key] = normalize(table[a_key] - lr * g_a)
                table[p_key] = normalize(table[p_key] - lr * g_p)
                table[n_key] = normalize(table[n_key] - lr * g_n)
        print(f"epoch {epoch}: mean loss {total / len(batch):.4f}  "
              f"({active}/{len(batch)} triplets active)")
    print()
    print("loss falls as same-leaf crops pull together and different")
    print("leaves push apart by the 0.3 margin.")


if __name__ == "__main__":
    main()
