"""Regenerate the bundled chain fixtures and pin their oracle values.

    python scripts/make_fixtures.py
"""

import json
from pathlib import Path

from nextcmd import ingest, synth

DATA = Path(__file__).resolve().parents[1] / "src" / "nextcmd" / "data"


def pin(name, spec, views):
    oracle = {f"bayes_{v}": synth.bayes_optimal_accuracy(spec, view=v) for v in views}
    if "unordered" in views:
        oracle["bigram_margin"] = oracle["bayes_full"] - oracle["bayes_unordered"]
    doc = {
        "spec": spec.to_dict(),
        "oracle": oracle,
        # prefixes are cut to the last two tokens before featurization
        "acceptance": {"max_prefix_window": 2, "k": 5, "seed": 0},
    }
    (DATA / f"{name}.json").write_text(json.dumps(doc) + "\n")
    print(name, oracle)


def main():
    pin("order1", synth.build_order1_spec(), ("full", "last"))
    pin("order2", synth.build_order2_spec(), ("full", "last", "unordered"))

    fx = synth.cleansing_fixture()
    with open(DATA / "cleansing_fixture.jsonl", "w") as fh:
        ingest.write_corpus(fx.events, fh)
    (DATA / "cleansing_fixture.truth.json").write_text(
        json.dumps(fx.truth.to_dict(), indent=2, sort_keys=True) + "\n")
    print("cleansing fixture", fx.truth)


if __name__ == "__main__":
    main()
