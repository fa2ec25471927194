"""What the best possible predictor could score on a synthetic corpus.

The order-2 preset hides most of its signal in the ordered pair of the
last two tokens.  The oracle shows how much is lost when a model sees only
the last token, or both tokens without their order.
"""

from nextcmd import synth

for name in ("order1", "order2"):
    spec = synth.load_preset(name)
    views = ("full", "last", "unordered") if spec.order == 2 else ("full", "last")
    print(f"{name}: {len(spec.tokens)} tokens, {len(spec.command_index())} commands, "
          f"{spec.session_count} sessions of length {spec.session_length[0]}-{spec.session_length[1]}")
    for view in views:
        print(f"  Bayes-optimal accuracy, {view:>9} context: "
              f"{synth.bayes_optimal_accuracy(spec, view=view):.4f}")

# a small sample to show the generator and its ground truth
spec = synth.MarkovSpec.from_dict({"preset": "order2", "session_count": 3, "seed": 1})
corpus = synth.generate(spec)
print()
print("first session, first 8 tokens:", [spec.tokens[i] for i in corpus.chains[0][:8]])
print("ground truth:", corpus.truth.to_dict())
