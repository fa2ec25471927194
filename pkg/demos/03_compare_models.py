"""Cross-validate the four classifiers on a reduced order-1 corpus.

Uses 1,000 sessions so the whole comparison runs in well under a minute,
and prints the per-model table produced by the reporting code.
"""

from nextcmd import cleanse, extract, ingest, synth
from nextcmd.evaluation import MetricsReport, cross_validate, format_table
from nextcmd.models import ClassifierConfig
from nextcmd.pipeline import FeatureConfig

spec = synth.MarkovSpec.from_dict({"preset": "order1", "session_count": 1000})
corpus = synth.generate(spec)
streams = cleanse.cleanse_sessions(ingest.group_sessions(corpus.events)).streams
targets = extract.select_targets(streams)
rows = extract.extract_all(streams, targets, max_prefix_window=2)
print(f"{len(rows)} rows over {len(targets)} classes, "
      f"Bayes bound {synth.bayes_optimal_accuracy(spec):.4f}")

runs = [
    ("nb-bernoulli", (1, 3)),
    ("nb-multinomial", (1, 3)),
    ("logreg", (1, 2)),
    ("nn", (1, 1)),
]
reports = []
for kind, ngram in runs:
    features = FeatureConfig(ngram, window=2)
    result = cross_validate(rows, ClassifierConfig(kind=kind), features, targets.classes, k=5)
    config = {"model": {"kind": kind}, "features": features.to_dict(), "eval": {"k": 5}}
    reports.append(MetricsReport.from_scores(result.scores, result.labels, targets.classes, config))

print()
print(format_table(reports))
