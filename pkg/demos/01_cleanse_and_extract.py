"""From raw IDE events to labeled prefix rows.

Builds one small session by hand, runs it through the cleansing pipeline
and prints every intermediate form, then checks the bundled 1,000-event
fixture against its recorded injections.
"""

from datetime import datetime, timedelta, timezone
from importlib import resources
import json

from nextcmd import cleanse, extract, ingest
from nextcmd.events import RawEvent

t0 = datetime(2017, 1, 1, 9, 0, tzinfo=timezone.utc)
ms = lambda n: t0 + timedelta(milliseconds=n)  # noqa: E731

events = [
    RawEvent("s1", ms(0), "EditEvent"),
    RawEvent("s1", ms(5), "SystemEvent"),              # not developer-induced
    RawEvent("s1", ms(10), "CommandEvent", "Save"),
    RawEvent("s1", ms(10), "CommandEvent", "Save"),    # duplicate record
    RawEvent("s1", ms(20), "EditEvent"),
    RawEvent("s1", ms(21), "EditEvent"),
    RawEvent("s1", ms(22), "EditEvent"),               # a run of three
    RawEvent("s1", ms(40), "CommandEvent", "Build"),
]

session = ingest.group_sessions(events)[0]
print("raw types:    ", [e.event_type for e in session.events])
filtered = cleanse.filter_event_types(session)
deduped = cleanse.deduplicate(filtered)
tokens = cleanse.tokenize(deduped)
stream = cleanse.compress_runs(tokens)
print("tokens:       ", tokens.rendered())
print("compressed:   ", stream.rendered())

targets = extract.select_targets([stream], extract.TopK(2))
for row in extract.extract_rows(stream, targets):
    print(f"row: {list(row.prefix)} -> {targets.classes[row.label]}")

data = resources.files("nextcmd.data")
truth = json.loads(data.joinpath("cleansing_fixture.truth.json").read_text())
fixture = ingest.parse_corpus(data.joinpath("cleansing_fixture.jsonl").read_text()).events
out = cleanse.cleanse_sessions(ingest.group_sessions(fixture))
print()
print(f"fixture: {len(fixture)} events")
print(f"  duplicates removed {out.removed_by_dedup}, injected {truth['injected_duplicates']}")
print(f"  run copies removed {out.removed_by_compression}, injected {truth['injected_repeats']}")
print(f"  filtered {out.removed_by_filter}, injected {truth['excluded_events']}")
