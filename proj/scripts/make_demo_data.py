"""Regenerates data/demo: a tiny annotated corpus, lexicon files and embeddings."""

import json
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "demo"

# (doc_id, sentence, [(trigger, type, [(argument, role), ...]), ...])
DOCS = [
    ("d-iraq", "The threat posed by the Iraqi dictator justifies a war, which is sure to kill thousands of innocent children and women.",
     [("war", "Attack", [("Iraqi dictator", "Attacker")]), ("kill", "Die", [("children", "Victim"), ("women", "Victim")])]),
    ("d-gaza", "Palestinian security forces returned Monday to the positions they held in the Gaza Strip before the outbreak of the 33-month Palestinian uprising as Israel removed all checkpoints in the coastal territory, a Palestinian security source said.",
     [("returned", "Transport", [("Monday", "Time"), ("positions", "Place")])]),
    ("d-ankara", "A furious Justice party member, Fehmi Husrev Kutlu, rushed toward Ozkan, bumping into him and sending his eyeglasses flying, Anatolia reported.",
     [("rushed", "Transport", [("Fehmi Husrev Kutlu", "Agent"), ("Ozkan", "Destination")])]),
    ("d-misc", "Rebels attacked the convoy near Kandahar on Tuesday.",
     [("attacked", "Attack", [("Rebels", "Attacker"), ("Kandahar", "Place"), ("Tuesday", "Time")])]),
    ("d-misc", "The troops moved to Basra on Friday.",
     [("moved", "Transport", [("troops", "Agent"), ("Basra", "Destination"), ("Friday", "Time")])]),
    ("d-misc", "A bomb killed soldiers in Baghdad.",
     [("killed", "Die", [("soldiers", "Victim"), ("Baghdad", "Place")])]),
]

VERBS = ["war", "kill", "returned", "rushed", "attacked", "moved", "killed"]
NOUNS = ["threat", "posed", "justifies", "convoy", "bomb"]
GAZETTEER = ["Iraqi dictator", "children", "women", "Monday", "positions", "Fehmi Husrev Kutlu", "Ozkan",
             "Rebels", "Kandahar", "Tuesday", "troops", "Basra", "Friday", "soldiers", "Baghdad"]


def span(text, needle, start=0):
    i = text.index(needle, start)
    return [i, i + len(needle)]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    docs = {}
    for n, (doc_id, text, events) in enumerate(DOCS):
        gold = []
        for trig, etype, args in events:
            gold.append({"trigger": span(text, trig), "type": etype,
                         "args": [[span(text, a), role] for a, role in args]})
        docs.setdefault(doc_id, []).append({"sent_id": f"{doc_id}-s{len(docs.get(doc_id, []))}",
                                            "text": text, "gold_events": gold})
    with open(OUT / "corpus.jsonl", "w") as f:
        for doc_id, sentences in docs.items():
            f.write(json.dumps({"doc_id": doc_id, "sentences": sentences}) + "\n")
    (OUT / "verbs.txt").write_text("\n".join(VERBS) + "\n")
    (OUT / "nouns.txt").write_text("\n".join(NOUNS) + "\n")
    (OUT / "gazetteer.txt").write_text("\n".join(GAZETTEER) + "\n")

    rng = np.random.default_rng(2023)
    dim = 8
    words = sorted({w.lower() for w in VERBS + NOUNS} | {t.lower() for g in GAZETTEER for t in g.split()})
    with open(OUT / "embeddings.txt", "w") as f:
        f.write(f"{len(words)} {dim}\n")
        for w in words:
            f.write(w + " " + " ".join(f"{v:.6f}" for v in rng.normal(size=dim)) + "\n")


if __name__ == "__main__":
    main()
