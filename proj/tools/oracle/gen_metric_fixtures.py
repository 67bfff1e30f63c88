#!/usr/bin/env python3
"""Freeze reference metric values for tests/fixtures/metrics_pairs.jsonl.

ROUGE comes from Google's rouge-score package, BLEU from sacrebleu, stems
from NLTK's PorterStemmer in ORIGINAL_ALGORITHM mode. METEOR is computed by
a standalone implementation of the staged alignment below; NLTK's
meteor_score is reported next to it for information only because its
alignment picks the last matching reference position rather than the
chunk-minimising one.

Tokenization and sentence splitting are re-implemented here from their rule
descriptions so the scoring libraries see the same units as the C++ code.

Requires: pip install rouge-score sacrebleu nltk
"""

import argparse
import json
import math
import pathlib

from nltk.stem.porter import PorterStemmer
from rouge_score import rouge_scorer
from sacrebleu.metrics import BLEU

PUNCT = set('.,;:!?()[]{}"\'/')
CLOSERS = set('"\')]')
ABBREVIATIONS = {"dr.", "mr.", "mrs.", "ms.", "st.", "vs.", "e.g.", "i.e.",
                 "approx.", "fig.", "cf."}

STEMMER = PorterStemmer(PorterStemmer.ORIGINAL_ALGORITHM)


def word_tokenize(text):
    out = []
    for chunk in text.split():
        i, j = 0, len(chunk)
        lead, trail = [], []
        while i < j and chunk[i] in PUNCT:
            lead.append(chunk[i])
            i += 1
        while j > i and chunk[j - 1] in PUNCT:
            trail.append(chunk[j - 1])
            j -= 1
        out.extend(lead)
        if i < j:
            out.append(chunk[i:j])
        out.extend(reversed(trail))
    return out


def ends_sentence(chunk):
    core = chunk.rstrip("".join(CLOSERS))
    if not core or core[-1] not in ".!?":
        return False
    if chunk.lower() in ABBREVIATIONS:
        return False
    if core[-1] == "." and core[:-1].isdigit():
        return False
    return True


def sentence_split(text):
    sentences, current = [], []
    for chunk in text.split():
        current.append(chunk)
        if ends_sentence(chunk):
            sentences.append(" ".join(current))
            current = []
    if current:
        sentences.append(" ".join(current))
    return sentences


class StemTokenizer:
    def __init__(self, stem):
        self.stem = stem

    def tokenize(self, text):
        toks = [t.lower() for t in word_tokenize(text)]
        if self.stem:
            toks = [STEMMER.stem(t) for t in toks]
        return toks


def meteor(cand, ref):
    cand = [t.lower() for t in cand]
    ref = [t.lower() for t in ref]
    cand_match = [None] * len(cand)
    ref_used = [False] * len(ref)
    stages = [lambda t: t, lambda t: STEMMER.stem(t)]
    for key in stages:
        ck = [key(t) for t in cand]
        rk = [key(t) for t in ref]
        for i in range(len(cand)):
            if cand_match[i] is not None:
                continue
            options = [r for r in range(len(ref)) if not ref_used[r] and rk[r] == ck[i]]
            if not options:
                continue
            choice = None
            if i > 0 and cand_match[i - 1] is not None and cand_match[i - 1] + 1 in options:
                choice = cand_match[i - 1] + 1
            if choice is None and i + 1 < len(cand) and cand_match[i + 1] is None:
                for r in options:
                    if r + 1 < len(ref) and not ref_used[r + 1] and rk[r + 1] == ck[i + 1]:
                        choice = r
                        break
            if choice is None:
                choice = options[0]
            cand_match[i] = choice
            ref_used[choice] = True
    pairs = [(i, r) for i, r in enumerate(cand_match) if r is not None]
    m = len(pairs)
    if m == 0:
        return 0.0
    chunks = 1
    for (i0, r0), (i1, r1) in zip(pairs, pairs[1:]):
        if not (i1 == i0 + 1 and r1 == r0 + 1):
            chunks += 1
    p = m / len(cand)
    r = m / len(ref)
    fmean = 10 * p * r / (r + 9 * p)
    penalty = 0.5 * (chunks / m) ** 3
    return fmean * (1 - penalty)


def nltk_meteor(cand, ref):
    from nltk.translate.meteor_score import meteor_score

    class NoWordnet:
        @staticmethod
        def synsets(*_args, **_kwargs):
            return []

    if not cand or not ref:
        return 0.0
    return meteor_score([ref], cand, stemmer=STEMMER, wordnet=NoWordnet())


def bleu(cands, refs, smooth):
    method = "none" if smooth == "none" else "add-k"
    metric = BLEU(tokenize="none", lowercase=True, smooth_method=method,
                  smooth_value=1 if smooth == "add1" else None,
                  effective_order=True, force=True)
    hyp = [" ".join(c) for c in cands]
    ref = [" ".join(r) for r in refs]
    return metric.corpus_score(hyp, [ref]).score / 100.0


def triple(score):
    return {"precision": score.precision, "recall": score.recall, "f1": score.fmeasure}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", default="tests/fixtures/metrics_pairs.jsonl")
    ap.add_argument("--out", default="tests/fixtures/metrics_oracle.json")
    ap.add_argument("--corpus-out", default="tests/fixtures/fixture_corpus.jsonl")
    ap.add_argument("--pred-out", default="tests/fixtures/fixture_predictions.jsonl")
    args = ap.parse_args()

    pairs = [json.loads(l) for l in pathlib.Path(args.pairs).read_text().splitlines() if l.strip()]
    scorers = {
        stem: rouge_scorer.RougeScorer(["rouge1", "rouge2", "rougeL", "rougeLsum"],
                                       tokenizer=StemTokenizer(stem))
        for stem in (True, False)
    }

    records = []
    agree = 0
    for p in pairs:
        cand, ref = word_tokenize(p["candidate"]), word_tokenize(p["reference"])
        rec = {"id": p["id"]}
        for stem, tag in ((True, "stem"), (False, "nostem")):
            s = scorers[stem].score(
                "\n".join(sentence_split(p["reference"])),
                "\n".join(sentence_split(p["candidate"])))
            rec[tag] = {k: triple(v) for k, v in s.items()}
        rec["meteor"] = meteor(cand, ref)
        rec["nltk_meteor"] = nltk_meteor(cand, ref)
        rec["bleu"] = bleu([cand], [ref], "none")
        rec["bleu_add1"] = bleu([cand], [ref], "add1")
        agree += abs(rec["meteor"] - rec["nltk_meteor"]) < 1e-9
        records.append(rec)

    cands = [word_tokenize(p["candidate"]) for p in pairs]
    refs = [word_tokenize(p["reference"]) for p in pairs]

    def mean(xs):
        return math.fsum(xs) / len(xs)

    aggregate = {}
    for tag in ("stem", "nostem"):
        aggregate[tag] = {
            rt: {k: mean([r[tag][rt][k] for r in records]) for k in ("precision", "recall", "f1")}
            for rt in ("rouge1", "rouge2", "rougeL", "rougeLsum")
        }
    aggregate["meteor"] = mean([r["meteor"] for r in records])
    aggregate["bleu"] = bleu(cands, refs, "none")
    aggregate["bleu_add1"] = bleu(cands, refs, "add1")

    out = {
        "generator": "tools/oracle/gen_metric_fixtures.py",
        "sources": {"rouge": "rouge-score", "bleu": "sacrebleu", "stemmer": "nltk ORIGINAL_ALGORITHM"},
        "per_record": records,
        "aggregate": aggregate,
    }
    pathlib.Path(args.out).write_text(json.dumps(out, indent=1) + "\n")

    with open(args.corpus_out, "w") as fc, open(args.pred_out, "w") as fp:
        for p in pairs:
            fc.write(json.dumps({"id": p["id"], "findings": p["findings"],
                                 "impression": p["reference"], "split": "validation"}) + "\n")
            fp.write(json.dumps({"id": p["id"], "prediction": p["candidate"]}) + "\n")

    print(f"{len(records)} pairs; staged METEOR agrees with nltk on {agree}")


if __name__ == "__main__":
    main()
