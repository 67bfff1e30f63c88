#!/usr/bin/env python3
"""Write Porter stemmer reference vectors ("word stem" per line).

Stems come from NLTK's PorterStemmer in ORIGINAL_ALGORITHM mode. The word
list is a seeded sample of the GCIDE dictionary shipped with the
english-words package, plus a handful of radiology terms.

Requires: pip install nltk english-words
"""

import argparse
import random

from english_words import get_english_words_set
from nltk.stem.porter import PorterStemmer

EXTRA = """
abnormality abnormalities atelectasis atelectatic bibasilar cardiomegaly
cardiopulmonary consolidation consolidative effusion effusions emphysematous
granuloma granulomas hyperexpanded hyperinflated interstitial lobectomy
mediastinal opacities opacity pleural pneumonia pneumothorax radiographic
scarring sternotomy unremarkable vascularity caresses ponies ties caress cats
feed agreed plastered bled motoring sing conflated troubled sized hopping
tanned falling hissing fizzed failing filing happy sky relational conditional
rational valenci hesitanci digitizer conformabli radicalli differentli vileli
analogousli vietnamization predication operator feudalism decisiveness
hopefulness callousness formaliti sensitiviti sensibiliti triplicate formative
formalize electriciti electrical hopeful goodness revival allowance inference
airliner gyroscopic adjustable defensible irritant replacement adjustment
dependent adoption homologou communism activate angulariti homologous effective
bowdlerize probate rate cease controll roll generalizations oscillators
""".split()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=25000)
    ap.add_argument("--seed", type=int, default=1979)
    ap.add_argument("--out", default="tests/fixtures/porter_vectors.txt")
    args = ap.parse_args()

    words = sorted(get_english_words_set(["gcide"], alpha=True, lower=True))
    rng = random.Random(args.seed)
    sample = set(rng.sample(words, args.count)) | set(EXTRA)
    stemmer = PorterStemmer(PorterStemmer.ORIGINAL_ALGORITHM)
    with open(args.out, "w") as f:
        for w in sorted(sample):
            f.write(f"{w} {stemmer.stem(w)}\n")
    print(f"wrote {len(sample)} vectors to {args.out}")


if __name__ == "__main__":
    main()
