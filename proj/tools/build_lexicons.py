#!/usr/bin/env python3
"""Regenerate data/lexicons/{dictionary,frequency_top5000}.txt and
src/synthetic_vocabulary.inc.

Source word counts come from the pyspellchecker English frequency list
(pip install pyspellchecker). The hand-maintained lists in data/lexicons
(modals, particles, affixes, markers, British variants) are not touched.
"""
import gzip
import json
import os
import re
import sys

import spellchecker

DICTIONARY_SIZE = 50000
FREQUENCY_SIZE = 5000

# Misspellings used by the synthetic corpus generator; they must stay out of
# the dictionary even if the source list happens to contain them.
EXCLUDED = {
    "recieve", "definately", "seperate", "occured", "untill", "wierd",
    "beleive", "tommorow", "goverment", "accomodate", "neccessary",
    "existance", "enviroment", "calender", "begining", "succesful",
    "arguement", "occassion", "truely", "wich", "becuase", "freind",
    "thier", "alot", "realy", "finaly", "basicly", "publically",
}


def main(out_dir):
    path = os.path.join(os.path.dirname(spellchecker.__file__), "resources", "en.json.gz")
    with gzip.open(path) as fh:
        counts = json.load(fh)
    words = [w for w, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
             if re.fullmatch(r"[a-z]+", w) and w not in EXCLUDED]
    with open(os.path.join(out_dir, "dictionary.txt"), "w") as fh:
        fh.write("\n".join(sorted(words[:DICTIONARY_SIZE])) + "\n")
    with open(os.path.join(out_dir, "frequency_top5000.txt"), "w") as fh:
        fh.write("\n".join(words[:FREQUENCY_SIZE]) + "\n")
    write_vocabulary_pool(words, out_dir)


# Content words for the synthetic corpus: mid-frequency, 6-9 letters, and
# outside every closed class the feature detectors look at.
POOL_SIZE = 2400
POOL_BLOCKLIST = re.compile(
    r"fuck|shit|bitch|whore|slut|nigg|fag|cunt|dick|cock|puss|rape|porn|sex|nude|"
    r"naked|kill|murder|bastard|damn|hell|ass|gay|drug|suicid|corpse|dead|blood|jew|"
    r"christ|jesus|nazi|terror|breast|tits|penis|vagin|booz|drunk|whisk|cocaine|"
    r"heroin|bomb|gun|weapon|prison|abort|virgin|horny|kiss|lust|erot|stupid|idiot|"
    r"moron|retard|crap|piss|bloody")


def write_vocabulary_pool(words, lexicon_dir):
    closed = set()
    for name in ("modals", "particles", "number_words", "phrasal_verb_bases",
                 "british_variants", "prefixes", "suffixes"):
        with open(os.path.join(lexicon_dir, name + ".txt")) as fh:
            closed |= set(fh.read().split())
    pool = []
    for w in words[1500:25000]:
        if 6 <= len(w) <= 9 and not w.endswith("s") and w not in closed \
                and not POOL_BLOCKLIST.search(w):
            pool.append(w)
        if len(pool) == POOL_SIZE:
            break
    out = os.path.join(os.path.dirname(os.path.abspath(lexicon_dir)), "..", "src",
                       "synthetic_vocabulary.inc")
    with open(os.path.normpath(out), "w") as fh:
        fh.write("// Generated by tools/build_lexicons.py. Content words for the synthetic\n"
                 "// corpus generator; every entry is in data/lexicons/dictionary.txt.\n")
        for i in range(0, len(pool), 8):
            fh.write("    " + " ".join('"%s",' % w for w in pool[i:i + 8]) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/lexicons")
