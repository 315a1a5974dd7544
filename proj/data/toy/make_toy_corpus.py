#!/usr/bin/env python3
"""Writes the bundled toy corpus.

A verb-final source language with an English target:

  train.src / train.tgt / train.align / train.trees / train.tags   50 sentences
  train.graft_expected.tsv    expected graft case for every tag, known from
                              how each sentence was built
  test.src / test.ref         held-out sentences

Genitives reorder differently for person names ("ali ka kitab" -> "Ali 's
book") and common nouns ("larka ka ghar" -> "house of boy"). Common-noun
genitives are more frequent, so a grammar that cannot tell a PERSON noun
phrase from any other noun phrase picks the wrong order for unseen names.

Run from anywhere; output goes next to this script. Deterministic.
"""

from pathlib import Path

OUT = Path(__file__).resolve().parent

COMMON = {"admi": "man", "aurat": "woman", "larka": "boy", "larki": "girl"}
NAMES = {"ali": "Ali", "sara": "Sara", "ahmed": "Ahmed", "fatima": "Fatima", "bilal": "Bilal", "zainab": "Zainab"}
OBJECTS = {"roti": "bread", "seb": "apple", "kitab": "book", "khat": "letter", "pani": "water", "chai": "tea",
           "ghar": "house"}
VERBS = {"khata": "eats", "parhta": "reads", "likhta": "writes", "peeta": "drinks", "dekhta": "sees"}
BASE = {"khana": "eat", "parhna": "read", "likhna": "write", "peena": "drink", "dekhna": "see"}
STEM = {"kha": "eat", "parh": "read", "likh": "write", "pee": "drink", "dekh": "see"}
CITIES = {"lahore": "Lahore", "karachi": "Karachi", "london": "London", "quetta": "Quetta"}


def leaf(tag, word):
    return f"({tag} {word})"


def subject_np(src):
    if src in NAMES:
        return NAMES[src], f"(NP {leaf('NNP', NAMES[src])})", True
    return COMMON[src], f"(NP {leaf('NN', COMMON[src])})", False


class Corpus:
    def __init__(self):
        self.rows = []  # (src, tgt, align, tree, tags); tags = [(start, end, kind, label, expected)]

    def add(self, src, tgt, align, tree, tags=()):
        s, t = src.split(), tgt.split()
        for i, j in align:
            assert i < len(s) and j < len(t), (src, tgt, i, j)
        self.rows.append((src, tgt, align, tree, list(tags)))


def svo(c, subj, obj, verb, extra_tags=()):
    """subj obj verb -> subj verb obj"""
    st, snp, named = subject_np(subj)
    tree = f"(S {snp} (VP {leaf('VBZ', VERBS[verb])} (NP {leaf('NN', OBJECTS[obj])})))"
    tags = [(0, 1, "NE", "PERSON", "ExactGraft")] if named else []
    c.add(f"{subj} {obj} {verb}", f"{st} {VERBS[verb]} {OBJECTS[obj]}", [(0, 0), (1, 2), (2, 1)], tree,
          tags + list(extra_tags))


def lives(c, subj, city, double_tag=False):
    """subj city mein rehta -> subj lives in city"""
    st, snp, named = subject_np(subj)
    tree = f"(S {snp} (VP {leaf('VBZ', 'lives')} (PP {leaf('IN', 'in')} (NP {leaf('NNP', CITIES[city])}))))"
    tags = [(0, 1, "NE", "PERSON", "ExactGraft")] if named else []
    tags.append((3, 4, "NE", "GPE", "ExactGraft"))
    if double_tag:
        # A second entity type on the same words replaces the first.
        tags.append((3, 4, "NE", "LOCATION", "Overlay"))
    c.add(f"{subj} {city} mein rehta", f"{st} lives in {CITIES[city]}", [(0, 0), (1, 3), (2, 2), (3, 1)], tree, tags)


def of_genitive(c, owner, thing):
    """owner ka thing -> thing of owner"""
    o, t = COMMON[owner], OBJECTS[thing]
    tree = f"(NP (NP {leaf('NN', t)}) (PP {leaf('IN', 'of')} (NP {leaf('NN', o)})))"
    c.add(f"{owner} ka {thing}", f"{t} of {o}", [(0, 2), (1, 1), (2, 0)], tree)


def s_genitive(c, name, thing):
    """name ka thing -> name 's thing"""
    n, t = NAMES[name], OBJECTS[thing]
    tree = f"(NP (NP {leaf('NNP', n)}) {leaf('POS', chr(39) + 's')} (NP {leaf('NN', t)}))"
    c.add(f"{name} ka {thing}", f"{n} 's {t}", [(0, 0), (1, 1), (2, 2)], tree, [(0, 1, "NE", "PERSON", "ExactGraft")])


def wants(c, subj, obj, base):
    """subj obj base chahta -> subj wants to base obj"""
    st, snp, named = subject_np(subj)
    tree = (f"(S {snp} (VP {leaf('VBZ', 'wants')} (VP {leaf('TO', 'to')} "
            f"(VP {leaf('VB', BASE[base])} (NP {leaf('NN', OBJECTS[obj])})))))")
    tags = [(0, 1, "NE", "PERSON", "ExactGraft")] if named else []
    tags += [(1, 2, "TRIG", "Want", "ExactGraft"), (2, 5, "TARG", "Want", "ExactGraft")]
    c.add(f"{subj} {obj} {base} chahta", f"{st} wants to {BASE[base]} {OBJECTS[obj]}",
          [(0, 0), (1, 4), (2, 2), (2, 3), (3, 1)], tree, tags)


def can(c, subj, obj, stem, flat=False):
    """subj obj stem sakta -> subj can stem obj"""
    st, snp, named = subject_np(subj)
    if flat:
        vp = f"(VP {leaf('MD', 'can')} {leaf('VB', STEM[stem])} (NP {leaf('NN', OBJECTS[obj])}))"
        target_case = "NoNodeSkipped"
    else:
        vp = f"(VP {leaf('MD', 'can')} (VP {leaf('VB', STEM[stem])} (NP {leaf('NN', OBJECTS[obj])})))"
        target_case = "ExactGraft"
    tags = [(0, 1, "NE", "PERSON", "ExactGraft")] if named else []
    tags += [(1, 2, "TRIG", "Able", "ExactGraft"), (2, 4, "TARG", "Able", target_case)]
    c.add(f"{subj} {obj} {stem} sakta", f"{st} can {STEM[stem]} {OBJECTS[obj]}", [(0, 0), (1, 3), (2, 2), (3, 1)],
          f"(S {snp} {vp})", tags)


def headed_by_entity(c, w1, w2, e1, e2, head_src, head, label, obj, verb):
    """w1 w2 head obj verb -> e1 e2 head verb obj, with the entity inside a flat NP"""
    tree = (f"(S (NP {leaf('NNP', e1)} {leaf('NNP', e2)} {leaf('NN', head)}) "
            f"(VP {leaf('VBZ', VERBS[verb])} (NP {leaf('NN', OBJECTS[obj])})))")
    c.add(f"{w1} {w2} {head_src} {obj} {verb}", f"{e1} {e2} {head} {VERBS[verb]} {OBJECTS[obj]}",
          [(0, 0), (1, 1), (2, 2), (3, 4), (4, 3)], tree, [(0, 2, "NE", label, "SplitInsert")])


def build():
    c = Corpus()
    # plain transitive clauses
    for subj, obj, verb in [("admi", "roti", "khata"), ("aurat", "seb", "khata"), ("larka", "kitab", "parhta"),
                            ("larki", "khat", "likhta"), ("admi", "pani", "peeta"), ("aurat", "chai", "peeta"),
                            ("larka", "ghar", "dekhta"), ("larki", "kitab", "dekhta")]:
        svo(c, subj, obj, verb)
    for subj, obj, verb in [("ali", "roti", "khata"), ("sara", "kitab", "parhta"), ("ahmed", "khat", "likhta"),
                            ("fatima", "chai", "peeta"), ("bilal", "seb", "khata"), ("zainab", "ghar", "dekhta"),
                            ("sara", "pani", "peeta"), ("fatima", "khat", "parhta")]:
        svo(c, subj, obj, verb)
    # tagger errors: spans across the NP/VP boundary, and an entity tag on a whole VP
    svo(c, "admi", "seb", "dekhta", [(0, 2, "NE", "PERSON", "CrossingSkipped")])
    svo(c, "larka", "roti", "khata", [(1, 3, "NE", "ORGANIZATION", "ExactGraft")])
    svo(c, "aurat", "khat", "parhta", [(0, 2, "NE", "GPE", "CrossingSkipped")])
    # locatives
    for subj, city, double in [("ali", "lahore", False), ("sara", "karachi", False), ("admi", "london", False),
                               ("zainab", "quetta", True), ("larki", "lahore", False), ("ahmed", "karachi", True)]:
        lives(c, subj, city, double)
    # genitives: common nouns outnumber names
    for owner, thing in [("larka", "ghar"), ("larki", "kitab"), ("admi", "khat"), ("aurat", "ghar"),
                         ("larka", "seb"), ("admi", "roti")]:
        of_genitive(c, owner, thing)
    for name, thing in [("ali", "kitab"), ("ahmed", "ghar"), ("bilal", "khat"), ("ali", "seb")]:
        s_genitive(c, name, thing)
    # modality
    for subj, obj, base in [("ali", "kitab", "parhna"), ("larka", "roti", "khana"), ("sara", "khat", "likhna"),
                            ("aurat", "chai", "peena"), ("bilal", "ghar", "dekhna"), ("larki", "seb", "khana")]:
        wants(c, subj, obj, base)
    for subj, obj, stem, flat in [("ali", "kitab", "parh", False), ("larki", "khat", "likh", False),
                                  ("admi", "pani", "pee", False), ("fatima", "seb", "kha", True),
                                  ("larka", "ghar", "dekh", True)]:
        can(c, subj, obj, stem, flat)
    # entities that cover part of a flat noun phrase
    headed_by_entity(c, "aqwam", "muttahida", "United", "Nations", "sadar", "chief", "ORGANIZATION", "khat", "likhta")
    headed_by_entity(c, "shimali", "waziristan", "North", "Waziristan", "governor", "governor", "GPE", "ghar",
                     "dekhta")
    headed_by_entity(c, "aqwam", "muttahida", "United", "Nations", "sadar", "chief", "ORGANIZATION", "kitab",
                     "parhta")
    # both a modality trigger and a target on one word: the target is applied last
    st, snp, _ = subject_np("admi")
    c.add("admi tair sakta", "man can swim", [(0, 0), (1, 2), (2, 1)],
          f"(S {snp} (VP {leaf('MD', 'can')} (VP {leaf('VB', 'swim')})))",
          [(2, 3, "TARG", "Able", "Overlay"), (2, 3, "TRIG", "Able", "ExactGraft"),
           (1, 2, "TRIG", "Able", "ExactGraft")])
    assert len(c.rows) == 50, len(c.rows)
    return c


TEST = [
    ("sara ka ghar", "Sara 's house"),
    ("fatima ka khat", "Fatima 's letter"),
    ("zainab ka kitab", "Zainab 's book"),
    ("larki ka ghar", "house of girl"),
    ("aurat ka kitab", "book of woman"),
    ("sara chai peeta", "Sara drinks tea"),
    ("larka seb khata", "boy eats apple"),
    ("zainab karachi mein rehta", "Zainab lives in Karachi"),
]


def main():
    c = build()
    with open(OUT / "train.src", "w") as src, open(OUT / "train.tgt", "w") as tgt, \
            open(OUT / "train.align", "w") as aln, open(OUT / "train.trees", "w") as trees, \
            open(OUT / "train.tags", "w") as tags, open(OUT / "train.graft_expected.tsv", "w") as exp:
        tags.write("# sentence\tstart\tend\tkind\tlabel\n")
        exp.write("# sentence\tstart\tend\tkind\tlabel\texpected_case\n")
        for sid, (s, t, a, tree, tag_list) in enumerate(c.rows):
            src.write(s + "\n")
            tgt.write(t + "\n")
            aln.write(" ".join(f"{i}-{j}" for i, j in a) + "\n")
            trees.write(tree + "\n")
            for start, end, kind, label, case in tag_list:
                tags.write(f"{sid}\t{start}\t{end}\t{kind}\t{label}\n")
                exp.write(f"{sid}\t{start}\t{end}\t{kind}\t{label}\t{case}\n")
    with open(OUT / "test.src", "w") as src, open(OUT / "test.ref", "w") as ref:
        for s, r in TEST:
            src.write(s + "\n")
            ref.write(r + "\n")


if __name__ == "__main__":
    main()
