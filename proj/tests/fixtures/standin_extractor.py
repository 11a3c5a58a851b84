#!/usr/bin/env python3
# Copyright 2026 The storyeval Authors
# SPDX-License-Identifier: Apache-2.0
"""Deterministic stand-in for the feature extractor.

Reads a storyeval work order and writes region/term tensors, bundle
manifests, likelihood files and noun flags in the store's on-disk formats.
Embeddings are hash-seeded: each image gets regions near the concept
vectors of its scene tags, each term sits near its own concept vector.
Likelihoods come from content-word overlap with the preceding sentences.
Only the standard library is used.
"""

import argparse
import hashlib
import json
import math
import os
import random
import re
import struct
import tempfile

ENCODER_ID = "standin-hash-d16-v1"
PROVIDER_ID = "standin-overlap-v1"
CREATED_AT = "2026-01-01T00:00:00Z"
DIM = 16
REGION_NOISE = 0.35
TERM_NOISE = 0.2

TOKEN_RE = re.compile(r"[\w]+(?:['’-][\w]+)*", re.UNICODE)


def seeded(key):
    return random.Random(int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "little"))


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def gauss_vec(key):
    rng = seeded(key)
    return [rng.gauss(0.0, 1.0) for _ in range(DIM)]


def singular(word):
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("s") and not word.endswith("ss") and len(word) > 3:
        return word[:-1]
    return word


def concept(word):
    return unit(gauss_vec("concept:" + singular(word)))


def near(base, key, noise):
    jitter = gauss_vec(key)
    return unit([b + noise * j / math.sqrt(DIM) * 4 for b, j in zip(base, jitter)])


def encode_component(text):
    out = []
    for b in text.encode("utf-8"):
        c = chr(b)
        if c.isascii() and (c.isalnum() or c in "_-"):
            out.append(c)
        else:
            out.append("%%%02X" % b)
    return "".join(out)


def author_file(author):
    return "human.jsonl" if author == "human" else "model." + encode_component(author) + ".jsonl"


def write_atomic(path, data):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".tmp.")
    with os.fdopen(fd, "wb") as f:
        f.write(data)
    os.replace(tmp, path)


def tensor_bytes(rows):
    return b"".join(struct.pack("<%df" % len(r), *r) for r in rows)


def tokens(sentence):
    return [t.lower().replace("’", "'") for t in TOKEN_RE.findall(sentence)]


def load_words(path):
    words = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line)
    return words


def likelihoods(sentences, stopwords):
    p = []
    seen = set()
    for i, s in enumerate(sentences):
        content = {singular(t) for t in tokens(s) if t not in stopwords}
        if i > 0:
            overlap = len(content & seen) / max(1, len(content))
            jitter = seeded("lk:" + sentences[i - 1] + "\n" + s).random()
            p.append(round(min(1.0, 0.45 + 0.35 * overlap + 0.2 * jitter), 6))
        seen |= content
    return p


def load_manifest(path):
    if os.path.exists(path):
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    return None


def fulfil(store, item, scenes, nouns_lexicon, stopwords):
    story_id = item["story_id"]
    author = item["author"]
    want = set(item["want"])
    bundle = os.path.join(store, "bundles", encode_component(story_id))
    manifest_path = os.path.join(bundle, "manifest.json")
    manifest = load_manifest(manifest_path) or {
        "story_id": story_id,
        "encoder_id": ENCODER_ID,
        "created_at": CREATED_AT,
        "files": [],
    }
    changed = False

    if "regions" in want:
        have = {f["image_id"] for f in manifest["files"] if f["role"] == "regions"}
        tags = scenes.get(story_id, [])
        for pos, img in enumerate(item["images"]):
            if img["image_id"] in have:
                continue
            words = tags[pos] if pos < len(tags) else ["scene" + img["image_id"]]
            rows = []
            for k in range(4):
                base = concept(words[k % len(words)])
                rows.append(near(base, "region:%s:%d" % (img["image_id"], k), REGION_NOISE))
            data = tensor_bytes(rows)
            n = sum(1 for f in manifest["files"] if f["role"] == "regions")
            name = "regions.%d.f32" % n
            write_atomic(os.path.join(bundle, name), data)
            manifest["files"].append({
                "role": "regions", "image_id": img["image_id"], "path": name,
                "dims": [len(rows), DIM], "dtype": "f32",
                "sha256": hashlib.sha256(data).hexdigest(),
            })
            changed = True

    flags = None
    if "noun_flags" in want:
        flags = [[t in nouns_lexicon or singular(t) in nouns_lexicon for t in tokens(s)]
                 for s in item["sentences"]]
        manifest.setdefault("noun_flags", {})[author] = flags
        changed = True

    if "terms" in want:
        if "nouns" in item:
            nouns, index = item["nouns"], item["sentence_index"]
        else:
            nouns, index = [], []
            for i, (s, fl) in enumerate(zip(item["sentences"], flags or [])):
                for t, f in zip(tokens(s), fl):
                    if f:
                        nouns.append(t)
                        index.append(i)
        manifest["files"] = [f for f in manifest["files"]
                             if not (f["role"] == "terms" and f["author"] == author)]
        if nouns:
            rows = [near(concept(n), "term:" + n, TERM_NOISE) for n in nouns]
            data = tensor_bytes(rows)
            name = "terms." + encode_component(author) + ".f32"
            write_atomic(os.path.join(bundle, name), data)
            manifest["files"].append({
                "role": "terms", "author": author, "path": name,
                "dims": [len(rows), DIM], "dtype": "f32",
                "sha256": hashlib.sha256(data).hexdigest(),
                "terms": nouns, "sentence_index": index,
            })
        changed = True

    if changed:
        write_atomic(manifest_path, (json.dumps(manifest, indent=2, ensure_ascii=False) + "\n").encode())

    if "likelihoods" in want:
        path = os.path.join(store, "likelihoods", author_file(author))
        rows = {}
        if os.path.exists(path):
            with open(path, encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        row = json.loads(line)
                        rows[row["story_id"]] = row
        rows[story_id] = {"story_id": story_id, "provider_id": PROVIDER_ID,
                          "p": likelihoods(item["sentences"], stopwords)}
        text = "".join(json.dumps(rows[k], ensure_ascii=False) + "\n" for k in sorted(rows))
        write_atomic(path, text.encode())


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    assets = os.path.join(here, "..", "..", "core", "assets")
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--store", required=True)
    ap.add_argument("--workorder", required=True)
    ap.add_argument("--scenes", default=os.path.join(here, "appendix", "scenes.json"))
    ap.add_argument("--limit", type=int, default=None, help="fulfil at most this many items")
    args = ap.parse_args()

    with open(args.scenes, encoding="utf-8") as f:
        scenes = json.load(f)
    nouns_lexicon = load_words(os.path.join(assets, "nouns.txt"))
    stopwords = load_words(os.path.join(assets, "stopwords.txt"))

    with open(args.workorder, encoding="utf-8") as f:
        items = [json.loads(line) for line in f if line.strip()]
    if args.limit is not None:
        items = items[: args.limit]
    for item in items:
        fulfil(args.store, item, scenes, nouns_lexicon, stopwords)
    print("%d work items fulfilled" % len(items))


if __name__ == "__main__":
    main()
