#!/usr/bin/env python3
# Copyright 2026 The Audiodist Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates data/toy: a small synthetic listening test in embedding space."""

import json
import pathlib

import numpy as np

DIM = 8
FRAMES = 40

ITEMS = [("speech1", "speech"), ("music1", "music"), ("mixed1", "mixed"),
         ("music2", "music")]

# condition_id, codec_label, kbps, lowpass, hidden, degradation, base score
CONDITIONS = [
    ("hidden_ref", "reference", 0.0, False, True, 0.0, 98.0),
    ("codec_64", "codec", 64.0, False, False, 0.15, 85.0),
    ("codec_32", "codec", 32.0, False, False, 0.45, 66.0),
    ("codec_16", "codec", 16.0, False, False, 0.9, 41.0),
    ("lp70", "lowpass", 0.0, True, False, 0.6, 55.0),
    ("lp35", "lowpass", 0.0, True, False, 1.2, 22.0),
]


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "toy"
    (out / "emb").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20261018)
    pairs = []
    for item_id, _ in ITEMS:
        ref = rng.normal(size=(FRAMES, DIM)).astype(np.float32)
        np.save(out / "emb" / f"{item_id}_ref.npy", ref)
        for cid, _, _, _, _, level, score in CONDITIONS:
            test = ref + level * rng.normal(size=ref.shape) + 0.5 * level
            np.save(out / "emb" / f"{item_id}_{cid}.npy", test.astype(np.float32))
            jitter = 0.0 if cid == "hidden_ref" else rng.uniform(-6.0, 6.0)
            pairs.append({
                "item_id": item_id,
                "condition_id": cid,
                "ref_embedding_path": f"emb/{item_id}_ref.npy",
                "test_embedding_path": f"emb/{item_id}_{cid}.npy",
                "mushra_score": round(float(np.clip(score + jitter, 0, 100)), 1),
            })
    manifest = {
        "embedding_label": "toy",
        "items": [{"item_id": i, "content_class": c} for i, c in ITEMS],
        "conditions": [{
            "condition_id": c[0],
            "codec_label": c[1],
            "bitrate_kbps": c[2],
            "is_lowpass_anchor": c[3],
            "is_hidden_reference": c[4],
        } for c in CONDITIONS],
        "pairs": pairs,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
