# Copyright 2026 The Rankforge Authors. All Rights Reserved.
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

"""Independent numpy Monte Carlo of the likelihood-ratio classifier for the
synthetic generator. Writes bayes_oracle.json next to this script."""

import json
import os
import sys

import numpy as np

DESK = dict(groups=8, moves=16, plies=80, lambda0=0.6, lambda1=0.06,
            psd=0.6, pdecay=0.25, pwidth=1.0)


def perceived_logits(cfg, q, noise, skill):
    centers = np.arange(cfg["groups"])
    w = np.exp(-(skill - centers) ** 2 / (2 * cfg["pwidth"] ** 2))
    w = w / np.sqrt((w ** 2).sum())
    sigma = cfg["psd"] * np.exp(-cfg["pdecay"] * skill)
    lam = cfg["lambda0"] + cfg["lambda1"] * skill
    return lam * (q + sigma * (noise @ w))


def log_softmax(z):
    m = z.max(-1, keepdims=True)
    return z - m - np.log(np.exp(z - m).sum(-1, keepdims=True))


def oracle(cfg, n, trials, seed):
    rng = np.random.default_rng(seed)
    k = cfg["plies"] // 2
    hits = hits1 = 0
    for _ in range(trials):
        group = rng.integers(cfg["groups"])
        q = rng.standard_normal((n, k, cfg["moves"]))
        noise = rng.standard_normal((n, k, cfg["moves"], cfg["groups"]))
        probs = np.exp(log_softmax(perceived_logits(cfg, q, noise, group)))
        u = rng.random((n, k, 1))
        chosen = np.minimum((probs.cumsum(-1) <= u).sum(-1), cfg["moves"] - 1)
        ll = [np.take_along_axis(log_softmax(perceived_logits(cfg, q, noise, g)),
                                 chosen[..., None], -1).sum()
              for g in range(cfg["groups"])]
        guess = int(np.argmax(ll))
        hits += guess == group
        hits1 += abs(guess - group) <= 1
    return hits / trials, hits1 / trials


def main():
    trials = int(sys.argv[1]) if len(sys.argv) > 1 else 4000
    out = {"config": DESK, "trials": trials, "by_n": {}}
    for n in (5, 20):
        acc, acc1 = oracle(DESK, n, trials, 1000 + n)
        se = (acc * (1 - acc) / trials) ** 0.5
        out["by_n"][str(n)] = {"accuracy": round(acc, 5), "accuracy_pm1": round(acc1, 5),
                               "standard_error": round(se, 5)}
        print(n, acc, acc1, se)
    path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "bayes_oracle.json")
    with open(path, "w") as f:
        json.dump(out, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
