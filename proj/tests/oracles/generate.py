# Copyright 2026  psdet authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the frozen oracle tables used by the C++ tests.

Every value is computed here by brute force, independently of the C++
code.  The tables are committed; rerunning this script must reproduce them
byte for byte.
"""

import math
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))


def fmt(x):
    return "%.17g" % x


def write(name, lines):
    with open(os.path.join(HERE, name), "w") as f:
        f.write("\n".join(lines) + "\n")


def dft_power(frame, n_fft):
    """|DFT|^2 by the O(n^2) definition, bins 0..n_fft/2."""
    x = np.zeros(n_fft)
    x[: len(frame)] = frame
    n = np.arange(n_fft)
    out = []
    for k in range(n_fft // 2 + 1):
        re = np.sum(x * np.cos(2 * np.pi * k * n / n_fft))
        im = -np.sum(x * np.sin(2 * np.pi * k * n / n_fft))
        out.append(re * re + im * im)
    return out


def power_spectrum_table():
    rng = np.random.default_rng(101)
    lines = ["# frames=4 frame_len=400 n_fft=512; per frame: 400 samples then 257 powers"]
    for _ in range(4):
        frame = rng.uniform(-1.0, 1.0, 400)
        lines.append(" ".join(fmt(v) for v in frame))
        lines.append(" ".join(fmt(v) for v in dft_power(frame, 512)))
    write("power-spectrum.txt", lines)


def softplus(z):
    return max(z, 0.0) + math.log1p(math.exp(-abs(z)))


def oc_softmax_table():
    # label score alpha m0 m1 per_sample_loss
    rows = [
        (0, 0.9, 20.0, 0.9, 0.2),
        (1, 0.2, 20.0, 0.9, 0.2),
        (0, 0.9, 3.0, 0.9, 0.2),
        (1, 0.2, 50.0, 0.9, 0.2),
        (0, 1.0, 20.0, 0.9, 0.2),
        (1, -1.0, 20.0, 0.9, 0.2),
        (1, 0.9, 20.0, 0.9, 0.2),
        (0, -0.3, 20.0, 0.9, 0.2),
    ]
    lines = ["# label score alpha m0 m1 loss"]
    for y, s, a, m0, m1 in rows:
        m = m0 if y == 0 else m1
        sign = 1.0 if y == 0 else -1.0
        lines.append(" ".join([str(y), fmt(s), fmt(a), fmt(m0), fmt(m1),
                               fmt(softplus(a * (m - s) * sign))]))
    write("oc-softmax.txt", lines)


def gaussian_logpdf(x, cov):
    d = len(x)
    sign, logdet = np.linalg.slogdet(cov)
    assert sign > 0
    sol = np.linalg.solve(cov, x)
    return -0.5 * (d * math.log(2 * math.pi) + logdet + x @ sol)


def plda_1d_table():
    """1-D PLDA: w = mu + u x + e, x ~ N(0, 1), e ~ N(0, lam).

    The embeddings of one class are jointly Gaussian with covariance
    u^2 11^T + lam I.  The LLR compares the joint density of enrollment and
    test with the product of their separate densities.
    """
    rng = np.random.default_rng(202)
    lines = ["# mu u lambda n_enroll enroll... test llr"]
    for _ in range(1000):
        mu = rng.normal(0.0, 1.0)
        u = rng.uniform(0.1, 3.0) * (1 if rng.random() < 0.5 else -1)
        lam = rng.uniform(0.05, 2.0)
        n = int(rng.integers(1, 5))
        enroll = rng.normal(mu, math.sqrt(u * u + lam), n)
        test = rng.normal(mu, math.sqrt(u * u + lam) * 1.5)

        def logp(v):
            v = np.asarray(v, dtype=float) - mu
            cov = u * u * np.ones((len(v), len(v))) + lam * np.eye(len(v))
            return gaussian_logpdf(v, cov)

        llr = logp(list(enroll) + [test]) - logp(enroll) - logp([test])
        lines.append(" ".join([fmt(mu), fmt(u), fmt(lam), str(n)] +
                              [fmt(e) for e in enroll] + [fmt(test), fmt(llr)]))
    write("plda-1d.txt", lines)


def adam_table():
    # One step on a scalar: lr beta1 beta2 eps wd p0 g -> p1
    lines = ["# lr beta1 beta2 eps weight_decay p0 grad p1"]
    for lr, b1, b2, eps, wd, p0, g in [
        (2e-3, 0.9, 0.99, 1e-5, 0.0, 0.5, 1.0),
        (2e-3, 0.9, 0.99, 1e-5, 0.01, 0.5, 1.0),
        (1e-2, 0.8, 0.95, 1e-8, 0.1, -1.25, -0.3),
    ]:
        p = p0 * (1 - lr * wd)
        m = (1 - b1) * g
        v = (1 - b2) * g * g
        p1 = p - lr * (m / (1 - b1)) / (math.sqrt(v / (1 - b2)) + eps)
        lines.append(" ".join(fmt(x) for x in (lr, b1, b2, eps, wd, p0, g, p1)))
    write("adam.txt", lines)


def eer_brute(tgt, non):
    """Lower-hull EER by exhaustive pairing of operating points."""
    # A trial is accepted when score >= t, so the distinct scores plus one
    # value above them enumerate every operating point.  Midpoints would not:
    # the midpoint of two adjacent doubles rounds onto one of them.
    scores = sorted(set(tgt) | set(non))
    thresholds = scores + [scores[-1] + 1.0]
    pts = []
    for t in thresholds:
        miss = sum(1 for s in tgt if s < t) / len(tgt)
        fa = sum(1 for s in non if s >= t) / len(non)
        pts.append((miss, fa))
    best = 0.5
    for a in pts:
        for b in pts:
            da, db = a[0] - a[1], b[0] - b[1]
            if da <= 0 <= db and (da != db):
                lam = -da / (db - da)
                best = min(best, a[0] + lam * (b[0] - a[0]))
            elif da == 0:
                best = min(best, a[0])
    return best


def eer_table():
    rng = np.random.default_rng(303)
    lines = ["# n_target targets... n_nontarget nontargets... eer",
             "2 0.8 0.6 2 0.7 0.1 " + fmt(0.25)]
    for _ in range(50):
        nt = int(rng.integers(1, 11))
        nn = int(rng.integers(1, 11))
        tgt = list(np.round(rng.normal(0.5, 1.0, nt), 1))
        non = list(np.round(rng.normal(0.0, 1.0, nn), 1))
        lines.append(" ".join([str(nt)] + [fmt(v) for v in tgt] + [str(nn)] +
                              [fmt(v) for v in non] + [fmt(eer_brute(tgt, non))]))
    write("eer.txt", lines)


if __name__ == "__main__":
    power_spectrum_table()
    oc_softmax_table()
    plda_1d_table()
    adam_table()
    eer_table()
