"""Independent reference computations used by the tests.

Nothing here imports the package's numeric code: counts are re-derived from
raw token lists with plain loops and each formula is evaluated directly.
"""

import math


def recount(docs):
    """docs: list of (tokens, label) -> (wc dict, n_c dict, w dict)."""
    wc, n_c, w_tot = {}, {}, {}
    for tokens, label in docs:
        for t in tokens:
            wc[(t, label)] = wc.get((t, label), 0) + 1
            n_c[label] = n_c.get(label, 0) + 1
            w_tot[t] = w_tot.get(t, 0) + 1
    return wc, n_c, w_tot


def tfcr_ref(docs, w, c):
    wc, n_c, w_tot = recount(docs)
    n = wc.get((w, c), 0)
    if n == 0:
        return 0.0
    return (n ** 2) / (n_c[c] * w_tot[w])


def tfidf_ref(docs, labels, w, c):
    wc, n_c, _ = recount(docs)
    n = wc.get((w, c), 0)
    if n == 0:
        return 0.0
    cf = sum(1 for lab in labels if wc.get((w, lab), 0) > 0)
    return (n / n_c[c]) * math.log(len(labels) / cf)


def kld_ref(docs, labels, w, c, eps=1e-10):
    wc, n_c, w_tot = recount(docs)
    n = wc.get((w, c), 0)
    if n == 0:
        return 0.0
    p = n / n_c[c]
    rest = sum(n_c.get(lab, 0) for lab in labels if lab != c)
    q = (w_tot[w] - n) / rest
    return max(0.0, p * math.log((p + eps) / (q + eps)))


def macro_f1_ref(gold, pred, n_classes):
    f1s = []
    for c in range(n_classes):
        tp = sum(1 for g, p in zip(gold, pred) if g == c and p == c)
        fp = sum(1 for g, p in zip(gold, pred) if g != c and p == c)
        fn = sum(1 for g, p in zip(gold, pred) if g == c and p != c)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
    return sum(f1s) / n_classes


def softmax_loss_ref(W, b, X, y, l2):
    """Cross-entropy by explicit loops (no vectorization)."""
    total = 0.0
    for i in range(len(X)):
        logits = [sum(W[c][j] * X[i][j] for j in range(len(X[i]))) + b[c] for c in range(len(b))]
        m = max(logits)
        lse = m + math.log(sum(math.exp(z - m) for z in logits))
        total += lse - logits[y[i]]
    reg = 0.5 * l2 * sum(v * v for row in W for v in row)
    return total / len(X) + reg


def central_difference(f, params, h=1e-5):
    """Gradient of f at a flat list of params by central differences."""
    grad = []
    for i in range(len(params)):
        up = list(params)
        dn = list(params)
        up[i] += h
        dn[i] -= h
        grad.append((f(up) - f(dn)) / (2 * h))
    return grad


def all_scores_ref(docs, labels, eps=1e-10):
    """Every (word, category) score for tfcr/tfidf/kld from one recount.

    Returns ``{scheme: {(w, c): score}}``; ``kld`` is None when some
    category has no token mass outside it.
    """
    wc, n_c, w_tot = recount(docs)
    k = len(labels)
    total = sum(n_c.values())
    kld_defined = all(total - n_c.get(c, 0) > 0 for c in labels)
    out = {"tfcr": {}, "tfidf": {}, "kld": {} if kld_defined else None}
    for w in w_tot:
        cf = sum(1 for c in labels if wc.get((w, c), 0) > 0)
        for c in labels:
            n = wc.get((w, c), 0)
            if n == 0:
                out["tfcr"][(w, c)] = 0.0
                out["tfidf"][(w, c)] = 0.0
                if kld_defined:
                    out["kld"][(w, c)] = 0.0
                continue
            out["tfcr"][(w, c)] = (n ** 2) / (n_c[c] * w_tot[w])
            out["tfidf"][(w, c)] = (n / n_c[c]) * math.log(k / cf)
            if kld_defined:
                p = n / n_c[c]
                q = (w_tot[w] - n) / (total - n_c[c])
                out["kld"][(w, c)] = max(0.0, p * math.log((p + eps) / (q + eps)))
    return out
