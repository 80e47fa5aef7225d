"""Generate the bundled credit-style fixture dataset (data/credit_risk.csv).

200 subjects, 11 numeric features, binary label. A latent quality score
drives six strong features; five weaker features are mostly noise so that
candidate distances have a floor and greedy planning favors real jumps.
Deterministic: re-running reproduces the same file byte for byte.
"""

import csv
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "credit_risk.csv"

N = 200
SEED = 1187

# name, raw min, raw max, label coefficient (on the normalized value),
# latent loading (how strongly quality shifts the feature), noise sd, decimals
FEATURES = [
    ("income",                20000.0, 150000.0,  1.6, 0.40, 0.09, 0),
    ("employment_length",         0.0,     25.0,  1.3, 0.40, 0.10, 1),
    ("credit_history_length",     0.0,     30.0,  1.4, 0.40, 0.09, 1),
    ("loan_interest_rate",        4.0,     22.0,  1.5, 0.40, 0.09, 2),
    ("loan_percent_income",     0.02,     0.60, -1.7, -0.40, 0.09, 3),
    ("loan_amount",            1000.0,  40000.0,  1.3, 0.40, 0.10, 0),
    ("age",                      21.0,     70.0,  0.15, 0.05, 0.18, 0),
    ("open_credit_lines",         0.0,     15.0,  0.1, 0.05, 0.18, 0),
    ("debt_to_income",           0.02,     0.90, -0.25, -0.05, 0.18, 3),
    ("savings_balance",           0.0,  80000.0,  0.15, 0.05, 0.18, 0),
    ("delinquencies_2y",          0.0,      6.0, -0.2, -0.05, 0.20, 0),
]

LABEL_SHARPNESS = 1.6


def main() -> None:
    rng = np.random.default_rng(SEED)
    quality = rng.uniform(-1.0, 1.0, size=N)

    norm_columns = {}
    for name, _, _, _, loading, noise_sd, _ in FEATURES:
        norm = 0.5 + loading * quality + rng.normal(0.0, noise_sd, size=N)
        norm_columns[name] = np.clip(norm, 0.01, 0.99)

    logit = np.zeros(N)
    for name, _, _, coef, _, _, _ in FEATURES:
        logit += coef * (norm_columns[name] - 0.5)
    prob = 1.0 / (1.0 + np.exp(-LABEL_SHARPNESS * logit))
    labels = (rng.uniform(size=N) < prob).astype(int)

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", *[f[0] for f in FEATURES], "label"])
        for i in range(N):
            row = [f"c{i + 1:03d}"]
            for name, lo, hi, _, _, _, decimals in FEATURES:
                raw = lo + norm_columns[name][i] * (hi - lo)
                row.append(f"{raw:.{decimals}f}" if decimals else f"{raw:.0f}")
            row.append(str(labels[i]))
            writer.writerow(row)
    print(f"wrote {N} subjects to {OUT}")
    print(f"label balance: {labels.mean():.3f}")


if __name__ == "__main__":
    main()
