#!/usr/bin/env python3
"""Regenerates the miniature stand-in datasets under fixtures/.

The public datasets (Bank Marketing, FinancialPhraseBank, Adult Income,
German Credit) are not redistributed. These fixtures keep the same column
names, category vocabularies and class balance so the benchmark harness can
run end to end without them. Output is deterministic for a given numpy
version; the checked-in CSVs are the reference copies.

    python3 tools/make_fixtures.py [outdir]
"""

import csv
import os
import sys

import numpy as np

RNG = np.random.default_rng(20240611)


def logistic(x):
    return 1.0 / (1.0 + np.exp(-x))


def calibrate_intercept(logit, share):
    lo, hi = -20.0, 20.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if logistic(logit + mid).mean() > share:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def exact_share_labels(p, share):
    """Bernoulli draws, then nudged so the positive count is exactly round(share*n)."""
    n = len(p)
    y = (RNG.random(n) < p).astype(int)
    want = int(round(share * n))
    order = np.argsort(-p, kind="stable")
    while y.sum() < want:
        cand = [i for i in order if y[i] == 0]
        y[cand[0]] = 1
    while y.sum() > want:
        cand = [i for i in order[::-1] if y[i] == 1]
        y[cand[0]] = 0
    return y


def pick(options, probs, n):
    probs = np.asarray(probs, dtype=float)
    return np.asarray(options, dtype=object)[RNG.choice(len(options), size=n, p=probs / probs.sum())]


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def bank(n=4000):
    age = np.clip(np.round(RNG.normal(41, 10.5, n)), 18, 95).astype(int)
    jobs = ["blue-collar", "management", "technician", "admin.", "services", "retired",
            "self-employed", "entrepreneur", "unemployed", "housemaid", "student", "unknown"]
    jp = np.array([.215, .209, .168, .114, .092, .050, .035, .033, .029, .027, .021, .007])
    job = pick(jobs, jp, n)
    job[age >= 62] = pick(["retired", "management", "housemaid"], [.8, .1, .1], (age >= 62).sum())
    job[age <= 22] = pick(["student", "services", "blue-collar"], [.6, .2, .2], (age <= 22).sum())
    marital = np.where(age < 28, pick(["single", "married", "divorced"], [.7, .28, .02], n),
                       pick(["married", "single", "divorced"], [.66, .2, .14], n))
    education = pick(["secondary", "tertiary", "primary", "unknown"], [.51, .29, .15, .05], n)
    education[job == "management"] = pick(["tertiary", "secondary"], [.8, .2], (job == "management").sum())
    default = pick(["no", "yes"], [.982, .018], n)
    balance = np.round(np.exp(RNG.normal(6.6, 1.4, n)) - 300 + 8 * (age - 40)).astype(int)
    balance[default == "yes"] = -np.abs(balance[default == "yes"]) // 3
    housing = np.where(RNG.random(n) < logistic(0.2 - 0.06 * (age - 41)), "yes", "no")
    loan = pick(["no", "yes"], [.84, .16], n)
    contact = pick(["cellular", "unknown", "telephone"], [.65, .29, .06], n)
    day = RNG.integers(1, 32, n)
    months = ["may", "jul", "aug", "jun", "nov", "apr", "feb", "jan", "oct", "sep", "mar", "dec"]
    mp = np.array([.305, .153, .138, .118, .088, .065, .059, .031, .016, .013, .011, .003])
    month = pick(months, mp, n)
    contact[np.isin(month, ["may", "jun"]) & (RNG.random(n) < 0.45)] = "unknown"
    duration = np.round(np.exp(RNG.normal(5.2, 0.8, n))).astype(int) + 4
    campaign = np.minimum(1 + RNG.geometric(0.45, n) - 1 + (RNG.random(n) < 0.1) * RNG.integers(0, 8, n), 40)
    contacted = RNG.random(n) < 0.18
    pdays = np.where(contacted, RNG.integers(30, 400, n), -1)
    previous = np.where(contacted, 1 + RNG.poisson(1.4, n), 0)
    poutcome = np.where(contacted, pick(["failure", "other", "success"], [.6, .22, .18], n), "unknown")

    logit = (2.3 * (np.log(duration) - 5.2) / 0.8
             + 2.6 * (poutcome == "success")
             - 0.7 * (housing == "yes")
             - 0.5 * (loan == "yes")
             - 1.1 * (contact == "unknown")
             + 1.4 * np.isin(month, ["mar", "sep", "oct", "dec"])
             - 0.12 * (campaign - 2)
             + 0.5 * (age > 60))
    logit += calibrate_intercept(logit, 0.117)
    y = exact_share_labels(logistic(logit), 0.117)
    header = ["age", "job", "marital", "education", "default", "balance", "housing", "loan",
              "contact", "day", "month", "duration", "campaign", "pdays", "previous", "poutcome", "y"]
    rows = zip(age, job, marital, education, default, balance, housing, loan, contact, day,
               month, duration, campaign, pdays, previous, poutcome, y)
    return header, list(rows)


def phrasebank(n=480):
    # FinancialPhraseBank label shares: 59.4% neutral, 28.1% positive, 12.5% negative.
    counts = {"neutral": int(round(.594 * n)), "positive": int(round(.281 * n))}
    counts["negative"] = n - counts["neutral"] - counts["positive"]
    subjects = ["The company", "Net sales", "Operating profit", "The group", "Quarterly revenue",
                "The board", "Order intake", "Earnings per share", "The bank", "Market share"]
    verbs = {
        "positive": ["rose", "increased", "climbed", "improved", "jumped", "grew"],
        "neutral": ["was reported", "remained", "is expected to be announced", "was recorded", "stood"],
        "negative": ["fell", "decreased", "dropped", "declined", "slumped", "weakened"],
    }
    tails = {
        "positive": ["to a record high", "by {p} percent year on year", "ahead of forecasts",
                     "compared with the previous period, boosting margins"],
        "neutral": ["in the third quarter", "at the annual meeting", "according to the filing",
                    "for the period ending in {m}, in line with guidance"],
        "negative": ["by {p} percent amid weak demand", "below analyst expectations",
                     "after a sharp loss, the company said", "to its lowest level in years"],
    }
    monthnames = ["March", "June", "September", "December"]
    rows = []
    for label, k in counts.items():
        for i in range(k):
            s = subjects[RNG.integers(len(subjects))]
            v = verbs[label][RNG.integers(len(verbs[label]))]
            t = tails[label][RNG.integers(len(tails[label]))]
            t = t.format(p=int(RNG.integers(2, 40)), m=monthnames[RNG.integers(4)])
            rows.append((label, f"{s} {v} {t} (item {label[:3]}-{i})."))
    order = RNG.permutation(len(rows))
    return ["sentiment", "text"], [rows[i] for i in order]


def adult(n=3000):
    age = np.clip(np.round(RNG.gamma(7.0, 5.5, n) + 17), 17, 90).astype(int)
    workclass = pick(["Private", "Self-emp-not-inc", "Local-gov", "?", "State-gov", "Self-emp-inc",
                      "Federal-gov"], [.70, .08, .064, .056, .04, .034, .03], n)
    fnlwgt = np.round(np.exp(RNG.normal(12.0, 0.55, n))).astype(int)
    edus = [("HS-grad", 9), ("Some-college", 10), ("Bachelors", 13), ("Masters", 14),
            ("Assoc-voc", 11), ("11th", 7), ("Assoc-acdm", 12), ("10th", 6), ("Prof-school", 15),
            ("Doctorate", 16)]
    ep = np.array([.33, .23, .17, .055, .043, .037, .033, .029, .018, .013])
    ei = RNG.choice(len(edus), size=n, p=ep / ep.sum())
    education = np.array([edus[i][0] for i in ei], dtype=object)
    education_num = np.array([edus[i][1] for i in ei])
    married = RNG.random(n) < logistic(-1.5 + 0.07 * (age - 25))
    marital = np.where(married, "Married-civ-spouse",
                       pick(["Never-married", "Divorced", "Separated", "Widowed"], [.65, .25, .05, .05], n))
    occupation = pick(["Prof-specialty", "Craft-repair", "Exec-managerial", "Adm-clerical", "Sales",
                       "Other-service", "Machine-op-inspct", "?", "Transport-moving"],
                      [.13, .13, .12, .12, .11, .10, .06, .06, .05], n)
    occupation[workclass == "?"] = "?"
    sex = pick(["Male", "Female"], [.67, .33], n)
    relationship = np.where(married, np.where(sex == "Male", "Husband", "Wife"),
                            pick(["Not-in-family", "Own-child", "Unmarried"], [.5, .3, .2], n))
    race = pick(["White", "Black", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other"],
                [.855, .096, .03, .01, .009], n)
    gain_draw = RNG.random(n)
    capital_gain = np.where(gain_draw < 0.08, np.round(np.exp(RNG.normal(8.5, 1.0, n))), 0).astype(int)
    capital_loss = np.where(RNG.random(n) < 0.045, np.round(RNG.normal(1900, 250, n)), 0).astype(int)
    hours = np.clip(np.round(RNG.normal(40, 11, n) + 4 * (sex == "Male")), 1, 99).astype(int)
    country = pick(["United-States", "Mexico", "?", "Philippines", "Germany", "Canada"],
                   [.90, .02, .018, .006, .004, .052], n)
    logit = (0.55 * (education_num - 10)
             + 1.9 * married
             + 0.035 * (age - 38) - 0.0009 * (age - 45) ** 2 * (age > 45)
             + 0.035 * (hours - 40)
             + 2.2 * (capital_gain > 5000) + 0.9 * (capital_loss > 1700)
             + 0.8 * np.isin(occupation, ["Exec-managerial", "Prof-specialty"])
             - 0.7 * (occupation == "Other-service")
             + 0.3 * (sex == "Male"))
    logit += calibrate_intercept(logit, 0.24)
    income = np.where(exact_share_labels(logistic(logit), 0.24) == 1, ">50K", "<=50K")
    header = ["age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
              "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
              "hours-per-week", "native-country", "income"]
    rows = zip(age, workclass, fnlwgt, education, education_num, marital, occupation, relationship,
               race, sex, capital_gain, capital_loss, hours, country, income)
    return header, list(rows)


def german(n=1000):
    age = np.clip(np.round(RNG.gamma(5.0, 4.5, n) + 19), 19, 75).astype(int)
    sex = pick(["male", "female"], [.69, .31], n)
    job = pick(["2", "1", "3", "0"], [.63, .2, .15, .02], n)
    housing = pick(["own", "rent", "free"], [.71, .18, .11], n)
    saving = pick(["little", "NA", "moderate", "quite rich", "rich"], [.6, .18, .1, .07, .05], n)
    checking = pick(["NA", "little", "moderate", "rich"], [.39, .27, .27, .07], n)
    duration = np.clip(np.round(RNG.gamma(3.0, 7.0, n)), 4, 72).astype(int)
    amount = np.round(np.exp(RNG.normal(7.8, 0.75, n)) * (0.7 + duration / 40.0)).astype(int)
    purpose = pick(["car", "radio/TV", "furniture/equipment", "business", "education", "repairs",
                    "domestic appliances", "vacation/others"], [.34, .28, .18, .1, .06, .022, .012, .006], n)
    logit = (1.1 * (checking == "NA") - 0.6 * (checking == "little")
             - 0.035 * (duration - 20)
             - 0.00008 * (amount - 3000)
             + 0.5 * np.isin(saving, ["quite rich", "rich"]) - 0.25 * (saving == "little")
             + 0.4 * (housing == "own") + 0.015 * (age - 35))
    logit += calibrate_intercept(logit, 0.70)
    risk = np.where(exact_share_labels(logistic(logit), 0.70) == 1, "good", "bad")
    header = ["Age", "Sex", "Job", "Housing", "Saving accounts", "Checking account",
              "Credit amount", "Duration", "Purpose", "Risk"]
    rows = zip(age, sex, job, housing, saving, checking, amount, duration, purpose, risk)
    return header, list(rows)


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "fixtures")
    os.makedirs(out, exist_ok=True)
    for name, fn in [("bank.csv", bank), ("phrasebank.csv", phrasebank), ("adult.csv", adult),
                     ("german.csv", german)]:
        header, rows = fn()
        write_csv(os.path.join(out, name), header, rows)
        print(f"wrote {name}: {len(rows)} rows")


if __name__ == "__main__":
    main()
