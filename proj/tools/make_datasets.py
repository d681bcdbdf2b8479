#!/usr/bin/env python3
"""Regenerate the bundled benchmark CSVs under data/.

iris and wine are converted from the copies shipped with scikit-learn.
balance-scale and tic-tac-toe are generated from their defining rules,
which reproduces the UCI files row for row (modulo row order).
"""
import csv
import itertools
import os
import sys

import sklearn

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "data")
SK = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data")


def convert_sklearn(src, dst, header):
    with open(os.path.join(SK, src)) as f:
        rows = list(csv.reader(f))
    names = rows[0][2:]
    with open(os.path.join(OUT, dst), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows[1:]:
            w.writerow(r[:-1] + [names[int(r[-1])]])


def balance_scale():
    # class, left-weight, left-distance, right-weight, right-distance
    with open(os.path.join(OUT, "balance-scale.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        for lw, ld, rw, rd in itertools.product(range(1, 6), repeat=4):
            left, right = lw * ld, rw * rd
            cls = "L" if left > right else ("R" if right > left else "B")
            w.writerow([cls, lw, ld, rw, rd])


LINES = [(0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6),
         (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6)]


def wins(board, p):
    return any(all(board[i] == p for i in line) for line in LINES)


def tic_tac_toe():
    # all terminal boards reachable with x moving first
    seen = {}

    def play(board, turn):
        key = tuple(board)
        if key in seen:
            return
        if wins(board, "x") or wins(board, "o") or "b" not in board:
            seen[key] = "positive" if wins(board, "x") else "negative"
            return
        seen[key] = None
        for i in range(9):
            if board[i] == "b":
                board[i] = turn
                play(board, "o" if turn == "x" else "x")
                board[i] = "b"

    play(["b"] * 9, "x")
    terminal = sorted((k, v) for k, v in seen.items() if v is not None)
    with open(os.path.join(OUT, "tic-tac-toe.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        for board, cls in terminal:
            w.writerow(list(board) + [cls])
    return len(terminal)


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    convert_sklearn("iris.csv", "iris.csv",
                    ["sepal_length", "sepal_width", "petal_length", "petal_width", "species"])
    convert_sklearn("wine_data.csv", "wine.csv",
                    ["alcohol", "malic_acid", "ash", "alcalinity_of_ash", "magnesium",
                     "total_phenols", "flavanoids", "nonflavanoid_phenols",
                     "proanthocyanins", "color_intensity", "hue",
                     "od280_od315", "proline", "class"])
    balance_scale()
    n = tic_tac_toe()
    print(f"tic-tac-toe boards: {n}", file=sys.stderr)
