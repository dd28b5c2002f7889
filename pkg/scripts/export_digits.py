"""Export the scikit-learn 8x8 digits corpus to the CSV layout used here.

One row per sample: 64 integer pixel values in [0, 16] (row-major 8x8)
followed by the label.  Regenerates src/qsr/data/digits_8x8.csv.
"""

from pathlib import Path

from sklearn.datasets import load_digits


def main() -> None:
    out = Path(__file__).resolve().parents[1] / "src" / "qsr" / "data" / "digits_8x8.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    digits = load_digits()
    lines = []
    for row, label in zip(digits.data, digits.target):
        lines.append(",".join(str(int(v)) for v in row) + f",{int(label)}")
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} rows to {out}")


if __name__ == "__main__":
    main()
