"""Write the benchmark CSV files from the datasets bundled with scikit-learn.

Each row holds the raw features followed by a 0/1 label:
  breast_cancer.csv               label 1 = benign
  wine.csv                        label 1 = cultivar 1, 0 = cultivars 0 and 2
  iris_versicolor_virginica.csv   versicolor (0) against virginica (1)
"""

import argparse
import pathlib

from sklearn import datasets


def write(path, features, labels):
    with open(path, "w") as out:
        for row, label in zip(features, labels):
            out.write(",".join(repr(float(x)) for x in row) + f",{int(label)}\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=pathlib.Path, default=pathlib.Path("data"))
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    cancer = datasets.load_breast_cancer()
    write(args.out / "breast_cancer.csv", cancer.data, cancer.target)

    wine = datasets.load_wine()
    write(args.out / "wine.csv", wine.data, wine.target == 1)

    iris = datasets.load_iris()
    keep = iris.target > 0
    write(args.out / "iris_versicolor_virginica.csv", iris.data[keep], iris.target[keep] == 2)


if __name__ == "__main__":
    main()
