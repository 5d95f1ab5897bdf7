#!/usr/bin/env python3
"""Convert a dataset to the headerless numeric CSV that cssdpp reads.

Accepted inputs:
  *.mat      MATLAB file; the design matrix is taken from the variable named
             by --var (default X).  Sparse matrices are densified.
  *.svm,
  *.libsvm,
  *.txt      LIBSVM / svmlight text format; labels are dropped.
  *.csv      passed through numpy, useful to drop a header or label column.

An http(s) URL may be given instead of a path; it is downloaded first.

Example:
  python3 scripts/convert_dataset.py BASEHOCK.mat basehock.csv
  CSSDPP_BASEHOCK_CSV=basehock.csv CSSDPP_COLON_CSV=colon.csv build/tests/acceptance
"""

import argparse
import pathlib
import sys
import tempfile
import urllib.request

import numpy as np
import scipy.io
import scipy.sparse
from sklearn.datasets import load_svmlight_file


def fetch(source: str) -> pathlib.Path:
    if not source.startswith(("http://", "https://")):
        return pathlib.Path(source)
    suffix = pathlib.PurePosixPath(source.split("?")[0]).suffix
    handle = tempfile.NamedTemporaryFile(suffix=suffix, delete=False)
    with urllib.request.urlopen(source) as response:
        handle.write(response.read())
    handle.close()
    return pathlib.Path(handle.name)


def load(path: pathlib.Path, var: str, skip_header: bool, drop_first: bool) -> np.ndarray:
    suffix = path.suffix.lower()
    if suffix == ".mat":
        contents = scipy.io.loadmat(path)
        if var not in contents:
            names = [k for k in contents if not k.startswith("__")]
            sys.exit(f"variable {var!r} not in {path}; found {names}")
        X = contents[var]
    elif suffix in (".svm", ".libsvm", ".txt"):
        X, _ = load_svmlight_file(str(path))
    elif suffix == ".csv":
        X = np.loadtxt(path, delimiter=",", skiprows=1 if skip_header else 0, ndmin=2)
        if drop_first:
            X = X[:, 1:]
    else:
        sys.exit(f"unrecognized extension {suffix!r}")
    if scipy.sparse.issparse(X):
        X = X.toarray()
    return np.asarray(X, dtype=np.float64)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("source", help="input path or URL")
    parser.add_argument("output", help="CSV written here")
    parser.add_argument("--var", default="X", help="variable holding the matrix in a .mat file")
    parser.add_argument("--header", action="store_true", help="skip one header line of a CSV input")
    parser.add_argument("--drop-first-column", action="store_true",
                        help="drop a label column of a CSV input")
    parser.add_argument("--transpose", action="store_true",
                        help="input stores observations as columns")
    args = parser.parse_args()

    X = load(fetch(args.source), args.var, args.header, args.drop_first_column)
    if args.transpose:
        X = X.T
    if not np.all(np.isfinite(X)):
        sys.exit("input contains NaN or infinite values")
    np.savetxt(args.output, X, delimiter=",", fmt="%.17g")
    print(f"wrote {X.shape[0]} x {X.shape[1]} to {args.output}")


if __name__ == "__main__":
    main()
