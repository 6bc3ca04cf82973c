"""
File Formats
Delimited feature, meta and code files, the text model file and run outputs.

Samples are rows on disk and columns in memory; the readers own the transpose.
All numbers are written with 17 significant digits so files round-trip exactly
and identical runs produce identical bytes.
"""

import logging
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.coding.exceptions import (
    DatasetValidationError, InvalidHyperparamsError, ParseError, VersionMismatchError
)
from src.coding.models import Dataset, Domain, Hyperparams, Model, TrainHistory
from src.coding.processor import validate_dataset

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MODEL_VERSION = 'crodomsc-v1'
UNLABELED = '?'
FLOAT_FORMAT = '%.17g'

_FIELD_COUNT = re.compile(r'Expected (\d+) fields in line (\d+), saw (\d+)')


def _format_float(value: float) -> str:
    return FLOAT_FORMAT % float(value)


def _read_raw(path: PathLike) -> pd.DataFrame:
    """All cells as stripped strings; missing cells stay NaN"""
    try:
        raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False,
                          skip_blank_lines=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise ParseError("file is empty", path=str(path)) from None
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8 text at byte {exc.start}", path=str(path)) from None
    except pd.errors.ParserError as exc:
        match = _FIELD_COUNT.search(str(exc))
        if match:
            expected, line, seen = match.groups()
            raise ParseError(f"expected {expected} values, found {seen}",
                             path=str(path), line=int(line)) from exc
        raise ParseError(str(exc), path=str(path)) from exc
    return raw.apply(lambda column: column.map(
        lambda cell: cell.strip() if isinstance(cell, str) else cell))


def _is_number(text) -> bool:
    try:
        float(text)
    except (TypeError, ValueError):
        return False
    return True


def _to_float(cell) -> float:
    """Correctly rounded value of a cell, NaN when it is not a number"""
    try:
        return float(cell)
    except (TypeError, ValueError):
        return np.nan


def read_matrix(path: PathLike) -> np.ndarray:
    """
    Read a rectangular numeric file (one sample per row, optional header)

    Returns:
        Array with one row per file row

    Raises:
        ParseError: ragged rows, blank lines, non-numeric or non-finite cells
    """
    raw = _read_raw(path)
    first_line = 1
    if not any(_is_number(cell) for cell in raw.iloc[0] if isinstance(cell, str) and cell):
        raw = raw.iloc[1:]
        first_line = 2

    values = raw.apply(lambda column: column.map(_to_float)).to_numpy(dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        row, column = (int(i) for i in np.argwhere(bad)[0])
        cell = raw.iat[row, column]
        if not isinstance(cell, str) or cell == '':
            reason = f"expected {raw.shape[1]} values"
        elif _is_number(cell):
            reason = f"non-finite value {cell!r}"
        else:
            reason = f"invalid number {cell!r}"
        raise ParseError(reason, path=str(path), line=row + first_line, column=column + 1)
    return values


def read_meta(path: PathLike) -> Tuple[List[Domain], List[Optional[str]]]:
    """Domain tags and labels; '?' marks an unlabeled sample"""
    raw = _read_raw(path)
    if raw.shape[1] != 2:
        raise ParseError(f"meta file needs 2 columns (domain, label), found {raw.shape[1]}",
                         path=str(path), line=1)

    first_line = 1
    header = raw.iat[0, 0]
    if isinstance(header, str) and header.upper() not in {d.value for d in Domain}:
        raw = raw.iloc[1:]
        first_line = 2

    domains: List[Domain] = []
    labels: List[Optional[str]] = []
    for offset, (domain, label) in enumerate(raw.itertuples(index=False, name=None)):
        line = offset + first_line
        if not isinstance(domain, str) or not domain:
            raise ParseError("missing domain tag", path=str(path), line=line, column=1)
        try:
            domains.append(Domain.parse(domain))
        except ValueError as exc:
            raise ParseError(str(exc), path=str(path), line=line, column=1) from None
        if not isinstance(label, str) or not label:
            raise ParseError("missing label (use '?' for unlabeled)",
                             path=str(path), line=line, column=2)
        labels.append(None if label == UNLABELED else label)
    return domains, labels


def load_dataset(features_path: PathLike, meta_path: PathLike,
                 for_training: bool = True) -> Dataset:
    """
    Load a dataset from a feature file and its meta file

    Args:
        features_path: One sample per row, D numeric columns
        meta_path: One (domain, label) row per sample
        for_training: Apply the training validation rules

    Raises:
        ParseError: malformed files or row count mismatch
        DatasetValidationError: data parses but breaks a dataset rule
    """
    rows = read_matrix(features_path)
    domains, labels = read_meta(meta_path)
    if rows.shape[0] != len(domains):
        raise ParseError(
            f"row count mismatch: {rows.shape[0]} feature rows, {len(domains)} meta rows",
            path=str(meta_path))

    dataset = Dataset(features=rows.T, domains=tuple(domains), labels=tuple(labels))
    report = validate_dataset(dataset, for_training=for_training)
    if not report.ok:
        raise DatasetValidationError(
            f"{features_path}: " + "; ".join(report.messages()), list(report.violations))
    logger.debug("Loaded %d samples with %d features from %s",
                 dataset.n_samples, dataset.n_features, features_path)
    return dataset


def write_matrix(rows: np.ndarray, path: PathLike):
    """Write a 2-D array, one row per line, no header"""
    frame = pd.DataFrame(np.asarray(rows, dtype=float))
    frame.to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def save_dataset(dataset: Dataset, features_path: PathLike, meta_path: PathLike):
    """Write the feature and meta files of a dataset"""
    write_matrix(dataset.features.T, features_path)
    meta = pd.DataFrame({
        'domain': [d.value for d in dataset.domains],
        'label': [UNLABELED if label is None else label for label in dataset.labels]
    })
    meta.to_csv(meta_path, index=False, lineterminator='\n')


def write_codes(codes: np.ndarray, path: PathLike):
    """K x N codes written as N rows of K values"""
    write_matrix(np.asarray(codes).T, path)


def read_codes(path: PathLike) -> np.ndarray:
    """Inverse of write_codes; returns K x N"""
    return read_matrix(path).T


def write_history(history: TrainHistory, path: PathLike):
    """Per-iteration objective breakdown as a CSV table"""
    history.to_dataframe().to_csv(path, index=False, float_format=FLOAT_FORMAT,
                                  lineterminator='\n')


def write_metrics(metrics: Dict[str, float], path: PathLike):
    """key,value lines"""
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for key, value in metrics.items():
            handle.write(f"{key},{_format_float(value)}\n")


def save_model(model: Model, path: PathLike):
    """Header line then one line of D values per codeword"""
    hyper = model.hyperparams
    header = ' '.join([
        MODEL_VERSION, str(model.n_features), str(model.n_codewords),
        repr(float(hyper.alpha)), repr(float(hyper.beta)), repr(float(hyper.gamma)),
        repr(float(hyper.norm_bound))
    ])
    lines = [header]
    for k in range(model.n_codewords):
        lines.append(','.join(repr(float(value)) for value in model.codebook[:, k]))
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write('\n'.join(lines) + '\n')


def load_model(path: PathLike) -> Model:
    """
    Read a model file written by save_model

    Raises:
        VersionMismatchError: header does not start with the format tag
        ParseError: malformed header or codeword line (with line number)
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            lines = handle.read().splitlines()
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8 text at byte {exc.start}", path=str(path)) from None
    if not lines:
        raise ParseError("model file is empty", path=str(path), line=1)

    tokens = lines[0].split()
    if not tokens or tokens[0] != MODEL_VERSION:
        found = tokens[0] if tokens else ''
        raise VersionMismatchError(
            f"{path}: expected format '{MODEL_VERSION}', found {found!r}")
    if len(tokens) != 7:
        raise ParseError(f"header needs 7 fields, found {len(tokens)}", path=str(path), line=1)
    try:
        n_features, n_codewords = int(tokens[1]), int(tokens[2])
        alpha, beta, gamma, norm_bound = (float(t) for t in tokens[3:])
    except ValueError as exc:
        raise ParseError(f"malformed header: {exc}", path=str(path), line=1) from None

    body = lines[1:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != n_codewords:
        raise ParseError(f"expected {n_codewords} codeword lines, found {len(body)}",
                         path=str(path), line=len(body) + 2)

    codebook = np.zeros((n_features, n_codewords))
    for k, line in enumerate(body):
        line_number = k + 2
        fields = line.split(',')
        if len(fields) != n_features:
            raise ParseError(f"expected {n_features} values, found {len(fields)}",
                             path=str(path), line=line_number)
        for d, field in enumerate(fields):
            try:
                codebook[d, k] = float(field)
            except ValueError:
                raise ParseError(f"invalid number {field.strip()!r}", path=str(path),
                                 line=line_number, column=d + 1) from None

    try:
        hyper = Hyperparams(n_codewords=n_codewords, alpha=alpha, beta=beta, gamma=gamma,
                            norm_bound=norm_bound)
    except InvalidHyperparamsError as exc:
        raise ParseError(f"invalid hyperparameters: {exc}", path=str(path), line=1) from exc
    return Model(codebook=codebook, hyperparams=hyper)
