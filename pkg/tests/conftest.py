#!/usr/bin/env python3
"""Shared test fixtures: the sample systems, interpretations and machines."""

from pathlib import Path

import pytest

from src.interp import load_interp
from src.otm import load_otm
from src.sopoly import OracleTable
from src.strs import load_strs

SAMPLES = Path(__file__).resolve().parent.parent / 'samples'


def little_endian_value(word: str) -> int:
    return int(word[::-1], 2) if word else 0


def to_bin(k: int) -> str:
    """Little-endian binary without trailing zeros; 0 is the empty word."""
    return bin(k)[2:][::-1] if k else ''


def expected_sum(table: OracleTable, word: str) -> int:
    """Sum of f over the numerals below the length of `word`."""
    return sum(little_endian_value(table(to_bin(k))) for k in range(len(word)))


@pytest.fixture(scope="session")
def samples_dir() -> Path:
    return SAMPLES


@pytest.fixture(scope="session")
def arith():
    return load_strs(SAMPLES / 'arith.strs')


@pytest.fixture(scope="session")
def arith_printed(arith):
    return load_interp(SAMPLES / 'arith.csi', arith)


@pytest.fixture(scope="session")
def arith_fixed(arith):
    return load_interp(SAMPLES / 'arith_fixed.csi', arith)


@pytest.fixture(scope="session")
def binadd():
    return load_strs(SAMPLES / 'binadd.strs')


@pytest.fixture(scope="session")
def binadd_interp(binadd):
    return load_interp(SAMPLES / 'binadd.csi', binadd)


@pytest.fixture(scope="session")
def sumf():
    return load_strs(SAMPLES / 'sumf.strs')


@pytest.fixture(scope="session")
def sumf_interp(sumf):
    return load_interp(SAMPLES / 'sumf.csi', sumf)


@pytest.fixture(scope="session")
def sumf_printed(sumf):
    return load_interp(SAMPLES / 'sumf_printed.csi', sumf)


@pytest.fixture(scope="session")
def explode():
    return load_strs(SAMPLES / 'explode.strs')


@pytest.fixture(scope="session")
def identity_otm():
    return load_otm(SAMPLES / 'identity.otm')


@pytest.fixture(scope="session")
def bitflip_otm():
    return load_otm(SAMPLES / 'bitflip.otm')


@pytest.fixture(scope="session")
def onequery_otm():
    return load_otm(SAMPLES / 'onequery.otm')
