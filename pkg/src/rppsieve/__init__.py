"""Randomized O*(2^k) algebraic sieve for rural postman / Eulerian extension,
plus conjoining matchings, with brute-force oracles."""

from .driver import DriverConfig, Verdict, solve
from .field import GF2m
from .io import load, parse, serialize

__all__ = ["DriverConfig", "GF2m", "Verdict", "load", "parse", "serialize", "solve"]
