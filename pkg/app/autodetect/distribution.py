"""Empirical PDF and CDF of an MSE vector, for plotting"""

import numpy as np
import pandas as pd

from app.autodetect.moments import MseVector
from app.errors import InvalidInputError


def mse_pdf(v: MseVector, bins: int = 50) -> pd.DataFrame:
    """
    Density histogram of the MSE values

    Args:
        v: MSE vector
        bins: Number of equal-width bins

    Returns:
        Frame with columns bin_center, pdf
    """
    if bins < 1:
        raise InvalidInputError("bins must be positive")
    density, edges = np.histogram(v.values, bins=bins, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return pd.DataFrame({"bin_center": centers, "pdf": density})


def mse_ecdf(v: MseVector) -> pd.DataFrame:
    """Empirical CDF evaluated at every sorted MSE value (columns mse, cdf)"""
    x = np.sort(v.values, kind="stable")
    return pd.DataFrame({"mse": x, "cdf": np.arange(1, x.size + 1) / x.size})


def mse_table(v: MseVector) -> pd.DataFrame:
    """MSE vector in segment order (columns index, mse)"""
    return pd.DataFrame({"index": np.arange(len(v)), "mse": v.values})
