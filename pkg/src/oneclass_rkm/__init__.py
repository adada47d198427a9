"""One-class restricted kernel machines, a least-squares one-class SVM
baseline, grid-search model selection and rank-based model comparison."""

from .data_io import Dataset, SplitSpec, StandardizerState, load_csv
from .kernel import KernelSpec
from .lsocsvm import LsocsvmModel
from .ocrkm import OcrkmHyperparams, OcrkmModel

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "SplitSpec",
    "StandardizerState",
    "load_csv",
    "KernelSpec",
    "OcrkmHyperparams",
    "OcrkmModel",
    "LsocsvmModel",
]
