"""Structural, dynamical and thermodynamic observables used to cross-check sensitivities."""

from .msd import MsdSeries, diffusion_coefficient, msd_compute
from .pressure import PressureSeries, pressure_sample
from .rdf import RdfHistogram, RdfTable, molecular_centres, rdf_accumulate, rdf_finalize, rdf_l2_diff
from .sink import (
    ObservableSink,
    read_rdf_csv,
    write_compare_csv,
    write_msd_csv,
    write_pressure_csv,
    write_rdf_csv,
)

__all__ = [
    "MsdSeries", "ObservableSink", "PressureSeries", "RdfHistogram", "RdfTable", "diffusion_coefficient",
    "molecular_centres", "msd_compute", "pressure_sample", "rdf_accumulate", "rdf_finalize",
    "rdf_l2_diff", "read_rdf_csv", "write_compare_csv", "write_msd_csv", "write_pressure_csv",
    "write_rdf_csv",
]
