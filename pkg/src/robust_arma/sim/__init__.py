"""Simulation, contamination and Monte Carlo tooling."""
from .process import (CLEAN, Contaminant, Contaminated, ContaminationSpec,
                      contaminate, generate_arma, outlier_positions)
