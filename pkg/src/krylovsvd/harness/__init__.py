"""Experiment driver: synthetic spectra, Matrix Market I/O, campaigns, reports."""
from .campaign import CAMPAIGNS, CampaignConfig, run_campaign, run_trial, trial_seeds
from .mmio import read_matrix_market, write_matrix_market
from .report import ExperimentReport, TrialRecord, emit_report, from_json, to_csv, to_json
from .spectra import SpectrumSpec, spectrum_values, synth_factors, synth_matrix
