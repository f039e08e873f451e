"""Kinetic Monte Carlo for the momentum jump process."""

from src.kmc.alias import build_jump_tables, create_alias, draw_targets
from src.kmc.ensemble import ensemble_stats
from src.kmc.green_kubo import green_kubo, msd_diffusion, total_variation, vacf_cutoff, vacf_decay_rate
from src.kmc.trajectory import holding_times, make_generator, sample_trajectory

__all__ = [
    "create_alias",
    "build_jump_tables",
    "draw_targets",
    "make_generator",
    "holding_times",
    "sample_trajectory",
    "ensemble_stats",
    "green_kubo",
    "msd_diffusion",
    "vacf_cutoff",
    "vacf_decay_rate",
    "total_variation",
]
