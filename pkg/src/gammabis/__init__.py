"""Capacity regions and coding-scheme simulation for biometric identification
systems with correlated chosen and generated secret keys."""

from ._validation import DomainError, SupportTooLarge, ValidationError
from .info_measures import (
    InfoValue,
    JointTable,
    binary_entropy,
    conditional_entropy,
    entropy,
    inv_binary_entropy,
    mutual_information,
    star,
)
from .models import (
    BinaryBIS,
    DiscreteBIS,
    GaussianBIS,
    RateQuery,
    RegionBounds,
    TestChannel,
    binary_to_discrete,
    converted_gaussian,
    induced_joint,
)
from .region_binary import binary_point, fig3_sweep, mgl_check
from .region_discrete import (
    TestChannelSearch,
    check_rates,
    corollary_region,
    max_rg,
    search_test_channel,
    theorem1_bounds,
)
from .region_gaussian import epi_verify, gaussian_point, gaussian_sweep
from .simulator import (
    BISCodec,
    SimConfig,
    exact_leakage,
    generate_codebook,
    join_key,
    run_monte_carlo,
    split_key,
)

__version__ = "0.1.0"
