"""Joint spectral radius bounds, Barabanov norms and uniqueness verdicts."""

from ._core import (
    AngleSpec,
    BarabanovError,
    CertificationError,
    ConfigError,
    DegenerateInputError,
    GaugeApprox,
    MatrixSet,
    NotInPerturbationSetError,
    PolygonNorm,
    ReducibleInputError,
    SemigroupSample,
    __version__,
    detect_rotation_subgroup,
    eigen_frame,
    example1,
    example2_truncation,
    extremal_sequence,
    irreducibility,
    jsr_bounds,
    kappa_family,
    make_rotation,
    norm_distance,
    perturbation_pair,
    polygon_from_gauge,
    projection_family,
    residual,
    run_config,
    sample_limit_semigroup,
    transitivity_check,
    uniqueness_verdict,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
