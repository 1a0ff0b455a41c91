import pytest

from frogz.sequences import (
    ConstantForm,
    LogInverse,
    PowerLaw,
    SequenceSpec,
    SparseOverride,
    single,
)


@pytest.fixture
def inv_square_spec():
    """q_n = 1/(n+1)^2 — summable at M=1, closed-form survival products."""
    return single(PowerLaw(c=1, alpha=2, offset=1))


@pytest.fixture
def sqrt_spec():
    """q_n = 1/sqrt(n+1) — summability index 3."""
    return single(PowerLaw(c=1, alpha=0.5, offset=1))


@pytest.fixture
def log_spec():
    """q_n = 1/log(n+2) — infinite summability index, nonincreasing."""
    return single(LogInverse(c=1, offset=2))


@pytest.fixture
def mod2_spec():
    """Alternating power/log classes: the L0=2, L1=4 interleave."""
    return SequenceSpec(
        modulus=2,
        residue_forms=(PowerLaw(c=1, alpha=1, offset=1), LogInverse(c=1, offset=2)),
    )


@pytest.fixture
def dyadic_spec():
    """Log-inverse background with a summable power family on {2^j}."""
    return SequenceSpec(
        modulus=1,
        residue_forms=(LogInverse(c=1, offset=2),),
        overrides=(SparseOverride(a=1, b=2, form=PowerLaw(c=1, alpha=1, offset=1)),),
    )


def mod3_spec(alpha, offset=1):
    """Every third index decays as a power law, the rest log-inverse."""
    return SequenceSpec(
        modulus=3,
        residue_forms=(
            PowerLaw(c=1, alpha=alpha, offset=offset),
            LogInverse(c=1, offset=2),
            LogInverse(c=1, offset=2),
        ),
    )


def mod3_two_power_spec(alpha, beta):
    """Residues 0 and 1 decay at alpha < 1, residue 2 at beta > 1."""
    return SequenceSpec(
        modulus=3,
        residue_forms=(
            PowerLaw(c=1, alpha=alpha, offset=1),
            PowerLaw(c=1, alpha=alpha, offset=1),
            PowerLaw(c=1, alpha=beta, offset=1),
        ),
    )


@pytest.fixture
def const_spec():
    return single(ConstantForm(q=0.5))
