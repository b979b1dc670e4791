from utils.errors import DomainError


def pre(mse_baseline: float, mse: float) -> float:
    """Percent relative efficiency 100 * baseline / mse."""
    if not mse > 0:
        raise DomainError(f"PRE needs a positive MSE, got {mse}")
    return 100.0 * mse_baseline / mse
