"""
Environment Configuration for EP Lab
Load this with: from dotenv import load_dotenv; load_dotenv()
"""
import os
from decimal import Decimal, InvalidOperation

# Load .env file
try:
    from dotenv import load_dotenv, find_dotenv
    # find_dotenv() searches upwards from the working directory for a .env
    load_dotenv(find_dotenv(usecwd=True))
except ImportError:
    print("⚠️  python-dotenv not installed. Install with: pip install python-dotenv")


class Config:
    """EP Lab Configuration"""

    # --- VALIDATION ---
    # Decimal string; overrides the default residual tolerance of validation cases
    VALIDATION_TOLERANCE_RAW = os.getenv("EP_LAB_TOL", "")
    DEFAULT_RESIDUAL_TOLERANCE = 1e-6
    VALIDATION_WORKERS = int(os.getenv("EP_LAB_WORKERS", "1"))

    # --- NUMERICAL ORACLES ---
    QUAD_TOLERANCE = 1e-10
    QUAD_LIMIT = 200
    IVP_RTOL = 1e-10
    IVP_ATOL = 1e-12
    IVP_METHOD = "DOP853"
    DERIVATIVE_STEP = 0.05
    # Local step: this fraction of the distance |v|/|v'| to the nearest zero, floored
    DERIVATIVE_STEP_FRACTION = 0.1
    DERIVATIVE_MIN_STEP = 1e-4

    # Guard bands: v^-3 and the radicand square root dominate floating error there
    AMPLITUDE_GUARD = 1e-3
    RADICAND_GUARD = 1e-6

    # --- SPECIAL FUNCTIONS ---
    HYP2F1_MAX_TERMS = 100_000
    HYP2F1_STALL_RUN = 3

    # --- OUTPUT ---
    OUTPUT_DIR = os.getenv("EP_LAB_OUTPUT_DIR", "figures")
    LOG_LEVEL = os.getenv("EP_LAB_LOG_LEVEL", "WARNING").upper()
    CSV_DIGITS = 17

    @classmethod
    def validation_tolerance(cls) -> float:
        """Residual tolerance for validation cases that use the default."""
        raw = cls.VALIDATION_TOLERANCE_RAW.strip()
        if not raw:
            return cls.DEFAULT_RESIDUAL_TOLERANCE
        try:
            value = Decimal(raw)
        except InvalidOperation:
            raise ValueError(f"EP_LAB_TOL is not a decimal number: {raw!r}")
        if not value.is_finite() or value <= 0:
            raise ValueError(f"EP_LAB_TOL must be a positive finite number: {raw!r}")
        return float(value)

    @classmethod
    def validate(cls):
        """Validate that the configuration is usable"""
        errors = []

        try:
            cls.validation_tolerance()
        except ValueError as exc:
            errors.append(str(exc))

        if cls.VALIDATION_WORKERS < 1:
            errors.append("EP_LAB_WORKERS must be at least 1")

        if cls.LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            errors.append(f"EP_LAB_LOG_LEVEL is not a logging level: {cls.LOG_LEVEL}")

        for name in ("QUAD_TOLERANCE", "IVP_RTOL", "IVP_ATOL", "AMPLITUDE_GUARD", "RADICAND_GUARD"):
            if getattr(cls, name) <= 0:
                errors.append(f"{name} must be positive")

        if errors:
            raise ValueError(f"Configuration errors: {', '.join(errors)}")

        return True

    @classmethod
    def print_status(cls):
        """Print current configuration status"""
        from rich.console import Console
        from rich.table import Table
        from rich import box

        table = Table(title="EP LAB CONFIGURATION", box=box.ROUNDED)
        table.add_column("Setting", style="cyan")
        table.add_column("Value", style="green")
        try:
            tolerance = f"{cls.validation_tolerance():g}"
        except ValueError as exc:
            tolerance = f"[red]{exc}[/red]"
        table.add_row("Validation tolerance", tolerance)
        table.add_row("Validation workers", str(cls.VALIDATION_WORKERS))
        table.add_row("Quadrature tolerance", f"{cls.QUAD_TOLERANCE:g}")
        table.add_row("IVP method", cls.IVP_METHOD)
        table.add_row("IVP rtol / atol", f"{cls.IVP_RTOL:g} / {cls.IVP_ATOL:g}")
        table.add_row("Amplitude guard", f"{cls.AMPLITUDE_GUARD:g}")
        table.add_row("Radicand guard", f"{cls.RADICAND_GUARD:g}")
        table.add_row("Output directory", cls.OUTPUT_DIR)
        table.add_row("Log level", cls.LOG_LEVEL)
        Console().print(table)


if __name__ == "__main__":
    Config.validate()
    Config.print_status()
