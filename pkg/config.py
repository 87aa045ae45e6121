import os
from dotenv import load_dotenv

load_dotenv()

ENV_PREFIX = "MSOCHECK_"


def _env(name: str, default: str) -> str:
    return os.getenv(ENV_PREFIX + name, default)


def _env_int(name: str, default: int) -> int:
    return int(_env(name, str(default)))


class Settings:
    """Checker settings"""
    APP_NAME = "MSO Width Checker"
    APP_VERSION = "1.0.0"
    DEBUG = _env("DEBUG", "False") == "True"
    LOG_LEVEL = _env("LOG_LEVEL", "WARNING")

    # Formula bounds selecting the predicate family
    MAX_WIDTH = _env_int("MAX_WIDTH", 8)
    MAX_VARS = _env_int("MAX_VARS", 16)
    MAX_CONN = _env_int("MAX_CONN", 8)
    MAX_MODULUS = _env_int("MAX_MODULUS", 16)

    # Engine budgets
    DNF_BUDGET = _env_int("DNF_BUDGET", 100_000)
    CLOSURE_BUDGET = _env_int("CLOSURE_BUDGET", 50_000)
    STATE_BUDGET = _env_int("STATE_BUDGET", 20_000)

    # Desk-scale limits for exhaustive procedures
    ORACLE_SIZE_LIMIT = _env_int("ORACLE_SIZE_LIMIT", 18)
    EXACT_DECOMPOSITION_LIMIT = _env_int("EXACT_DECOMPOSITION_LIMIT", 12)
    ISOMORPHISM_LIMIT = _env_int("ISOMORPHISM_LIMIT", 12)

    # Fuzz defaults
    FUZZ_GRAPHS = _env_int("FUZZ_GRAPHS", 200)
    FUZZ_SENTENCES = _env_int("FUZZ_SENTENCES", 20)
    FUZZ_MAX_VERTICES = _env_int("FUZZ_MAX_VERTICES", 4)

    # Keys that may be overridden per invocation from the command line
    OVERRIDABLE = {
        "max_width": "MAX_WIDTH",
        "max_vars": "MAX_VARS",
        "max_conn": "MAX_CONN",
        "max_modulus": "MAX_MODULUS",
        "dnf_budget": "DNF_BUDGET",
        "oracle_size_limit": "ORACLE_SIZE_LIMIT",
    }

    def apply_overrides(self, **overrides) -> None:
        """Override settings for this process; None values are ignored"""
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in self.OVERRIDABLE:
                raise ValueError(f"Unknown setting: {key}")
            setattr(self, self.OVERRIDABLE[key], value)


settings = Settings()
