import os
from dotenv import load_dotenv

# Load environment variables from a .env file
load_dotenv()


class Settings:
    """
    A class to manage simulator settings based on environment variables.

    Experiment parameters live in the JSON experiment config; these settings only
    control process-level behaviour such as logging and output defaults.
    """

    # Retrieve the environment type (default to 'local' if not set)
    ENVIRONMENT: str = os.getenv("ENVIRONMENT", "local")

    # Logging configuration; production runs default to warnings only
    if ENVIRONMENT == "production":
        LOG_LEVEL: str = os.getenv("LOG_LEVEL", "WARNING")
    else:
        LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FORMAT: str = os.getenv(
        "LOG_FORMAT", "%(asctime)s %(levelname)s %(name)s: %(message)s"
    )

    # Output defaults for the command line entry point
    DEFAULT_OUTPUT_DIR: str = os.getenv("DEFAULT_OUTPUT_DIR", "runs")
    DEFAULT_THREADS: int = int(os.getenv("DEFAULT_THREADS", 0))

    # Selector guards
    BRUTE_FORCE_MAX_CANDIDATES: int = int(os.getenv("BRUTE_FORCE_MAX_CANDIDATES", 20))
    RANDOM_SELECT_MAX_RETRIES: int = int(os.getenv("RANDOM_SELECT_MAX_RETRIES", 100))


# Instantiate settings
settings = Settings()
