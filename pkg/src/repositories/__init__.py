from src.repositories.image_repository import ImageRepository
from src.repositories.run_output_repository import SUMMARY_SCHEMA, RunOutputRepository, validate_summary

__all__ = ["ImageRepository", "RunOutputRepository", "SUMMARY_SCHEMA", "validate_summary"]
