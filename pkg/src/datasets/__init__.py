from .builtin import DATASETS, PUBLISHED_TABLES, builtin_dataset

__all__ = ["DATASETS", "PUBLISHED_TABLES", "builtin_dataset"]
