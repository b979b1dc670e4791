from .population_manager import PopulationManager
from .moment_manager import MomentManager
from .mean_family_manager import MeanFamilyManager
from .dual_ratio_product_manager import DualRatioProductManager
from .attribute_manager import AttributeManager
from .systematic_manager import SystematicManager
from .variance_manager import VarianceManager
from .oracle_manager import OracleManager
from .report_manager import ReportManager

__all__ = [
    "PopulationManager",
    "MomentManager",
    "MeanFamilyManager",
    "DualRatioProductManager",
    "AttributeManager",
    "SystematicManager",
    "VarianceManager",
    "OracleManager",
    "ReportManager",
]
