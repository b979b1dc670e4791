from .population_model import (
    AttributeSummary,
    DesignCoefficients,
    Divisor,
    FinitePopulation,
    SummaryStats,
)
from .moment_model import (
    ExpansionMoments,
    MomentSource,
    MomentTable,
    PartialMomentTable,
    StratifiedPopulation,
    Stratum,
)
from .mean_family_model import ExpansionMode, FamilyOptimum, MeanEstimator, MeanFamilyParams
from .dual_model import DualPRParams, EfficiencyCondition, QuadraticSummary, SampleMeans
from .attribute_model import (
    AttributeOptima,
    AttributeParams,
    FormulaVariant,
    OptimaMode,
    SampleSizeFit,
)
from .systematic_model import (
    AlphaOptimum,
    FactorTypeParams,
    NonResponseSpec,
    SystematicSummary,
)
from .variance_model import (
    ProductSign,
    QuadraticCoeffs,
    VarianceFamilyParams,
    VarianceOptima,
    VarianceOptimaMode,
)
from .oracle_model import (
    DesignKind,
    DesignSpec,
    Draw,
    HansenHurwitzDraw,
    IdentityCheck,
    NonResponseDesign,
    SimulationResult,
)
from .report_model import (
    CellTolerance,
    DatasetDescriptor,
    EstimatorReport,
    ReproductionReport,
    ReproductionRow,
    ReproductionStatus,
    ToleranceClass,
)

__all__ = [
    "AttributeSummary",
    "DesignCoefficients",
    "Divisor",
    "FinitePopulation",
    "SummaryStats",
    "ExpansionMoments",
    "MomentSource",
    "MomentTable",
    "PartialMomentTable",
    "StratifiedPopulation",
    "Stratum",
    "ExpansionMode",
    "FamilyOptimum",
    "MeanEstimator",
    "MeanFamilyParams",
    "DualPRParams",
    "EfficiencyCondition",
    "QuadraticSummary",
    "SampleMeans",
    "AttributeOptima",
    "AttributeParams",
    "FormulaVariant",
    "OptimaMode",
    "SampleSizeFit",
    "AlphaOptimum",
    "FactorTypeParams",
    "NonResponseSpec",
    "SystematicSummary",
    "ProductSign",
    "QuadraticCoeffs",
    "VarianceFamilyParams",
    "VarianceOptima",
    "VarianceOptimaMode",
    "DesignKind",
    "DesignSpec",
    "Draw",
    "HansenHurwitzDraw",
    "IdentityCheck",
    "NonResponseDesign",
    "SimulationResult",
    "CellTolerance",
    "DatasetDescriptor",
    "EstimatorReport",
    "ReproductionReport",
    "ReproductionRow",
    "ReproductionStatus",
    "ToleranceClass",
]
