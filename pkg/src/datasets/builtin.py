"""Builtin populations and the published tables they reproduce.

Every constant carries a citation. Values that were back-solved rather than
read are listed under ``calibrated``.
"""

from pathlib import Path
from typing import Dict, Mapping

from models.report_model import DatasetDescriptor
from utils.errors import UnknownIdentifierError

DATA_DIR = Path(__file__).parent
POP2_CSV = DATA_DIR / "ch4_pop2.csv"

_MURTHY_FOREST = "Murthy (1967), pp. 131-132: blocks of the Blacks Mountain forest"
_PAKISTAN_RICE = "Government of Pakistan (2004): rice production in 73 districts"
_ALIGARH = "Uttar Pradesh District Census Handbook (1981), Aligarh: villages of Koil"
_SINGH_1969 = "Singh (1969), p. 377: females employed, in service and educated"
_JOHNSTON = "Johnston (1972), p. 171: hives, January temperature, flowering date"
_MURTHY_67 = "Murthy (1967): standardized moments of y, x and z"


def _cite(source: str, payload: Mapping[str, object]) -> Dict[str, str]:
    return {key: source for key in payload}


_CH1 = {
    "N": 176,
    "n": 16,
    "mean_y": 282.6136,
    "mean_x": 6.9943,
    "s2_y": 24114.6700,
    "s2_x": 8.7600,
    "rho": 0.8710,
    "s2_y2": 18086.0025,
    "big_l": 2.0,
    "rho_y": -0.02095,
    "rho_x": -0.02095,
}

_CH2 = {
    "N": 73,
    "mean_y": 61.3,
    "p1": 0.4247,
    "p2": 0.3425,
    "var_y": 12371.4,
    "var_phi1": 0.225490,
    "var_phi2": 0.228311,
    "rho_pb1": 0.621,
    "rho_pb2": 0.673,
    "rho_phi": 0.889,
}

_CH3 = {
    "N": 340,
    "n": 70,
    "n_prime": 120,
    "mean_y": 73.76765,
    "mean_x": 2419.04,
    "C02": 0.7614,
    "C11": 0.2667,
    "C03": 2.6942,
    "C12": 0.0747,
    "C21": 0.1589,
    "C30": 0.7877,
    "C13": 0.1321,
    "C31": 0.8851,
    "C04": 17.4275,
    "C22": 0.8424,
    "C40": 1.3051,
}

_CH4_POP1 = {
    "N": 61,
    "n": 20,
    "mean_y": 7.46,
    "mean_x": 5.31,
    "mean_z": 179.0,
    "var_y": 28.0818,
    "var_x": 16.1761,
    "var_z": 2028.1953,
    "rho_yx": 0.7737,
    "rho_yz": -0.2070,
    "rho_zx": -0.0033,
}

_CH4_POP2 = {
    "N": 10,
    "n": 4,
    "mean_y": 52.0,
    "mean_x": 42.0,
    "mean_z": 200.0,
    "var_y": 65.9776,
    "var_x": 29.9880,
    "var_z": 84.0,
    "rho_yx": 0.8,
    "rho_yz": -0.94,
    "rho_zx": -0.7333,
    "csv": str(POP2_CSV),
}

_CH5 = {
    "d400": 3.726,
    "d040": 2.912,
    "d004": 2.808,
    "d022": 2.73,
    "d202": 2.979,
    "d220": 3.105,
    "cv_x": 0.5938,
    "cv_y": 0.7531,
    "cv_z": 0.7205,
    "rho_yz": 0.904,
    "rho_yx": 0.98,
    "n": 7,
    "n_prime": 15,
    "mean_x": 747.5882,
    "mean_y": 199.4412,
    "mean_z": 208.8824,
}

DATASETS: Dict[str, DatasetDescriptor] = {
    "ch1-murthy": DatasetDescriptor(
        id="ch1-murthy",
        description="Timber volume and strip length; systematic samples of 16 with non-response",
        payload=_CH1,
        citations={
            **_cite(_MURTHY_FOREST, _CH1),
            "rho_y": "back-solved from the published variance of ybar* at W2 = 0.1, L = 2",
            "rho_x": "set equal to rho_y (reported approximately equal for this population)",
        },
        notes={
            "s2_y2": "taken as 3/4 of S_Y^2",
            "rho_y": "intraclass correlations are not printed; calibrated value",
        },
        calibrated=("rho_y", "rho_x"),
    ),
    "ch2-pakrice": DatasetDescriptor(
        id="ch2-pakrice",
        description="Rice production with two farm-size attributes",
        payload=_CH2,
        citations=_cite(_PAKISTAN_RICE, _CH2),
        notes={"N": "sample size n is not published; sweeps choose it where it matters"},
    ),
    "ch3-aligarh": DatasetDescriptor(
        id="ch3-aligarh",
        description="Agricultural labourers against village area",
        payload=_CH3,
        citations=_cite(_ALIGARH, _CH3),
        notes={
            "C12": "first of two values printed as C12",
            "C21": "second value printed as C12, read as C21",
            "mean_x": "C20 is not published; reproduction back-solves it",
        },
    ),
    "ch4-pop1": DatasetDescriptor(
        id="ch4-pop1",
        description="Population I: employment of females",
        payload=_CH4_POP1,
        citations=_cite(_SINGH_1969, _CH4_POP1),
    ),
    "ch4-pop2": DatasetDescriptor(
        id="ch4-pop2",
        description="Population II: ten raw records of y, x and z",
        payload=_CH4_POP2,
        citations={**_cite(_JOHNSTON, _CH4_POP2), "rho_zx": "computed from the raw records"},
        notes={
            "rho_zx": "printed as -0.073; the raw records give -0.7333",
            "var_z": "printed as 84; the raw records give 83.33",
        },
    ),
    "ch5-murthy67": DatasetDescriptor(
        id="ch5-murthy67",
        description="Fourth-order standardized moments for variance estimation",
        payload=_CH5,
        citations=_cite(_MURTHY_67, _CH5),
        notes={"d004": "printed as d_044; read as d_004"},
    ),
}

PUBLISHED_TABLES: Dict[str, Dict[str, object]] = {
    "ch1-table1": {
        "w2": (0.1, 0.2, 0.3, 0.4),
        "rows": {
            "alpha=1": (371.37, 484.41, 597.45, 710.48),
            "alpha=2": (1908.81, 2021.85, 2134.89, 2247.93),
            "alpha=3": (1063.22, 1176.26, 1289.30, 1402.33),
            "alpha=4": (1140.69, 1253.13, 1366.17, 1479.205),
            "alpha=opt": (270.67, 383.71, 496.75, 609.78),
        },
        "increment": 113.0375,
    },
    "ch2-table4.1": {
        "t1": 162.7652,
        "t2": 48.7874,
        "t3": 131.5899,
        "t4": 60.2812,
        "t5": 165.8780,
        "t6": 197.7008,
        "t7": 183.2372,
    },
    "ch3-table6.1": {
        "mse1": 39.217225,
        "bias1": {"t1": 0.0044915, "t2": 0.0, "t3": -0.04922, "t4": 0.2809243, "t5": -0.027679},
        "bias2": {"t1": 0.004424, "t2": -0.00036, "t3": -0.04935, "t4": -0.60428, "t5": -0.04911},
        "mse2": {"t1": 39.45222, "t2": 39.33552, "t3": 39.29102, "t4": 39.44855, "t5": 39.27187},
    },
    "ch4-table2": {
        "pop1": {"R": 205, "P": 102, "S": 214, "R*": 215, "P*": 105, "SE": 236, "ST": 250, "PR": 279},
        "pop2": {"R": 277, "P": 187, "S": 395, "R*": 239, "P*": 150, "SE": 402, "ST": 278, "PR": 457},
    },
    "ch5-table5.1": {
        "t1": 636.9158,
        "t2": 248.0436,
        "t3": 52.86019,
        "t4": 699.2526,
        "t5": 667.2895,
        "t6": 486.9362,
        "t7": 699.5512,
    },
    "ch5-table5.2": {
        "t2'": 142.60,
        "t3'": 66.42,
        "t4'": 460.75,
        "t5'": 182.95,
        "t6'": 158.93,
        "t7'": 568.75,
    },
}


def builtin_dataset(dataset_id: str) -> DatasetDescriptor:
    try:
        return DATASETS[dataset_id]
    except KeyError:
        known = ", ".join(sorted(DATASETS))
        raise UnknownIdentifierError(f"unknown dataset '{dataset_id}' (known: {known})") from None
