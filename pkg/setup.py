"""Setup script for the estlab package."""

from pathlib import Path
from setuptools import setup, find_packages

readme_path = Path(__file__).parent / "README.md"
long_description = (
    readme_path.read_text(encoding="utf-8") if readme_path.exists() else ""
)

setup(
    name="estlab",
    version="1.0.0",
    author="Your Name",
    author_email="your.email@example.com",
    description="Survey-sampling estimator laboratory: bias/MSE expansions, optima and sampling oracles.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/yourusername/estlab",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    include_package_data=True,
    package_data={"datasets": ["*.json", "*.csv"]},
    install_requires=[
        "click",
        "rich",
        "setuptools",
        "python-dotenv",
        "numpy>=1.22",
        "pandas>=1.5",
    ],
    extras_require={
        "dev": [
            "pytest",
            "black",
            "pre-commit",
            "gitlint",
        ],
    },
    entry_points={
        "console_scripts": [
            "estlab=estlab.main:cli",
        ],
    },
    classifiers=[
        "Programming Language :: Python :: 3.9",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
)
