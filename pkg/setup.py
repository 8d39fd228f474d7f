from __future__ import annotations

from pathlib import Path
from setuptools import find_packages, setup

BASE_DIR = Path(__file__).parent
README = (BASE_DIR / "readme.md").read_text(encoding="utf-8") if (BASE_DIR / "readme.md").exists() else ""

setup(
    name="semigroup-calculus",
    version="0.1.0",
    description="Hille-Phillips and Bochner-Phillips functional calculi for matrix semigroup generators.",
    long_description=README,
    long_description_content_type="text/markdown",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    package_data={"semigroup_calculus.data": ["operators/*.csv"]},
    include_package_data=True,
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.26.0",
        "scipy>=1.11.0",
        "python-dotenv>=1.0.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.4.0",
            "hypothesis>=6.90.0",
        ]
    },
    entry_points={
        "console_scripts": [
            "semigroup-calculus=semigroup_calculus.main:main",
        ]
    },
)
