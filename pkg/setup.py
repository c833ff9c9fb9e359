"""
Setup script for prnu_gate.
"""

from setuptools import setup

setup(
    name="prnu_gate",
    version="0.1.0",
    description="PRNU camera fingerprinting and meeting-admission gateway",
    packages=[
        "src",
        "src.authd",
        "src.cli",
        "src.clients",
        "src.frames",
        "src.prnu",
        "src.sim",
        "src.utils",
    ],
    include_package_data=True,
    install_requires=[
        "click>=8.2",
        "colorama>=0.4.4",
        "rich>=10.0.0",
        "numpy>=1.24",
        "scipy>=1.10",
        "PyWavelets>=1.4",
        "crcmod>=1.7",
        "cryptography>=41.0",
        "fastapi>=0.100",
        "pydantic>=2.0",
        "uvicorn>=0.23",
        "httpx>=0.24",
        "Pillow>=10.0",
    ],
    extras_require={
        "test": ["pytest>=7.0"],
    },
    entry_points={
        "console_scripts": [
            "prnu_gate=src.cli.main:main",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Security",
        "Topic :: Scientific/Engineering :: Image Processing",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.11",
    ],
    python_requires=">=3.10",
)
