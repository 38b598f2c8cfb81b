from setuptools import setup, find_packages

__version__ = "0.1.0"

# Read requirements.txt and store contents in a list
with open("./requirements.txt") as f:
    required = f.read().splitlines()

setup(
    name="sqw",
    version=__version__,
    packages=find_packages(exclude=["tests", "tests.*"]),
    description="Structured matter waves in a uniform linear potential.",
    # Add the Typer CLI as an entry point
    entry_points={
        "console_scripts": [
            "sqw=sqw.main:typer_app",
        ],
    },
    install_requires=required,
    extras_require={"test": ["pytest", "mpmath", "sympy"]},
    classifiers=[
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],
)

__all__ = ["__version__"]
