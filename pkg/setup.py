"""Install the eigenbound package."""

import ast
from pathlib import Path

from setuptools import find_packages, setup


def get_version(file_name: str, version_variable: str = "__version__") -> str:
    """Find the version by walking the AST to avoid importing the package.

    Parameters
    ----------
    file_name : str
        The file we are parsing to get the version string from.
    version_variable : str
        The variable name that holds the version string.

    Raises
    ------
    ValueError
        If there was no assignment to version_variable in file_name.

    Returns
    -------
    version_string : str
        The version string parsed from file_name.
    """
    with open(file_name) as f:
        tree = ast.parse(f.read())
        for node in ast.walk(tree):
            if isinstance(node, ast.Assign):
                target = node.targets[0]
                if isinstance(target, ast.Name) and target.id == version_variable:
                    return node.value.value
    raise ValueError(
        f"Could not find an assignment to {version_variable} " f"within '{file_name}'"
    )


with open(Path(__file__).parent / "README.md", encoding="utf-8") as f:
    LONG_DESCRIPTION = f.read()


setup(
    name="eigenbound",
    version=get_version("eigenbound/__init__.py"),
    description="Numerical checks of sup norm bounds for Laplace eigenfunctions via spherical means.",
    long_description=LONG_DESCRIPTION,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    include_package_data=True,
    python_requires=">=3.9",
    classifiers=[
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python",
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3 :: Only",
        "Natural Language :: English",
        "Operating System :: MacOS :: MacOS X",
        "Operating System :: Microsoft :: Windows",
        "Operating System :: POSIX :: Linux",
    ],
    keywords="eigenfunctions spectral-geometry bessel numerical-analysis",
    license="MIT",
    install_requires=[
        "numpy",
        "scipy >= 1.12",
        "numba",
        "file-or-name",
        "colorama",
        'importlib_metadata; python_version < "3.10.0"',
    ],
    extras_require={
        "test": ["pytest"],
        "docs": ["sphinx", "numpydoc"],
    },
    entry_points={
        "console_scripts": [
            "eigenbound = eigenbound.scripts.eigenbound_cli:main",
        ],
        "eigenbound.plugins.manifolds": [
            "t2 = eigenbound.manifolds.flat:FlatTorus",
            "e2 = eigenbound.manifolds.flat:EuclideanPatch",
            "s2 = eigenbound.manifolds.sphere:RoundSphere2",
            "s3 = eigenbound.manifolds.sphere:RoundSphere3",
        ],
    },
)
