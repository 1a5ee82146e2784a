"""Setup"""

import setuptools

with open("README.md", encoding="utf-8") as fh:
    long_description = fh.read()

setuptools.setup(
    name="cdrpinn",
    version="0.1.0",
    license="MIT",
    description="Curriculum-regularized PINNs for singularly perturbed convection-diffusion-reaction problems",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests", "examples", "examples.*"]),
    include_package_data=True,
    keywords=["pinn", "pde", "curriculum learning", "boundary layer"],
    classifiers=[
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Operating System :: OS Independent",
    ],
    install_requires=["numpy", "matplotlib", "cycler", "pandas"],
    extras_require={"test": ["pytest"], "docs": ["pdoc3"]},
    python_requires=">=3.8",
    entry_points={
        "console_scripts": ["cdrpinn=cdrpinn.__main__:main"],
    },
)
