import os
import re
import setuptools

NAME             = "semireal"
AUTHOR           = "semireal developers"
AUTHOR_EMAIL     = ""
DESCRIPTION      = "Exact-rational toolkit for lower semicomputable reals, Solovay reductions, covers and prediction games."
LICENSE          = "MIT"
KEYWORDS         = "computability randomness solovay-reducibility left-c.e."
URL              = "https://github.com/semireal/" + NAME
README           = ".github/README.md"
CLASSIFIERS      = [
  "Programming Language :: Python",
  "Topic :: Scientific/Engineering :: Mathematics",
]
INSTALL_REQUIRES = [
  "numpy",
  "pandas",
  "jsonschema",
  "pytest",
  "coverage",
]
ENTRY_POINTS = {
  "console_scripts": [
    "semireal=semireal.cli:main",
  ],
}
SCRIPTS = [
  
]
PACKAGE_DATA = {
  "semireal": ["data/*/*.txt", "schemas/*.json"],
}

HERE = os.path.dirname(__file__)

def read(file):
  with open(os.path.join(HERE, file), "r") as fh:
    return fh.read()

VERSION = re.search(
  r'__version__ = [\'"]([^\'"]*)[\'"]',
  read(NAME.replace("-", "_") + "/__init__.py")
).group(1)

LONG_DESCRIPTION = read(README)

if __name__ == "__main__":
  setuptools.setup(
    name=NAME,
    version=VERSION,
    packages=setuptools.find_packages(exclude=["tests", "docs", "examples"]),
    author=AUTHOR,
    description=DESCRIPTION,
    long_description=LONG_DESCRIPTION,
    long_description_content_type="text/markdown",
    license=LICENSE,
    keywords=KEYWORDS,
    url=URL,
    classifiers=CLASSIFIERS,
    install_requires=INSTALL_REQUIRES,
    entry_points=ENTRY_POINTS,
    scripts=SCRIPTS,
    package_data=PACKAGE_DATA,
    include_package_data=True    
  )
