"""anflo: anomaly detection for sensitive information flows in app bundles.

The pipeline learns, from a corpus of trusted apps, which flows from
sensitive sources (GPS, contacts, ...) to sensitive sinks (Internet, SMS,
...) are common for apps with a given kind of description, and flags
bundles whose flows are uncommon for their group.

Modules:
    corpus      bundle file format, API catalog, corpus filtering
    textproc    tokenizing, language check, stopwords, lemmas, stemming
    topics      seeded LDA with collapsed Gibbs sampling
    taintir     mini program IR and static taint analysis
    flowmodel   per-group flow matrices and the rarity threshold
    classifier  learning and classification phases
    cli         the anflo command line tool
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
