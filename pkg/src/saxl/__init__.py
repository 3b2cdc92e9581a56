"""saxl: exhaustive verification of Saxl-graph structure for groups with
socle PSL(2,q) at desk scale."""

__version__ = "0.1.0"
ENGINE = f"saxl {__version__}"
