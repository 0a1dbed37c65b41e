
# This file is automatically generated by the setup.py script
long_description = """
Noncommutative Cells
====================
The nccell_ package parses presentations of universal C*-algebras,
proves *-polynomial identities by rewriting, and computes the index and
exponential boundary maps on Toeplitz and cone-grid operator models.

See more information in the README_.

.. _README: README.md
.. _nccell: README.md
"""
short_version = '0.1.0'
version = '0.1.0'
full_version = '0.1.0.dev0+Unknown'
git_revision = 'Unknown'
release = False
if not release:
    version = full_version
