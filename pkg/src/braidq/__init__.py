"""q-calculus on braided covector and vector algebras."""
