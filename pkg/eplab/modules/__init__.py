"""Solution families and the numerical oracles that certify them."""
