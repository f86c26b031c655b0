"""Suite de tests de fockregions."""
