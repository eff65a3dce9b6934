"""Counter machines and the SN P to counter machine translation."""
