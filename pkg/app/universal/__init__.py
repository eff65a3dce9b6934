"""Universal SN P system for single-tape Turing machines and its input encoder."""
