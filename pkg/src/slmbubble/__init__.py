"""Asset-bubble detection from price series."""
