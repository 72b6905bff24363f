"""Output formatting: manifests, CSV tables and plotting scripts."""
