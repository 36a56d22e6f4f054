"""Instance generation, file I/O, benchmarking and trace audits."""
