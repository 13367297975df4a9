"""Expression AST, offline oracle, online monitor, and trace construction."""
