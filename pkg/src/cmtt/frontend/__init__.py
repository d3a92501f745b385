"""Surface language: lexer, parser, printer, resolver and driver."""
