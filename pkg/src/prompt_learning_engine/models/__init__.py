# Prompts, vocabularies, examples and run configuration
