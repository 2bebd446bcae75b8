# Prompt distribution optimization
