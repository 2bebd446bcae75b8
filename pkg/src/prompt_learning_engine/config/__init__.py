# Task catalogue, training defaults and YAML loading
