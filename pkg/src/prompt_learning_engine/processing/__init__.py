# Candidate vocabulary construction
