# Oracle clients and scoring
