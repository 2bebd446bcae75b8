# Dataset and vocabulary file readers
