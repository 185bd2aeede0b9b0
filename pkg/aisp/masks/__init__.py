"""Binary masks, exact distance transforms and picking points."""
