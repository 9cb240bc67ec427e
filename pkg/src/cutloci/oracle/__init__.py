"""Reference distances: analytic sphere geodesics and Steiner graph shortest paths."""
