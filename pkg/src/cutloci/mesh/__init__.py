"""Surface meshes, analytic surfaces, generators and mesh file I/O."""
