# Computational steps for the WGM scattering toolkit
