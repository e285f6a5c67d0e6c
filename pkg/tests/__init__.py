# Test package for simple-dimred
