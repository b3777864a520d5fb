# Test package for remix_originality
