# Tests package for the camcurate trajectory curation toolkit
