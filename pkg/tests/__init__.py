# Tests package for mdivw
