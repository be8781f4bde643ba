#pragma once

#include <cstddef>

namespace popre {

// Dimension cap shared by channel matrices, LPs and string types.
// Defaults to 128; the POPRE_MAX_N environment variable (read once at
// startup) or set_max_dimension() overrides it.
int max_dimension();
void set_max_dimension(int n);

}  // namespace popre
