#pragma once

namespace morphtag {

// Training and inference run in 32-bit floats. The wide (double) variant of
// the core library exists only for finite-difference gradient checking and is
// selected by compiling with MORPHTAG_REAL_DOUBLE.
#ifdef MORPHTAG_REAL_DOUBLE
using Real = double;
#else
using Real = float;
#endif

}  // namespace morphtag
