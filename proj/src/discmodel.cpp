#include "reeblab/discmodel.hpp"

// The disc model is header-only; this TU anchors the target.
namespace reeblab {}
