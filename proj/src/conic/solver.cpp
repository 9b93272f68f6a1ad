#include "drrbdo/conic/solver.hpp"

namespace drrbdo::conic {

template class ConeSolver<double>;

}  // namespace drrbdo::conic
