#ifndef AMAT_FIELDS_H
#define AMAT_FIELDS_H

#include <vector>

#include "geometry.h"

namespace amat {

// P1 nodal fields: one entry per mesh vertex.
using ScalarField = std::vector<double>;
using VectorField = std::vector<Vec2>;
using TensorField = std::vector<Sym2>;

}  // namespace amat

#endif
