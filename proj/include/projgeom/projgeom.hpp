#ifndef PROJGEOM_PROJGEOM_HPP
#define PROJGEOM_PROJGEOM_HPP

#include "projgeom/algebra.hpp"
#include "projgeom/equivalence.hpp"
#include "projgeom/extension.hpp"
#include "projgeom/json_io.hpp"
#include "projgeom/linalg.hpp"
#include "projgeom/projection.hpp"
#include "projgeom/two_projections.hpp"

#endif  // PROJGEOM_PROJGEOM_HPP
