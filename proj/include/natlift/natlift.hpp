#pragma once

#include "natlift/bundle.hpp"
#include "natlift/coefficients.hpp"
#include "natlift/connection.hpp"
#include "natlift/curvature.hpp"
#include "natlift/errors.hpp"
#include "natlift/family_spec.hpp"
#include "natlift/fd_geometry.hpp"
#include "natlift/harness.hpp"
#include "natlift/index_array.hpp"
#include "natlift/jet.hpp"
#include "natlift/space_form.hpp"
