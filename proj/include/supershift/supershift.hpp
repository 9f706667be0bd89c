#pragma once

#include "supershift/errors.hpp"
#include "supershift/special_fn.hpp"
#include "supershift/contour_quad.hpp"
#include "supershift/ode_coeff.hpp"
#include "supershift/potential.hpp"
#include "supershift/greens.hpp"
#include "supershift/initial_data.hpp"
#include "supershift/evolve.hpp"
#include "supershift/io.hpp"
#include "supershift/config.hpp"
