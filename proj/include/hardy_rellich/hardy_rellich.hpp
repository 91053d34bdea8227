#pragma once

#include "hardy_rellich/cap_solver.hpp"
#include "hardy_rellich/constants.hpp"
#include "hardy_rellich/dirichlet.hpp"
#include "hardy_rellich/domain.hpp"
#include "hardy_rellich/error.hpp"
#include "hardy_rellich/profiles.hpp"
#include "hardy_rellich/quadrature.hpp"
#include "hardy_rellich/scalar.hpp"
#include "hardy_rellich/selection.hpp"
#include "hardy_rellich/sharpness.hpp"
#include "hardy_rellich/spectra.hpp"
#include "hardy_rellich/verifier.hpp"
