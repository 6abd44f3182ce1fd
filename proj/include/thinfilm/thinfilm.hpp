/**
 * @file thinfilm.hpp
 * @brief Umbrella header for the solver library (I/O excluded).
 */
#pragma once

#include "core.hpp"
#include "entropy.hpp"
#include "interactions.hpp"
#include "limits.hpp"
#include "numerics.hpp"
#include "parallel.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "riemann.hpp"
