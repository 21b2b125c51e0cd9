#ifndef SEMIRANDOM_SEMIRANDOM_HPP
#define SEMIRANDOM_SEMIRANDOM_HPP

#include "semirandom/bounds.hpp"
#include "semirandom/classifier.hpp"
#include "semirandom/errors.hpp"
#include "semirandom/geometry.hpp"
#include "semirandom/harness.hpp"
#include "semirandom/io.hpp"
#include "semirandom/perturb.hpp"
#include "semirandom/rng.hpp"
#include "semirandom/subspace.hpp"

#endif  // SEMIRANDOM_SEMIRANDOM_HPP
