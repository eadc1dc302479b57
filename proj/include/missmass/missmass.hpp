#pragma once
// Umbrella header.
#include "missmass/bounds.hpp"
#include "missmass/clopper_pearson.hpp"
#include "missmass/dist_spec.hpp"
#include "missmass/distribution.hpp"
#include "missmass/errors.hpp"
#include "missmass/json_io.hpp"
#include "missmass/lambert.hpp"
#include "missmass/missing_mass.hpp"
#include "missmass/na_checks.hpp"
#include "missmass/rng.hpp"
#include "missmass/threshold.hpp"
#include "missmass/tilt_entropy.hpp"
