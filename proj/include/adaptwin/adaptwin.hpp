#pragma once

#include "adaptwin/binary.hpp"
#include "adaptwin/binary_scenarios.hpp"
#include "adaptwin/bound_profile.hpp"
#include "adaptwin/config.hpp"
#include "adaptwin/eigen_sym.hpp"
#include "adaptwin/experiment.hpp"
#include "adaptwin/linear.hpp"
#include "adaptwin/random.hpp"
#include "adaptwin/rotation.hpp"
#include "adaptwin/scenario.hpp"
#include "adaptwin/select.hpp"
#include "adaptwin/trust_region.hpp"
