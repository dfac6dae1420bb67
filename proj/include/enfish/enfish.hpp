#pragma once

// Umbrella header for the fisheries-enforcement economics library.

#include "enfish/compliance.hpp"
#include "enfish/dynamics.hpp"
#include "enfish/errors.hpp"
#include "enfish/firm.hpp"
#include "enfish/fleet.hpp"
#include "enfish/model.hpp"
#include "enfish/numeric.hpp"
#include "enfish/policy.hpp"
#include "enfish/scenario_io.hpp"
