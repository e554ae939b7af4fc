#pragma once

// Umbrella header for the ship identification library.

#include "shipid/actuation.hpp"
#include "shipid/azimuth_identification.hpp"
#include "shipid/dataio.hpp"
#include "shipid/error.hpp"
#include "shipid/estimation.hpp"
#include "shipid/integrator.hpp"
#include "shipid/json_io.hpp"
#include "shipid/model.hpp"
#include "shipid/nls.hpp"
#include "shipid/synthgen.hpp"
#include "shipid/validation.hpp"
#include "shipid/whole_ship.hpp"
