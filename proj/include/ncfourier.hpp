#pragma once

#include "ncfourier/core.hpp"
#include "ncfourier/quadrature.hpp"
#include "ncfourier/su2.hpp"
#include "ncfourier/torus.hpp"
#include "ncfourier/group_backend.hpp"
#include "ncfourier/fourier.hpp"
#include "ncfourier/symbols.hpp"
#include "ncfourier/differences.hpp"
#include "ncfourier/multiplier_check.hpp"
#include "ncfourier/operators_zoo.hpp"
#include "ncfourier/lp_probe.hpp"
#include "ncfourier/io.hpp"
