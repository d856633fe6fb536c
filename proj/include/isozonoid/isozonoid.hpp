#pragma once

#include "isozonoid/core.hpp"
#include "isozonoid/special.hpp"
#include "isozonoid/linalg.hpp"
#include "isozonoid/polytope.hpp"
#include "isozonoid/optimize.hpp"
#include "isozonoid/transport_lp.hpp"
#include "isozonoid/sphere_measures.hpp"
#include "isozonoid/zonoid_bodies.hpp"
#include "isozonoid/transport_maps.hpp"
#include "isozonoid/ball_barthe.hpp"
#include "isozonoid/metrics.hpp"
#include "isozonoid/john_geometry.hpp"
#include "isozonoid/parallel.hpp"
#include "isozonoid/stability_harness.hpp"
