#pragma once

#include "shipmob/ais/codec.hpp"
#include "shipmob/density.hpp"
#include "shipmob/fleet.hpp"
#include "shipmob/geo.hpp"
#include "shipmob/io.hpp"
#include "shipmob/metrics.hpp"
#include "shipmob/pipeline.hpp"
#include "shipmob/ports.hpp"
#include "shipmob/simulate.hpp"
#include "shipmob/time.hpp"
#include "shipmob/tracks.hpp"
