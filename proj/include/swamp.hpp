#pragma once

// Exact DTW motif discovery: umbrella header.

#include "swamp/core.hpp"
#include "swamp/distance.hpp"
#include "swamp/paa.hpp"
#include "swamp/mprofile.hpp"
#include "swamp/search.hpp"
#include "swamp/oracle.hpp"
#include "swamp/generate.hpp"
#include "swamp/ingest.hpp"
#include "swamp/bench.hpp"
#include "swamp/report.hpp"
