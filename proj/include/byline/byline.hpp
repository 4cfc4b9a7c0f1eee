#pragma once

// Umbrella header for the byline library.

#include "byline/aggregate.hpp"   // IWYU pragma: export
#include "byline/metrics.hpp"     // IWYU pragma: export
#include "byline/names.hpp"       // IWYU pragma: export
#include "byline/pipeline.hpp"    // IWYU pragma: export
#include "byline/records.hpp"     // IWYU pragma: export
#include "byline/synthetic.hpp"   // IWYU pragma: export
