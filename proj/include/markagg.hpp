#pragma once

#include "markagg/aggregation.hpp"
#include "markagg/ctmc.hpp"
#include "markagg/error.hpp"
#include "markagg/info_metrics.hpp"
#include "markagg/io.hpp"
#include "markagg/markov_core.hpp"
#include "markagg/matrix.hpp"
#include "markagg/partitions.hpp"
#include "markagg/search.hpp"
