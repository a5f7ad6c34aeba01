#pragma once

#include "netcp/errors.hpp"
#include "netcp/rng.hpp"
#include "netcp/graph_core.hpp"
#include "netcp/spectral.hpp"
#include "netcp/cusum.hpp"
#include "netcp/detect.hpp"
#include "netcp/localize.hpp"
#include "netcp/generators.hpp"
#include "netcp/graphon.hpp"
#include "netcp/harness.hpp"
