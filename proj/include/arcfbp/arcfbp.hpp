#pragma once

#include "arcfbp/core.hpp"
#include "arcfbp/filtering.hpp"
#include "arcfbp/geometry.hpp"
#include "arcfbp/image.hpp"
#include "arcfbp/io.hpp"
#include "arcfbp/metrics.hpp"
#include "arcfbp/parallel.hpp"
#include "arcfbp/phantom.hpp"
#include "arcfbp/projector.hpp"
#include "arcfbp/recon.hpp"
#include "arcfbp/weighting.hpp"
