#pragma once

#include "strap/evaluate.hpp"
#include "strap/factorize.hpp"
#include "strap/graph.hpp"
#include "strap/manifest.hpp"
#include "strap/pipeline.hpp"
#include "strap/ppr.hpp"
#include "strap/proximity.hpp"
#include "strap/rng.hpp"
