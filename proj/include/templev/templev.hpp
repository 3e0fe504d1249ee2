// Umbrella header.
#pragma once

#include "templev/common.hpp"
#include "templev/quadrature.hpp"
#include "templev/rng.hpp"
#include "templev/model.hpp"
#include "templev/charfn.hpp"
#include "templev/density.hpp"
#include "templev/grid_io.hpp"
#include "templev/ks.hpp"
#include "templev/sampler.hpp"
#include "templev/stats.hpp"
#include "templev/model_json.hpp"
