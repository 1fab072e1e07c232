#pragma once

#include "aisbn/adaptive.hpp"
#include "aisbn/benchmark.hpp"
#include "aisbn/engine.hpp"
#include "aisbn/generator.hpp"
#include "aisbn/io.hpp"
#include "aisbn/network.hpp"
#include "aisbn/numeric.hpp"
#include "aisbn/oracle.hpp"
#include "aisbn/report.hpp"
#include "aisbn/rng.hpp"
#include "aisbn/sampler.hpp"
#include "aisbn/stopping.hpp"
