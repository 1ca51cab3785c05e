#pragma once

#include "onlinematch/analysis.hpp"
#include "onlinematch/instance.hpp"
#include "onlinematch/market.hpp"
#include "onlinematch/matchers.hpp"
#include "onlinematch/report.hpp"
#include "onlinematch/rng.hpp"
#include "onlinematch/stats.hpp"
